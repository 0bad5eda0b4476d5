"""

Copyright (c) 2026 cavityqed-tavis developers

Permission is hereby granted, free of charge, to any person obtaining a copy
of this software and associated documentation files (the "Software"), to deal
in the Software without restriction, including without limitation the rights
to use, copy, modify, merge, publish, distribute, sublicense, and/or sell
copies of the Software, and to permit persons to whom the Software is
furnished to do so, subject to the following conditions:

The above copyright notice and this permission notice shall be included in
all copies or substantial portions of the Software.

THE SOFTWARE IS PROVIDED "AS IS", WITHOUT WARRANTY OF ANY KIND, EXPRESS OR
IMPLIED, INCLUDING BUT NOT LIMITED TO THE WARRANTIES OF MERCHANTABILITY
FITNESS FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN NO EVENT SHALL THE
AUTHORS OR COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM, DAMAGES OR OTHER
LIABILITY, WHETHER IN AN ACTION OF CONTRACT, TORT OR OTHERWISE, ARISING FROM,
OUT OF OR IN CONNECTION WITH THE SOFTWARE OR THE USE OR OTHER DEALINGS IN
THE SOFTWARE.

"""

from collections import namedtuple
import numbers

import numpy as np
from scipy import sparse

from .fock import KetVector, OperatorMatrix


class SpinSector(namedtuple("SpinSector", ["n_atoms"])):
    """Symmetric Dicke sector j = N/2, basis ordered m = -j .. j"""
    def __new__(cls, n_atoms):
        if isinstance(n_atoms, bool) or not isinstance(n_atoms, numbers.Integral):
            raise ValueError("Atom count must be an integer")
        if n_atoms < 1:
            raise ValueError("Atom count out of range")
        return super().__new__(cls, int(n_atoms))

    @property
    def j(self):
        return self.n_atoms/2

    @property
    def dimension(self):
        return self.n_atoms+1

    @property
    def dims(self):
        return (self.dimension,)

    @property
    def factors(self):
        return (self,)

    @property
    def key(self):
        return ("spin", self.n_atoms)

    def m_values(self):
        return np.arange(self.dimension) - self.j

    def index_of(self, m):
        k = m + self.j
        if abs(k - round(k)) > 1e-9 or not 0 <= round(k) <= self.n_atoms:
            raise ValueError(f"m = {m} is not a level of {self!r}")
        return int(round(k))

    def __eq__(self, other):
        return isinstance(other, SpinSector) and self.n_atoms == other.n_atoms

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        return f"{type(self).__name__}(n_atoms={self.n_atoms})"


def build_spin_operators(sector):
    """Return (s_plus, s_minus, s_z) on the Dicke sector"""
    j = sector.j
    m = sector.m_values()
    # <m+1|S+|m>
    ladder = np.sqrt(np.maximum(j*(j+1) - m[:-1]*(m[:-1]+1), 0.0))
    s_plus = OperatorMatrix(sparse.diags(ladder.astype(complex), -1, format="csr"), sector)
    s_z = OperatorMatrix.diagonal_of(m, sector)
    return s_plus, s_plus.dag(), s_z


def dicke_state(sector, m):
    return KetVector.basis(sector, sector.index_of(m))


def ground_dicke_state(sector):
    return dicke_state(sector, -sector.j)
