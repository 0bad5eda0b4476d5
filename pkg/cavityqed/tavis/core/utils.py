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
from concurrent.futures import ThreadPoolExecutor
import math
import numbers

import numpy as np

# default absolute tolerance for floating-point comparisons
ATOL = 1e-10
# tolerance on max|M - M^dagger| for Hermitian-flagged operators
HERMITIAN_TOL = 1e-12
# resonance is |omega - delta| below this
RESONANCE_TOL = 1e-14


class ModelParams(namedtuple("ModelParams", ["omega", "delta", "g", "n_atoms"])):
    """Tavis-Cummings parameters, hbar = 1, angular-frequency units"""
    def __new__(cls, omega=1.0, delta=None, g=0.1, n_atoms=1):
        if delta is None:
            delta = omega

        if isinstance(n_atoms, bool) or not isinstance(n_atoms, numbers.Integral):
            raise ValueError("Number of atoms must be an integer")
        if not omega > 0:
            raise ValueError("Mode frequency omega out of range")
        if not delta > 0:
            raise ValueError("Atomic splitting delta out of range")
        if not g >= 0:
            raise ValueError("Coupling g out of range")
        if n_atoms < 1:
            raise ValueError("Number of atoms out of range")

        return super().__new__(cls, float(omega), float(delta), float(g), int(n_atoms))

    @classmethod
    def from_collective(cls, collective_coupling, n_atoms, omega=1.0, delta=None):
        """Build parameters holding sqrt(N) g fixed"""
        return cls(omega, delta, collective_coupling / math.sqrt(n_atoms), n_atoms)

    def _replace(self, **kwargs):
        return type(self)(**dict(self._asdict(), **kwargs))

    @property
    def resonant(self):
        return abs(self.omega - self.delta) <= RESONANCE_TOL

    @property
    def collective_coupling(self):
        return math.sqrt(self.n_atoms)*self.g

    def __repr__(self):
        return (
            f"{type(self).__name__}(omega={self.omega!r}, "
            f"delta={self.delta!r}, "
            f"g={self.g!r}, "
            f"n_atoms={self.n_atoms})"
        )


def max_abs(a):
    """Largest absolute entry of a dense or sparse array, 0 when empty"""
    if hasattr(a, "toarray"):
        if a.nnz == 0:
            return 0.0
        return float(abs(a).max())
    a = np.asarray(a)
    if a.size == 0:
        return 0.0
    return float(np.max(np.abs(a)))


def ordered_map(func, items, threads=1):
    """Map func over items, optionally on a thread pool, preserving input order"""
    items = list(items)
    if threads is None or threads <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as executor:
        return list(executor.map(func, items))
