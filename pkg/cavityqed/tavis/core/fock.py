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
import logging
import math
import numbers

import numpy as np
from scipy import sparse
from scipy.stats import poisson

from .errors import CutoffTooSmall, SpaceMismatch
from .utils import HERMITIAN_TOL, max_abs

log = logging.getLogger("cavityqed.tavis.fock")

# maximum Poisson tail mass discarded by a truncated coherent state
TAIL_TOL = 1e-10


class FockSpace(namedtuple("FockSpace", ["cutoff"])):
    """Truncated single-mode bosonic space, levels 0..cutoff"""
    def __new__(cls, cutoff):
        if isinstance(cutoff, bool) or not isinstance(cutoff, numbers.Integral):
            raise ValueError("Fock cutoff must be an integer")
        if cutoff < 1:
            raise ValueError("Fock cutoff out of range")
        return super().__new__(cls, int(cutoff))

    @classmethod
    def for_amplitude(cls, alpha):
        return cls(default_cutoff(alpha))

    @property
    def dimension(self):
        return self.cutoff+1

    @property
    def dims(self):
        return (self.dimension,)

    @property
    def factors(self):
        return (self,)

    @property
    def key(self):
        return ("fock", self.cutoff)

    def __eq__(self, other):
        return isinstance(other, FockSpace) and self.cutoff == other.cutoff

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        return f"{type(self).__name__}(cutoff={self.cutoff})"


class ProductSpace:
    """Tensor product of factor spaces, leftmost factor varies slowest"""
    def __init__(self, *spaces):
        factors = []
        for s in spaces:
            factors.extend(s.factors)
        if not factors:
            raise ValueError("Product space needs at least one factor")
        self._factors = tuple(factors)

    @property
    def factors(self):
        return self._factors

    @property
    def dims(self):
        return tuple(f.dimension for f in self._factors)

    @property
    def dimension(self):
        return math.prod(self.dims)

    @property
    def key(self):
        return tuple(f.key for f in self._factors)

    def __eq__(self, other):
        return isinstance(other, ProductSpace) and self.key == other.key

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        return f"{type(self).__name__}({', '.join(repr(f) for f in self._factors)})"


def space_key(space):
    return tuple(f.key for f in space.factors)


def check_same_space(a, b):
    if space_key(a) != space_key(b):
        raise SpaceMismatch(f"Space mismatch: {a!r} vs {b!r}")


class KetVector:
    """Complex amplitude vector over a (possibly composite) truncated basis"""
    def __init__(self, amplitudes, space):
        amps = np.array(amplitudes, dtype=complex)
        if amps.ndim != 1 or amps.shape[0] != space.dimension:
            raise ValueError(f"Amplitude vector of length {amps.size} does not match {space!r}")
        amps.flags.writeable = False
        self._amplitudes = amps
        self.space = space

    @classmethod
    def basis(cls, space, levels):
        """Basis ket from per-factor level indices"""
        if isinstance(levels, numbers.Integral):
            levels = (levels,)
        amps = np.zeros(space.dimension, dtype=complex)
        amps[np.ravel_multi_index(tuple(levels), space.dims)] = 1
        return cls(amps, space)

    @property
    def amplitudes(self):
        return self._amplitudes

    def norm(self):
        return float(np.linalg.norm(self._amplitudes))

    def normalized(self):
        return type(self)(self._amplitudes/self.norm(), self.space)

    def inner(self, other):
        """Return <self|other>"""
        check_same_space(self.space, other.space)
        return complex(np.vdot(self._amplitudes, other._amplitudes))

    def fidelity(self, other):
        return abs(self.inner(other))**2/(self.norm()**2*other.norm()**2)

    def probabilities(self):
        return np.abs(self._amplitudes)**2

    def __add__(self, other):
        check_same_space(self.space, other.space)
        return type(self)(self._amplitudes+other._amplitudes, self.space)

    def __sub__(self, other):
        check_same_space(self.space, other.space)
        return type(self)(self._amplitudes-other._amplitudes, self.space)

    def __mul__(self, scalar):
        return type(self)(self._amplitudes*scalar, self.space)

    __rmul__ = __mul__

    def __repr__(self):
        return f"{type(self).__name__}(space={self.space!r}, norm={self.norm():.15g})"


class OperatorMatrix:
    """Sparse complex matrix over a truncated basis"""
    def __init__(self, entries, space, hermitian=False):
        m = sparse.csr_array(entries, dtype=complex)
        d = space.dimension
        if m.shape != (d, d):
            raise ValueError(f"Operator shape {m.shape} does not match {space!r}")
        self._entries = m
        self.space = space
        self.hermitian = bool(hermitian)

        if self.hermitian:
            dev = self.hermitian_deviation()
            if dev > HERMITIAN_TOL*max(1.0, max_abs(m)):
                raise ValueError(f"Operator flagged Hermitian has max|M - M^dagger| = {dev:.3e}")

    @classmethod
    def identity(cls, space):
        return cls(sparse.identity(space.dimension, dtype=complex, format="csr"), space, hermitian=True)

    @classmethod
    def diagonal_of(cls, values, space):
        values = np.asarray(values)
        return cls(sparse.diags(values.astype(complex), 0, format="csr"), space,
                hermitian=bool(np.all(np.isreal(values))))

    @property
    def entries(self):
        return self._entries

    @property
    def dimension(self):
        return self._entries.shape[0]

    def dense(self):
        return self._entries.toarray()

    def diagonal(self):
        return self._entries.diagonal()

    def dag(self):
        return type(self)(self._entries.conj().T, self.space, hermitian=self.hermitian)

    def hermitian_deviation(self):
        return max_abs(self._entries - self._entries.conj().T)

    def is_diagonal(self, tol=0.0):
        off = self._entries - sparse.csr_array(sparse.diags(self._entries.diagonal(), 0))
        return max_abs(off) <= tol

    def restrict(self, indices):
        """Dense sub-block on the given basis indices"""
        idx = np.asarray(indices)
        return self._entries[idx][:, idx].toarray()

    def power(self, n):
        out = type(self).identity(self.space)
        for k in range(n):
            out = out @ self
        return type(self)(out.entries, self.space, hermitian=self.hermitian)

    def commutator(self, other):
        return self @ other - other @ self

    def apply(self, ket):
        check_same_space(self.space, ket.space)
        return KetVector(self._entries @ ket.amplitudes, ket.space)

    def __matmul__(self, other):
        if isinstance(other, KetVector):
            return self.apply(other)
        check_same_space(self.space, other.space)
        return type(self)(self._entries @ other._entries, self.space)

    def __add__(self, other):
        check_same_space(self.space, other.space)
        return type(self)(self._entries + other._entries, self.space,
                hermitian=self.hermitian and other.hermitian)

    def __sub__(self, other):
        check_same_space(self.space, other.space)
        return type(self)(self._entries - other._entries, self.space,
                hermitian=self.hermitian and other.hermitian)

    def __neg__(self):
        return type(self)(-self._entries, self.space, hermitian=self.hermitian)

    def __mul__(self, scalar):
        return type(self)(self._entries*scalar, self.space,
                hermitian=self.hermitian and complex(scalar).imag == 0)

    __rmul__ = __mul__

    def __repr__(self):
        return (
            f"{type(self).__name__}(space={self.space!r}, "
            f"nnz={self._entries.nnz}, "
            f"hermitian={self.hermitian})"
        )


def build_mode_operators(space):
    """Return (lower, raise, number) for a single mode"""
    n = np.arange(space.dimension)
    lower = OperatorMatrix(sparse.diags(np.sqrt(n[1:]).astype(complex), 1, format="csr"), space)
    number = OperatorMatrix.diagonal_of(n.astype(float), space)
    return lower, lower.dag(), number


def default_cutoff(alpha):
    a = abs(alpha)
    return int(math.ceil(a*a + 8*a + 10))


def poisson_tail(alpha, cutoff):
    """Poisson mass above cutoff for mean |alpha|^2"""
    mu = abs(alpha)**2
    if mu == 0:
        return 0.0
    return float(poisson.sf(cutoff, mu))


def required_cutoff(alpha, tol=TAIL_TOL):
    mu = abs(alpha)**2
    if mu == 0:
        return 1
    k = max(1, int(poisson.isf(tol, mu)))
    while poisson_tail(alpha, k) > tol:
        k += 1
    while k > 1 and poisson_tail(alpha, k-1) <= tol:
        k -= 1
    return k


def check_cutoff(alpha, cutoff, tol=TAIL_TOL):
    tail = poisson_tail(alpha, cutoff)
    if tail > tol:
        req = required_cutoff(alpha, tol)
        raise CutoffTooSmall(f"Cutoff {cutoff} too small for |alpha| = {abs(alpha):.6g}: "
                f"tail mass {tail:.3e} > {tol:.1e}, required cutoff {req}", req, tail)
    return tail


def coherent_amplitudes(alpha, cutoff):
    """Unnormalized truncated amplitudes exp(-|alpha|^2/2) alpha^n / sqrt(n!)"""
    amps = np.empty(cutoff+1, dtype=complex)
    amps[0] = math.exp(-abs(alpha)**2/2)
    for n in range(1, cutoff+1):
        amps[n] = amps[n-1]*alpha/math.sqrt(n)
    return amps


def truncation_loss(alpha, cutoff):
    """Norm lost by truncating the coherent amplitudes, before renormalization"""
    amps = coherent_amplitudes(alpha, cutoff)
    return 1.0 - float(np.sum(np.abs(amps)**2))


def coherent_state(alpha, space, tol=TAIL_TOL):
    check_cutoff(alpha, space.cutoff, tol)
    amps = coherent_amplitudes(alpha, space.cutoff)
    return KetVector(amps/np.linalg.norm(amps), space)


def tensor(a, b):
    if isinstance(a, KetVector) and isinstance(b, KetVector):
        return KetVector(np.kron(a.amplitudes, b.amplitudes), ProductSpace(a.space, b.space))
    if isinstance(a, OperatorMatrix) and isinstance(b, OperatorMatrix):
        return OperatorMatrix(sparse.kron(a.entries, b.entries, format="csr"),
                ProductSpace(a.space, b.space), hermitian=a.hermitian and b.hermitian)
    raise TypeError(f"Cannot tensor {type(a).__name__} with {type(b).__name__}")


def embed(op, index, space):
    """Lift an operator on factor `index` of a product space to the whole space"""
    if space_key(op.space) != (space.factors[index].key,):
        raise SpaceMismatch(f"Operator space {op.space!r} is not factor {index} of {space!r}")
    out = None
    for k, f in enumerate(space.factors):
        term = op if k == index else OperatorMatrix.identity(f)
        out = term if out is None else tensor(out, term)
    return out


def expectation(op, psi):
    check_same_space(op.space, psi.space)
    return complex(np.vdot(psi.amplitudes, op.entries @ psi.amplitudes))


def occupations(space):
    """Per-factor level index of every basis state, shape (dimension, n_factors)"""
    return np.array(np.unravel_index(np.arange(space.dimension), space.dims)).T


def fock_axes(space):
    return [k for k, f in enumerate(space.factors) if isinstance(f, FockSpace)]


def safe_indices(space, margin=2):
    """Basis states whose total Fock occupation stays margin below the smallest cutoff"""
    axes = fock_axes(space)
    if not axes:
        return np.arange(space.dimension)
    occ = occupations(space)
    threshold = min(space.factors[k].cutoff for k in axes) - margin
    return np.flatnonzero(occ[:, axes].sum(axis=1) <= threshold)


def top_fock_population(psi, levels=2):
    """Largest population held in the top `levels` levels of any Fock factor"""
    axes = fock_axes(psi.space)
    if not axes:
        return 0.0
    probs = psi.probabilities().reshape(psi.space.dims)
    worst = 0.0
    for k in axes:
        cutoff = psi.space.factors[k].cutoff
        marginal = probs.sum(axis=tuple(a for a in range(probs.ndim) if a != k))
        worst = max(worst, float(marginal[max(0, cutoff-levels+1):].sum()))
    return worst
