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
from fractions import Fraction
import logging
import math
import numbers

import numpy as np

from ..core.errors import CutoffMismatch, OffResonance, OrderNegative, ThresholdExceeded
from ..core.fock import KetVector, OperatorMatrix, ProductSpace, build_mode_operators
from ..core.fock import coherent_state, tensor, TAIL_TOL

log = logging.getLogger("cavityqed.tavis.hp")

# ratio <b^dag b>/(N/2) above which the bosonization is not trusted
HP_VALIDITY_THRESHOLD = 0.1

SAFE_MARGIN = 2


def binomial_sqrt_coefficient(n):
    """q_n in sqrt(1 - x) = 1 - sum_{n>=1} q_n x^n, as an exact fraction"""
    if isinstance(n, bool) or not isinstance(n, numbers.Integral) or n < 1:
        raise ValueError("Series order out of range")
    c = Fraction(1)
    for k in range(n):
        c *= (Fraction(1, 2) - k)/(k+1)
    return -c*(-1)**n


class TwoModeOperators(namedtuple("TwoModeOperators", ["space", "a", "b", "n_a", "n_b"])):
    """Ladder and number operators of both modes lifted to Fock_a x Fock_b"""


def two_mode_operators(fock_a, fock_b=None):
    if fock_b is None:
        fock_b = fock_a
    lower_a, raise_a, number_a = build_mode_operators(fock_a)
    lower_b, raise_b, number_b = build_mode_operators(fock_b)
    i_a = OperatorMatrix.identity(fock_a)
    i_b = OperatorMatrix.identity(fock_b)
    return TwoModeOperators(ProductSpace(fock_a, fock_b),
            tensor(lower_a, i_b), tensor(i_a, lower_b),
            tensor(number_a, i_b), tensor(i_a, number_b))


def safe_threshold(fock_a, fock_b=None):
    if fock_b is None:
        fock_b = fock_a
    return min(fock_a.cutoff, fock_b.cutoff) - SAFE_MARGIN


class HpTerm(namedtuple("HpTerm", ["order", "coefficient", "matrix"])):
    """One order of the bosonized Hamiltonian; matrix includes the coefficient"""


def hp_coefficient(n, params):
    """Prefactor of the order-n term, -q_n g / N^(n - 1/2); sqrt(N) g at n = 0"""
    if n == 0:
        return math.sqrt(params.n_atoms)*params.g
    return -float(binomial_sqrt_coefficient(n))*params.g/params.n_atoms**(n-0.5)


def hp_term(n, params, fock_a, fock_b=None):
    if isinstance(n, bool) or not isinstance(n, numbers.Integral):
        raise ValueError("Series order must be an integer")
    if n < 0:
        raise OrderNegative(f"Series order {n} is negative")
    if fock_b is None:
        fock_b = fock_a

    ops = two_mode_operators(fock_a, fock_b)
    coef = hp_coefficient(n, params)

    if n == 0:
        shift = leading_constant(params)
        free = params.omega*ops.n_a + params.delta*ops.n_b
        hop = ops.a.dag() @ ops.b
        m = free + coef*(hop + hop.dag()) + shift*OperatorMatrix.identity(ops.space)
    else:
        # a^dag (b^dag b)^n b
        lower_b, _, number_b = build_mode_operators(fock_b)
        nb_pow = number_b.power(n)
        raise_a = build_mode_operators(fock_a)[1]
        hop = tensor(raise_a, nb_pow @ lower_b)
        m = coef*(hop + hop.dag())

    return HpTerm(int(n), coef, OperatorMatrix(m.entries, ops.space, hermitian=True))


def hp_hamiltonian(order, params, fock_a, fock_b=None):
    """H_0 + H_1 + ... + H_order as one matrix"""
    if order < 0:
        raise OrderNegative(f"Series order {order} is negative")
    total = None
    for n in range(order+1):
        m = hp_term(n, params, fock_a, fock_b).matrix
        total = m if total is None else total + m
    return total


def normal_mode_operators(fock_a, fock_b=None):
    """c1 = (a + b)/sqrt(2), c2 = (a - b)/sqrt(2)"""
    if fock_b is None:
        fock_b = fock_a
    if fock_a.cutoff != fock_b.cutoff:
        raise CutoffMismatch(f"Normal modes need equal cutoffs, got {fock_a.cutoff} and {fock_b.cutoff}")
    ops = two_mode_operators(fock_a, fock_b)
    s = 1/math.sqrt(2)
    return s*(ops.a + ops.b), s*(ops.a - ops.b)


def leading_eigenvalue(n1, n2, params):
    """n1 (omega + sqrt(N) g) + n2 (omega - sqrt(N) g), constant omitted"""
    if n1 < 0 or n2 < 0:
        raise ValueError("Normal-mode occupation out of range")
    split = math.sqrt(params.n_atoms)*params.g
    return n1*(params.omega + split) + n2*(params.omega - split)


def leading_constant(params):
    return -params.n_atoms*params.delta/2


def leading_eigenstate(n1, n2, fock_a, fock_b=None):
    if fock_b is None:
        fock_b = fock_a
    if n1 < 0 or n2 < 0:
        raise ValueError("Normal-mode occupation out of range")
    limit = safe_threshold(fock_a, fock_b)
    if n1 + n2 > limit:
        raise ThresholdExceeded(f"Level ({n1}, {n2}) above truncation-safe total {limit}")

    c1, c2 = normal_mode_operators(fock_a, fock_b)
    ket = np.zeros(c1.dimension, dtype=complex)
    ket[0] = 1
    up1 = c1.dag().entries
    up2 = c2.dag().entries
    for k in range(n2):
        ket = up2 @ ket
    for k in range(n1):
        ket = up1 @ ket
    ket /= math.sqrt(math.factorial(n1)*math.factorial(n2))

    return KetVector(ket, c1.space)


class NormalModeState(namedtuple("NormalModeState", ["label_plus", "label_minus", "params"])):
    """Product of coherent states of the two normal modes"""

    def mode_labels(self):
        """Coherent labels of the a and b modes"""
        s = 1/math.sqrt(2)
        return s*(self.label_plus + self.label_minus), s*(self.label_plus - self.label_minus)

    def to_ket(self, fock_a, fock_b=None, tol=TAIL_TOL):
        if fock_b is None:
            fock_b = fock_a
        alpha_a, alpha_b = self.mode_labels()
        return tensor(coherent_state(alpha_a, fock_a, tol), coherent_state(alpha_b, fock_b, tol))


def check_resonant(params):
    if not params.resonant:
        raise OffResonance(f"Closed forms assume resonance, got omega={params.omega!r} delta={params.delta!r}")


def evolve_coherent_leading(alpha, params, t):
    check_resonant(params)
    split = math.sqrt(params.n_atoms)*params.g
    a = complex(alpha)/math.sqrt(2)
    return NormalModeState(a*np.exp(-1j*(params.omega + split)*t),
            a*np.exp(-1j*(params.omega - split)*t), params)


def mode_amplitude(alpha, params, t):
    """alpha exp(-i omega t) cos(sqrt(N) g t)"""
    check_resonant(params)
    return complex(alpha)*np.exp(-1j*params.omega*t)*math.cos(params.collective_coupling*t)


def mean_photons_leading(alpha, params, t):
    check_resonant(params)
    return abs(alpha)**2*math.cos(params.collective_coupling*t)**2


def photon_variance_leading(alpha, params, t):
    # Poissonian at leading order
    return mean_photons_leading(alpha, params, t)


def leading_b_occupation(alpha, params, t):
    check_resonant(params)
    return abs(alpha)**2*math.sin(params.collective_coupling*t)**2


def hp_validity(alpha, params):
    """Peak leading-order <b^dag b> relative to N/2"""
    ratio = abs(alpha)**2/(params.n_atoms/2)
    if ratio > HP_VALIDITY_THRESHOLD:
        log.warning("Bosonization ratio %.3g exceeds %.2g for |alpha|^2=%.6g, N=%d",
                ratio, HP_VALIDITY_THRESHOLD, abs(alpha)**2, params.n_atoms)
    return ratio


def hp_valid(alpha, params):
    return abs(alpha)**2/(params.n_atoms/2) <= HP_VALIDITY_THRESHOLD
