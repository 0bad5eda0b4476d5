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
import enum
import logging
import math

import numpy as np
from scipy.stats import poisson

from ..core.errors import DegenerateLevel, ThresholdExceeded, TruncationInsufficient
from ..core.fock import FockSpace, KetVector, coherent_amplitudes, coherent_state, tensor
from ..core.oracle import SpectralPropagator, observable_series
from ..core.series import Provenance, TimeSeries
from ..core.utils import ordered_map
from .model import check_resonant, hp_hamiltonian, hp_term, leading_eigenstate, leading_eigenvalue
from .model import normal_mode_operators, safe_threshold, two_mode_operators

log = logging.getLogger("cavityqed.tavis.perturbation")

SERIES_TOL = 1e-10
MAX_TERMS = 500
DEGENERACY_TOL = 1e-9
COUPLING_TOL = 1e-12


class CorrectedVariant(enum.Enum):
    """Readings of the first-order corrected mean photon number

    PRINTED: cos[sqrt(N) g t + (g/4 sqrt(N))(n1+n2) t], literal reading
    COS2: cos^2[sqrt(N) g t + (g/8 sqrt(N))(n1+n2) t], cos^2-consistent repair
    RS: cos^2[sqrt(N) g t - (g/4 sqrt(N))(n1+n2) t], from the first-order level shifts
    """
    PRINTED = "printed"
    COS2 = "cos2"
    RS = "rs"


class EigenstateVariant(enum.Enum):
    PRINTED = "printed"
    RS = "rs"


class DeltaVariant(enum.Enum):
    """Readings of the first-order photon-number correction

    PRINTED: literal double sum, lines drifting away from 2 sqrt(N) g and 4 sqrt(N) g
    RS: 2 Re <psi0|n|psi1> summed in closed form from the rs eigenstate coefficients
    """
    PRINTED = "printed"
    RS = "rs"


class SeriesTruncation(namedtuple("SeriesTruncation", ["n_max", "tail_bound"])):
    """Box [0, n_max]^2 for a Poisson-weighted double sum and its certified remainder"""


class SeriesResult(namedtuple("SeriesResult", ["value", "truncation"])):

    @property
    def tail_bound(self):
        return self.truncation.tail_bound

    def __float__(self):
        return float(self.value)


def poisson_weights(mu, n_max):
    n = np.arange(n_max+1)
    if mu == 0:
        return (n == 0).astype(float)
    return poisson.pmf(n, mu)


def envelope_tail(mu, n_max, degree):
    """sum_{n > n_max} w(n) (1+n)^degree"""
    if mu == 0:
        return 0.0
    n_far = n_max + 1 + int(mu + 20*math.sqrt(mu+1) + 60)
    n = np.arange(n_max+1, n_far+1)
    return float(np.sum(poisson.pmf(n, mu)*(1.0+n)**degree))


def series_truncation(mu, scale, degree, tol=SERIES_TOL, n_max=None, margin=0):
    """Smallest box whose remainder is below tol

    For a summand bounded by scale*w(n1)w(n2)(1+n1)^degree(1+n2)^degree the sum
    outside [0, n_max]^2 is at most scale*(S^2 - S_box^2), S the full envelope sum.
    A summand that pairs levels up to margin apart is bounded on the smaller box
    [0, n_max - margin]^2, since every dropped pair lies outside it.
    """
    def bound(k):
        k -= margin
        box = float(np.sum(poisson_weights(mu, k)*(1.0+np.arange(k+1))**degree))
        tail = envelope_tail(mu, k, degree)
        return scale*tail*(2*box + tail)

    if n_max is not None:
        if n_max < margin:
            raise TruncationInsufficient(f"n_max={n_max} is below the level margin {margin}", math.inf, tol)
        tail = bound(n_max)
        if tail > tol:
            raise TruncationInsufficient(f"n_max={n_max} leaves tail bound {tail:.3e} > {tol:.1e}", tail, tol)
        return SeriesTruncation(int(n_max), tail)

    for k in range(margin, MAX_TERMS):
        tail = bound(k)
        if tail <= tol:
            return SeriesTruncation(k, tail)
    raise TruncationInsufficient(f"No truncation below {MAX_TERMS} terms reaches {tol:.1e}", tail, tol)


def check_truncation(trunc, tol):
    if trunc.tail_bound > tol:
        raise TruncationInsufficient(f"Tail bound {trunc.tail_bound:.3e} exceeds {tol:.1e}",
                trunc.tail_bound, tol)


def mean_photons_truncation(alpha, tol=SERIES_TOL, n_max=None):
    # summand bounded by |alpha|^2 w(n1) w(n2)
    return series_truncation(abs(alpha)**2/2, abs(alpha)**2, 0, tol, n_max)


def delta_truncation(alpha, n_atoms, tol=SERIES_TOL, n_max=None, variant=DeltaVariant.PRINTED):
    if DeltaVariant(variant) is DeltaVariant.PRINTED:
        # bracket bounded by 18 (1+n1)^3 (1+n2)^3
        return series_truncation(abs(alpha)**2/2, 18/(8*n_atoms), 3, tol, n_max)
    # six matrix elements per level, each below (w(n) + w(p)) (1+n1)^3 (1+n2)^3 / 8N
    # with p at most two levels from n, so (1+n) <= 3 (1+p)
    return series_truncation(abs(alpha)**2/2, 6*(1 + 3**5)/(8*n_atoms), 3, tol, n_max, margin=2)


def h1_normal_mode(params, fock_a, fock_b=None):
    """H_1 written in the normal-mode operators c1, c2"""
    c1, c2 = normal_mode_operators(fock_a, fock_b)
    n1 = c1.dag() @ c1
    n2 = c2.dag() @ c2
    hop12 = c1.dag() @ c2
    hop21 = c2.dag() @ c1
    m = (n1 @ n1 - n2 @ n2 + n2 - n1
        - (n1 - n2) @ (hop12 + c1 @ c2.dag())
        + hop12 - hop21)
    return (-params.g/(4*math.sqrt(params.n_atoms)))*m


def eigenvalue_correction(n1, n2, params):
    if n1 < 0 or n2 < 0:
        raise ValueError("Normal-mode occupation out of range")
    return -params.g/(4*math.sqrt(params.n_atoms))*(n1*n1 - n2*n2 + n2 - n1)


def corrected_mean_photons(alpha, params, t, trunc=None, variant=CorrectedVariant.PRINTED, tol=SERIES_TOL):
    check_resonant(params)
    variant = CorrectedVariant(variant)
    if trunc is None:
        trunc = mean_photons_truncation(alpha, tol)
    check_truncation(trunc, tol)

    w = poisson_weights(abs(alpha)**2/2, trunc.n_max)
    k = np.add.outer(np.arange(trunc.n_max+1), np.arange(trunc.n_max+1))
    rabi = params.collective_coupling*t
    drift = params.g/math.sqrt(params.n_atoms)*t

    if variant is CorrectedVariant.PRINTED:
        f = np.cos(rabi + drift/4*k)
    elif variant is CorrectedVariant.COS2:
        f = np.cos(rabi + drift/8*k)**2
    else:
        f = np.cos(rabi - drift/4*k)**2

    return SeriesResult(abs(alpha)**2*float(w @ f @ w), trunc)


def eigenstate_correction(n1, n2, n_atoms, variant=EigenstateVariant.PRINTED):
    """First-order ket correction as [((m1, m2), coefficient), ...], zero terms dropped"""
    if n1 < 0 or n2 < 0:
        raise ValueError("Normal-mode occupation out of range")
    variant = EigenstateVariant(variant)
    scale = 1/(8*n_atoms)

    if variant is EigenstateVariant.PRINTED:
        down = n1*math.sqrt(n1)*math.sqrt(n2+1)
        up = n2*math.sqrt(n2)*math.sqrt(n1+1)
    else:
        down = (n1-n2-1)*math.sqrt(n1)*math.sqrt(n2+1)
        up = (n2-n1-1)*math.sqrt(n1+1)*math.sqrt(n2)

    terms = []
    if down != 0:
        terms.append(((n1-1, n2+1), scale*down))
    if up != 0:
        terms.append(((n1+1, n2-1), scale*up))
    return terms


def printed_delta_components(alpha, params, trunc):
    n = np.arange(trunc.n_max+1, dtype=float)
    w = poisson_weights(abs(alpha)**2/2, trunc.n_max)
    n1 = n[:, None]
    n2 = n[None, :]
    ww = np.outer(w, w)/(8*params.n_atoms)
    k = n1 + n2
    s = params.collective_coupling
    shift = params.g/math.sqrt(params.n_atoms)

    def root(x):
        return np.sqrt(np.maximum(x, 0.0))

    # (n1^2 + m1^2) read as (n1^2 + n2^2)
    const = k*(n1**2 + n2**2) + n1**2*(n2+1) + n2**2*(n1+1)
    second = (((n1-1)**2 + (n2+1)**2)*root(n1)*root(n2+1)
        + ((n1+1)**2 + (n2-1)**2)*root(n1+1)*root(n2))
    fourth = ((n2+2)*root(n1)*root(n2+1)*root(n1-1)*root(n2+2)
        + (n1+2)*root(n2)*root(n1+1)*root(n2-1)*root(n1+2))

    lines = [(float(np.sum(ww*const)), 0.0)]
    for amp, freq in zip((ww*second).ravel(), (2*s + shift/2*(k-1)).ravel()):
        if amp != 0:
            lines.append((float(amp), float(freq)))
    for amp, freq in zip((ww*fourth).ravel(), (4*s + shift*(k-1)).ravel()):
        if amp != 0:
            lines.append((float(amp), float(freq)))
    return lines


def eigenstate_delta_components(alpha, params, trunc, variant=EigenstateVariant.RS):
    """Lines of 2 Re <psi0|n|psi1>, psi1 assembled from eigenstate corrections

    Only leading-order phases enter, so the lines sit at 0, 2 sqrt(N) g and
    4 sqrt(N) g.  Both sides of the matrix element are cut to n1, n2 <= n_max.
    """
    n_max = trunc.n_max
    amp = np.abs(coherent_amplitudes(abs(alpha)/math.sqrt(2), n_max))

    def weight(n1, n2):
        if 0 <= n1 <= n_max and 0 <= n2 <= n_max:
            return amp[n1]*amp[n2]
        return 0.0

    # phases cancel: psi1 stays in the n1 + n2 sector it came from
    lines = np.zeros(3)
    for n1 in range(n_max+1):
        for n2 in range(n_max+1):
            for (m1, m2), coef in eigenstate_correction(n1, n2, params.n_atoms, variant):
                c = 2*weight(n1, n2)*coef
                # <p|a^dag a|m> = <p|(n1 + n2 + c1^dag c2 + c2^dag c1)/2|m>
                for p1, p2, element in ((m1, m2, (m1+m2)/2),
                        (m1+1, m2-1, math.sqrt((m1+1)*max(m2, 0))/2),
                        (m1-1, m2+1, math.sqrt(max(m1, 0)*(m2+1))/2)):
                    if element != 0:
                        lines[abs(p1-n1)] += c*weight(p1, p2)*element

    s = params.collective_coupling
    return [(float(lines[0]), 0.0)] + [(float(a), 2*k*s) for k, a in enumerate(lines[1:], 1) if a != 0]


def delta_mean_photons_components(alpha, params, trunc, variant=DeltaVariant.PRINTED):
    """Spectral lines (amplitude, angular frequency) of the first-order photon-number correction"""
    if DeltaVariant(variant) is DeltaVariant.PRINTED:
        return printed_delta_components(alpha, params, trunc)
    return eigenstate_delta_components(alpha, params, trunc, EigenstateVariant.RS)


def delta_mean_photons(alpha, params, t, trunc=None, tol=SERIES_TOL, variant=DeltaVariant.PRINTED):
    check_resonant(params)
    variant = DeltaVariant(variant)
    if trunc is None:
        trunc = delta_truncation(alpha, params.n_atoms, tol, variant=variant)
    check_truncation(trunc, tol)
    lines = delta_mean_photons_components(alpha, params, trunc, variant)
    amps = np.array([a for a, f in lines])
    freqs = np.array([f for a, f in lines])
    return SeriesResult(float(np.sum(amps*np.cos(freqs*t))), trunc)


def delta_mean_photons_oracle(alpha, params, t, n_max=None, variant=EigenstateVariant.PRINTED, tol=SERIES_TOL):
    """2 Re <psi0|n|psi1> from eigenstate corrections and leading-order phases

    Computed in the normal-mode number basis, with levels n1, n2 <= n_max.
    """
    check_resonant(params)
    if n_max is None:
        n_max = delta_truncation(alpha, params.n_atoms, tol, variant=DeltaVariant.RS).n_max

    space = FockSpace(n_max+2)
    ops = two_mode_operators(space)
    # a^dag a = (c1^dag c1 + c2^dag c2 + c1^dag c2 + c2^dag c1)/2
    n_op = 0.5*(ops.n_a + ops.n_b + ops.a.dag() @ ops.b + ops.b.dag() @ ops.a)

    amp = coherent_amplitudes(complex(alpha)/math.sqrt(2), n_max)
    psi0 = np.zeros(ops.space.dimension, dtype=complex)
    psi1 = np.zeros(ops.space.dimension, dtype=complex)
    dims = ops.space.dims

    for n1 in range(n_max+1):
        for n2 in range(n_max+1):
            c = amp[n1]*amp[n2]*np.exp(-1j*leading_eigenvalue(n1, n2, params)*t)
            psi0[np.ravel_multi_index((n1, n2), dims)] += c
            for (m1, m2), coef in eigenstate_correction(n1, n2, params.n_atoms, variant):
                psi1[np.ravel_multi_index((m1, m2), dims)] += c*coef

    return 2*float(np.vdot(psi0, n_op.entries @ psi1).real)


class FirstOrder(namedtuple("FirstOrder", ["eigenvalue", "coefficients"])):
    """First-order level shift and ket correction {(m1, m2): coefficient}"""


def first_order_from_elements(k, labels, energies, couplings):
    """Standard non-degenerate first-order values for level index k

    couplings[j] is <j|H_1|k>; a degenerate partner with a nonzero coupling
    raises DegenerateLevel.
    """
    shift = float(np.real(couplings[k]))
    coefficients = {}
    scale = max(1.0, abs(energies[k]))
    for j, label in enumerate(labels):
        if j == k:
            continue
        gap = energies[k] - energies[j]
        if abs(gap) < DEGENERACY_TOL*scale:
            if abs(couplings[j]) > COUPLING_TOL:
                raise DegenerateLevel(f"Level {labels[k]} is degenerate with {label} and coupled by H_1",
                        labels[k], (label,))
            log.debug("Uncoupled degenerate partner %r of level %r skipped", label, labels[k])
            continue
        c = float(np.real(couplings[j]))/gap
        if abs(c) > COUPLING_TOL:
            coefficients[label] = c
    return FirstOrder(shift, coefficients)


def numeric_first_order_oracle(params, fock_a, level, fock_b=None):
    """First-order corrections for one H_0 level from the H_0, H_1 matrices

    H_1 conserves n1 + n2, so only levels of the same total contribute.
    """
    check_resonant(params)
    n1, n2 = level
    total = n1 + n2
    limit = safe_threshold(fock_a, fock_b)
    if n1 < 0 or n2 < 0 or total > limit:
        raise ThresholdExceeded(f"Level {level} outside truncation-safe total {limit}")

    h1 = hp_term(1, params, fock_a, fock_b).matrix
    labels = [(m, total-m) for m in range(total+1)]
    kets = [leading_eigenstate(m1, m2, fock_a, fock_b) for m1, m2 in labels]
    energies = np.array([leading_eigenvalue(m1, m2, params) for m1, m2 in labels])

    k = labels.index((n1, n2))
    h1_ket = h1 @ kets[k]
    couplings = np.array([ket.inner(h1_ket) for ket in kets])
    return first_order_from_elements(k, labels, energies, couplings)


def first_order_mean_photons_oracle(alpha, params, times, fock_a=None, fock_b=None, threads=1):
    """<a^dag a>(t) under the two-mode H_0 + H_1 matrix, initial state |alpha> x |0>"""
    if fock_a is None:
        fock_a = FockSpace.for_amplitude(alpha)
    if fock_b is None:
        fock_b = fock_a

    h = hp_hamiltonian(1, params, fock_a, fock_b)
    ops = two_mode_operators(fock_a, fock_b)
    psi0 = tensor(coherent_state(alpha, fock_a), KetVector.basis(fock_b, 0))
    prop = SpectralPropagator(h, ops.n_a + ops.n_b, threads)
    series = observable_series(h, psi0, [ops.n_a], times, names=["n"], propagator=prop, threads=threads)
    series.metadata["hamiltonian"] = "H0+H1"
    return series


def corrected_series(alpha, params, times, variant=CorrectedVariant.PRINTED, tol=SERIES_TOL, threads=1):
    trunc = mean_photons_truncation(alpha, tol)
    values = ordered_map(lambda t: corrected_mean_photons(alpha, params, t, trunc, variant, tol).value,
            list(times), threads)
    return TimeSeries(times, {"n": values}, Provenance.CORRECTED,
            {"variant": CorrectedVariant(variant).value, "n_max": trunc.n_max, "tail_bound": trunc.tail_bound})


def rank_corrected_variants(alpha, params, times, oracle=None, tol=SERIES_TOL, threads=1):
    """Max-abs deviation of each corrected variant from the H_0 + H_1 oracle, best first"""
    if oracle is None:
        oracle = first_order_mean_photons_oracle(alpha, params, times, threads=threads)
    ranking = []
    for variant in CorrectedVariant:
        series = corrected_series(alpha, params, oracle.times, variant, tol, threads)
        ranking.append((variant, series.deviation(oracle, "n")))
    ranking.sort(key=lambda r: r[1])
    log.info("Corrected variants against H0+H1 oracle: %s",
            ", ".join(f"{v.value}={d:.3e}" for v, d in ranking))
    return ranking


def delta_series(alpha, params, times, variant=DeltaVariant.PRINTED, tol=SERIES_TOL, threads=1):
    variant = DeltaVariant(variant)
    trunc = delta_truncation(alpha, params.n_atoms, tol, variant=variant)
    values = ordered_map(lambda t: delta_mean_photons(alpha, params, t, trunc, tol, variant).value,
            list(times), threads)
    return TimeSeries(times, {"dn": values}, Provenance.CLOSED_FORM,
            {"variant": variant.value, "n_max": trunc.n_max, "tail_bound": trunc.tail_bound})


def delta_oracle_series(alpha, params, times, n_max=None, variant=EigenstateVariant.RS, tol=SERIES_TOL, threads=1):
    """First-order photon-number correction assembled from eigenstate kets on the time grid"""
    variant = EigenstateVariant(variant)
    if n_max is None:
        n_max = delta_truncation(alpha, params.n_atoms, tol, variant=DeltaVariant.RS).n_max
    values = ordered_map(lambda t: delta_mean_photons_oracle(alpha, params, t, n_max, variant),
            list(times), threads)
    return TimeSeries(times, {"dn": values}, Provenance.CORRECTED,
            {"eigenstate_variant": variant.value, "n_max": n_max})


def rank_delta_variants(alpha, params, times, oracle=None, tol=SERIES_TOL, threads=1):
    """Max-abs deviation of each delta reading from the rs eigenstate oracle, best first"""
    if oracle is None:
        oracle = delta_oracle_series(alpha, params, times, tol=tol, threads=threads)
    ranking = []
    for variant in DeltaVariant:
        series = delta_series(alpha, params, oracle.times, variant, tol, threads)
        ranking.append((variant, series.deviation(oracle, "dn")))
    ranking.sort(key=lambda r: r[1])
    log.info("Delta variants against eigenstate oracle: %s",
            ", ".join(f"{v.value}={d:.3e}" for v, d in ranking))
    return ranking
