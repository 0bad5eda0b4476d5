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

import numpy as np

from ..core.errors import NormalizationMismatch
from ..core.fock import KetVector, ProductSpace, check_cutoff, coherent_amplitudes, TAIL_TOL
from .model import NormalModeState, check_resonant

log = logging.getLogger("cavityqed.tavis.cat")

FLOOR = 1e-12


class CatSpec(namedtuple("CatSpec", ["gamma", "phi"])):
    """Phase cat N(|gamma e^{i phi}> + |gamma e^{-i phi}>)"""

    @property
    def delta_sq(self):
        """Squared distance 2 gamma^2 sin^2 phi between the branches"""
        return 2*self.gamma**2*math.sin(self.phi)**2

    @property
    def interference_phase(self):
        return self.gamma**2*math.sin(2*self.phi)

    @property
    def norm_sq(self):
        return 0.5/(1 + math.cos(self.interference_phase)*math.exp(-self.delta_sq))

    @property
    def branches(self):
        b = self.gamma*np.exp(1j*self.phi)
        return b, np.conj(b)

    def overlap(self):
        """<gamma e^{i phi}|gamma e^{-i phi}> from the coherent-state overlap identity"""
        b1, b2 = self.branches
        return complex(np.exp(-abs(b1)**2/2 - abs(b2)**2/2 + np.conj(b1)*b2))


def cat_spec(gamma, phi):
    if gamma < 0:
        raise ValueError("Cat amplitude out of range")
    spec = CatSpec(float(gamma), float(phi))
    # 1/(2 N^2) = 1 + Re <gamma e^{i phi}|gamma e^{-i phi}>, both sides rounded at gamma^2 eps
    dev = abs(0.5/spec.norm_sq - (1 + spec.overlap().real))
    if dev > FLOOR*max(1.0, spec.gamma**2):
        raise NormalizationMismatch(f"Cat normalization of {spec!r} inconsistent with the branch overlap "
                f"by {dev:.3e}", dev)
    return spec


def cat_amplitudes(spec, cutoff):
    """Unnormalized Fock amplitudes of the two branches, summed"""
    a = coherent_amplitudes(spec.branches[0], cutoff)
    # conjugate branch as exact conjugate so odd levels cancel at phi = pi/2
    return a + np.conj(a)


def cat_norm_deviation(spec, fock):
    """Mismatch between the analytic normalization and the truncated norm"""
    raw = np.linalg.norm(cat_amplitudes(spec, fock.cutoff))
    return abs(math.sqrt(spec.norm_sq)*raw - 1)


def cat_state(spec, fock, tol=TAIL_TOL):
    check_cutoff(spec.gamma, fock.cutoff, tol)
    amps = cat_amplitudes(spec, fock.cutoff)
    log.debug("Cat %r on %r: normalization deviation %.3e", spec, fock, cat_norm_deviation(spec, fock))
    return KetVector(amps/np.linalg.norm(amps), fock)


class EvolvedCat(namedtuple("EvolvedCat", ["branch_plus_phi", "branch_minus_phi", "spec", "params"])):
    """Leading-order evolved cat: two branches, each a NormalModeState"""

    def labels(self):
        return (self.branch_plus_phi.label_plus, self.branch_plus_phi.label_minus,
                self.branch_minus_phi.label_plus, self.branch_minus_phi.label_minus)

    def to_ket(self, fock_a, fock_b=None, tol=TAIL_TOL):
        if fock_b is None:
            fock_b = fock_a
        check_cutoff(self.spec.gamma, min(fock_a.cutoff, fock_b.cutoff), tol)

        amps = 0
        for branch in (self.branch_plus_phi, self.branch_minus_phi):
            alpha_a, alpha_b = branch.mode_labels()
            amps = amps + np.kron(coherent_amplitudes(alpha_a, fock_a.cutoff),
                    coherent_amplitudes(alpha_b, fock_b.cutoff))
        return KetVector(amps/np.linalg.norm(amps), ProductSpace(fock_a, fock_b))


def evolve_cat_leading(spec, params, t):
    check_resonant(params)
    s = params.collective_coupling
    amp = spec.gamma/math.sqrt(2)
    fast = (params.omega + s)*t
    slow = (params.omega - s)*t

    def branch(phi):
        return NormalModeState(amp*np.exp(-1j*(fast - phi)), amp*np.exp(-1j*(slow - phi)), params)

    return EvolvedCat(branch(spec.phi), branch(-spec.phi), spec, params)


def fringe_factor(spec, k):
    """Interference term of the k-th moment ratio, proportional to exp(-delta_sq)"""
    c0 = math.cos(spec.interference_phase)
    ck = math.cos(k*spec.phi + spec.interference_phase)
    e = math.exp(-spec.delta_sq)
    return (ck - c0)*e/(1 + c0*e)


def single_mean_photons(spec, params, t):
    return spec.gamma**2*math.cos(params.collective_coupling*t)**2


def single_second_moment(spec, params, t):
    n = single_mean_photons(spec, params, t)
    return n*n + n


def cat_mean_photons(spec, params, t):
    check_resonant(params)
    return single_mean_photons(spec, params, t)*(1 + fringe_factor(spec, 2))


def cat_second_moment(spec, params, t):
    check_resonant(params)
    n = single_mean_photons(spec, params, t)
    return n*n*(1 + fringe_factor(spec, 4)) + n*(1 + fringe_factor(spec, 2))


def decoherence_metric(spec, params, t, floor=FLOOR):
    """Relative deviation of the cat moments from single-coherent-state statistics"""
    check_resonant(params)
    n = single_mean_photons(spec, params, t)
    f2 = fringe_factor(spec, 2)
    f4 = fringe_factor(spec, 4)
    first = abs(n*f2)/max(n, floor)
    second = abs(n*n*f4 + n*f2)/max(n*n + n, floor)
    return max(first, second)


def decoherence_bound(spec):
    e = math.exp(-spec.delta_sq)
    if e >= 1:
        return math.inf
    return 2*e/(1 - e)
