#!/usr/bin/env python
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

import logging
import math

import numpy as np
import pytest

from cavityqed.tavis.core.errors import CutoffTooSmall, NormalizationMismatch, OffResonance
from cavityqed.tavis.core.fock import FockSpace, KetVector, build_mode_operators, coherent_state, embed
from cavityqed.tavis.core.fock import expectation, tensor
from cavityqed.tavis.core.oracle import SpectralPropagator, build_tc_hamiltonian, excitation_operator
from cavityqed.tavis.core.oracle import observable_series
from cavityqed.tavis.core.series import time_grid
from cavityqed.tavis.core.spin import SpinSector, ground_dicke_state
from cavityqed.tavis.core.utils import ModelParams
from cavityqed.tavis.hp.cat import CatSpec
from cavityqed.tavis.hp.cat import cat_mean_photons, cat_norm_deviation, cat_second_moment, cat_spec, cat_state
from cavityqed.tavis.hp.cat import decoherence_bound, decoherence_metric, evolve_cat_leading, fringe_factor
from cavityqed.tavis.hp.cat import single_mean_photons, single_second_moment
from cavityqed.tavis.hp.model import hp_term, mean_photons_leading, two_mode_operators


class TB:
    def __init__(self, n_atoms, g=0.1, cutoff=24):
        self.log = logging.getLogger("cavityqed.tb")
        self.log.setLevel(logging.DEBUG)

        self.params = ModelParams(1.0, None, g, n_atoms)
        self.fock = FockSpace(cutoff)
        self.ops = two_mode_operators(self.fock)

    def ket(self, spec, t):
        return evolve_cat_leading(spec, self.params, t).to_ket(self.fock)

    def moments(self, ket):
        n = expectation(self.ops.n_a, ket).real
        n2 = expectation(self.ops.n_a @ self.ops.n_a, ket).real
        return n, n2


def test_normalization_values():
    assert cat_spec(0, 0.3).norm_sq == pytest.approx(0.25)
    assert cat_spec(0.7, 0).norm_sq == pytest.approx(0.25)

    for gamma in (0.3, 1.0, 2.5):
        spec = cat_spec(gamma, math.pi/2)
        assert spec.delta_sq == pytest.approx(2*gamma**2)
        assert spec.norm_sq == pytest.approx(0.5/(1 + math.exp(-2*gamma**2)))

    spec = cat_spec(3, math.pi/4)
    assert 2*spec.norm_sq*(1 + spec.overlap().real) == pytest.approx(1, abs=1e-12)

    with pytest.raises(ValueError):
        cat_spec(-1, 0.2)


def test_normalization_random():
    rng = np.random.default_rng(20260311)

    for gamma, phi in zip(rng.uniform(0, 4, 200), rng.uniform(-math.pi, math.pi, 200)):
        spec = cat_spec(gamma, phi)
        overlap = spec.overlap()
        expected = math.exp(-spec.delta_sq)*complex(math.cos(spec.interference_phase),
                -math.sin(spec.interference_phase))
        assert overlap == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("gamma", [300, 1000])
@pytest.mark.parametrize("phi", [1e-3, 1e-4])
def test_normalization_macroscopic(gamma, phi):
    spec = cat_spec(gamma, phi)

    assert spec.delta_sq == pytest.approx(2*gamma**2*math.sin(phi)**2, rel=1e-12)
    assert 0.25 <= spec.norm_sq < math.inf
    assert 0.5/spec.norm_sq == pytest.approx(1 + spec.overlap().real, abs=1e-12*gamma**2)


def test_normalization_mismatch(monkeypatch):
    monkeypatch.setattr(CatSpec, "overlap", lambda self: complex(0.5))

    with pytest.raises(NormalizationMismatch) as excinfo:
        cat_spec(1.0, 0.3)
    assert excinfo.value.deviation > 1e-3


def test_cat_state():
    fock = FockSpace(24)

    # both branches coincide at phi = 0
    spec = cat_spec(1.2, 0)
    assert cat_state(spec, fock).fidelity(coherent_state(1.2, fock)) == pytest.approx(1, abs=1e-14)

    spec = cat_spec(0.9, 0.4)
    psi = cat_state(spec, fock)
    assert psi.norm() == pytest.approx(1, abs=1e-14)
    assert cat_norm_deviation(spec, fock) <= 1e-9

    with pytest.raises(CutoffTooSmall):
        cat_state(cat_spec(3, 0.4), FockSpace(5))


def test_even_cat_has_no_odd_levels():
    psi = cat_state(cat_spec(2, math.pi/2), FockSpace(30))

    assert np.max(np.abs(psi.amplitudes[1::2])) <= 1e-12
    assert np.sum(psi.probabilities()[0::2]) == pytest.approx(1, abs=1e-12)


def test_evolved_labels():
    tb = TB(25)
    spec = cat_spec(0.8, 0.5)

    evolved = evolve_cat_leading(spec, tb.params, 0)
    plus_a, plus_b = evolved.branch_plus_phi.mode_labels()
    minus_a, minus_b = evolved.branch_minus_phi.mode_labels()
    assert plus_a == pytest.approx(spec.branches[0])
    assert minus_a == pytest.approx(spec.branches[1])
    assert abs(plus_b) <= 1e-15
    assert abs(minus_b) <= 1e-15

    assert len(evolved.labels()) == 4
    for label in evolve_cat_leading(spec, tb.params, 3.3).labels():
        assert abs(label) == pytest.approx(0.8/math.sqrt(2))


def test_evolved_ket_matches_matrix():
    tb = TB(25, cutoff=18)
    spec = cat_spec(0.8, 0.9)
    t = 0.7

    h0 = hp_term(0, tb.params, tb.fock).matrix
    prop = SpectralPropagator(h0, tb.ops.n_a + tb.ops.n_b)
    psi0 = tensor(cat_state(spec, tb.fock), KetVector.basis(tb.fock, 0))

    fidelity = prop.propagate(psi0, t).fidelity(tb.ket(spec, t))
    tb.log.info("Cat evolution fidelity %.15f", fidelity)
    assert fidelity >= 1 - 1e-8


def test_mean_photons_example():
    tb = TB(25, g=0.1)
    spec = cat_spec(1, math.pi/6)
    t = 0.9

    n, n2 = tb.moments(tb.ket(spec, t))
    assert cat_mean_photons(spec, tb.params, t) == pytest.approx(n, abs=1e-9)


def test_second_moment_example():
    tb = TB(36, g=0.05)
    spec = cat_spec(0.9, math.pi/3)
    t = 1.1

    n, n2 = tb.moments(tb.ket(spec, t))
    assert cat_second_moment(spec, tb.params, t) == pytest.approx(n2, abs=1e-8)


def test_moments_random():
    rng = np.random.default_rng(7)
    tb = TB(30, g=0.08)

    for k in range(20):
        spec = cat_spec(rng.uniform(0.2, 1.5), rng.uniform(0, math.pi))
        t = rng.uniform(0, 20)
        n, n2 = tb.moments(tb.ket(spec, t))
        assert cat_mean_photons(spec, tb.params, t) == pytest.approx(n, abs=1e-8)
        assert cat_second_moment(spec, tb.params, t) == pytest.approx(n2, abs=1e-8)


def test_single_state_statistics():
    params = ModelParams(1.0, None, 0.1, 25)
    spec = cat_spec(0.7, 0.3)

    for t in (0, 1.1, 4.0):
        n = single_mean_photons(spec, params, t)
        assert n == pytest.approx(mean_photons_leading(0.7, params, t))
        assert single_second_moment(spec, params, t) == pytest.approx(n*n + n)


def test_fringe_limits():
    params = ModelParams(1.0, None, 0.1, 25)

    # coincident branches: pure coherent statistics
    spec = cat_spec(1.3, 0)
    assert fringe_factor(spec, 2) == 0
    assert fringe_factor(spec, 4) == 0
    assert decoherence_metric(spec, params, 2.0) == 0
    assert cat_mean_photons(spec, params, 2.0) == pytest.approx(single_mean_photons(spec, params, 2.0))

    # well separated branches lose their fringes
    spec = cat_spec(4, math.pi/4)
    for t in (0.3, 1.7, 5.0):
        assert cat_mean_photons(spec, params, t) == pytest.approx(single_mean_photons(spec, params, t), rel=1e-6)
        assert cat_second_moment(spec, params, t) == pytest.approx(single_second_moment(spec, params, t), rel=1e-6)
    assert decoherence_metric(spec, params, 1.0) <= decoherence_bound(spec)

    # vacuum-like cat
    spec = cat_spec(0, 1.0)
    assert cat_mean_photons(spec, params, 1.0) == 0


def test_even_cat_mean():
    params = ModelParams(1.0, None, 0.1, 25)
    gamma = 1.1
    spec = cat_spec(gamma, math.pi/2)

    # gamma^2 tanh(gamma^2) at t = 0
    assert cat_mean_photons(spec, params, 0) == pytest.approx(gamma**2*math.tanh(gamma**2), rel=1e-12)


def test_decoherence_bound():
    params = ModelParams(1.0, None, 0.1, 25)
    rng = np.random.default_rng(11)

    for gamma, phi, t in zip(rng.uniform(0.1, 3, 50), rng.uniform(0.05, math.pi - 0.05, 50), rng.uniform(0, 30, 50)):
        spec = cat_spec(gamma, phi)
        bound = decoherence_bound(spec)
        assert abs(fringe_factor(spec, 2)) <= bound
        assert abs(fringe_factor(spec, 4)) <= bound
        assert decoherence_metric(spec, params, t) <= bound

    assert decoherence_bound(cat_spec(0, 0.3)) == math.inf

    bounds = [decoherence_bound(cat_spec(gamma, math.pi/4)) for gamma in (0.5, 1, 2, 4)]
    assert all(b < a for a, b in zip(bounds, bounds[1:]))


def test_off_resonance():
    params = ModelParams(1.0, 0.9, 0.1, 25)
    spec = cat_spec(1, 0.5)

    for func in (cat_mean_photons, cat_second_moment, decoherence_metric, evolve_cat_leading):
        with pytest.raises(OffResonance):
            func(spec, params, 1.0)


def test_exact_corroboration():
    n_atoms = 24
    gamma = 0.6
    collective = 0.5
    params = ModelParams.from_collective(collective, n_atoms)
    spec = cat_spec(gamma, math.pi/2)

    fock = FockSpace(16)
    sector = SpinSector(n_atoms)
    h = build_tc_hamiltonian(params, fock, sector)
    c = excitation_operator(fock, sector)
    n_op = embed(build_mode_operators(fock)[2], 0, h.space)
    times = time_grid(0, 2*math.pi, 101, collective)

    psi0 = tensor(cat_state(spec, fock), ground_dicke_state(sector))
    exact = observable_series(h, psi0, [n_op], times, names=["n"], charge=c)["n"]
    closed = np.array([cat_mean_photons(spec, params, t) for t in times])
    error = float(np.max(np.abs(exact - closed)))
    logging.getLogger("cavityqed.tb").info("Cat mean photon error at N=%d: %.3e", n_atoms, error)

    assert error <= 0.1*gamma**2
    # fringes suppress the revival well below the single-state peak
    assert np.max(exact) <= 0.5*gamma**2
    assert exact[0] == pytest.approx(gamma**2*math.tanh(gamma**2), abs=1e-9)
