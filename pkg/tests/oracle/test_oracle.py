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
import scipy.linalg

from cavityqed.tavis.core.errors import DiagonalizationFailure, NotCommuting, SpaceMismatch
from cavityqed.tavis.core.fock import FockSpace, KetVector, OperatorMatrix, build_mode_operators
from cavityqed.tavis.core.fock import coherent_state, embed, tensor
from cavityqed.tavis.core.oracle import SpectralPropagator, build_tc_hamiltonian, check_desk_scale
from cavityqed.tavis.core.oracle import diagonalize, evolve, excitation_operator, observable_series
from cavityqed.tavis.core.oracle import sector_decompose
from cavityqed.tavis.core.series import Provenance, TimeSeries, time_grid
from cavityqed.tavis.core.spin import SpinSector, build_spin_operators, dicke_state, ground_dicke_state
from cavityqed.tavis.core.utils import ModelParams
from cavityqed.tavis.hp.model import mean_photons_leading


class TB:
    def __init__(self, n_atoms, cutoff, g=0.1, omega=1.0, delta=None):
        self.log = logging.getLogger("cavityqed.tb")
        self.log.setLevel(logging.DEBUG)

        self.params = ModelParams(omega, delta, g, n_atoms)
        self.fock = FockSpace(cutoff)
        self.sector = SpinSector(n_atoms)
        self.h = build_tc_hamiltonian(self.params, self.fock, self.sector)
        self.c = excitation_operator(self.fock, self.sector)
        self.space = self.h.space
        self.n_op = embed(build_mode_operators(self.fock)[2], 0, self.space)

    def index(self, n, m):
        return n*self.sector.dimension + self.sector.index_of(m)

    def ket(self, n, m):
        return KetVector.basis(self.space, (n, self.sector.index_of(m)))

    def coherent(self, alpha):
        return tensor(coherent_state(alpha, self.fock), ground_dicke_state(self.sector))


def test_decoupled_hamiltonian():
    tb = TB(3, 5, g=0.0, omega=1.3, delta=0.7)
    h = tb.h.dense()

    assert tb.h.is_diagonal()
    for n in range(6):
        for m in tb.sector.m_values():
            assert h[tb.index(n, m), tb.index(n, m)] == pytest.approx(1.3*n + 0.7*m, abs=1e-14)


def test_jaynes_cummings_block():
    tb = TB(1, 4, g=0.25)
    h = tb.h.dense()

    lower = tb.index(1, -0.5)
    upper = tb.index(0, 0.5)
    block = h[np.ix_([lower, upper], [lower, upper])]

    assert block[0, 1] == pytest.approx(0.25*math.sqrt(1), abs=1e-15)
    assert block[1, 0] == pytest.approx(0.25, abs=1e-15)
    assert block[0, 0] == pytest.approx(1.0 - 0.5)
    assert block[1, 1] == pytest.approx(0.5)


def test_hermitian():
    tb = TB(4, 6)
    assert tb.h.hermitian
    assert tb.h.hermitian_deviation() <= 1e-14


def test_atom_count_mismatch():
    with pytest.raises(ValueError):
        build_tc_hamiltonian(ModelParams(n_atoms=3), FockSpace(4), SpinSector(4))


def test_excitation_operator():
    tb = TB(4, 8)

    vac = tb.ket(0, -2)
    assert (tb.c @ vac).amplitudes.tolist() == [0]*tb.space.dimension
    one = tb.ket(1, -2)
    assert np.allclose((tb.c @ one).amplitudes, one.amplitudes)

    spectrum = tb.c.diagonal().real
    assert np.array_equal(spectrum, np.round(spectrum))
    assert spectrum.min() == 0

    dev = np.max(np.abs(tb.h.commutator(tb.c).dense()))
    tb.log.info("max|[H, C]| = %g", dev)
    assert dev <= 1e-12


def test_evolve_identity():
    tb = TB(3, 10)
    psi0 = tb.coherent(0.7)

    psi = evolve(tb.h, psi0, 0.0)
    assert np.max(np.abs(psi.amplitudes - psi0.amplitudes)) <= 1e-14


def test_evolve_decoupled_phase():
    tb = TB(3, 6, g=0.0, omega=1.0, delta=1.4)
    psi0 = tb.ket(2, -1.5)

    for t in [0.3, 1.7, 12.0]:
        psi = evolve(tb.h, psi0, t, charge=tb.c)
        phase = np.exp(-1j*(2*1.0 - 1.4*3/2)*t)
        assert np.max(np.abs(psi.amplitudes - phase*psi0.amplitudes)) <= 1e-12


def test_rabi_oscillation():
    g = 0.3
    tb = TB(1, 4, g=g)
    psi0 = tb.ket(0, 0.5)
    times = np.linspace(0, 10, 51)

    series = observable_series(tb.h, psi0, [tb.n_op], times, names=["n"], charge=tb.c)
    assert series.provenance is Provenance.EXACT
    assert np.max(np.abs(series["n"] - np.sin(g*times)**2)) <= 1e-10


@pytest.mark.parametrize("threads", [1, 3])
def test_conservation_and_unitarity(threads):
    tb = TB(4, 12)
    psi0 = tb.coherent(0.8)
    times = np.linspace(0, 40, 31)

    ops = [tb.c, tb.c @ tb.c, OperatorMatrix.identity(tb.space)]
    series = observable_series(tb.h, psi0, ops, times, names=["c", "c2", "one"], threads=threads)

    c = series["c"]
    var = series["c2"] - c**2
    assert np.max(np.abs(c - c[0])) <= 1e-10
    assert np.max(np.abs(var - var[0])) <= 1e-9
    assert np.max(np.abs(series["one"] - 1)) <= 1e-10
    assert series.metadata["max_norm_drift"] <= 1e-10
    assert series.valid


def test_casimir_conserved():
    tb = TB(6, 10, g=0.2)
    s_plus, s_minus, s_z = build_spin_operators(tb.sector)
    casimir = embed(s_z @ s_z + 0.5*(s_plus @ s_minus + s_minus @ s_plus), 1, tb.space)
    j = tb.sector.j
    times = np.linspace(0, 30, 21)

    for psi0 in [tb.coherent(0.7), tb.ket(3, 1.0)]:
        series = observable_series(tb.h, psi0, [casimir], times, names=["j2"], charge=tb.c)
        assert np.max(np.abs(series["j2"] - j*(j+1))) <= 1e-10


def test_thread_count_determinism():
    tb = TB(5, 12)
    psi0 = tb.coherent(0.6)
    times = np.linspace(0, 20, 17)

    one = observable_series(tb.h, psi0, [tb.n_op], times, charge=tb.c, threads=1)
    many = observable_series(tb.h, psi0, [tb.n_op], times, charge=tb.c, threads=4)
    assert np.array_equal(one["op0"], many["op0"])


def test_leading_order_agreement():
    alpha = 0.5
    tb = TB(10, 15, g=0.1)
    times = time_grid(0, 2*math.pi, 100, tb.params.collective_coupling)

    series = observable_series(tb.h, tb.coherent(alpha), [tb.n_op], times, names=["n"], charge=tb.c)
    leading = np.array([mean_photons_leading(alpha, tb.params, t) for t in times])
    err = np.max(np.abs(series["n"] - leading))
    tb.log.info("N=10 max error %g", err)
    assert err <= 0.05*alpha**2


def test_sector_block_sizes():
    tb = TB(2, 4)
    blocks = sector_decompose(tb.h, tb.c)

    sizes = {b.charge: b.dimension for b in blocks}
    assert sizes[0] == 1
    assert sizes[1] == 2
    assert sum(sizes.values()) == tb.space.dimension


def test_sector_spectrum_reassembly():
    tb = TB(4, 10)

    blocks = sector_decompose(tb.h, tb.c)
    union = np.sort(np.concatenate([b.spectrum() for b in blocks]))
    full = scipy.linalg.eigvalsh(tb.h.dense())
    assert np.max(np.abs(union - full)) <= 1e-9


def test_decoupled_blocks_are_diagonal():
    tb = TB(3, 5, g=0.0)
    for b in sector_decompose(tb.h, tb.c):
        assert np.count_nonzero(b.block - np.diag(np.diag(b.block))) == 0


def test_not_commuting():
    tb = TB(2, 5)
    a = embed(build_mode_operators(tb.fock)[0], 0, tb.space)
    x = OperatorMatrix((a + a.dag()).entries, tb.space, hermitian=True)

    with pytest.raises(NotCommuting) as excinfo:
        sector_decompose(tb.h, x)
    assert excinfo.value.deviation > 1e-10


def test_block_and_direct_paths_agree():
    # cutoff 12 keeps the Poisson tail of |0.9> below the coherent-state tolerance
    tb = TB(4, 12)
    psi0 = tb.coherent(0.9)

    direct = SpectralPropagator(tb.h)
    blocked = SpectralPropagator(tb.h, tb.c, threads=2)
    # a non-diagonal conserved charge exercises the eigenspace path
    general = SpectralPropagator(tb.h, tb.h)

    assert np.max(np.abs(direct.eigenvalues() - blocked.eigenvalues())) <= 1e-9
    for t in [0.5, 3.0, 17.0]:
        ref = direct.propagate(psi0, t).amplitudes
        assert np.max(np.abs(blocked.propagate(psi0, t).amplitudes - ref)) <= 1e-9
        assert np.max(np.abs(general.propagate(psi0, t).amplitudes - ref)) <= 1e-9


def test_semigroup():
    tb = TB(3, 10)
    prop = SpectralPropagator(tb.h, tb.c)
    psi0 = tb.coherent(0.5)

    t1, t2 = 1.3, 4.1
    once = prop.propagate(psi0, t1 + t2)
    twice = prop.propagate(prop.propagate(psi0, t1), t2)
    assert np.max(np.abs(once.amplitudes - twice.amplitudes)) <= 1e-9
    assert abs(once.norm() - 1) <= 1e-10


def test_propagator_checks():
    tb = TB(2, 4)

    with pytest.raises(ValueError):
        SpectralPropagator(OperatorMatrix(tb.h.entries, tb.space))

    with pytest.raises(SpaceMismatch):
        SpectralPropagator(tb.h).propagate(KetVector.basis(FockSpace(4), 0), 1.0)

    with pytest.raises(DiagonalizationFailure):
        diagonalize(np.array([[np.nan, 0], [0, 1.0]]))


def test_truncation_escape_flagged(caplog):
    tb = TB(2, 6)
    # deliberately accept a heavily truncated coherent state
    psi0 = tensor(coherent_state(1.5, tb.fock, tol=1.0), ground_dicke_state(tb.sector))

    with caplog.at_level(logging.WARNING):
        series = observable_series(tb.h, psi0, [tb.n_op], np.linspace(0, 5, 6))

    assert series.metadata["max_top_fock_population"] > 1e-8
    assert not series.valid
    assert "flagged invalid" in caplog.text


def test_desk_scale_warning(caplog):
    with caplog.at_level(logging.WARNING):
        assert check_desk_scale(16, 32)
        assert not check_desk_scale(100, 20)
    assert "MiB" in caplog.text


def test_time_series_validation():
    with pytest.raises(ValueError):
        TimeSeries([0, 1, 1], {"n": [0, 0, 0]}, Provenance.EXACT)
    with pytest.raises(ValueError):
        TimeSeries([0, 1], {"n": [0]}, Provenance.EXACT)

    s = TimeSeries([0, 1], {"n": [0.5, 0.25]}, "leading")
    assert list(s.columns()) == ["n.leading"]
    assert np.array_equal(s.columns()["n.leading"], [0.5, 0.25])
    assert s.deviation(TimeSeries([0, 1], {"n": [0.5, 0.5]}, "exact"), "n") == 0.25

    with pytest.raises(ValueError):
        time_grid(1.0, 0.5, 10)


def test_dicke_excited_state_index():
    tb = TB(1, 3)
    assert dicke_state(tb.sector, 0.5).amplitudes.tolist() == [0, 1]
