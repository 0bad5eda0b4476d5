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

import numpy as np
import scipy.linalg

from .errors import DiagonalizationFailure, NotCommuting
from .fock import KetVector, OperatorMatrix, ProductSpace, build_mode_operators, check_same_space
from .fock import expectation, occupations, tensor, top_fock_population
from .series import Provenance, TimeSeries
from .spin import build_spin_operators
from .utils import max_abs, ordered_map

log = logging.getLogger("cavityqed.tavis.oracle")

COMMUTE_TOL = 1e-10
RESIDUAL_TOL = 1e-8
NORM_TOL = 1e-10
ESCAPE_TOL = 1e-8

DESK_MAX_ATOMS = 64
DESK_MAX_CUTOFF = 128


def build_tc_hamiltonian(params, fock, sector):
    """H = omega a^dag a + delta S_z + g (S_+ a + S_- a^dag) on fock x sector"""
    if sector.n_atoms != params.n_atoms:
        raise ValueError(f"Spin sector has {sector.n_atoms} atoms, model has {params.n_atoms}")

    a, ad, n = build_mode_operators(fock)
    sp, sm, sz = build_spin_operators(sector)
    i_a = OperatorMatrix.identity(fock)
    i_s = OperatorMatrix.identity(sector)

    h = (params.omega*tensor(n, i_s) + params.delta*tensor(i_a, sz)
        + params.g*(tensor(a, sp) + tensor(ad, sm)))
    return OperatorMatrix(h.entries, ProductSpace(fock, sector), hermitian=True)


def excitation_operator(fock, sector):
    """C = a^dag a x I + I x (S_z + N/2)"""
    space = ProductSpace(fock, sector)
    # level index of the Dicke factor is m + N/2
    charge = occupations(space).sum(axis=1)
    return OperatorMatrix.diagonal_of(charge.astype(float), space)


class SectorBlock(namedtuple("SectorBlock", ["charge", "block", "basis"])):
    """Block of H restricted to one eigenspace of a conserved charge

    basis is either a 1-D array of basis indices (diagonal charge) or a
    dense isometry whose columns span the eigenspace.
    """
    @property
    def dimension(self):
        return self.block.shape[0]

    def spectrum(self):
        return scipy.linalg.eigvalsh(self.block)


def sector_decompose(h, c, tol=COMMUTE_TOL):
    dev = max_abs(h.commutator(c).entries)
    if dev > tol:
        raise NotCommuting(f"Operators do not commute: max|[H, C]| = {dev:.3e}", dev)

    blocks = []
    if c.is_diagonal():
        charges = np.round(c.diagonal().real, 9)
        for q in np.unique(charges):
            idx = np.flatnonzero(charges == q)
            blocks.append(SectorBlock(float(q), h.restrict(idx), idx))
    else:
        w, v = scipy.linalg.eigh(c.dense())
        labels = np.round(w, 8)
        hd = h.entries
        for q in np.unique(labels):
            basis = v[:, labels == q]
            blocks.append(SectorBlock(float(q), basis.conj().T @ (hd @ basis), basis))

    log.debug("Decomposed dimension %d into %d blocks", h.dimension, len(blocks))
    return blocks


def diagonalize(matrix):
    """Dense Hermitian eigendecomposition with a residual check"""
    try:
        w, v = scipy.linalg.eigh(matrix)
    except (np.linalg.LinAlgError, ValueError) as ex:
        raise DiagonalizationFailure(f"Eigendecomposition failed: {ex}") from ex

    residual = max_abs(matrix @ v - v*w) if matrix.size else 0.0
    if residual > RESIDUAL_TOL*max(1.0, max_abs(matrix)):
        raise DiagonalizationFailure(f"Eigendecomposition residual {residual:.3e} too large", residual)
    return w, v, residual


def estimate_memory(dimension):
    """Bytes for one dense complex matrix plus its eigenvectors"""
    return 2*16*dimension*dimension


def check_desk_scale(n_atoms, cutoff, dimension=None):
    if n_atoms <= DESK_MAX_ATOMS and cutoff <= DESK_MAX_CUTOFF:
        return True
    if dimension is None:
        dimension = (n_atoms+1)*(cutoff+1)
    log.warning("Beyond desk scale (N=%d, cutoff=%d): dense diagonalization needs about %.1f MiB",
            n_atoms, cutoff, estimate_memory(dimension)/2**20)
    return False


class SpectralPropagator:
    """exp(-iHt) by spectral decomposition, optionally per conserved-charge block"""
    def __init__(self, h, charge=None, threads=1):
        if not h.hermitian:
            raise ValueError("Spectral propagation requires a Hermitian-flagged operator")

        self.log = logging.getLogger(f"cavityqed.tavis.{type(self).__name__}")
        self.space = h.space
        self.dimension = h.dimension
        self.threads = threads

        if charge is None:
            blocks = [SectorBlock(None, h.dense(), np.arange(h.dimension))]
        else:
            blocks = sector_decompose(h, charge)

        results = ordered_map(lambda b: diagonalize(b.block), blocks, threads)

        self.blocks = []
        self.residual = 0.0
        for b, (w, v, residual) in zip(blocks, results):
            self.blocks.append((b.basis, w, v))
            self.residual = max(self.residual, residual)

        self.log.debug("Diagonalized dimension %d in %d blocks (residual %.3e)",
                self.dimension, len(self.blocks), self.residual)

    def eigenvalues(self):
        return np.sort(np.concatenate([w for basis, w, v in self.blocks]))

    def project(self, psi):
        """Eigenbasis coefficients of psi, one array per block"""
        check_same_space(self.space, psi.space)
        amps = psi.amplitudes
        coeffs = []
        for basis, w, v in self.blocks:
            local = amps[basis] if basis.ndim == 1 else basis.conj().T @ amps
            coeffs.append(v.conj().T @ local)
        return coeffs

    def rebuild(self, coeffs, t):
        out = np.zeros(self.dimension, dtype=complex)
        for (basis, w, v), c in zip(self.blocks, coeffs):
            local = v @ (np.exp(-1j*w*t)*c)
            if basis.ndim == 1:
                out[basis] = local
            else:
                out += basis @ local
        return KetVector(out, self.space)

    def propagate(self, psi, t):
        if t == 0:
            check_same_space(self.space, psi.space)
            return KetVector(psi.amplitudes, psi.space)
        return self.rebuild(self.project(psi), t)

    def propagate_many(self, psi, times, threads=None):
        coeffs = self.project(psi)
        return ordered_map(lambda t: self.rebuild(coeffs, t), list(times),
                self.threads if threads is None else threads)


def evolve(h, psi0, t, charge=None):
    return SpectralPropagator(h, charge).propagate(psi0, t)


def observable_series(h, psi0, ops, times, names=None, charge=None, threads=1, propagator=None):
    """Exact expectation values of each operator along the time grid

    Norm drift and the population of the top two Fock levels are recorded per
    time point in the metadata; the series is flagged invalid if either leaves
    its tolerance.
    """
    if names is None:
        names = [f"op{k}" for k in range(len(ops))]
    if len(names) != len(ops):
        raise ValueError("Need one name per observable")
    for op in ops:
        check_same_space(h.space, op.space)

    times = np.asarray(times, dtype=float)
    if propagator is None:
        propagator = SpectralPropagator(h, charge, threads)

    norm0 = psi0.norm()
    states = propagator.propagate_many(psi0, times, threads)

    def measure(psi):
        values = [expectation(op, psi) for op in ops]
        return values, abs(psi.norm() - norm0), top_fock_population(psi)

    rows = ordered_map(measure, states, threads)

    records = {name: np.array([r[0][k].real for r in rows]) for k, name in enumerate(names)}
    imag = max((abs(v.imag) for r in rows for v in r[0]), default=0.0)
    drift = np.array([r[1] for r in rows])
    escape = np.array([r[2] for r in rows])

    valid = bool(drift.max() <= NORM_TOL and escape.max() <= ESCAPE_TOL)
    if not valid:
        log.warning("Exact run flagged invalid: norm drift %.3e, top Fock population %.3e",
                drift.max(), escape.max())

    metadata = {
        "norm_drift": drift,
        "top_fock_population": escape,
        "max_norm_drift": float(drift.max()),
        "max_top_fock_population": float(escape.max()),
        "max_imaginary_part": float(imag),
        "diagonalization_residual": float(propagator.residual),
        "dimension": int(propagator.dimension),
        "valid": valid,
    }
    return TimeSeries(times, records, Provenance.EXACT, metadata)
