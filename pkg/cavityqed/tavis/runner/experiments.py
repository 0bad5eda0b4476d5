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

import numpy as np

from ..core.fock import FockSpace, build_mode_operators, coherent_state, embed, poisson_tail, tensor
from ..core.oracle import build_tc_hamiltonian, check_desk_scale, excitation_operator, observable_series
from ..core.series import Provenance, TimeSeries
from ..core.spin import SpinSector, ground_dicke_state
from ..core.utils import ordered_map
from ..core.version import __version__
from ..hp import cat as hp_cat
from ..hp.model import hp_validity, mean_photons_leading, photon_variance_leading
from ..hp.perturbation import CorrectedVariant, DeltaVariant, EigenstateVariant, corrected_series
from ..hp.perturbation import delta_oracle_series, delta_series, first_order_mean_photons_oracle
from ..hp.perturbation import rank_corrected_variants, rank_delta_variants
from .report import summarize


class ExperimentResult:
    """Columns on a common time grid plus the evidence needed to trust them"""
    def __init__(self, name, kind, times):
        self.name = name
        self.kind = kind
        self.times = np.asarray(times, dtype=float)
        self.columns = {}
        self.metadata = {}
        self.summary = {}
        self.valid = True

    def add_series(self, series, rename=None):
        rename = rename or {}
        for obs, values in series.records.items():
            self.columns[f"{rename.get(obs, obs)}.{series.provenance.value}"] = values

    def finish(self):
        self.summary.update(summarize(self.columns))
        self.metadata["valid"] = self.valid
        return self

    def __repr__(self):
        return f"{type(self).__name__}(name={self.name!r}, kind={self.kind!r}, columns={list(self.columns)!r})"


def exact_field_series(params, fock, psi_field, times, threads=1):
    """Exact oracle run from psi_field x ground; records n, n2, var and charge"""
    sector = SpinSector(params.n_atoms)
    check_desk_scale(params.n_atoms, fock.cutoff)

    h = build_tc_hamiltonian(params, fock, sector)
    c = excitation_operator(fock, sector)
    n_op = embed(build_mode_operators(fock)[2], 0, h.space)
    psi0 = tensor(psi_field, ground_dicke_state(sector))

    series = observable_series(h, psi0, [n_op, n_op @ n_op, c], times,
            names=["n", "n2", "charge"], charge=c, threads=threads)

    charge = series["charge"]
    records = {"n": series["n"], "n2": series["n2"], "var": series["n2"] - series["n"]**2}
    metadata = dict(series.metadata)
    metadata["charge_drift"] = float(np.max(np.abs(charge - charge[0])))
    return TimeSeries(times, records, Provenance.EXACT, metadata)


def exact_evidence(series):
    m = series.metadata
    return {
        "max_norm_drift": m["max_norm_drift"],
        "max_top_fock_population": m["max_top_fock_population"],
        "charge_drift": m["charge_drift"],
        "diagonalization_residual": m["diagonalization_residual"],
        "dimension": m["dimension"],
        "valid": m["valid"],
        "norm_drift": m["norm_drift"],
        "top_fock_population": m["top_fock_population"],
    }


class Experiment:
    def __init__(self, config):
        self.log = logging.getLogger(f"cavityqed.tavis.{type(self).__name__}")
        self.config = config

    def run(self):
        config = self.config
        self.log.info("cavityqed-tavis version %s", __version__)
        self.log.info("Running %s experiment %r", config.kind, config.name)

        handler = {
            "coherent": self.run_coherent,
            "cat": self.run_cat,
            "perturbation": self.run_perturbation,
            "convergence-sweep": self.run_convergence,
        }[config.kind]

        times = config.times()
        result = ExperimentResult(config.name, config.kind, times)
        result.metadata["config"] = config.as_dict()
        result.metadata["version"] = __version__
        handler(result, times)
        result.finish()

        if not result.valid:
            self.log.warning("Experiment %r failed its numerical validity checks", config.name)
        return result

    def closed_form(self, func, times, provenance, names):
        values = ordered_map(func, list(times), self.config.threads)
        records = {name: [v[k] for v in values] for k, name in enumerate(names)}
        return TimeSeries(times, records, provenance)

    def run_coherent(self, result, times):
        config = self.config
        params = config.params
        alpha = config.alpha

        result.metadata["hp_validity"] = hp_validity(alpha, params)
        result.metadata["tail_mass"] = poisson_tail(alpha, config.cutoff)

        if config.exact:
            fock = FockSpace(config.cutoff)
            exact = exact_field_series(params, fock, coherent_state(alpha, fock), times, config.threads)
            result.add_series(TimeSeries(times, {"n": exact["n"], "var": exact["var"]}, Provenance.EXACT))
            result.metadata["exact"] = exact_evidence(exact)
            result.valid = result.valid and exact.valid

        leading = self.closed_form(lambda t: (mean_photons_leading(alpha, params, t),
                photon_variance_leading(alpha, params, t)), times, Provenance.LEADING, ["n", "var"])
        result.add_series(leading)

        corrected = corrected_series(alpha, params, times, config.corrected_variant,
                config.series_tol, config.threads)
        result.add_series(corrected)
        result.metadata["corrected"] = corrected.metadata

    def run_cat(self, result, times):
        config = self.config
        params = config.params
        spec = hp_cat.cat_spec(config.gamma, config.phi)
        fock = FockSpace(config.cutoff)

        result.metadata["cat"] = {
            "delta_sq": spec.delta_sq,
            "norm_sq": spec.norm_sq,
            "decoherence_bound": hp_cat.decoherence_bound(spec),
            "norm_deviation": hp_cat.cat_norm_deviation(spec, fock),
        }
        result.metadata["hp_validity"] = hp_validity(spec.gamma, params)
        result.metadata["tail_mass"] = poisson_tail(spec.gamma, config.cutoff)

        if config.exact:
            exact = exact_field_series(params, fock, hp_cat.cat_state(spec, fock), times, config.threads)
            result.add_series(TimeSeries(times, {"n_cat": exact["n"], "n2_cat": exact["n2"]}, Provenance.EXACT))
            result.metadata["exact"] = exact_evidence(exact)
            result.valid = result.valid and exact.valid

        closed = self.closed_form(lambda t: (
                hp_cat.cat_mean_photons(spec, params, t),
                hp_cat.single_mean_photons(spec, params, t),
                hp_cat.cat_second_moment(spec, params, t),
                hp_cat.single_second_moment(spec, params, t),
                hp_cat.decoherence_metric(spec, params, t)),
            times, Provenance.CLOSED_FORM, ["n_cat", "n_single", "n2_cat", "n2_single", "decoherence"])
        result.add_series(closed)
        result.metadata["cat"]["max_decoherence"] = float(np.max(closed["decoherence"]))

    def run_perturbation(self, result, times):
        config = self.config
        params = config.params
        alpha = config.alpha
        fock = FockSpace(config.cutoff)

        result.metadata["hp_validity"] = hp_validity(alpha, params)
        result.metadata["tail_mass"] = poisson_tail(alpha, config.cutoff)

        # numeric arbiter: two-mode evolution under H0 + H1
        oracle = first_order_mean_photons_oracle(alpha, params, times, fock, fock, config.threads)
        result.add_series(oracle)
        result.metadata["exact"] = dict(oracle.metadata)
        result.valid = result.valid and oracle.valid

        leading = self.closed_form(lambda t: (mean_photons_leading(alpha, params, t),),
                times, Provenance.LEADING, ["n"])
        result.add_series(leading)

        selected = CorrectedVariant(config.corrected_variant)
        for variant in CorrectedVariant:
            series = corrected_series(alpha, params, times, variant, config.series_tol, config.threads)
            if variant is selected:
                result.add_series(series)
                result.metadata["corrected"] = series.metadata
            result.add_series(series, {"n": f"n_{variant.value}"})

        ranking = rank_corrected_variants(alpha, params, times, oracle, config.series_tol, config.threads)
        result.metadata["variant_ranking"] = [{"variant": v.value, "max_abs": d} for v, d in ranking]

        # first-order photon-number correction: closed readings against the eigenstate-built oracle
        selected = DeltaVariant(config.delta_variant)
        for variant in DeltaVariant:
            series = delta_series(alpha, params, times, variant, config.series_tol, config.threads)
            if variant is selected:
                result.add_series(series)
                result.metadata["delta_series"] = series.metadata
            result.add_series(series, {"dn": f"dn_{variant.value}"})

        dn_oracle = delta_oracle_series(alpha, params, times, variant=config.eigenstate_variant,
                tol=config.series_tol, threads=config.threads)
        result.add_series(dn_oracle)
        result.metadata["delta_oracle"] = dn_oracle.metadata

        reference = dn_oracle if EigenstateVariant(config.eigenstate_variant) is EigenstateVariant.RS else None
        ranking = rank_delta_variants(alpha, params, times, reference, config.series_tol, config.threads)
        result.metadata["delta_ranking"] = [{"variant": v.value, "max_abs": d} for v, d in ranking]

    def run_convergence(self, result, times):
        config = self.config
        alpha = config.alpha
        fock = FockSpace(config.cutoff)
        psi_field = coherent_state(alpha, fock)

        leading = self.closed_form(lambda t: (mean_photons_leading(alpha, config.params, t),),
                times, Provenance.LEADING, ["n"])
        result.add_series(leading)

        errors = {}
        evidence = {}
        for n_atoms in config.n_atoms_list:
            params = config.params_for(n_atoms)
            exact = exact_field_series(params, fock, psi_field, times, config.threads)
            result.add_series(TimeSeries(times, {f"n_N{n_atoms}": exact["n"]}, Provenance.EXACT))
            errors[n_atoms] = exact.deviation(leading, "n")
            evidence[n_atoms] = exact_evidence(exact)
            result.valid = result.valid and exact.valid
            self.log.info("N=%d: max |n_exact - n_leading| = %.3e", n_atoms, errors[n_atoms])

        values = [errors[n] for n in config.n_atoms_list]
        result.metadata["errors_by_n_atoms"] = errors
        result.metadata["strictly_decreasing"] = all(b < a for a, b in zip(values, values[1:]))
        result.metadata["exact"] = evidence
        result.metadata["hp_validity"] = {n: hp_validity(alpha, config.params_for(n)) for n in config.n_atoms_list}
        for n_atoms in config.n_atoms_list:
            result.summary[f"n_N{n_atoms}.exact vs n.leading"] = {
                "max_abs": errors[n_atoms],
                "rms": float(np.sqrt(np.mean((result.columns[f"n_N{n_atoms}.exact"] - leading["n"])**2))),
            }


def run_experiment(config):
    return Experiment(config).run()
