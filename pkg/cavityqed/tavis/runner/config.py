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
import itertools
import logging
import math
import re

from ..core.errors import ConfigError, CutoffTooSmall
from ..core.fock import check_cutoff, default_cutoff
from ..core.series import time_grid
from ..core.utils import ModelParams
from ..hp.model import HP_VALIDITY_THRESHOLD
from ..hp.perturbation import SERIES_TOL, CorrectedVariant, DeltaVariant, EigenstateVariant

log = logging.getLogger("cavityqed.tavis.config")

KINDS = ("coherent", "cat", "perturbation", "convergence-sweep")
FORMATS = ("csv", "json")
TIME_UNITS = ("omega", "collective")

_ANGLE_RE = re.compile(r"^([+-]?(?:\d+\.?\d*|\.\d+)?)\s*\*?\s*pi(?:\s*/\s*(\d+(?:\.\d*)?))?$")


def parse_real(text):
    """Float, also accepting multiples of pi such as 'pi/2' or '0.25*pi'"""
    text = text.strip()
    m = _ANGLE_RE.match(text)
    if m:
        factor = m.group(1)
        if factor in ("", "+"):
            factor = 1.0
        elif factor == "-":
            factor = -1.0
        value = float(factor)*math.pi
        if m.group(2):
            value /= float(m.group(2))
        return value
    return float(text)


def parse_complex(text):
    text = text.strip().replace(" ", "")
    try:
        return complex(parse_real(text))
    except ValueError:
        return complex(text)


def parse_int(text):
    value = float(text)
    if value != int(value):
        raise ValueError(f"{text!r} is not an integer")
    return int(value)


def parse_bool(text):
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"{text!r} is not a boolean")


def parse_int_list(text):
    return [parse_int(v) for v in text.split(",") if v.strip()]


def choice(options):
    def parse(text):
        t = text.strip()
        if t not in options:
            raise ValueError(f"{t!r} is not one of {', '.join(options)}")
        return t
    return parse


# key: (parser, description); a default of None is resolved from other keys
CONFIG_KEYS = {
    "kind":                 (choice(KINDS), "experiment kind"),
    "name":                 (str.strip, "output file stem, defaults to the kind"),
    "omega":                (parse_real, "mode frequency"),
    "delta":                (parse_real, "atomic splitting, defaults to omega"),
    "g":                    (parse_real, "single-atom coupling"),
    "n_atoms":              (parse_int, "number of atoms N"),
    "collective_coupling":  (parse_real, "sqrt(N) g; overrides g when given"),
    "alpha":                (parse_complex, "coherent amplitude of the field"),
    "gamma":                (parse_real, "cat amplitude"),
    "phi":                  (parse_real, "cat phase, radians"),
    "t_start":              (parse_real, "first time point"),
    "t_end":                (parse_real, "last time point"),
    "n_points":             (parse_int, "number of time points"),
    "time_unit":            (choice(TIME_UNITS), "omega: raw times; collective: times in units of sqrt(N) g t"),
    "cutoff":               (parse_int, "field Fock cutoff, defaults from the amplitude"),
    "b_cutoff":             (parse_int, "bosonized-atom Fock cutoff, defaults to cutoff"),
    "series_tol":           (parse_real, "certified remainder of the perturbative double sums"),
    "corrected_variant":    (choice(tuple(v.value for v in CorrectedVariant)), "corrected <n> reading"),
    "eigenstate_variant":   (choice(tuple(v.value for v in EigenstateVariant)), "eigenstate correction reading"),
    "delta_variant":        (choice(tuple(v.value for v in DeltaVariant)), "first-order <n> correction reading"),
    "exact":                (parse_bool, "also run the exact Fock x Dicke oracle"),
    "n_atoms_list":         (parse_int_list, "atom counts for convergence-sweep"),
    "format":               (choice(FORMATS), "output format"),
    "out":                  (str.strip, "output directory"),
    "threads":              (parse_int, "worker threads"),
}

DEFAULTS = {
    "kind": "coherent",
    "name": None,
    "omega": 1.0,
    "delta": None,
    "g": 0.1,
    "n_atoms": 25,
    "collective_coupling": None,
    "alpha": 0.5+0j,
    "gamma": 1.0,
    "phi": math.pi/2,
    "t_start": 0.0,
    "t_end": 2*math.pi,
    "n_points": 200,
    "time_unit": "collective",
    "cutoff": None,
    "b_cutoff": None,
    "series_tol": SERIES_TOL,
    "corrected_variant": CorrectedVariant.PRINTED.value,
    "eigenstate_variant": EigenstateVariant.PRINTED.value,
    "delta_variant": DeltaVariant.PRINTED.value,
    "exact": True,
    "n_atoms_list": [4, 16, 64],
    "format": "csv",
    "out": ".",
    "threads": 1,
}

SWEEPABLE = ("omega", "delta", "g", "n_atoms", "collective_coupling", "alpha", "gamma", "phi", "cutoff")


class Diagnostic(namedtuple("Diagnostic", ["field", "line", "message", "severity"])):

    def __str__(self):
        where = f"line {self.line}: " if self.line else ""
        field = f"{self.field}: " if self.field else ""
        return f"{self.severity}: {where}{field}{self.message}"


class RawConfig(namedtuple("RawConfig", ["values", "lines"])):
    """Unparsed key/value text with the line each key came from"""

    def with_overrides(self, overrides):
        values = dict(self.values)
        lines = dict(self.lines)
        for key, value in (overrides or {}).items():
            if value is not None:
                values[key] = str(value)
                lines[key] = None
        return RawConfig(values, lines)


def parse_config_text(text):
    """Split key = value lines; returns (RawConfig, diagnostics)"""
    values = {}
    lines = {}
    diags = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            diags.append(Diagnostic(None, lineno, f"expected 'key = value', got {line!r}", "error"))
            continue
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in CONFIG_KEYS:
            diags.append(Diagnostic(key, lineno, "unknown key", "error"))
            continue
        if key in values:
            diags.append(Diagnostic(key, lineno, f"duplicate key, first set on line {lines[key]}", "error"))
            continue
        values[key] = value
        lines[key] = lineno
    return RawConfig(values, lines), diags


def load_config(path):
    with open(path, "r") as f:
        return parse_config_text(f.read())


class RunConfig:
    """Fully resolved experiment configuration"""
    def __init__(self, **kwargs):
        for key in CONFIG_KEYS:
            setattr(self, key, kwargs[key])
        self.params = kwargs["params"]

    @property
    def amplitude(self):
        return self.gamma if self.kind == "cat" else abs(self.alpha)

    def params_for(self, n_atoms):
        return ModelParams.from_collective(self.collective_coupling, n_atoms, self.omega, self.delta)

    def times(self, params=None):
        """Raw time grid, converting from collective units when configured"""
        params = params or self.params
        scale = params.collective_coupling if self.time_unit == "collective" else 1.0
        return time_grid(self.t_start, self.t_end, self.n_points, scale)

    def as_dict(self):
        d = {}
        for key in CONFIG_KEYS:
            value = getattr(self, key)
            if isinstance(value, complex):
                value = {"re": value.real, "im": value.imag}
            d[key] = value
        return d

    def __repr__(self):
        return f"{type(self).__name__}(kind={self.kind!r}, name={self.name!r}, params={self.params!r})"


def resolve(raw):
    """Parse and range-check every key; returns (RunConfig or None, diagnostics)"""
    diags = []
    v = dict(DEFAULTS)

    for key, text in raw.values.items():
        parser = CONFIG_KEYS[key][0]
        try:
            v[key] = parser(text)
        except ValueError as ex:
            diags.append(Diagnostic(key, raw.lines.get(key), f"malformed value: {ex}", "error"))

    def err(key, message):
        diags.append(Diagnostic(key, raw.lines.get(key), message, "error"))

    def warn(key, message):
        diags.append(Diagnostic(key, raw.lines.get(key), message, "warning"))

    if v["name"] is None:
        v["name"] = v["kind"]
    if v["delta"] is None:
        v["delta"] = v["omega"]

    for key in ("omega", "delta", "series_tol"):
        if not v[key] > 0:
            err(key, "out of range, must be positive")
    for key in ("g", "gamma"):
        if not v[key] >= 0:
            err(key, "out of range, must be non-negative")
    if v["collective_coupling"] is not None and not v["collective_coupling"] >= 0:
        err("collective_coupling", "out of range, must be non-negative")
    if v["n_atoms"] < 1:
        err("n_atoms", "out of range, must be at least 1")
    if v["threads"] < 1:
        err("threads", "out of range, must be at least 1")
    if v["n_points"] < 2:
        err("n_points", "out of range, need at least 2 time points")
    if not v["t_end"] > v["t_start"]:
        err("t_end", "must be greater than t_start")
    if v["kind"] == "convergence-sweep":
        if not v["n_atoms_list"] or min(v["n_atoms_list"]) < 1:
            err("n_atoms_list", "out of range, need positive atom counts")

    root_n = math.sqrt(max(v["n_atoms"], 1))
    if v["collective_coupling"] is None:
        v["collective_coupling"] = root_n*v["g"]
    else:
        v["g"] = v["collective_coupling"]/root_n
    if v["time_unit"] == "collective" and v["collective_coupling"] == 0:
        err("time_unit", "collective time units need a nonzero coupling")

    amplitude = v["gamma"] if v["kind"] == "cat" else abs(v["alpha"])
    if v["cutoff"] is None:
        v["cutoff"] = default_cutoff(amplitude)
    if v["b_cutoff"] is None:
        v["b_cutoff"] = v["cutoff"]
    for key in ("cutoff", "b_cutoff"):
        if v[key] < 1:
            err(key, "out of range, must be at least 1")

    if v["cutoff"] >= 1:
        try:
            check_cutoff(amplitude, v["cutoff"])
        except CutoffTooSmall as ex:
            err("cutoff", f"{type(ex).__name__}: {ex} (required cutoff {ex.required_cutoff})")
    if v["kind"] == "perturbation" and v["b_cutoff"] != v["cutoff"]:
        warn("b_cutoff", "perturbation runs use equal mode cutoffs; b_cutoff ignored")

    atoms = v["n_atoms_list"] if v["kind"] == "convergence-sweep" else [v["n_atoms"]]
    if atoms and min(atoms) >= 1:
        ratio = amplitude**2/(min(atoms)/2)
        if ratio > HP_VALIDITY_THRESHOLD:
            warn("gamma" if v["kind"] == "cat" else "alpha",
                    f"bosonization validity ratio {ratio:.3g} exceeds {HP_VALIDITY_THRESHOLD}")

    if any(d.severity == "error" for d in diags):
        return None, diags

    params = ModelParams(v["omega"], v["delta"], v["g"], v["n_atoms"])
    return RunConfig(params=params, **v), diags


def validate(raw, overrides=None, diagnostics=()):
    """Resolved RunConfig, or ConfigError listing every violated constraint

    diagnostics carries problems found while parsing the text; they are
    reported together with the resolution diagnostics.
    """
    if overrides:
        raw = raw.with_overrides(overrides)
    config, diags = resolve(raw)
    diags = list(diagnostics) + diags
    for d in diags:
        if d.severity == "warning":
            log.warning("%s", d)
    if config is None or any(d.severity == "error" for d in diags):
        raise ConfigError([d for d in diags if d.severity == "error"])
    config.diagnostics = diags
    return config


def expand_sweep(raw):
    """Cartesian product of comma-separated sweepable values, in key order"""
    axes = []
    diags = []
    for key, text in raw.values.items():
        if key in SWEEPABLE and "," in text:
            axes.append((key, [s.strip() for s in text.split(",") if s.strip()]))
    if not axes:
        return [raw], diags

    members = []
    for combo in itertools.product(*(values for key, values in axes)):
        values = dict(raw.values)
        tag = []
        for (key, options), value in zip(axes, combo):
            values[key] = value
            tag.append(f"{key}{value}")
        stem = values.get("name", values.get("kind", DEFAULTS["kind"]))
        values["name"] = re.sub(r"[^A-Za-z0-9_.+-]", "_", "_".join([stem] + tag))
        members.append(RawConfig(values, dict(raw.lines)))
    log.info("Sweep over %s: %d members", ", ".join(k for k, o in axes), len(members))
    return members, diags
