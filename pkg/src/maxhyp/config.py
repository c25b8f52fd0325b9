"""Strict ``[section]`` / ``key = value`` run configuration.

Example::

    [run]
    system = ucm10
    scenario = shear1d_mode
    cfl = 0.5
    t_end = 1

    [params]
    lambda = 1

    [scenario]
    n = 256

Comments start with ``#`` or ``;`` (inline after whitespace).  Unknown sections
or keys are errors.
"""

from __future__ import annotations

import difflib
import math
import re
from dataclasses import dataclass, field

from .errors import ParseError, ValidationError
from .material import ElasticParams, MaxwellParams
from .solver import RunConfig


def _float(text):
    v = float(text)
    if math.isnan(v):
        raise ValueError("nan is not allowed")
    return v


def _floats(text):
    return tuple(_float(t) for t in text.split(",") if t.strip())


def _word(text):
    if not re.fullmatch(r"[A-Za-z0-9_.\-/]+", text):
        raise ValueError(f"expected a bare word, got {text!r}")
    return text


SCHEMA = {
    "run": {"system": _word, "scenario": _word, "scheme": _word, "splitting": _word,
            "integrator": _word, "cfl": _float, "t_end": _float, "output_every": int,
            "seed": int},
    "params": {"c1_sq": _float, "d1_sq": _float, "gamma": _float, "rho_hat": _float,
               "lambda": _float},
    "scenario": {"n": int, "nx": int, "ny": int, "length": _float, "mode": int, "u0": _float,
                 "amplitude": _float, "width": _float, "displacement": _float, "profile": _word,
                 "lambdas": _floats, "mu_dot": _float, "samples": int, "levels": int,
                 "u_left": _float, "u_right": _float, "wall_u": _float, "directions": int,
                 "gammas": _floats, "target": _word, "quantity": _word,
                 "t_newtonian": _float, "t_elastic": _float, "tol": _float},
    "output": {"dir": str},
}

SCENARIOS = ("shear1d_mode", "stokes_first", "riemann1d_elasto", "gauss2d_ucm", "limit_sweep",
             "audit_symmetry", "converge")

_SHEAR_KEYS = {"n", "length", "mode", "u0", "mu_dot", "tol"}
_GAUSS_KEYS = {"n", "nx", "ny", "length", "amplitude", "width", "displacement", "profile"}
SCENARIO_KEYS = {
    "shear1d_mode": _SHEAR_KEYS,
    "stokes_first": {"n", "length", "wall_u", "mu_dot"},
    "riemann1d_elasto": {"n", "length", "u_left", "u_right"},
    "gauss2d_ucm": _GAUSS_KEYS,
    "limit_sweep": _SHEAR_KEYS | {"lambdas", "t_newtonian", "t_elastic"},
    "audit_symmetry": {"samples", "directions", "gammas"},
    "converge": {"target", "levels", "quantity", "u_left", "u_right"} | _SHEAR_KEYS | _GAUSS_KEYS,
}
SCENARIO_SYSTEMS = {
    "shear1d_mode": ("ucm10",),
    "stokes_first": ("ucm10",),
    "limit_sweep": ("ucm10",),
    "riemann1d_elasto": ("elasto7",),
    "gauss2d_ucm": ("ucm10",),
    "audit_symmetry": ("elasto7", "ucm10"),
    "converge": ("elasto7", "ucm10"),
}
CONVERGE_TARGETS = ("shear1d_mode", "gauss2d_ucm", "riemann1d_elasto")
QUANTITIES = ("error", "involution", "detf")
PROFILES = ("gauss", "sine")


@dataclass
class ScenarioSpec:
    id: str
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.id not in SCENARIOS:
            raise ValidationError(f"unknown scenario {self.id!r}", "scenario")
        extra = set(self.options) - SCENARIO_KEYS[self.id]
        if extra:
            key = sorted(extra)[0]
            raise ValidationError(f"key {key!r} does not apply to scenario {self.id}", key)
        o = self.options
        for key in ("n", "nx", "ny"):
            if key in o and o[key] < 4:
                raise ValidationError(f"{key} must be >= 4", key)
        for key in ("length", "width", "mu_dot", "tol", "t_newtonian", "t_elastic"):
            if key in o and not o[key] > 0:
                raise ValidationError(f"{key} must be > 0", key)
        if "mode" in o and o["mode"] < 1:
            raise ValidationError("mode must be >= 1", "mode")
        if "samples" in o and o["samples"] < 1:
            raise ValidationError("samples must be >= 1", "samples")
        if "directions" in o and o["directions"] < 1:
            raise ValidationError("directions must be >= 1", "directions")
        if "levels" in o and o["levels"] < 2:
            raise ValidationError("levels must be >= 2", "levels")
        if "lambdas" in o:
            lams = o["lambdas"]
            if not lams or min(lams) <= 0:
                raise ValidationError("lambdas must be positive", "lambdas")
            if math.log10(max(lams) / min(lams)) < 4 - 1e-9:
                raise ValidationError("lambdas must span at least 4 decades", "lambdas")
        if "gammas" in o and (not o["gammas"] or min(o["gammas"]) <= 1):
            raise ValidationError("gammas must all be > 1", "gammas")
        if o.get("profile", "gauss") not in PROFILES:
            raise ValidationError(f"profile must be one of {PROFILES}", "profile")
        if o.get("target", "shear1d_mode") not in CONVERGE_TARGETS:
            raise ValidationError(f"target must be one of {CONVERGE_TARGETS}", "target")
        if o.get("quantity", "error") not in QUANTITIES:
            raise ValidationError(f"quantity must be one of {QUANTITIES}", "quantity")

    def get(self, key, default=None):
        return self.options.get(key, default)


@dataclass
class ParsedConfig:
    run: RunConfig
    scenario: ScenarioSpec
    output_dir: str
    sections: dict

    def echo(self) -> dict:
        """Canonical, JSON-safe view of every explicitly given value."""
        out = {}
        for name, sec in self.sections.items():
            out[name] = {k: _jsonable(v) for k, v in sorted(sec.items())}
        return out


def _jsonable(v):
    if isinstance(v, tuple):
        return [_jsonable(x) for x in v]
    if isinstance(v, float) and not math.isfinite(v):
        return repr(v)
    return v


def _suggest(word, options):
    close = difflib.get_close_matches(word, list(options), n=1)
    return f"; did you mean {close[0]!r}?" if close else ""


_SECTION = re.compile(r"^\[\s*([A-Za-z_]+)\s*\]$")
_ENTRY = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)\s*=\s*(.*)$")
_INLINE_COMMENT = re.compile(r"\s[#;]")


def parse_sections(text: str) -> dict:
    sections: dict = {}
    current = section = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line[0] in "#;":
            continue
        m = _SECTION.match(line)
        if m:
            name = m.group(1)
            if name not in SCHEMA:
                raise ParseError(f"unknown section [{name}]" + _suggest(name, SCHEMA), lineno)
            if name in sections:
                raise ParseError(f"duplicate section [{name}]", lineno)
            section, current = name, sections.setdefault(name, {})
            continue
        m = _ENTRY.match(line)
        if not m:
            raise ParseError(f"expected 'key = value', got {line!r}", lineno)
        if current is None:
            raise ParseError("entry outside of any section", lineno)
        key, value = m.group(1), _INLINE_COMMENT.split(m.group(2), maxsplit=1)[0].strip()
        schema = SCHEMA[section]
        if key not in schema:
            raise ParseError(f"unknown key {key!r} in [{section}]" + _suggest(key, schema), lineno)
        if key in current:
            raise ParseError(f"duplicate key {key!r}", lineno)
        if not value:
            raise ParseError(f"empty value for {key!r}", lineno)
        try:
            current[key] = schema[key](value)
        except ValueError as exc:
            raise ParseError(f"bad value for {key!r}: {exc}", lineno) from None
    return sections


def build_config(sections: dict, output_dir: str | None = None) -> ParsedConfig:
    run = dict(sections.get("run", {}))
    for key in ("system", "scenario"):
        if key not in run:
            raise ValidationError(f"[run] {key} is required", key)
    p = sections.get("params", {})
    elastic = ElasticParams(**{k: p[k] for k in ("c1_sq", "d1_sq", "gamma", "rho_hat") if k in p})
    params = MaxwellParams(elastic, p.get("lambda", math.inf))
    spec = ScenarioSpec(run["scenario"], dict(sections.get("scenario", {})))
    allowed = SCENARIO_SYSTEMS[spec.id]
    if run["system"] not in allowed:
        raise ValidationError(f"scenario {spec.id} runs on system(s) {', '.join(allowed)}", "system")
    cfg = RunConfig(params=params, **run)
    out = output_dir or sections.get("output", {}).get("dir", "maxhyp_out")
    return ParsedConfig(cfg, spec, out, sections)


def parse_config(text: str, output_dir: str | None = None) -> ParsedConfig:
    """Parse and validate; raises ParseError (with line) or ValidationError."""
    return build_config(parse_sections(text), output_dir)
