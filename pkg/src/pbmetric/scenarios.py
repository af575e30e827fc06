"""Scenario files: the sectioned key-value format and the bundled presets.

A scenario file is UTF-8 INI-style text.  Section headers in square
brackets, ``key = value`` assignments, expression values as quoted
strings::

    [space]
    carrier = "[0, inf)"
    distance = "max(x, y)"
    s_coeff = 1
    complete = true

    [maps]
    h = "z"
    eta = "piecewise(z in [0, 64): 0; otherwise: z / 2)"
    Q = "z^2 / 2"
    Z = "z^3"
    inverse_Q = "sqrt(2 * z)"
    inverse_Z = "cbrt(z)"
    closed_ranges = h

    [admissibility]
    gamma = "..."
    delta = "..."

    [toolkit]
    xi = "z"
    omega = "log(z + 3)"
    H = half-t

    [solver]
    v0 = 0, 8, 100
    tol = 1e-9
    max_iters = 10000

    [verification]
    grid = 0:100:0.5

Unquoted values are preset names (distance: max_metric, abs_diff,
squared_diff; xi: identity; omega: log3; H: half-t, truncated-difference);
quoted values are expressions.  ``inverse_Q``/``inverse_Z``,
``closed_ranges`` and the [solver]/[verification] sections are optional;
[space], [maps], [admissibility] and [toolkit] are required.  Grid specs
are ``lo:hi:step``, optionally one per axis separated by a comma.
Comment lines start with ``#`` or ``;``; inline comments are not
supported (piecewise expressions contain semicolons).
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field

from .contraction import GridSpec, Scenario, Toolkit, make_cyclic_preset
from .errors import (
    ArityError,
    ExprSyntaxError,
    MissingKey,
    MissingSection,
    ScenarioError,
    UnknownPreset,
)
from .expressions import Expr, parse_expression, variables_used
from .function_classes import (
    CCLASS_PRESETS,
    OMEGA_PRESETS,
    XI_PRESETS,
    CClassFunction,
    OmegaOneFunction,
    XiFunction,
    cclass_half,
    omega_log3,
    xi_identity,
)
from .intervals import parse_interval_union
from .spaces import BUILTIN_DISTANCES, PartialBMetricSpace

REQUIRED_SECTIONS = ("space", "maps", "admissibility", "toolkit")


@dataclass
class SolverConfig:
    v0: tuple = (0.0,)
    tol: float = 1e-9
    max_iters: int = 10000


@dataclass
class VerificationConfig:
    grid: GridSpec | None = None


@dataclass
class ScenarioFile:
    """Parsed scenario file; ``build()`` produces the Scenario value."""

    name: str
    space: PartialBMetricSpace
    maps: dict
    inverses: dict
    closed_ranges: frozenset
    gamma: Expr
    delta: Expr
    toolkit: Toolkit
    solver: SolverConfig = field(default_factory=SolverConfig)
    verification: VerificationConfig = field(default_factory=VerificationConfig)

    def build(self) -> Scenario:
        return Scenario(
            name=self.name,
            space=self.space,
            map_h=self.maps["h"],
            map_eta=self.maps["eta"],
            map_Q=self.maps["Q"],
            map_Z=self.maps["Z"],
            gamma_adm=self.gamma,
            delta_adm=self.delta,
            xi=self.toolkit.xi,
            omega=self.toolkit.omega,
            cclass=self.toolkit.cclass,
            declared_closed_ranges=self.closed_ranges,
            preimage_Q=self.inverses.get("Q"),
            preimage_Z=self.inverses.get("Z"),
        )


def _unquote(value: str) -> tuple[str, bool]:
    value = value.strip()
    if len(value) >= 2 and value[0] == '"' and value[-1] == '"':
        return value[1:-1], True
    return value, False


def _parse_expr(section: str, key: str, raw: str, arity: int) -> Expr:
    text, _ = _unquote(raw)
    try:
        return parse_expression(text, arity)
    except ArityError as exc:
        raise ArityError(f"[{section}] {key}: {exc}") from exc
    except ExprSyntaxError as exc:
        raise ExprSyntaxError(f"[{section}] {key}: {exc}", exc.offset,
                              tuple(exc.expected)) from exc


def parse_scenario_text(text: str, name: str = "scenario") -> ScenarioFile:
    # no inline comments: quoted piecewise expressions contain semicolons
    parser = configparser.ConfigParser(inline_comment_prefixes=None)
    parser.optionxform = str  # keys are case-sensitive (Q vs q)
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ScenarioError(f"bad scenario file: {exc}") from exc

    for section in REQUIRED_SECTIONS:
        if not parser.has_section(section):
            raise MissingSection(section)

    def get(section: str, key: str, default=None):
        if parser.has_option(section, key):
            return parser.get(section, key)
        if default is None:
            raise MissingKey(section, key)
        return default

    # [space]
    carrier_text, _ = _unquote(get("space", "carrier"))
    try:
        carrier = parse_interval_union(carrier_text)
    except ValueError as exc:
        raise ScenarioError(f"[space] carrier: {exc}") from exc
    dist_raw = get("space", "distance")
    dist_text, quoted = _unquote(dist_raw)
    if not quoted and dist_text in BUILTIN_DISTANCES:
        distance = parse_expression(BUILTIN_DISTANCES[dist_text], 2)
    elif not quoted and not any(c in dist_text for c in "()+-*/^ "):
        raise UnknownPreset(f"[space] distance: unknown built-in {dist_text!r}")
    else:
        distance = _parse_expr("space", "distance", dist_raw, 2)
    s_coeff = float(get("space", "s_coeff", "1"))
    complete = get("space", "complete", "true").strip().lower() in ("1", "true", "yes")
    space = PartialBMetricSpace(carrier, distance, s_coeff, complete)

    # [maps]
    maps = {key: _parse_expr("maps", key, get("maps", key), 1)
            for key in ("h", "eta", "Q", "Z")}
    inverses = {}
    for key, target in (("inverse_Q", "Q"), ("inverse_Z", "Z")):
        if parser.has_option("maps", key):
            inverses[target] = _parse_expr("maps", key, get("maps", key), 1)
    closed_raw = get("maps", "closed_ranges", "").strip()
    closed = frozenset(p.strip() for p in closed_raw.split(",") if p.strip())

    # [admissibility]
    gamma = _parse_expr("admissibility", "gamma", get("admissibility", "gamma"), 1)
    delta = _parse_expr("admissibility", "delta", get("admissibility", "delta"), 1)

    # [toolkit]
    def toolkit_item(key, presets, arity, wrap):
        raw = get("toolkit", key)
        text, quoted = _unquote(raw)
        if not quoted and text in presets:
            return presets[text]()
        if not quoted and not any(c in text for c in "()+-*/^ "):
            raise UnknownPreset(
                f"[toolkit] {key}: unknown preset {text!r}; "
                f"known: {sorted(presets)}"
            )
        return wrap(_parse_expr("toolkit", key, raw, arity))

    toolkit = Toolkit(
        xi=toolkit_item("xi", XI_PRESETS, 1, XiFunction),
        omega=toolkit_item("omega", OMEGA_PRESETS, 1, OmegaOneFunction),
        cclass=toolkit_item("H", CCLASS_PRESETS, 2, CClassFunction),
    )
    if parser.has_option("toolkit", "omega_class"):
        declared = get("toolkit", "omega_class").strip()
        toolkit = Toolkit(
            xi=toolkit.xi,
            omega=OmegaOneFunction(toolkit.omega.expr, toolkit.omega.name, declared),
            cclass=toolkit.cclass,
        )

    # [solver] (optional)
    solver = SolverConfig()
    if parser.has_section("solver"):
        if parser.has_option("solver", "v0"):
            solver.v0 = tuple(
                float(p) for p in get("solver", "v0").split(",") if p.strip()
            )
        solver.tol = float(get("solver", "tol", "1e-9"))
        solver.max_iters = int(get("solver", "max_iters", "10000"))

    # [verification] (optional)
    verification = VerificationConfig()
    if parser.has_section("verification") and parser.has_option("verification", "grid"):
        verification.grid = GridSpec.parse(get("verification", "grid"))

    return ScenarioFile(
        name=name,
        space=space,
        maps=maps,
        inverses=inverses,
        closed_ranges=closed,
        gamma=gamma,
        delta=delta,
        toolkit=toolkit,
        solver=solver,
        verification=verification,
    )


def load_scenario(file_bytes, name: str = "scenario") -> Scenario:
    """Parse scenario file content (bytes or str) into a Scenario."""
    if isinstance(file_bytes, bytes):
        file_bytes = file_bytes.decode("utf-8")
    return parse_scenario_text(file_bytes, name).build()


# --- bundled scenarios -----------------------------------------------------------

# Max-metric scenario whose four maps share the common fixed point 0; the
# h-range is declared closed and both inverse maps are exact.
EXAMPLE_2_6 = """\
[space]
carrier = "[0, inf)"
distance = "max(x, y)"
s_coeff = 1
complete = true

[maps]
h = "z"
eta = "piecewise(z in [0, 64.0): 0; otherwise: z / 2)"
Q = "z^2 / 2"
Z = "z^3"
inverse_Q = "sqrt(2 * z)"
inverse_Z = "cbrt(z)"
closed_ranges = h

[admissibility]
gamma = "piecewise(z in (0, 32.0): sqrt(z) / (16 * sqrt(2)); otherwise: 2)"
delta = "piecewise(z in (0, 8.0): 1 / 4; otherwise: 1)"

[toolkit]
xi = identity
omega = log3
H = half-t

[solver]
v0 = 0, 8, 100
tol = 1e-9
max_iters = 10000

[verification]
grid = 0:100:0.5
"""

# Same toolkit and admissibility, but Z picks up a sixth-power branch at
# 64; its range then has a gap, so this scenario is bundled for the
# contraction check only.  The inverse expression covers both branches.
EXAMPLE_2_2 = """\
[space]
carrier = "[0, inf)"
distance = "max(x, y)"
s_coeff = 1
complete = true

[maps]
h = "z"
eta = "piecewise(z in [0, 64.0): 0; otherwise: z / 2)"
Q = "z^2 / 2"
Z = "piecewise(z in [0, 64.0): z^3; otherwise: z^6)"
inverse_Q = "sqrt(2 * z)"
inverse_Z = "piecewise(z in [0, 262144.0): cbrt(z); otherwise: z^(1/6))"

[admissibility]
gamma = "piecewise(z in (0, 32.0): sqrt(z) / (16 * sqrt(2)); otherwise: 2)"
delta = "piecewise(z in (0, 8.0): 1 / 4; otherwise: 1)"

[toolkit]
xi = identity
omega = log3
H = half-t

[solver]
v0 = 0, 8
tol = 1e-9
max_iters = 10000

[verification]
grid = 0:128:0.64
"""

# Subtractive (weak) contraction demo on a plain metric: all four ranges
# closed, the gate constant-on, and 0 the unique common fixed point.
COROLLARY_2_5_DEMO = """\
[space]
carrier = "[0, inf)"
distance = "abs(x - y)"
s_coeff = 1
complete = true

[maps]
h = "z / 8"
eta = "z / 8"
Q = "z / 2"
Z = "z / 2"
inverse_Q = "2 * z"
inverse_Z = "2 * z"
closed_ranges = h, eta, Q, Z

[admissibility]
gamma = "1"
delta = "1"

[toolkit]
xi = identity
omega = "z / 2"
H = truncated-difference

[solver]
v0 = 1, 64
tol = 1e-9
max_iters = 10000

[verification]
grid = 0:10:0.05
"""


def corollary_2_4_demo() -> ScenarioFile:
    """Cyclic preset demo: C = D = [0, 1] with the halving map; the gate
    is constant-on and 0 is the fixed point inside C ∩ D."""
    toolkit = Toolkit(xi=xi_identity(), omega=omega_log3(), cclass=cclass_half())
    scenario = make_cyclic_preset(
        "[0, 1]", "[0, 1]", "z / 2", "z / 2", toolkit,
        name="corollary-2-4-demo",
    )
    return ScenarioFile(
        name=scenario.name,
        space=scenario.space,
        maps={"h": scenario.map_h, "eta": scenario.map_eta,
              "Q": scenario.map_Q, "Z": scenario.map_Z},
        inverses={"Q": scenario.preimage_Q, "Z": scenario.preimage_Z},
        closed_ranges=scenario.declared_closed_ranges,
        gamma=scenario.gamma_adm,
        delta=scenario.delta_adm,
        toolkit=toolkit,
        solver=SolverConfig(v0=(1.0, 0.5)),
        verification=VerificationConfig(grid=GridSpec.square(0.0, 1.0, 0.01)),
    )


_BUNDLED_TEXT = {
    "example-2-6": EXAMPLE_2_6,
    "example-2-2": EXAMPLE_2_2,
    "corollary-2-5-demo": COROLLARY_2_5_DEMO,
}

BUNDLED_NAMES = ("example-2-2", "example-2-6", "corollary-2-4-demo",
                 "corollary-2-5-demo")


def bundled_scenario_file(name: str) -> ScenarioFile:
    """Look up a bundled scenario by name (dashes and underscores are
    interchangeable)."""
    key = name.strip().replace("_", "-")
    if key in _BUNDLED_TEXT:
        return parse_scenario_text(_BUNDLED_TEXT[key], key)
    if key == "corollary-2-4-demo":
        return corollary_2_4_demo()
    raise ScenarioError(
        f"unknown bundled scenario {name!r}; available: {', '.join(BUNDLED_NAMES)}"
    )
