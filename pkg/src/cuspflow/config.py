"""Run configuration: TOML parsing into a validated group plus numerics and command parameters.

A config has three tables::

    [group]            # generators, optional xi0 / origin / arc margin
    [numerics]         # M0, M_max, table_size, kappa, tol, threads, grids
    [commands]         # t-range, c level, n_terms, powers, potential

Generators are given either by parameters (``kind = "hyperbolic"`` with
``attracting``, ``repelling``, ``length``; ``kind = "parabolic"`` with
``fixed``, ``shift``) or by a half-plane matrix ``matrix = [a, b, c, d]``.
Arcs are optional ``[[start, end], ...]`` pairs in radians; without them the
isometric-circle arcs widened by ``arc_margin`` are used.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .hyperbolic import from_halfplane, hyperbolic_generator, parabolic_generator
from .schottky import Arc, GeneratorSpec, SchottkyGroup, validate

TWO_GENERATOR_TOML = """
# Two generators: a hyperbolic h and a parabolic p, p fixing i.
[group]
arc_margin = 0.02

[[group.generators]]
label = "h"
kind = "hyperbolic"
attracting = -0.7853981633974483   # -pi/4
repelling = 3.9269908169872414     # 5 pi/4
length = 2.5

[[group.generators]]
label = "p"
kind = "parabolic"
fixed = 1.5707963267948966         # pi/2
shift = 5.0

[numerics]
M0 = 64
M_max = 1.152921504606846976e18    # 2^60
table_size = 16384
kappa = 0.01
tol = 1e-6
threads = 1
validation_grid = 4096

[commands]
t_min = -20.0
t_max = 5.0
t_steps = 100
n_terms = 10
powers = [1, 2, 4, 8, 16]
potential = "example61"
t_star = 0.5
"""

THREE_GENERATOR_TOML = """
# One hyperbolic and two parabolic generators.
[group]
arc_margin = 0.02

[[group.generators]]
label = "h"
kind = "hyperbolic"
attracting = -0.2617993877991494   # -pi/12
repelling = -1.832595714594046     # -7 pi/12
length = 3.5

[[group.generators]]
label = "p1"
kind = "parabolic"
fixed = 1.5707963267948966         # pi/2
shift = 12.0

[[group.generators]]
label = "p2"
kind = "parabolic"
fixed = 2.917993877991494          # 5 pi/6 + 0.3
shift = 12.0

[numerics]
M0 = 64
M_max = 1.152921504606846976e18
table_size = 16384
kappa = 0.01
tol = 1e-6
threads = 1
validation_grid = 4096

[commands]
t_min = -20.0
t_max = 5.0
t_steps = 100
n_terms = 10
powers = [1, 2, 4, 8, 16]
potential = "example61"
t_star = 0.5
"""

BUILTIN = {"two-generator": TWO_GENERATOR_TOML, "three-generator": THREE_GENERATOR_TOML}

NUMERIC_DEFAULTS = {
    "M0": 64,
    "M_max": 2.0 ** 60,
    "table_size": 2 ** 14,
    "kappa": 0.01,
    "tol": 1e-6,
    "threads": 1,
    "validation_grid": 4096,
}

COMMAND_DEFAULTS = {
    "t_min": -20.0,
    "t_max": 5.0,
    "t_steps": 100,
    "n_terms": 10,
    "powers": [1, 2, 4, 8, 16],
    "potential": "example61",
    "t_star": 0.5,
    "c": None,
}


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    group: SchottkyGroup
    numerics: dict = field(default_factory=lambda: dict(NUMERIC_DEFAULTS))
    commands: dict = field(default_factory=lambda: dict(COMMAND_DEFAULTS))
    source: str = "<memory>"


def _generator(entry, margin):
    label = entry.get("label")
    if label is None:
        raise ConfigError("every generator needs a label")
    if "matrix" in entry:
        a, b, c, d = (float(x) for x in entry["matrix"])
        iso = from_halfplane(a, b, c, d)
    else:
        kind = entry.get("kind")
        try:
            if kind == "hyperbolic":
                iso = hyperbolic_generator(float(entry["attracting"]), float(entry["repelling"]),
                                           float(entry["length"]))
            elif kind == "parabolic":
                iso = parabolic_generator(float(entry["fixed"]), float(entry["shift"]),
                                          int(entry.get("orientation", 1)))
            else:
                raise ConfigError(f"generator {label}: kind must be 'hyperbolic' or 'parabolic'")
        except KeyError as exc:
            raise ConfigError(f"generator {label}: missing parameter {exc.args[0]}") from None
    if "arcs" in entry:
        auto = GeneratorSpec.auto(label, iso)
        arcs = tuple(Arc.from_endpoints(float(s), float(e)) for s, e in entry["arcs"])
        return GeneratorSpec(label, iso, auto.kind, arcs)
    return GeneratorSpec.auto(label, iso, float(entry.get("arc_margin", margin)))


def group_from_table(table) -> SchottkyGroup:
    gens = table.get("generators")
    if not gens:
        raise ConfigError("[group] needs at least two [[group.generators]] entries")
    margin = float(table.get("arc_margin", 0.0))
    specs = tuple(_generator(e, margin) for e in gens)
    xi0 = table.get("xi0")
    origin = table.get("origin")
    if origin is not None and complex(*origin) != 0:
        return SchottkyGroup.recentered(specs, complex(*origin), xi0)
    return SchottkyGroup(specs, xi0=xi0)


def parse_config(text: str, source="<memory>", check=True) -> RunConfig:
    """Parse TOML text; with ``check`` the group must pass C1-C3 (ConditionViolation otherwise)."""
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{source}: {exc}") from None
    if "group" not in data:
        raise ConfigError(f"{source}: missing [group] table")
    group = group_from_table(data["group"])
    numerics = dict(NUMERIC_DEFAULTS)
    numerics.update(data.get("numerics", {}))
    commands = dict(COMMAND_DEFAULTS)
    commands.update(data.get("commands", {}))
    unknown = set(data) - {"group", "numerics", "commands"}
    if unknown:
        raise ConfigError(f"{source}: unknown tables {sorted(unknown)}")
    if check:
        validate(group, grid=int(numerics["validation_grid"])).raise_if_failed()
    return RunConfig(group, numerics, commands, source)


def load_config(path_or_name, check=True) -> RunConfig:
    """Load a config file, or a built-in config by name ('two-generator', 'three-generator')."""
    key = str(path_or_name)
    if key in BUILTIN:
        return parse_config(BUILTIN[key], f"builtin:{key}", check)
    p = Path(key)
    if not p.exists():
        raise ConfigError(f"config {key!r} is neither a file nor one of {sorted(BUILTIN)}")
    return parse_config(p.read_text(), str(p), check)


def two_generator() -> SchottkyGroup:
    """The hyperbolic-plus-parabolic example group."""
    return load_config("two-generator").group


def three_generator() -> SchottkyGroup:
    """One hyperbolic and two parabolic generators (N1 + N2 = 3)."""
    return load_config("three-generator").group


def two_generator_pair():
    """(p, h) of the example group, for the Gamma_n = <p, h^n> experiment."""
    g = two_generator()
    return g.generators[g.index("p")].iso, g.generators[g.index("h")].iso


__all__ = ["RunConfig", "ConfigError", "parse_config", "load_config", "two_generator", "three_generator",
           "two_generator_pair", "BUILTIN", "TWO_GENERATOR_TOML", "THREE_GENERATOR_TOML"]
