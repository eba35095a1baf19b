"""Session files: rank, named automorphisms, bounds and options.

The format is TOML::

    rank = 4
    compose_order = "right"
    seed = 7

    [bounds]
    L = 6
    n = 25

    [aut.Phi]
    a = "ad"
    b = "a"

A line ``a -> ad`` inside an ``[aut.*]`` section is accepted as shorthand
for ``a = "ad"``.  Set ``invertible = false`` in a section to keep a
non-invertible endomorphism; every other automorphism is inverted and
verified on load.
"""
from __future__ import annotations

import re
import sys
from dataclasses import dataclass, field

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover - exercised on 3.10
    import tomli as tomllib

from .freegroup import (
    Automorphism, NotInvertible, compose, format_letter, invert, power,
)

__all__ = ["SessionConfig", "SessionError", "parse_session", "loads_session", "dumps_session",
           "resolve_product", "DEFAULT_BOUNDS"]

DEFAULT_BOUNDS = {"L": 6, "n": 25, "P": 8, "K_max": 10, "R": 4, "q_len": 2}
DEFAULT_TOLERANCES = {"eps": 0.05, "pf_residual": 1e-12}
FORMATS = ("json", "tsv", "text")

_ARROW = re.compile(r"^(\s*)([A-Za-z])\s*->\s*([A-Za-z1]*)\s*(#.*)?$")


class SessionError(ValueError):
    pass


@dataclass
class SessionConfig:
    rank: int
    automorphisms: dict = field(default_factory=dict)
    bounds: dict = field(default_factory=lambda: dict(DEFAULT_BOUNDS))
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    compose_order: str = "right"
    seed: int = 0
    output: str = "text"
    endomorphisms: set = field(default_factory=set)  # names declared non-invertible

    def __eq__(self, other):
        if not isinstance(other, SessionConfig):
            return NotImplemented
        return (self.rank, self.bounds, self.tolerances, self.compose_order, self.seed,
                self.output, self.endomorphisms) == (
            other.rank, other.bounds, other.tolerances, other.compose_order, other.seed,
            other.output, other.endomorphisms) and \
            {k: v.images for k, v in self.automorphisms.items()} == \
            {k: v.images for k, v in other.automorphisms.items()}

    def get(self, expr: str) -> Automorphism:
        return resolve_product(expr, self.automorphisms, self.compose_order, self.rank)


def _preprocess(text: str) -> str:
    out = []
    in_aut = False
    for line in text.splitlines():
        stripped = line.strip()
        if stripped.startswith("["):
            in_aut = stripped.startswith("[aut.")
        m = _ARROW.match(line) if in_aut else None
        if m:
            line = f'{m.group(1)}{m.group(2)} = "{m.group(3)}" {m.group(4) or ""}'.rstrip()
        out.append(line)
    return "\n".join(out)


def _positive_int(name, value) -> int:
    if not isinstance(value, int) or isinstance(value, bool) or value <= 0:
        raise SessionError(f"{name} must be a positive integer, got {value!r}")
    return value


def loads_session(text: str) -> SessionConfig:
    try:
        data = tomllib.loads(_preprocess(text))
    except tomllib.TOMLDecodeError as exc:
        raise SessionError(f"syntax error: {exc}") from exc
    if "rank" not in data:
        raise SessionError("missing 'rank'")
    rank = _positive_int("rank", data["rank"])
    if rank > 26:
        raise SessionError(f"rank must be at most 26, got {rank}")
    bounds = dict(DEFAULT_BOUNDS)
    for k, v in data.get("bounds", {}).items():
        if k not in DEFAULT_BOUNDS:
            raise SessionError(f"unknown bound {k!r}")
        bounds[k] = _positive_int(k, v)
    tol = dict(DEFAULT_TOLERANCES)
    for k, v in data.get("tolerances", {}).items():
        if k not in DEFAULT_TOLERANCES:
            raise SessionError(f"unknown tolerance {k!r}")
        if not isinstance(v, (int, float)) or v <= 0:
            raise SessionError(f"tolerance {k} must be positive")
        tol[k] = float(v)
    order = data.get("compose_order", "right")
    if order not in ("right", "left"):
        raise SessionError(f"compose_order must be 'right' or 'left', got {order!r}")
    seed = data.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool):
        raise SessionError("seed must be an integer")
    output = data.get("output", "text")
    if output not in FORMATS:
        raise SessionError(f"output must be one of {FORMATS}")
    auts = {}
    endos = set()
    letters = [format_letter(i + 1) for i in range(rank)]
    for name, section in data.get("aut", {}).items():
        if not isinstance(section, dict):
            raise SessionError(f"aut.{name} must be a table")
        invertible = section.get("invertible", True)
        imgs = {}
        for key, val in section.items():
            if key == "invertible":
                continue
            if key not in letters:
                raise SessionError(f"aut.{name}: unknown generator {key!r} for rank {rank}")
            if not isinstance(val, str):
                raise SessionError(f"aut.{name}.{key}: image must be a string")
            imgs[key] = val
        missing = [x for x in letters if x not in imgs]
        if missing:
            raise SessionError(f"aut.{name}: missing images for {', '.join(missing)}")
        try:
            f = Automorphism.from_strings(imgs, rank=rank)
        except ValueError as exc:
            raise SessionError(f"aut.{name}: {exc}") from exc
        if invertible:
            try:
                f = invert(f).inverse
            except NotInvertible as exc:
                raise SessionError(f"aut.{name} is declared invertible but is not: {exc}") from exc
        else:
            endos.add(name)
        auts[name] = f
    return SessionConfig(rank, auts, bounds, tol, order, seed, output, endos)


def parse_session(path) -> SessionConfig:
    with open(path, encoding="utf-8") as fh:
        return loads_session(fh.read())


def dumps_session(cfg: SessionConfig) -> str:
    lines = [f"rank = {cfg.rank}", f'compose_order = "{cfg.compose_order}"',
             f"seed = {cfg.seed}", f'output = "{cfg.output}"', "", "[bounds]"]
    lines += [f"{k} = {v}" for k, v in cfg.bounds.items()]
    lines += ["", "[tolerances]"]
    lines += [f"{k} = {v!r}" for k, v in cfg.tolerances.items()]
    for name, f in cfg.automorphisms.items():
        lines += ["", f"[aut.{name}]"]
        lines += [f'{format_letter(i + 1)} = "{w}"' for i, w in enumerate(f.images)]
        if name in cfg.endomorphisms:
            lines.append("invertible = false")
    return "\n".join(lines) + "\n"


_TOKEN = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)(?:\^(-?\d+))?$")


def resolve_product(expr: str, auts: dict, order: str = "right", rank: int | None = None) -> Automorphism:
    """Evaluate a product such as ``"Phi^-1 Psi"`` of named automorphisms.

    With ``order="right"`` the product ``A B`` is ``compose(A, B)`` (B is
    applied first); with ``order="left"`` it is ``compose(B, A)``.
    """
    tokens = expr.replace("*", " ").split()
    if not tokens:
        raise SessionError("empty automorphism expression")
    factors = []
    for tok in tokens:
        m = _TOKEN.match(tok)
        if not m:
            raise SessionError(f"cannot parse {tok!r}")
        name, exp = m.group(1), int(m.group(2) or 1)
        if name not in auts:
            raise SessionError(f"unknown automorphism {name!r}")
        factors.append(power(auts[name], exp) if exp != 1 else auts[name])
    if order == "left":
        factors.reverse()
    elif order != "right":
        raise SessionError(f"unknown composition order {order!r}")
    out = factors[0]
    for g in factors[1:]:
        out = compose(out, g)
    return out

