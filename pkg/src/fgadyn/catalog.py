"""Worked examples shipped with the toolkit."""
from __future__ import annotations

from .freegroup import Automorphism, invert

__all__ = ["EXAMPLES", "example", "example_family", "RANK4_TOML", "RANK5_TOML"]

EXAMPLES = {
    # rank 4 pair
    "Phi": ["ad", "a", "b", "c"],
    "Psi": ["ac", "a", "b", "db"],
    # rank 5 pair
    "Phi1": ["ac", "a", "b", "dc", "ec"],
    "Phi2": ["ad", "a", "b", "c", "e"],
    # Dehn twist on F2
    "twist": ["a", "ba"],
}

FAMILIES = {
    "rank4": ("Phi", "Psi"),
    "rank5": ("Phi1", "Phi2"),
}


def example(name: str) -> Automorphism:
    try:
        imgs = EXAMPLES[name]
    except KeyError:
        raise ValueError(f"unknown example {name!r}; known: {', '.join(EXAMPLES)}") from None
    return invert(Automorphism.from_strings(imgs)).inverse


def example_family(family: str) -> dict:
    return {n: example(n) for n in FAMILIES[family]}


def _toml(names) -> str:
    rank = len(EXAMPLES[names[0]])
    out = [f"rank = {rank}", 'compose_order = "right"', "seed = 0", ""]
    for n in names:
        out.append(f"[aut.{n}]")
        out += [f'{chr(97 + i)} = "{w}"' for i, w in enumerate(EXAMPLES[n])]
        out.append("")
    return "\n".join(out)


RANK4_TOML = _toml(FAMILIES["rank4"])
RANK5_TOML = _toml(FAMILIES["rank5"])
