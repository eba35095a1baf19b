"""Desk-scale approximation of the nonattracting sink of an automorphism."""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

from .freegroup import Automorphism, Word, apply, identity, invert
from .graphmap import count_eg_strata, rose_map
from .growth import GrowthConfig, Partition, atoroidal_probe, growth_partition
from .stallings import (
    CoreGraph, SubgroupSystem, carries, contains, fold, is_malnormal, pullback,
)
from .whitehead import fixed_rank1_factor_probe

__all__ = ["SinkApproximation", "sink_approx", "sinks_equal", "hyperbolicity_hypothesis_check",
           "meet_closure"]


@dataclass
class SinkApproximation:
    system: SubgroupSystem
    L: int
    n: int
    config: GrowthConfig
    phi_invariant: bool
    malnormal: bool
    residual: list = field(default_factory=list)      # inconclusive classes
    review: list = field(default_factory=list)        # components of rank >= 2
    whole_group: bool = False
    partition: Partition | None = field(default=None, repr=False)

    @property
    def scale(self) -> tuple:
        return (self.L, self.n, self.config)

    @property
    def empty(self) -> bool:
        return len(self.system) == 0

    def bounds(self) -> str:
        return f"L={self.L}, {self.config.label(self.n)}"

    def to_dict(self) -> dict:
        return {
            "components": self.system.generator_lists(),
            "whole_group": self.whole_group,
            "phi_invariant": self.phi_invariant,
            "malnormal": self.malnormal,
            "inconclusive": [str(c) for c in self.residual],
            "requires_manual_review": self.review,
            "bounds": self.bounds(),
        }


def _join(a: CoreGraph, b: CoreGraph, w: Word, rank: int) -> CoreGraph:
    wi = ~w
    return fold(a.basis() + [wi * x * w for x in b.basis()], rank=rank)


def meet_closure(components: list[CoreGraph], rank: int) -> list[CoreGraph]:
    """Merge components until the system is malnormal.

    Two components whose pullback has a nontrivial component ``A ∩ w^-1 B w``
    are replaced by ``<A, w^-1 B w>``; a component whose self-pullback has a
    component beyond the identity coset absorbs the conjugator.
    """
    comps = list(components)
    changed = True
    while changed:
        changed = False
        sysm = SubgroupSystem(comps, rank=rank)
        comps = list(sysm.components)
        for i in range(len(comps)):
            for j in range(i, len(comps)):
                for _, w in pullback(comps[i], comps[j]):
                    if i == j:
                        if not w or contains(comps[i], w) is not None:
                            continue
                        merged = fold(comps[i].basis() + [w], rank=rank)
                    else:
                        merged = _join(comps[i], comps[j], w, rank)
                    comps = [c for k, c in enumerate(comps) if k not in (i, j)] + [merged]
                    changed = True
                    break
                if changed:
                    break
            if changed:
                break
    return list(SubgroupSystem(comps, rank=rank).components)


def _invariant(f: Automorphism, system: SubgroupSystem) -> bool:
    """Check that f permutes the components up to conjugacy (exact)."""
    codes = {g.unbased_code() for g in system.components}
    for g in system.components:
        img = fold([apply(f, w) for w in g.basis()], rank=f.rank)
        if img.unbased_code() not in codes:
            return False
    return True


def sink_approx(f: Automorphism, L: int = 6, n: int = 25,
                config: GrowthConfig = GrowthConfig()) -> SinkApproximation:
    """Approximate the sink from the growth of all classes of length <= L."""
    f = invert(f).inverse if not f.verified else f
    part = growth_partition(f, L, n, config)
    rank = f.rank
    if not part.exponential:
        whole = fold([Word._trusted((i + 1,)) for i in range(rank)], rank=rank)
        system = SubgroupSystem([whole], rank=rank, malnormal=True, free_factor_system=True)
        return SinkApproximation(system, L, n, config, True, True,
                                 [c for c, _ in part.inconclusive], [], True, part)
    comps: list[CoreGraph] = []
    for c, _ in part.non_exponential:
        if any(carries(g, c.letters) for g in comps):
            continue
        comps.append(fold([c.letters], rank=rank))
        comps = meet_closure(comps, rank)
    system = SubgroupSystem(comps, rank=rank)
    mal = is_malnormal(system).malnormal
    inv = _invariant(f, system)
    system.malnormal = mal
    review = [[str(w) for w in g.basis()] for g in system.components if g.subgroup_rank >= 2]
    return SinkApproximation(system, L, n, config, inv, mal,
                             [c for c, _ in part.inconclusive], review, False, part)


def sinks_equal(s1, s2) -> bool:
    """Equality up to conjugacy of components; accepts approximations or systems."""
    if isinstance(s1, SinkApproximation) and isinstance(s2, SinkApproximation):
        if (s1.L, s1.n, s1.config) != (s2.L, s2.n, s2.config):
            warnings.warn("comparing sinks computed at different scales", stacklevel=2)
    a = s1.system if isinstance(s1, SinkApproximation) else s1
    b = s2.system if isinstance(s2, SinkApproximation) else s2
    return a.codes() == b.codes()


def _common_fixed(f: Automorphism, g: Automorphism, L: int, P: int) -> list[str]:
    fa = {str(c) for c in fixed_rank1_factor_probe(f, L, P)}
    ga = {str(c) for c in fixed_rank1_factor_probe(g, L, P)}
    return sorted(fa & ga)


def hyperbolicity_hypothesis_check(auts: dict, L: int = 6, n: int = 25, P: int = 8,
                                   config: GrowthConfig = GrowthConfig()) -> dict:
    """Evaluate sink/growth hypotheses for a family of automorphisms at one scale.

    ``auts`` maps names to automorphisms.  Every verdict carries its bounds;
    nothing here proves hyperbolicity.
    """
    names = list(auts)
    scale = f"L={L}, P={P}, {config.label(n)}"
    per = {}
    sinks = {}
    for name in names:
        f = auts[name]
        s = sink_approx(f, L, n, config)
        sinks[name] = s
        at = atoroidal_probe(f, L, P)
        per[name] = {
            "sink": s.to_dict(),
            "atoroidal_probe": at.to_dict(),
            "eg_strata": count_eg_strata(rose_map(f)),
            "fixed_primitive_classes": [str(c) for c in fixed_rank1_factor_probe(f, L, P)],
        }
    pairs = []
    for i, a in enumerate(names):
        for b in names[i + 1:]:
            pairs.append({
                "pair": [a, b],
                "common_fixed_rank1": _common_fixed(auts[a], auts[b], L, P),
                "sinks_equal": sinks_equal(sinks[a], sinks[b]),
            })
    verdicts = []
    obstructions = []
    for name in names:
        s = sinks[name]
        if s.whole_group:
            obstructions.append(f"sink({name}) is the whole group")
        elif not s.empty:
            obstructions.append(f"sink({name}) = {s.system!r} is nonempty")
        if not per[name]["atoroidal_probe"]["verdict"] == "no-periodic-up-to":
            p = per[name]["atoroidal_probe"]
            obstructions.append(f"{name} has periodic class [{p['class']}] of period {p['period']}")
    for p in pairs:
        if p["common_fixed_rank1"]:
            obstructions.append(f"{p['pair'][0]} and {p['pair'][1]} share fixed primitive classes "
                                f"{p['common_fixed_rank1']}")
    if len(names) < 2:
        verdicts.append(f"degenerate: fewer than two automorphisms (scale {scale})")
    if obstructions:
        verdicts.extend(f"obstruction found: {o} (scale {scale})" for o in obstructions)
    else:
        verdicts.append(f"consistent with hyperbolic extension (empty sinks and no short periodic "
                        f"classes at scale {scale})")
    nonempty = [nm for nm in names if not sinks[nm].empty]
    if nonempty:
        equal = all(p["sinks_equal"] for p in pairs)
        verdicts.append(
            f"cusp-preserving relative hyperbolicity predicted only if sinks equal: "
            f"sinks {'equal' if equal else 'differ'} (scale {scale})")
    return {"scale": scale, "automorphisms": per, "pairs": pairs, "verdicts": verdicts}
