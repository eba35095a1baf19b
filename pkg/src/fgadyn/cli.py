"""Command line front end: ``fgadyn <subcommand> [options]``.

Exit status is 0 when a computation completes (whatever its verdict), 1 on
bad input and 2 when a resource cap stops the computation.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from ._kernel import CapExceeded
from .catalog import EXAMPLES, example
from .extension import (
    LiftAssignment, Peripheral, cayley_ball, electrified_vs_word, flare_probe,
    hyperbolicity_stats, zz_search,
)
from .freegroup import Automorphism, NotInvertible, invert
from .graphmap import (
    NonStabilizing, bcc_upper_bound, check_rtt, critical_constant, critical_value, filtration,
    rose_map,
)
from .growth import GrowthConfig, atoroidal_probe, classify_growth, growth_partition, iterate_lengths
from .session import SessionError, parse_session, resolve_product
from .sink import sink_approx
from .stallings import SubgroupSystem, fiber_subgroup, is_malnormal, meet
from .verify import report_json, verify_paper
from .whitehead import is_primitive

COMMANDS = ("growth", "atoroidal", "sink", "strata", "rtt", "bcc", "critical", "invert", "fiber",
            "meet", "malnormal", "primitive", "flare", "zz", "ball", "verify-paper")


class InputError(ValueError):
    pass


def _threads() -> int:
    # the compiled kernels are serial, so the cap is validated and recorded only
    raw = os.environ.get("FGADYN_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise InputError(f"FGADYN_THREADS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise InputError(f"FGADYN_THREADS must be a positive integer, got {raw!r}")
    return n


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n")


def _session(args):
    if args.aut:
        cfg = parse_session(args.aut)
        if args.compose_order:
            cfg.compose_order = args.compose_order
        return cfg
    return None


def _automorphisms(args) -> tuple[dict, str]:
    cfg = _session(args)
    if cfg is not None:
        return cfg.automorphisms, cfg.compose_order
    return {n: example(n) for n in EXAMPLES}, args.compose_order or "right"


def _one(args) -> Automorphism:
    if args.images:
        return invert(Automorphism.from_strings(args.images.split(","))).inverse
    auts, order = _automorphisms(args)
    if not args.name:
        if len(auts) == 1:
            f = next(iter(auts.values()))
        else:
            raise InputError(f"--name is required; choose from {', '.join(auts)}")
    else:
        f = resolve_product(args.name, auts, order)
    if f.rank < 3:
        print(f"warning: rank {f.rank} < 3; results about hyperbolic extensions need rank >= 3",
              file=sys.stderr)
    return f


def _lifts(args) -> LiftAssignment:
    auts, order = _automorphisms(args)
    names = args.names.split(",") if args.names else (list(auts) if args.aut else ["Phi", "Psi"])
    for n in names:
        if n not in auts:
            raise InputError(f"unknown automorphism {n!r}")
    return LiftAssignment([auts[n] for n in names], [f"t{i + 1}" for i in range(len(names))])


def _groups(text: str) -> list[list[str]]:
    return [[w for w in g.split(",") if w] for g in text.split(";") if g.strip()]


def _config(args) -> GrowthConfig:
    return GrowthConfig(eps=args.eps) if args.eps is not None else GrowthConfig()


# subcommands


def cmd_growth(args):
    f = _one(args)
    cfg = _config(args)
    n = args.n or 25
    if args.word:
        rep = classify_growth(f, args.word, n, cfg)
        if args.json:
            _emit({"word": args.word, **rep.to_dict()})
            return
        lengths = iterate_lengths(f, args.word, n)
        print(f"# {rep.describe()}")
        print("iterate\tcyclic_length")
        for i, x in enumerate(lengths):
            print(f"{i}\t{x}")
        return
    L = args.L or 4
    part = growth_partition(f, L, n, cfg)
    rows = part.exponential + part.non_exponential + part.inconclusive
    rows.sort(key=lambda r: r[0].letters.shortlex())
    if args.json:
        _emit({"counts": part.counts(), "bounds": f"L={L}, {cfg.label(n)}",
               "classes": [{"class": str(c), **r.to_dict()} for c, r in rows]})
        return
    print(f"# L={L}, {cfg.label(n)}")
    print("class\tkind\tdetail")
    for c, r in rows:
        print(f"{c}\t{r.kind}\t{r.describe()}")


def cmd_atoroidal(args):
    f = _one(args)
    v = atoroidal_probe(f, args.L or 6, args.P or 8)
    _emit(v.to_dict()) if args.json else print(v.describe())


def cmd_sink(args):
    f = _one(args)
    s = sink_approx(f, args.L or 6, args.n or 25, _config(args))
    if args.json:
        _emit(s.to_dict())
    else:
        body = "{[F]}" if s.whole_group else repr(s.system)
        print(f"{body}  malnormal={s.malnormal} phi_invariant={s.phi_invariant} "
              f"inconclusive={len(s.residual)} ({s.bounds()})")


def cmd_strata(args):
    m = rose_map(_one(args))
    _emit({"strata": [s.to_dict(m.graph) for s in filtration(m).strata]})


def cmd_rtt(args):
    m = rose_map(_one(args))
    _emit({"conditions": check_rtt(m, filtration(m))})


def cmd_bcc(args):
    _emit({"bcc": bcc_upper_bound(rose_map(_one(args)))})


def _number(x):
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    return x


def cmd_critical(args):
    if args.lam is not None and args.bcc is not None and not (args.aut or args.name or args.images):
        lam = Fraction(repr(args.lam))
        _emit({"critical": _number(critical_value(Fraction(args.bcc), lam)),
               "bcc": args.bcc, "lambda": args.lam})
        return
    m = rose_map(_one(args))
    strata = filtration(m).strata
    picks = [args.stratum] if args.stratum is not None else \
        [r for r, s in enumerate(strata) if s.kind == "EG"]
    out = []
    for r in picks:
        if not 0 <= r < len(strata):
            raise InputError(f"stratum index {r} out of range 0..{len(strata) - 1}")
        s = strata[r]
        value = critical_constant(m, s, bcc=args.bcc)
        out.append({"stratum": r, "edges": s.names(m.graph), "critical": _number(value)})
    _emit({"critical": out})


def cmd_invert(args):
    g = invert(_one(args))
    _emit({"inverse": [str(w) for w in g.images], "described": g.describe()}) if args.json \
        else print(g.describe())


def cmd_fiber(args):
    f = _one(args)
    seeds = args.seeds.split(",")
    res = fiber_subgroup(f, seeds, args.K_max)
    _emit({"stabilized_at": res.stabilized_at, "subgroup": [str(w) for w in res.graph.basis()],
           "contains": res.contains_generators(), "bounds": f"K_max={args.K_max}"})


def cmd_meet(args):
    rank = args.rank
    s1 = SubgroupSystem.from_words(_groups(args.s1), rank=rank)
    s2 = SubgroupSystem.from_words(_groups(args.s2), rank=rank)
    _emit({"meet": meet(s1, s2).generator_lists()})


def cmd_malnormal(args):
    s = SubgroupSystem.from_words(_groups(args.system), rank=args.rank, dedup=False)
    v = is_malnormal(s)
    if v.malnormal:
        _emit({"malnormal": True})
    else:
        a, b, x = v.witness
        _emit({"malnormal": False, "witness": {"s": a, "t": b, "x": str(x)}})


def cmd_primitive(args):
    _emit({"word": args.word, "primitive": is_primitive(args.word, args.rank)})


def cmd_flare(args):
    lifts = _lifts(args)
    _emit(flare_probe(lifts, args.lam if args.lam is not None else 1.5, args.m or 6, args.L or 6))


def cmd_zz(args):
    lifts = _lifts(args)
    L, P = args.L or 4, args.P or 4
    certs = zz_search(lifts, args.q_len, L, P)
    _emit({"bounds": f"q_len={args.q_len}, L={L}, P={P}",
           "certificates": [c.to_dict(lifts) for c in certs]})


def _peripherals(path, lifts, rank):
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if isinstance(data, dict):
        data = data.get("peripherals", [data])
    out = []
    for item in data:
        out.append(Peripheral.from_words(item["subgroup"], item.get("stabilizer", []),
                                         rank=rank, lifts=lifts))
    return out


def cmd_ball(args):
    if args.free:
        lifts, rank = None, args.free
    else:
        lifts = _lifts(args)
        rank = lifts.rank
    pers = _peripherals(args.cone, lifts, rank) if args.cone else []
    ball = cayley_ball(lifts, args.radius or 3, pers, rank=rank)
    if args.export:
        with open(args.export, "w", encoding="utf-8") as fh:
            fh.write(ball.to_tsv())
    if args.json or args.stats:
        stats = hyperbolicity_stats(ball, samples=args.stats or 2000, seed=args.seed)
        elec, word = electrified_vs_word(ball, [0])
        stats.update({"radius": ball.radius, "vertices": len(ball.vertices), "cones": ball.n_cones,
                      "electrified_le_word": bool((elec <= word + 1e-9).all())})
        _emit(stats)
    elif not args.export:
        sys.stdout.write(ball.to_tsv())


def cmd_verify_paper(args):
    scale = {}
    for key in ("L", "n", "P"):
        if getattr(args, key):
            scale[key] = getattr(args, key)
    rep = verify_paper(scale, _config(args), seed=args.seed, threads=args.threads)
    if args.json:
        sys.stdout.write(report_json(rep))
        return
    for c in rep["claims"]:
        print(f"{c['verdict']:<17} {c['id']}  ({c['bounds']})")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--aut", "--lifts", dest="aut", metavar="FILE", help="session TOML file")
    common.add_argument("--name", help="automorphism name or product such as 'Phi^-1 Psi'")
    common.add_argument("--images", help="comma-separated images, e.g. ad,a,b,c")
    common.add_argument("--names", help="comma-separated lift names for extension commands")
    common.add_argument("-L", type=int)
    common.add_argument("-n", type=int)
    common.add_argument("-P", type=int)
    common.add_argument("-m", type=int)
    common.add_argument("--radius", type=int)
    common.add_argument("--lambda", dest="lam", type=float)
    common.add_argument("--eps", type=float, help="growth threshold above 1")
    common.add_argument("--compose-order", choices=("right", "left"))
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--json", action="store_true")
    common.add_argument("--rank", type=int)

    p = argparse.ArgumentParser(prog="fgadyn", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    sp = {c: sub.add_parser(c, parents=[common]) for c in COMMANDS}
    sp["growth"].add_argument("--word")
    sp["critical"].add_argument("--stratum", type=int)
    sp["critical"].add_argument("--bcc", type=int)
    sp["fiber"].add_argument("--seeds", default="b,c")
    sp["fiber"].add_argument("--K-max", dest="K_max", type=int, default=10)
    sp["meet"].add_argument("--s1", required=True, help="groups separated by ';', words by ','")
    sp["meet"].add_argument("--s2", required=True)
    sp["malnormal"].add_argument("--system", required=True)
    sp["primitive"].add_argument("--word", required=True)
    sp["zz"].add_argument("--q-len", dest="q_len", type=int, default=2)
    sp["ball"].add_argument("--cone", metavar="FILE", help="peripheral JSON")
    sp["ball"].add_argument("--stats", type=int, help="sampled triples for the delta estimate")
    sp["ball"].add_argument("--export", metavar="FILE", help="write the edge list as TSV")
    sp["ball"].add_argument("--free", type=int, metavar="RANK", help="ball in the free group only")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handler = globals()["cmd_" + args.command.replace("-", "_")]
    try:
        args.threads = _threads()
        handler(args)
    except (CapExceeded, NonStabilizing) as exc:
        print(f"error: resource cap: {exc}", file=sys.stderr)
        return 2
    except (InputError, SessionError, NotInvertible, ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
