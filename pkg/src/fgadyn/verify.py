"""Reproduction report for the worked examples.

Each claim gets a verdict in {reproduced, refuted-at-scale, inconclusive}
together with the objects that were computed and the bounds used.  Claims
whose meaning depends on how a product of automorphisms is read are run
under both composition orders.
"""
from __future__ import annotations

import json

from .catalog import example
from .extension import LiftAssignment, zz_search
from .graphmap import filtration, rose_map
from .growth import GrowthConfig, atoroidal_probe
from .session import resolve_product
from .sink import sink_approx
from .stallings import fiber_subgroup

__all__ = ["verify_paper", "report_json", "SCHEMA_VERSION", "DEFAULT_SCALE"]

SCHEMA_VERSION = 1
ORDERS = ("right", "left")
DEFAULT_SCALE = {"L": 6, "n": 25, "P": 8, "K_max": 10, "q_len": 2, "zz_L": 4, "zz_P": 4}
REPRODUCED, REFUTED, INCONCLUSIVE = "reproduced", "refuted-at-scale", "inconclusive"


def _combine(verdicts) -> str:
    verdicts = list(verdicts)
    if all(v == REPRODUCED for v in verdicts):
        return REPRODUCED
    if any(v == REFUTED for v in verdicts):
        return REFUTED
    return INCONCLUSIVE


def _claim(cid, statement, verdict, bounds, computed=None, per_order=None) -> dict:
    d = {"id": cid, "statement": statement, "verdict": verdict, "bounds": bounds,
         "detail": f"{verdict} at {bounds}"}
    if computed is not None:
        d["computed"] = computed
    if per_order is not None:
        d["per_convention"] = per_order
    return d


def _atoroidal(names, L, P) -> dict:
    bounds = f"L={L}, P={P}"
    found = {n: atoroidal_probe(example(n), L, P) for n in names}
    verdict = REPRODUCED if all(v.atoroidal_at_scale for v in found.values()) else REFUTED
    return _claim("atoroidal:" + ",".join(names), f"{' and '.join(names)} have no periodic class",
                  verdict, bounds, {n: v.to_dict() for n, v in found.items()})


def _strata(name, expected) -> dict:
    m = rose_map(example(name))
    strata = [s.to_dict(m.graph) for s in filtration(m).strata]
    got = [(s["edges"], s["class"]) for s in strata]
    verdict = REPRODUCED if got == expected else REFUTED
    shape = "; ".join(f"{c} {{{','.join(e)}}}" for e, c in expected)
    return _claim(f"strata:{name}", f"filtration of {name} is {shape}", verdict,
                  "pf_tol=1e-12, rose representative", {"strata": strata})


def _sink(name, expected, L, n, config) -> dict:
    s = sink_approx(example(name), L, n, config)
    got = s.system.generator_lists()
    ok = (not s.whole_group and got == expected and not s.residual
          and (not expected or (s.malnormal and s.phi_invariant)))
    if ok:
        verdict = REPRODUCED
    elif s.residual and not s.system.components:
        verdict = INCONCLUSIVE
    else:
        verdict = REFUTED
    want = "empty" if not expected else "{" + ", ".join("<" + ",".join(g) + ">" for g in expected) + "}"
    return _claim(f"sink:{name}", f"sink of {name} is {want}", verdict, s.bounds(), s.to_dict())


def _fiber(names, seeds, K_max) -> dict:
    auts = {n: example(n) for n in names}
    expr = f"{names[0]}^-1 {names[1]}"
    per = {}
    for order in ORDERS:
        f = resolve_product(expr, auts, order)
        res = fiber_subgroup(f, seeds, K_max)
        inside = res.contains_generators()
        if all(inside.values()):
            v = REPRODUCED
        elif res.stabilized:
            v = REFUTED
        else:
            v = INCONCLUSIVE
        per[order] = {
            "verdict": v,
            "automorphism": f.describe(),
            "stabilized_at": res.stabilized_at,
            "subgroup": [str(w) for w in res.graph.basis()],
            "contains": inside,
            "missing": sorted(x for x, ok in inside.items() if not ok),
        }
    return _claim(f"fiber:{expr}", f"<{expr}, {', '.join(seeds)}> contains the whole fiber group",
                  _combine(p["verdict"] for p in per.values()), f"K_max={K_max}", per_order=per)


def _zz(names, word, q_len, L, P) -> dict:
    lifts = LiftAssignment([example(n) for n in names])
    certs = zz_search(lifts, q_len, L, P)
    expr = f"{names[0]}^-1 {names[1]}"
    per = {}
    for order in ORDERS:
        # the product as a word in t1, t2; right order applies the last factor first
        q = lifts.parse_q("t1^-1 t2" if order == "right" else "t2 t1^-1")
        hit = [c for c in certs if str(c.cls) == word and c.q == q and c.verified]
        per[order] = {
            "verdict": REPRODUCED if hit else INCONCLUSIVE,
            "product": lifts.format_q(q),
            "certificate": hit[0].to_dict(lifts) if hit else None,
        }
    computed = {"certificates": len(certs),
                "fiber_words": sorted({str(c.cls) for c in certs})[:20]}
    return _claim(f"zz:{','.join(names)}", f"a Z+Z subgroup built from [{word}] and {expr}",
                  _combine(p["verdict"] for p in per.values()), f"q_len={q_len}, L={L}, P={P}",
                  computed, per)


def verify_paper(scale: dict | None = None, config: GrowthConfig = GrowthConfig(),
                 seed: int = 0, threads: int = 1) -> dict:
    sc = dict(DEFAULT_SCALE)
    sc.update(scale or {})
    L, n, P = sc["L"], sc["n"], sc["P"]
    claims = [
        _atoroidal(["Phi", "Psi"], L, P),
        _strata("Phi", [(["a", "b", "c", "d"], "EG")]),
        _strata("Psi", [(["a", "b", "c"], "EG"), (["d"], "NEG")]),
        _strata("Phi2", [(["a", "b", "c", "d"], "EG"), (["e"], "NEG")]),
        _sink("Phi", [], L, n, config),
        _sink("Psi", [], L, n, config),
        _sink("Phi1", [], L, n, config),
        _sink("Phi2", [["e"]], L, n, config),
        _fiber(["Phi", "Psi"], ["b", "c"], sc["K_max"]),
        _fiber(["Phi1", "Phi2"], ["b", "c"], sc["K_max"]),
        _zz(["Phi", "Psi"], "b", sc["q_len"], sc["zz_L"], sc["zz_P"]),
    ]
    summary = {}
    for c in claims:
        summary[c["verdict"]] = summary.get(c["verdict"], 0) + 1
    return {
        "schema": SCHEMA_VERSION,
        "scale": sc,
        "growth_config": {"window": config.window, "eps": config.eps, "ratio_tol": config.ratio_tol},
        "seed": seed,
        "threads": threads,
        "claims": claims,
        "summary": summary,
    }


def report_json(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
