"""Structured reports: plain dicts with a stable layout, plus a text view.

Probabilities are kept at full precision in the structured form and only
rounded by :func:`render_text`.
"""

from __future__ import annotations

import json
from typing import Any, Iterable, Optional

from .causes import CausalVerdict, CommonCauseResult, InterventionComparison
from .histories import ConsistencyReport, HistoryFamily

REPORT_VERSION = 1


def new_report(scenario: dict, eps: float, threshold: float, seed: Optional[int]) -> dict:
    return {
        "report_version": REPORT_VERSION,
        "scenario": scenario,
        "settings": {"eps": eps, "threshold": threshold, "seed": seed},
        "families": {},
        "probabilities": {},
        "observables": {},
        "verdicts": [],
        "common_causes": [],
        "interventions": [],
    }


def consistency_dict(fam: HistoryFamily, rep: ConsistencyReport) -> dict:
    return {
        "name": fam.name,
        "times": list(fam.times),
        "pdis": [list(p.labels) for p in fam.pdis],
        "history_count": len(rep.histories),
        "consistent": bool(rep.consistent),
        "max_offdiag": rep.max_offdiag,
    }


def probability_rows(rep: ConsistencyReport, include_zero: bool = False) -> list[dict]:
    probs = rep.require_consistent()
    rows = []
    for y, label in zip(rep.histories, rep.labels):
        p = probs[y]
        if include_zero or abs(p) > rep.eps:
            rows.append({"history": list(label), "probability": p})
    return rows


def verdict_dict(v: CausalVerdict) -> dict:
    return {
        "f": str(v.f),
        "g": str(v.g),
        "p_g_given_f": v.p_g_given_f,
        "p_f_given_g": v.p_f_given_g,
        "classification": v.classification.value,
    }


def common_cause_dict(r: CommonCauseResult) -> dict:
    return {
        "f": str(r.f),
        "g": str(r.g),
        "candidates": [
            {"event": str(c.candidate), "to_f": verdict_dict(c.to_f), "to_g": verdict_dict(c.to_g)}
            for c in r.candidates
        ],
    }


def intervention_dict(c: InterventionComparison) -> dict:
    return {
        "f": str(c.f),
        "g": str(c.g),
        "base_conditional": c.base_conditional,
        "intervened_conditional": c.intervened_conditional,
        "changed": bool(c.changed),
    }


def to_json(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2, allow_nan=False) + "\n"


def _p(x: Any) -> str:
    return "undefined" if x is None else f"{x:.6f}"


def render_text(report: dict) -> str:
    out = [f"scenario: {report['scenario'].get('name', '?')}"]
    for key, fam in report["families"].items():
        state = "consistent" if fam["consistent"] else "INCONSISTENT"
        out.append(f"[{key}] {fam['name']}: {state}, {fam['history_count']} histories, max |D offdiag| = {fam['max_offdiag']:.3g}")
    for key, rows in report["probabilities"].items():
        out.append(f"[{key}] history probabilities:")
        for r in rows:
            out.append(f"  {' -> '.join(r['history'])}: {r['probability']:.6f}")
    if report["observables"]:
        out.append("observables:")
        for k, v in sorted(report["observables"].items()):
            out.append(f"  {k} = {v:.6f}" if isinstance(v, float) else f"  {k} = {v}")
    for v in report["verdicts"]:
        out.append(
            f"verdict {v['f']} => {v['g']}: {v['classification']} "
            f"(Pr(G|F)={_p(v['p_g_given_f'])}, Pr(F|G)={_p(v['p_f_given_g'])})"
        )
    for c in report["common_causes"]:
        found = ", ".join(x["event"] for x in c["candidates"]) or "none"
        out.append(f"common causes of {c['f']} and {c['g']}: {found}")
    for c in report["interventions"]:
        out.append(
            f"intervention on Pr({c['g']} | {c['f']}): {c['base_conditional']:.6f} -> "
            f"{c['intervened_conditional']:.6f} ({'changed' if c['changed'] else 'unchanged'})"
        )
    if "error" in report:
        out.append(f"error: {report['error']['reason']}")
    return "\n".join(out) + "\n"
