"""Canonical text form of a scenario document."""

from __future__ import annotations

import re

import numpy as np

from .document import EventSpec, FamilySpec, MatrixTerm, MemberRef, Query, ScenarioDoc

_PLAIN = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


def format_real(x: float) -> str:
    s = format(float(x), ".17g")
    return "0" if s == "-0" else s


def format_complex(z: complex) -> str:
    re_, im = float(z.real), float(z.imag)
    if im == 0:
        return format_real(re_)
    if re_ == 0:
        return format_real(im) + "i"
    sign = "-" if im < 0 else "+"
    return f"{format_real(re_)}{sign}{format_real(abs(im))}i"


def format_label(label: str) -> str:
    return label if _PLAIN.match(label) else f'"{label}"'


def format_vector(v: np.ndarray) -> str:
    return "[" + ", ".join(format_complex(z) for z in v) + "]"


def format_matrix(m: np.ndarray) -> str:
    return "[" + ", ".join(format_vector(row) for row in m) + "]"


def format_term(t) -> str:
    if isinstance(t, MemberRef):
        return f"{t.pdi}.{format_label(t.label)}"
    return format_matrix(t.matrix)


def format_event(e: EventSpec) -> str:
    return f"{e.time}:" + " + ".join(format_term(t) for t in e.terms)


def format_query(q: Query) -> str:
    ev = [format_event(e) for e in q.events]
    if q.kind == "cause":
        return f"query cause {ev[0]} -> {ev[1]}"
    return " ".join(["query", q.kind, *ev])


def _family_line(keyword: str, spec: FamilySpec) -> str:
    return f"{keyword} initial={spec.initial} steps=[{', '.join(spec.steps)}] pdis=[{', '.join(spec.pdis)}]"


def render_scenario(doc: ScenarioDoc) -> str:
    out = ["space " + " ".join(str(d) for d in doc.space)]
    for name, v in doc.kets.items():
        out.append(f"ket {name} = {format_vector(v)}")
    for name, u in doc.unitaries.items():
        out.append(f"unitary {name} = {format_matrix(u)}")
    for name, pdi in doc.pdis.items():
        members = ", ".join(f"{format_label(l)}: {format_matrix(p.matrix)}" for l, p in zip(pdi.labels, pdi.members))
        out.append(f"pdi {name} = {{{members}}}")
    out.append("times " + " ".join(doc.times))
    out.append(_family_line("family", doc.family))
    if doc.intervened is not None:
        out.append(_family_line("intervened", doc.intervened))
    out.extend(format_query(q) for q in doc.queries)
    return "\n".join(out) + "\n"
