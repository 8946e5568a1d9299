"""Recursive-descent parser for ``.chq`` scenario documents.

Validation is eager: kets must be normalized, unitaries unitary and PDIs
valid at the line that declares them, and the family is assembled as
soon as it is declared.  Any failure becomes a :class:`ParseError`
carrying the position of the offending construct.
"""

from __future__ import annotations

import cmath
import math
from typing import Callable, Optional, Union

import numpy as np

from .. import numerics as nx
from ..errors import CHError, ParseError
from ..projectors import Projector, is_projector, projector_from_ket, validate_pdi
from ..scenarios import AXES, SpinDirection, rotation_unitary
from .document import EventSpec, FamilySpec, MatrixTerm, MemberRef, Query, ScenarioDoc
from .lexer import EOF, IMAG, NAME, NEWLINE, NUMBER, OP, STRING, Token, decode, tokenize
from .render import format_event

MAX_DIM = 256
MAX_DEPTH = 64

_CONSTANTS = {"pi": math.pi, "sqrt2": math.sqrt(2), "i": 1j}
_FUNCTIONS: dict[str, Callable[[complex], complex]] = {
    "sqrt": cmath.sqrt,
    "exp": cmath.exp,
    "cos": cmath.cos,
    "sin": cmath.sin,
}
_BUILDERS = ("identity", "proj", "kron", "rot", "adj")
_STATEMENTS = ("space", "ket", "unitary", "pdi", "times", "family", "intervened", "query")
RESERVED = frozenset([*_CONSTANTS, *_FUNCTIONS, *_BUILDERS, *_STATEMENTS])


class _Parser:
    def __init__(self, tokens: list[Token], eps: float):
        self.toks = tokens
        self.pos = 0
        self.eps = eps
        self.depth = 0
        self.space: Optional[tuple[int, ...]] = None
        self.kets: dict[str, np.ndarray] = {}
        self.unitaries: dict[str, np.ndarray] = {}
        self.pdis: dict = {}
        self.times: Optional[tuple[str, ...]] = None
        self.family: Optional[FamilySpec] = None
        self.intervened: Optional[FamilySpec] = None
        self.queries: list[Query] = []
        self.doc: Optional[ScenarioDoc] = None

    # -- token helpers ------------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.toks[self.pos]

    def advance(self) -> Token:
        t = self.toks[self.pos]
        if t.kind != EOF:
            self.pos += 1
        return t

    def error(self, message: str, expected: str = "", at: Optional[Token] = None) -> ParseError:
        t = at or self.tok
        return ParseError(t.line, t.column, message, expected)

    def at_op(self, value: str) -> bool:
        return self.tok.kind == OP and self.tok.value == value

    def at_name(self, value: Optional[str] = None) -> bool:
        return self.tok.kind == NAME and (value is None or self.tok.value == value)

    def expect_op(self, value: str) -> Token:
        if not self.at_op(value):
            raise self.error(f"unexpected {self.tok.describe()}", repr(value))
        return self.advance()

    def expect_name(self, what: str = "name") -> Token:
        if self.tok.kind != NAME:
            raise self.error(f"unexpected {self.tok.describe()}", what)
        return self.advance()

    def expect_keyword(self, word: str) -> Token:
        if not self.at_name(word):
            raise self.error(f"unexpected {self.tok.describe()}", repr(word))
        return self.advance()

    def expect_int(self, what: str = "integer") -> int:
        t = self.tok
        if t.kind != NUMBER or not float(t.value).is_integer():
            raise self.error(f"unexpected {t.describe()}", what)
        self.advance()
        return int(t.value)

    def end_statement(self) -> None:
        if self.tok.kind == EOF:
            return
        if self.tok.kind != NEWLINE:
            raise self.error(f"unexpected {self.tok.describe()}", "end of line")
        self.advance()

    def enter(self) -> None:
        self.depth += 1
        if self.depth > MAX_DEPTH:
            raise self.error(f"expression nested deeper than {MAX_DEPTH} levels")

    def leave(self) -> None:
        self.depth -= 1

    # -- document -----------------------------------------------------------

    def parse(self) -> ScenarioDoc:
        while self.tok.kind == NEWLINE:
            self.advance()
        while self.tok.kind != EOF:
            head = self.tok
            if head.kind != NAME or head.value not in _STATEMENTS:
                raise self.error(f"unexpected {head.describe()}", "one of " + ", ".join(_STATEMENTS))
            getattr(self, "stmt_" + head.value)(self.advance())
            self.end_statement()
            while self.tok.kind == NEWLINE:
                self.advance()
        if self.space is None:
            raise self.error("document declares no space", "'space'")
        if self.family is None:
            raise self.error("document declares no family", "'family'")
        return self.doc

    def need_space(self, head: Token) -> int:
        if self.space is None:
            raise self.error(f"'{head.value}' before 'space'", "'space' declaration first", head)
        return self.dim

    @property
    def dim(self) -> int:
        return int(np.prod(self.space))

    def new_name(self, kind: str) -> Token:
        t = self.expect_name(f"{kind} name")
        if t.value in RESERVED:
            raise self.error(f"{t.value!r} is reserved", f"{kind} name", t)
        if t.value in self.kets or t.value in self.unitaries or t.value in self.pdis:
            raise self.error(f"{t.value!r} is already defined", f"new {kind} name", t)
        return t

    def semantic(self, at: Token, exc: Exception) -> ParseError:
        return ParseError(at.line, at.column, f"{type(exc).__name__}: {exc}")

    # -- statements ---------------------------------------------------------

    def stmt_space(self, head: Token) -> None:
        if self.space is not None:
            raise self.error("'space' declared twice", at=head)
        dims = [self.expect_int("dimension")]
        while self.tok.kind == NUMBER:
            dims.append(self.expect_int("dimension"))
        total = 1
        for d in dims:
            if d < 1:
                raise self.error("dimensions must be positive", at=head)
            total *= d
        if total > MAX_DIM:
            raise self.error(f"total dimension {total} exceeds {MAX_DIM}", at=head)
        self.space = tuple(dims)

    def stmt_ket(self, head: Token) -> None:
        self.need_space(head)
        name = self.new_name("ket")
        self.expect_op("=")
        v = self.opexpr()
        if v.ndim != 1:
            raise self.error(f"ket {name.value!r} is not a vector (shape {v.shape})", at=name)
        n = float(np.linalg.norm(v))
        if abs(n - 1) > self.eps:
            raise self.error(f"ket {name.value!r} is not normalized (norm={n:.12g})", at=name)
        self.kets[name.value] = v

    def stmt_unitary(self, head: Token) -> None:
        self.need_space(head)
        name = self.new_name("unitary")
        self.expect_op("=")
        u = self.opexpr()
        if u.ndim != 2 or u.shape[0] != u.shape[1]:
            raise self.error(f"unitary {name.value!r} is not a square matrix (shape {u.shape})", at=name)
        if not nx.is_unitary(u, self.eps):
            raise self.error(f"NotUnitary: {name.value!r} is not unitary within eps={self.eps:g}", at=name)
        self.unitaries[name.value] = u

    def stmt_pdi(self, head: Token) -> None:
        d = self.need_space(head)
        name = self.new_name("pdi")
        self.expect_op("=")
        self.expect_op("{")
        labels, members = [], []
        while not self.at_op("}"):
            lt = self.tok
            if lt.kind not in (NAME, STRING):
                raise self.error(f"unexpected {lt.describe()}", "member label")
            self.advance()
            if lt.value in labels:
                raise self.error(f"duplicate label {lt.value!r}", at=lt)
            self.expect_op(":")
            m = self.opexpr()
            if m.shape != (d, d):
                raise self.error(f"member {lt.value!r} has shape {m.shape}, expected {(d, d)}", at=lt)
            labels.append(lt.value)
            members.append(m)
            if not self.at_op("}"):
                self.expect_op(",")
        self.expect_op("}")
        if not members:
            raise self.error(f"pdi {name.value!r} has no members", at=name)
        try:
            self.pdis[name.value] = validate_pdi(members, self.eps, labels)
        except (CHError, ValueError) as exc:
            raise self.semantic(head, exc) from None

    def stmt_times(self, head: Token) -> None:
        if self.times is not None:
            raise self.error("'times' declared twice", at=head)
        labels = []
        while self.tok.kind == NAME:
            t = self.advance()
            if t.value in labels:
                raise self.error(f"duplicate time label {t.value!r}", at=t)
            labels.append(t.value)
        if len(labels) < 2:
            raise self.error("need at least two time labels", "time label")
        self.times = tuple(labels)

    def name_list(self, table: dict, kind: str) -> tuple[str, ...]:
        self.expect_op("[")
        out = []
        while not self.at_op("]"):
            t = self.expect_name(f"{kind} name")
            if t.value not in table:
                raise self.error(f"undefined {kind} {t.value!r}", at=t)
            out.append(t.value)
            if not self.at_op("]"):
                self.expect_op(",")
        self.expect_op("]")
        return tuple(out)

    def family_fields(self, head: Token, defaults: Optional[FamilySpec]) -> FamilySpec:
        fields: dict = {}
        while self.tok.kind == NAME and self.tok.value in ("initial", "steps", "pdis"):
            key = self.advance()
            if key.value in fields:
                raise self.error(f"{key.value!r} given twice", at=key)
            self.expect_op("=")
            if key.value == "initial":
                t = self.expect_name("ket name")
                if t.value not in self.kets:
                    raise self.error(f"undefined ket {t.value!r}", at=t)
                fields["initial"] = t.value
            elif key.value == "steps":
                fields["steps"] = self.name_list(self.unitaries, "unitary")
            else:
                fields["pdis"] = self.name_list(self.pdis, "pdi")
        for key in ("initial", "steps", "pdis"):
            if key not in fields:
                if defaults is None:
                    raise self.error(f"family is missing {key!r}", f"'{key}='")
                fields[key] = getattr(defaults, key)
        return FamilySpec(fields["initial"], fields["steps"], fields["pdis"])

    def check_family(self, head: Token, spec: FamilySpec, name: str) -> None:
        try:
            self.snapshot().build(spec, name)
        except (CHError, ValueError) as exc:
            raise self.semantic(head, exc) from None

    def stmt_family(self, head: Token) -> None:
        if self.times is None:
            raise self.error("'family' before 'times'", at=head)
        if self.family is not None:
            raise self.error("only one family per document", at=head)
        spec = self.family_fields(head, None)
        self.family = spec
        self.check_family(head, spec, "family")

    def stmt_intervened(self, head: Token) -> None:
        if self.family is None:
            raise self.error("'intervened' before 'family'", at=head)
        if self.intervened is not None:
            raise self.error("only one intervened family per document", at=head)
        spec = self.family_fields(head, self.family)
        self.intervened = spec
        self.check_family(head, spec, "intervened")

    def stmt_query(self, head: Token) -> None:
        if self.family is None:
            raise self.error("'query' before 'family'", at=head)
        kind = self.expect_name("query kind")
        k = kind.value
        if k in ("consistency", "probs"):
            events = ()
        elif k == "cause":
            f = self.event()
            self.expect_op("->")
            events = (f, self.event())
        elif k == "causes":
            events = (self.event(),)
        elif k in ("common_cause", "compare"):
            events = (self.event(), self.event())
        else:
            raise self.error(f"unknown query {k!r}", "consistency, probs, cause, causes, common_cause or compare", kind)
        if k == "compare" and self.intervened is None:
            raise self.error("'compare' needs an 'intervened' family", at=kind)
        self.queries.append(Query(k, events))
        self.snapshot()

    def event(self) -> EventSpec:
        t = self.expect_name("time label")
        if t.value not in self.times[1:]:
            raise self.error(f"{t.value!r} is not a time carrying a PDI", "one of " + " ".join(self.times[1:]), t)
        self.expect_op(":")
        d = self.dim
        terms = []
        while True:
            start = self.tok
            if self.tok.kind == NAME and self.tok.value in self.pdis and self.toks[self.pos + 1].value == ".":
                pdi = self.advance().value
                self.advance()
                lt = self.tok
                if lt.kind not in (NAME, STRING):
                    raise self.error(f"unexpected {lt.describe()}", "member label")
                self.advance()
                if lt.value not in self.pdis[pdi].labels:
                    raise self.error(f"pdi {pdi!r} has no member {lt.value!r}", at=lt)
                terms.append(MemberRef(pdi, lt.value))
            else:
                m = self.opprod()
                if m.shape != (d, d) or not is_projector(m, self.eps):
                    raise self.error("event term is not a projector on the full space", at=start)
                terms.append(MatrixTerm(m))
            if not self.at_op("+"):
                break
            self.advance()
        spec = EventSpec(t.value, tuple(terms))
        spec = EventSpec(spec.time, spec.terms, format_event(spec))
        total = sum(
            (self.pdis[x.pdi].member(x.label).matrix if isinstance(x, MemberRef) else x.matrix for x in terms),
            np.zeros((d, d), dtype=np.complex128),
        )
        if not is_projector(total, self.eps):
            raise self.error("event terms do not sum to a projector", at=t)
        return spec

    def snapshot(self) -> ScenarioDoc:
        if self.doc is None:
            self.doc = ScenarioDoc(
                space=self.space, kets=self.kets, unitaries=self.unitaries, pdis=self.pdis,
                times=self.times, family=self.family, eps=self.eps,
            )
        self.doc.family = self.family
        self.doc.intervened = self.intervened
        self.doc.queries = tuple(self.queries)
        return self.doc

    # -- operator expressions (vectors and matrices) ------------------------

    def opexpr(self) -> np.ndarray:
        start = self.tok
        v = self.opprod()
        while self.at_op("+") or self.at_op("-"):
            op = self.advance().value
            w = self.opprod()
            if v.shape != w.shape:
                raise self.error(f"cannot add shapes {v.shape} and {w.shape}", at=start)
            with np.errstate(all="ignore"):
                v = self._checked(v + w if op == "+" else v - w, start)
        return v

    def opprod(self) -> np.ndarray:
        start = self.tok
        v = self.opatom()
        while self.at_op("@"):
            self.advance()
            w = self.opatom()
            if v.ndim != 2 or v.shape[1] != w.shape[0]:
                raise self.error(f"cannot multiply shapes {v.shape} and {w.shape}", at=start)
            with np.errstate(all="ignore"):
                v = self._checked(v @ w, start)
        return v

    def _checked(self, value: np.ndarray, at: Token) -> np.ndarray:
        if value.size and max(value.shape) > MAX_DIM:
            raise self.error(f"dimension exceeds {MAX_DIM}", at=at)
        if not np.all(np.isfinite(value)):
            raise self.error("non-finite entries", at=at)
        return value

    def opatom(self) -> np.ndarray:
        t = self.tok
        self.enter()
        try:
            if self.at_op("["):
                return self._checked(self.literal(), t)
            if self.at_op("("):
                self.advance()
                v = self.opexpr()
                self.expect_op(")")
                return v
            if t.kind != NAME:
                raise self.error(f"unexpected {t.describe()}", "vector, matrix or name")
            name = t.value
            if name in self.kets:
                self.advance()
                return self.kets[name]
            if name in self.unitaries:
                self.advance()
                return self.unitaries[name]
            if name in self.pdis and self.toks[self.pos + 1].value == ".":
                self.advance()
                self.advance()
                lt = self.tok
                if lt.kind not in (NAME, STRING) or lt.value not in self.pdis[name].labels:
                    raise self.error(f"pdi {name!r} has no member {lt.describe()}", "member label")
                self.advance()
                return self.pdis[name].member(lt.value).matrix
            if name == "identity":
                self.advance()
                d = self.dim
                if self.at_op("("):
                    self.advance()
                    d = self.expect_int("dimension")
                    self.expect_op(")")
                    if not 1 <= d <= MAX_DIM:
                        raise self.error(f"identity dimension must be in 1..{MAX_DIM}", at=t)
                return nx.identity(d)
            if name == "proj":
                self.advance()
                self.expect_op("(")
                v = self.opexpr()
                self.expect_op(")")
                if v.ndim != 1:
                    raise self.error("proj() needs a ket", at=t)
                try:
                    return projector_from_ket(v, self.eps).matrix.copy()
                except CHError as exc:
                    raise self.semantic(t, exc) from None
            if name == "adj":
                self.advance()
                self.expect_op("(")
                v = self.opexpr()
                self.expect_op(")")
                if v.ndim != 2:
                    raise self.error("adj() needs a matrix", at=t)
                return v.conj().T
            if name == "kron":
                self.advance()
                self.expect_op("(")
                parts = [self.opexpr()]
                while self.at_op(","):
                    self.advance()
                    parts.append(self.opexpr())
                self.expect_op(")")
                if len({p.ndim for p in parts}) != 1:
                    raise self.error("kron() arguments must be all kets or all matrices", at=t)
                size = int(np.prod([p.shape[0] for p in parts]))
                if size > MAX_DIM:
                    raise self.error(f"kron() result dimension {size} exceeds {MAX_DIM}", at=t)
                out = parts[0]
                with np.errstate(all="ignore"):
                    for p in parts[1:]:
                        out = np.kron(out, p)
                return self._checked(out, t)
            if name == "rot":
                return self.rot()
            if name == "i" or name in _CONSTANTS or name in _FUNCTIONS:
                raise self.error(f"scalar {name!r} outside a literal", "vector or matrix")
            raise self.error(f"undefined name {name!r}")
        finally:
            self.leave()

    def rot(self) -> np.ndarray:
        t = self.advance()
        self.expect_op("(")
        self.expect_keyword("axis")
        self.expect_op("=")
        if self.tok.kind == NAME and self.tok.value in AXES:
            axis = AXES[self.advance().value]
        else:
            self.expect_op("(")
            theta = self.real()
            self.expect_op(",")
            phi = self.real()
            self.expect_op(")")
            axis = SpinDirection(theta, phi)
        self.expect_op(",")
        self.expect_keyword("angle")
        self.expect_op("=")
        angle = self.real()
        self.expect_op(")")
        return rotation_unitary(axis, angle)

    def literal(self) -> np.ndarray:
        open_ = self.expect_op("[")
        if self.at_op("["):
            rows = [self.literal()]
            while self.at_op(","):
                self.advance()
                rows.append(self.literal())
            self.expect_op("]")
            if any(r.ndim != 1 for r in rows) or len({r.size for r in rows}) != 1:
                raise self.error("matrix rows must be flat and of equal length", at=open_)
            return np.array(rows, dtype=np.complex128)
        items = [self.scalar()]
        while self.at_op(","):
            self.advance()
            items.append(self.scalar())
            if len(items) > MAX_DIM:
                raise self.error(f"literal longer than {MAX_DIM}", at=open_)
        self.expect_op("]")
        return np.array(items, dtype=np.complex128)

    # -- scalar expressions -------------------------------------------------

    def real(self) -> float:
        t = self.tok
        z = self.scalar()
        if abs(z.imag) > 0:
            raise self.error("expected a real number", at=t)
        return z.real

    def scalar(self) -> complex:
        t = self.tok
        try:
            z = self.sum_()
        except (OverflowError, ValueError) as exc:
            raise self.error(f"arithmetic error: {exc}", at=t) from None
        if not cmath.isfinite(z):
            raise self.error("non-finite value", at=t)
        return z

    def sum_(self) -> complex:
        z = self.product()
        while self.at_op("+") or self.at_op("-"):
            op = self.advance().value
            w = self.product()
            z = z + w if op == "+" else z - w
        return z

    def product(self) -> complex:
        z = self.unary()
        while self.at_op("*") or self.at_op("/"):
            op = self.advance()
            w = self.unary()
            if op.value == "*":
                z = z * w
            elif w == 0:
                raise self.error("division by zero", at=op)
            else:
                z = z / w
        return z

    def unary(self) -> complex:
        if self.at_op("-"):
            self.advance()
            self.enter()
            try:
                return -self.unary()
            finally:
                self.leave()
        if self.at_op("+"):
            self.advance()
            self.enter()
            try:
                return self.unary()
            finally:
                self.leave()
        return self.satom()

    def satom(self) -> complex:
        t = self.tok
        if t.kind == NUMBER:
            self.advance()
            return complex(t.value)
        if t.kind == IMAG:
            self.advance()
            return complex(0.0, t.value)
        if t.kind == NAME and t.value in _CONSTANTS:
            self.advance()
            return complex(_CONSTANTS[t.value])
        if t.kind == NAME and t.value in _FUNCTIONS:
            self.advance()
            self.expect_op("(")
            self.enter()
            try:
                arg = self.sum_()
            finally:
                self.leave()
            self.expect_op(")")
            return complex(_FUNCTIONS[t.value](arg))
        if self.at_op("("):
            self.advance()
            self.enter()
            try:
                z = self.sum_()
            finally:
                self.leave()
            self.expect_op(")")
            return z
        raise self.error(f"unexpected {t.describe()}", "number")


def parse_scenario(source: Union[str, bytes], tol: nx.TolLike = None) -> ScenarioDoc:
    """Parse and validate a scenario document.

    Raises ParseError for every failure, syntactic or semantic.
    """
    eps = nx.eps_of(tol)
    text = decode(source)
    parser = _Parser(tokenize(text), eps)
    try:
        return parser.parse()
    except RecursionError:
        t = parser.tok
        raise ParseError(t.line, t.column, "input nested too deeply") from None
