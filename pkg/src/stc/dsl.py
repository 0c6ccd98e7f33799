"""Plain-text ``.stc`` scenario files and the counterfactual query language.

Scenario statements are line oriented::

    scenario ghz-fig2
    point A 0 0
    var a @A { +1, -1 }
    constraint product(a, b, c) = -1
    constraint product(x, y) = -1 when s = Sx, u = Sx
    constraint table(s, o) { (Sx, +1), (Sy, -1) }
    actual a=-1 b=+1 c=+1
    choice s
    query Q1: (a = +1) => (c = +1)

Newlines inside ``( )`` and ``{ }`` are ignored, so tables may span lines.
``#`` starts a comment. Queries read ``PHI => PSI [@selector]`` where the
selector is one of ``@dstc``, ``@clause2``, ``@footnote``, ``@frame(v)``,
``@anyframe``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

from stc.geometry import SpacetimePoint
from stc.propositions import FALSE, TRUE, And, Atom, Not, Or, Proposition
from stc.semantics import EVALUATORS, PropositionError, check_proposition
from stc.worlds import (
    EventVariable,
    ProductConstraint,
    Scenario,
    ScenarioError,
    TableConstraint,
    World,
    validate_free_choice,
)

KEYWORDS = {"AND", "OR", "NOT", "TRUE", "FALSE"}


@dataclass(frozen=True)
class Diagnostic:
    line: int
    col: int
    message: str

    def __str__(self) -> str:
        return f"{self.line}:{self.col}: {self.message}"


class DslError(ValueError):
    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = list(diagnostics)
        super().__init__("\n".join(str(d) for d in self.diagnostics))


@dataclass(frozen=True)
class QueryExpression:
    antecedent: Proposition
    consequent: Proposition
    evaluator: str = "dstc"
    velocity: Fraction | None = None

    def __str__(self) -> str:
        text = f"({self.antecedent}) => ({self.consequent})"
        if self.evaluator == "frame":
            text += f" @frame({self.velocity})"
        elif self.evaluator != "dstc":
            text += f" @{self.evaluator}"
        return text


@dataclass(frozen=True)
class ScenarioDocument:
    scenario: Scenario
    queries: tuple[tuple[str, QueryExpression], ...] = ()
    name: str | None = None

    def query(self, name: str) -> QueryExpression:
        for n, q in self.queries:
            if n == name:
                return q
        raise KeyError(name)


# -- lexer -------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<comment>\#[^\n]*)
  | (?P<newline>\n)
  | (?P<number>[+-]?\d+(?:/\d+|\.\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_'\-]*)
  | (?P<op>=>|!=|[=(){},:@])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str  # number, ident, op, newline, eof
    text: str
    line: int
    col: int


def tokenize(text: str, diags: list[Diagnostic]) -> list[Token]:
    tokens: list[Token] = []
    line, line_start, pos, depth = 1, 0, 0, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        col = pos - line_start + 1
        if m is None:
            diags.append(Diagnostic(line, col, f"unexpected character {text[pos]!r}"))
            pos += 1
            continue
        kind = m.lastgroup
        tok = m.group()
        if kind == "newline":
            if depth == 0:
                tokens.append(Token("newline", "\n", line, col))
            line += 1
            line_start = m.end()
        elif kind in ("number", "ident", "op"):
            if tok in ("(", "{"):
                depth += 1
            elif tok in (")", "}"):
                depth = max(0, depth - 1)
            tokens.append(Token(kind, tok, line, col))
        pos = m.end()
    tokens.append(Token("newline", "\n", line, pos - line_start + 1))
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


class _Syntax(Exception):
    def __init__(self, tok: Token, message: str):
        super().__init__(message)
        self.diagnostic = Diagnostic(tok.line, tok.col, message)


def _describe(tok: Token) -> str:
    if tok.kind == "eof":
        return "end of input"
    if tok.kind == "newline":
        return "end of line"
    return repr(tok.text)


class _Stream:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.i = 0

    @property
    def peek(self) -> Token:
        return self.tokens[self.i]

    def next(self) -> Token:
        tok = self.tokens[self.i]
        if tok.kind != "eof":
            self.i += 1
        return tok

    def at(self, text: str) -> bool:
        return self.peek.kind == "op" and self.peek.text == text

    def at_keyword(self, word: str) -> bool:
        return self.peek.kind == "ident" and self.peek.text.upper() == word

    def expect(self, text: str) -> Token:
        if not self.at(text):
            raise _Syntax(self.peek, f"expected {text!r}, found {_describe(self.peek)}")
        return self.next()

    def ident(self, what: str = "name") -> Token:
        tok = self.peek
        if tok.kind != "ident" or tok.text.upper() in KEYWORDS:
            raise _Syntax(tok, f"expected {what}, found {_describe(tok)}")
        return self.next()

    def value(self) -> tuple[str, Token]:
        tok = self.peek
        if tok.kind == "number":
            if "/" in tok.text or "." in tok.text:
                raise _Syntax(tok, f"values must be integers or names, found {tok.text!r}")
            self.next()
            return canonical_value(tok.text), tok
        if tok.kind == "ident" and tok.text.upper() not in KEYWORDS:
            self.next()
            return tok.text, tok
        raise _Syntax(tok, f"expected value, found {_describe(tok)}")

    def number(self) -> Fraction:
        tok = self.peek
        if tok.kind != "number":
            raise _Syntax(tok, f"expected number, found {_describe(tok)}")
        self.next()
        return Fraction(tok.text)

    def end_of_statement(self) -> None:
        if self.peek.kind not in ("newline", "eof"):
            raise _Syntax(self.peek, f"unexpected {_describe(self.peek)}")


def canonical_value(text: str) -> str:
    """``1`` and ``+1`` both denote ``+1``; names are kept verbatim."""
    try:
        n = int(text)
    except ValueError:
        return text
    return f"{n:+d}" if n else "0"


# -- propositions and queries ------------------------------------------------


class _PropParser:
    MAX_DEPTH = 100

    def __init__(self, stream: _Stream):
        self.s = stream
        self.atoms: list[tuple[Atom, Token]] = []
        self.depth = 0

    def _descend(self) -> None:
        self.depth += 1
        if self.depth > self.MAX_DEPTH:
            raise _Syntax(self.s.peek, "expression nested too deeply")

    def disjunction(self) -> Proposition:
        args = [self.conjunction()]
        while self.s.at_keyword("OR"):
            self.s.next()
            args.append(self.conjunction())
        return args[0] if len(args) == 1 else Or(tuple(args))

    def conjunction(self) -> Proposition:
        args = [self.negation()]
        while self.s.at_keyword("AND"):
            self.s.next()
            args.append(self.negation())
        return args[0] if len(args) == 1 else And(tuple(args))

    def negation(self) -> Proposition:
        if self.s.at_keyword("NOT"):
            self.s.next()
            self._descend()
            inner = self.negation()
            self.depth -= 1
            return Not(inner)
        return self.primary()

    def primary(self) -> Proposition:
        s = self.s
        if s.at("("):
            s.next()
            self._descend()
            inner = self.disjunction()
            s.expect(")")
            self.depth -= 1
            return inner
        if s.at_keyword("TRUE"):
            s.next()
            return TRUE
        if s.at_keyword("FALSE"):
            s.next()
            return FALSE
        var = s.ident("variable or '('")
        if s.at("="):
            s.next()
            negated = False
        elif s.at("!="):
            s.next()
            negated = True
        else:
            raise _Syntax(s.peek, f"expected '=' or '!=', found {_describe(s.peek)}")
        value, _ = s.value()
        atom = Atom(var.text, value, negated)
        self.atoms.append((atom, var))
        return atom


def _query(stream: _Stream) -> tuple[QueryExpression, list[tuple[Atom, Token]]]:
    p = _PropParser(stream)
    phi = p.disjunction()
    stream.expect("=>")
    psi = p.disjunction()
    evaluator, velocity = "dstc", None
    if stream.at("@"):
        stream.next()
        sel = stream.peek
        if sel.kind != "ident" or sel.text not in EVALUATORS:
            raise _Syntax(sel, f"unknown evaluator selector {_describe(sel)}")
        stream.next()
        evaluator = sel.text
        if evaluator == "frame":
            stream.expect("(")
            tok = stream.peek
            velocity = stream.number()
            if not -1 < velocity < 1:
                raise _Syntax(tok, f"frame velocity must satisfy |v| < 1, got {velocity}")
            stream.expect(")")
    stream.end_of_statement()
    return QueryExpression(phi, psi, evaluator, velocity), p.atoms


def _resolve_atoms(
    scenario: Scenario, atoms: list[tuple[Atom, Token]], diags: list[Diagnostic]
) -> None:
    vm = scenario.variable_map
    for atom, tok in atoms:
        if atom.var not in vm:
            diags.append(Diagnostic(tok.line, tok.col, f"unknown variable {atom.var!r}"))
        elif atom.value not in vm[atom.var].domain:
            diags.append(
                Diagnostic(tok.line, tok.col, f"value {atom.value!r} not in domain of {atom.var!r}")
            )


def parse_proposition(text: str, scenario: Scenario | None = None) -> Proposition:
    diags: list[Diagnostic] = []
    tokens = tokenize(text, diags)
    stream = _Stream(tokens)
    parser = _PropParser(stream)
    try:
        prop = parser.disjunction()
        stream.end_of_statement()
        while stream.peek.kind == "newline":
            stream.next()
        if stream.peek.kind != "eof":
            raise _Syntax(stream.peek, f"unexpected {_describe(stream.peek)}")
    except _Syntax as e:
        diags.append(e.diagnostic)
    if diags:
        raise DslError(diags)
    if scenario is not None:
        _resolve_atoms(scenario, parser.atoms, diags)
        if diags:
            raise DslError(diags)
    return prop


def parse_query(text: str, scenario: Scenario | None = None) -> QueryExpression:
    """Parse ``PHI => PSI [@selector]``; with ``scenario``, also resolve names."""
    diags: list[Diagnostic] = []
    tokens = tokenize(text, diags)
    stream = _Stream(tokens)
    query = None
    atoms: list[tuple[Atom, Token]] = []
    try:
        if stream.peek.kind in ("newline", "eof"):
            raise _Syntax(stream.peek, "empty query")
        query, atoms = _query(stream)
        while stream.peek.kind == "newline":
            stream.next()
        if stream.peek.kind != "eof":
            raise _Syntax(stream.peek, f"unexpected {_describe(stream.peek)}")
    except _Syntax as e:
        diags.append(e.diagnostic)
    if diags:
        raise DslError(diags)
    if scenario is not None:
        _resolve_atoms(scenario, atoms, diags)
        if diags:
            raise DslError(diags)
    assert query is not None
    return query


# -- scenario statements -----------------------------------------------------


@dataclass
class _Decl:
    tok: Token
    data: object


def _statements(tokens: list[Token]) -> Iterator[list[Token]]:
    current: list[Token] = []
    for tok in tokens:
        if tok.kind in ("newline", "eof"):
            if current:
                yield current + [Token("newline", "\n", tok.line, tok.col)]
                current = []
        else:
            current.append(tok)


def _comma_list(s: _Stream, item, close: str) -> list:
    out = [item()]
    while s.at(","):
        s.next()
        out.append(item())
    s.expect(close)
    return out


def parse_scenario(text: str) -> ScenarioDocument:
    """Parse a ``.stc`` document; raises :class:`DslError` listing every problem."""
    diags: list[Diagnostic] = []
    tokens = tokenize(text, diags)
    name: str | None = None
    points: list[_Decl] = []
    variables: list[_Decl] = []
    constraints: list[_Decl] = []
    actual: list[tuple[str, str, Token]] = []
    choices: list[tuple[str, Token]] = []
    queries: list[_Decl] = []
    seen_any = False

    for stmt in _statements(tokens):
        seen_any = True
        s = _Stream(stmt + [Token("eof", "", stmt[-1].line, stmt[-1].col)])
        head = s.next()
        try:
            kw = head.text if head.kind == "ident" else None
            if kw == "scenario":
                if name is not None:
                    raise _Syntax(head, "duplicate scenario name")
                name = s.ident("scenario name").text
            elif kw == "point":
                pname = s.ident("point name")
                coords = []
                while s.peek.kind == "number":
                    coords.append(s.number())
                if len(coords) not in (2, 4):
                    raise _Syntax(s.peek, "point needs t and 1 or 3 spatial coordinates")
                points.append(_Decl(pname, SpacetimePoint(coords[0], tuple(coords[1:]))))
            elif kw == "var":
                vname = s.ident("variable name")
                s.expect("@")
                loc = s.ident("point name")
                s.expect("{")
                dom = _comma_list(s, s.value, "}")
                variables.append(_Decl(vname, (loc, dom)))
            elif kw == "constraint":
                kind = s.ident("'product' or 'table'")
                if kind.text == "product":
                    s.expect("(")
                    scope = _comma_list(s, lambda: s.ident("variable"), ")")
                    s.expect("=")
                    sign_tok = s.peek
                    sign, _ = s.value()
                    if sign not in ("+1", "-1"):
                        raise _Syntax(sign_tok, "product sign must be +1 or -1")
                    guard = []
                    if s.peek.kind == "ident" and s.peek.text == "when":
                        s.next()
                        while True:
                            gv = s.ident("variable")
                            s.expect("=")
                            val, vt = s.value()
                            guard.append((gv, val, vt))
                            if not s.at(","):
                                break
                            s.next()
                    constraints.append(_Decl(kind, ("product", scope, int(sign), guard)))
                elif kind.text == "table":
                    s.expect("(")
                    scope = _comma_list(s, lambda: s.ident("variable"), ")")
                    s.expect("{")
                    rows = []
                    while not s.at("}"):
                        s.expect("(")
                        rows.append(_comma_list(s, s.value, ")"))
                        if s.at(","):
                            s.next()
                    s.expect("}")
                    constraints.append(_Decl(kind, ("table", scope, rows)))
                else:
                    raise _Syntax(kind, f"unknown constraint kind {kind.text!r}")
            elif kw == "actual":
                while s.peek.kind == "ident":
                    var = s.ident("variable")
                    s.expect("=")
                    val, _ = s.value()
                    actual.append((var.text, val, var))
                    if s.at(","):
                        s.next()
                if not actual:
                    raise _Syntax(s.peek, "actual needs at least one VAR=VALUE")
            elif kw == "choice":
                while True:
                    var = s.ident("variable")
                    choices.append((var.text, var))
                    if not s.at(","):
                        break
                    s.next()
            elif kw == "query":
                qname = s.ident("query name")
                s.expect(":")
                query, atoms = _query(s)
                queries.append(_Decl(qname, (query, atoms)))
            else:
                raise _Syntax(head, f"unknown statement {_describe(head)}")
            s.end_of_statement()
        except _Syntax as e:
            diags.append(e.diagnostic)

    if not seen_any:
        diags.append(Diagnostic(1, 1, "no scenario: the file declares nothing"))
    if diags:
        raise DslError(diags)
    doc = _resolve(name, points, variables, constraints, actual, choices, queries, diags)
    if diags:
        raise DslError(diags)
    assert doc is not None
    return doc


def _resolve(name, points, variables, constraints, actual, choices, queries, diags):
    def err(tok: Token, msg: str) -> None:
        diags.append(Diagnostic(tok.line, tok.col, msg))

    pts: dict[str, SpacetimePoint] = {}
    dims = set()
    for d in points:
        if d.tok.text in pts:
            err(d.tok, f"duplicate point {d.tok.text!r}")
            continue
        clash = next((n for n, p in pts.items() if p == d.data), None)
        if clash is not None:
            err(d.tok, f"point {d.tok.text!r} coincides with {clash!r}")
            continue
        pts[d.tok.text] = d.data
        dims.add(d.data.dim)
    if len(dims) > 1:
        err(points[0].tok, "all points must have the same spatial dimension")

    evs: dict[str, EventVariable] = {}
    for d in variables:
        loc, dom = d.data
        vname = d.tok.text
        if vname in evs:
            err(d.tok, f"duplicate variable {vname!r}")
            continue
        if loc.text not in pts:
            err(loc, f"unknown point {loc.text!r}")
            continue
        values = [v for v, _ in dom]
        if len(set(values)) != len(values):
            err(d.tok, f"variable {vname!r} has repeated domain values")
            continue
        evs[vname] = EventVariable(vname, loc.text, tuple(values))

    built = []
    for d in constraints:
        kind = d.data[0]
        scope = d.data[1]
        ok = True
        for tok in scope:
            if tok.text not in evs:
                err(tok, f"unknown variable {tok.text!r}")
                ok = False
        if not ok:
            continue
        names = tuple(t.text for t in scope)
        if kind == "product":
            _, _, sign, guard = d.data
            for gv, val, vt in guard:
                if gv.text not in evs:
                    err(gv, f"unknown variable {gv.text!r}")
                    ok = False
                elif val not in evs[gv.text].domain:
                    err(vt, f"value {val!r} not in domain of {gv.text!r}")
                    ok = False
            if ok:
                c = ProductConstraint(names, sign, tuple((g.text, v) for g, v, _ in guard))
                built.append((d.tok, c))
        else:
            rows = d.data[2]
            for row in rows:
                if len(row) != len(names):
                    err(row[0][1] if row else d.tok,
                        f"table row has {len(row)} values, scope has {len(names)}")
                    ok = False
                    continue
                for (val, vt), var in zip(row, names):
                    if val not in evs[var].domain:
                        err(vt, f"value {val!r} not in domain of {var!r}")
                        ok = False
            if ok:
                c = TableConstraint(names, tuple(tuple(v for v, _ in r) for r in rows))
                built.append((d.tok, c))

    assignment: dict[str, str] = {}
    for var, val, tok in actual:
        if var not in evs:
            err(tok, f"unknown variable {var!r}")
        elif var in assignment:
            err(tok, f"{var!r} assigned twice in actual world")
        elif val not in evs[var].domain:
            err(tok, f"value {val!r} not in domain of {var!r}")
        else:
            assignment[var] = val
    missing = [v for v in evs if v not in assignment]
    if missing and not diags:
        tok = actual[0][2] if actual else Token("eof", "", 1, 1)
        err(tok, "actual world does not assign " + ", ".join(missing))

    choice_names = []
    for var, tok in choices:
        if var not in evs:
            err(tok, f"unknown variable {var!r}")
        elif var in choice_names:
            err(tok, f"duplicate choice {var!r}")
        else:
            choice_names.append(var)

    if diags:
        return None
    for tok, c in built:
        if not c.permits(assignment):
            err(tok, f"actual world violates constraint {c}")
    if diags:
        return None
    try:
        scenario = Scenario(
            pts, tuple(evs.values()), tuple(c for _, c in built),
            World.of(assignment), tuple(choice_names),
        )
    except ScenarioError as e:
        err(points[0].tok if points else Token("eof", "", 1, 1), str(e))
        return None

    for var, tok in choices:
        report = validate_free_choice(scenario, var)
        if not report.ok:
            err(tok, f"choice {var!r} is not free: no world realises "
                     + ", ".join(report.failing) + " while matching the actual world "
                     "outside the future cone of " + report.point)

    qs = []
    qnames = set()
    for d in queries:
        query, atoms = d.data
        if d.tok.text in qnames:
            err(d.tok, f"duplicate query {d.tok.text!r}")
            continue
        qnames.add(d.tok.text)
        _resolve_atoms(scenario, atoms, diags)
        if query.evaluator in ("frame", "anyframe") and scenario.dim not in (None, 1):
            err(d.tok, "frames require 1+1")
        qs.append((d.tok.text, query))
    if diags:
        return None
    return ScenarioDocument(scenario, tuple(qs), name)


# -- serialisation -----------------------------------------------------------


def serialize_scenario(doc: ScenarioDocument) -> str:
    s = doc.scenario
    lines: list[str] = []
    if doc.name:
        lines += [f"scenario {doc.name}", ""]
    for name, p in s.points.items():
        lines.append(f"point {name} " + " ".join(str(c) for c in p.coords))
    lines.append("")
    for v in s.variables:
        lines.append(f"var {v.name} @{v.point} {{ {', '.join(v.domain)} }}")
    if s.constraints:
        lines.append("")
        for c in s.constraints:
            lines.append(f"constraint {c}")
    lines.append("")
    lines.append("actual " + " ".join(f"{v.name}={s.actual[v.name]}" for v in s.variables))
    if s.choices:
        lines.append("choice " + ", ".join(s.choices))
    if doc.queries:
        lines.append("")
        for name, q in doc.queries:
            lines.append(f"query {name}: {q}")
    return "\n".join(lines) + "\n"


def check_query(scenario: Scenario, query: QueryExpression) -> None:
    try:
        check_proposition(scenario, query.antecedent)
        check_proposition(scenario, query.consequent)
    except PropositionError as e:
        raise DslError([Diagnostic(1, 1, str(e))]) from None
