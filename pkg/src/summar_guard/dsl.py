"""The session statement language.

One statement per line; attribute sets are written ``{A, B}``, the null
literal is ``-``, paths are quoted. Aggregate result columns such as
``SUM(Amount)`` can be referenced by writing them the same way they were
produced.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from decimal import Decimal

from .engine import (
    Aggregate,
    And,
    BinOp,
    Comparison,
    Difference,
    Filter,
    Merge,
    Not,
    Num,
    Or,
    Pivot,
    Project,
    Ref,
    Union,
)
from .errors import DslSyntaxError
from .funcs import AGG_FNS

KEYWORDS = {
    "LOAD", "DIMENSION", "FACT", "FROM", "HIERARCHY", "DIMS", "MEASURES",
    "SET", "PROPERTY", "MODE", "XD", "XF", "FILTER", "PROJECT", "AGG",
    "PIVOT", "MERGE", "LEFT", "RIGHT", "FULL", "STRICT", "UNION", "DIFF",
    "WITH", "ON", "BY", "OVER", "AS", "CALC", "EXPLAIN", "BACKTRACK",
    "SAVE", "VIEW", "EXPORT", "TO", "FORCE", "AND", "OR", "NOT", "IS",
    "BASIC", "SUM", "GSUM", "NUM", "DESC", "STAT",
    "AVG", "COUNT", "COUNTDISTINCT", "MIN", "MAX",
}

MODE_WORDS = {"BASIC": "basic", "SUM": "sum", "GSUM": "gsum"}


# -- statements ---------------------------------------------------------------


@dataclass(frozen=True)
class LoadDimension:
    name: str
    path: str
    hierarchy: tuple[tuple[str, str], ...]  # (child, parent)
    attrs: tuple[str, ...]  # declaration order
    nullable: tuple[str, ...] = ()


@dataclass(frozen=True)
class LoadFact:
    name: str
    path: str
    dims: tuple[tuple[str, tuple[str, ...]], ...]
    measures: tuple[tuple[str, str], ...]


@dataclass(frozen=True)
class SetProperty:
    table: str
    attr: str
    x_d: tuple[str, ...] | None = None
    x_f: tuple[str, ...] | None = None


@dataclass(frozen=True)
class SetMode:
    mode: str


@dataclass(frozen=True)
class Assign:
    alias: str
    spec: object
    inputs: tuple[str, ...]
    force: bool = False


@dataclass(frozen=True)
class Explain:
    ref: str
    attr: str


@dataclass(frozen=True)
class Backtrack:
    ref: str


@dataclass(frozen=True)
class SaveView:
    name: str
    ref: str


@dataclass(frozen=True)
class Export:
    ref: str
    path: str


STATEMENTS = (LoadDimension, LoadFact, SetProperty, SetMode, Assign, Explain,
              Backtrack, SaveView, Export)


# -- lexer --------------------------------------------------------------------

TOKEN_RE = re.compile(r"""
    (?P<ws>\s+)
  | (?P<comment>\#[^\n]*)
  | (?P<string>'(?:[^'\\]|\\.)*')
  | (?P<number>\d+(?:\.\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_@]*)
  | (?P<op><=|>=|!=|[{}(),.<>=?*/+-])
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str  # 'ident' | 'keyword' | 'string' | 'number' | 'op' | 'eof'
    text: str
    line: int
    column: int


def tokenize(text: str, line_offset: int = 0) -> list[Token]:
    tokens = []
    line, col = 1 + line_offset, 1
    pos = 0
    while pos < len(text):
        m = TOKEN_RE.match(text, pos)
        if not m:
            raise DslSyntaxError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        tok = m.group()
        if kind not in ("ws", "comment"):
            k = kind
            if kind == "ident" and tok.upper() in KEYWORDS:
                k = "keyword"
            tokens.append(Token(k, tok, line, col))
        newlines = tok.count("\n")
        if newlines:
            line += newlines
            col = len(tok) - tok.rfind("\n")
        else:
            col += len(tok)
        pos = m.end()
    tokens.append(Token("eof", "", line, col))
    return tokens


class Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.i = 0

    @property
    def cur(self) -> Token:
        return self.tokens[self.i]

    def error(self, message: str):
        raise DslSyntaxError(message, self.cur.line, self.cur.column)

    def advance(self) -> Token:
        tok = self.cur
        self.i += 1
        return tok

    def at_keyword(self, *words) -> bool:
        return self.cur.kind == "keyword" and self.cur.text.upper() in words

    def eat_keyword(self, *words) -> str:
        if not self.at_keyword(*words):
            self.error(f"expected {' or '.join(words)}, found {self.cur.text!r}")
        return self.advance().text.upper()

    def eat_op(self, op: str) -> None:
        if not (self.cur.kind == "op" and self.cur.text == op):
            self.error(f"expected {op!r}, found {self.cur.text!r}")
        self.advance()

    def at_op(self, op: str) -> bool:
        return self.cur.kind == "op" and self.cur.text == op

    def eat_name(self) -> str:
        if self.cur.kind == "ident":
            return self.advance().text
        if self.cur.kind == "keyword":  # table names may shadow keywords
            return self.advance().text
        self.error(f"expected a name, found {self.cur.text!r}")

    def eat_string(self) -> str:
        if self.cur.kind != "string":
            self.error(f"expected a quoted path, found {self.cur.text!r}")
        raw = self.advance().text[1:-1]
        return raw.replace("\\'", "'").replace("\\\\", "\\")

    # attribute := NAME | FN '(' attribute ')'  (the latter reconstructs the
    # result-column spelling of an aggregate)
    def eat_attr(self) -> str:
        if self.cur.kind == "keyword" and self.cur.text.upper() in AGG_FNS and \
                self.tokens[self.i + 1].kind == "op" and self.tokens[self.i + 1].text == "(":
            fn = self.advance().text.upper()
            self.eat_op("(")
            inner = self.eat_attr()
            self.eat_op(")")
            return f"{fn}({inner})"
        return self.eat_name()

    def eat_attr_set(self) -> tuple[str, ...]:
        self.eat_op("{")
        out = []
        if not self.at_op("}"):
            out.append(self.eat_attr())
            while self.at_op(","):
                self.advance()
                out.append(self.eat_attr())
        self.eat_op("}")
        return tuple(out)

    # -- predicates -----------------------------------------------------------

    def parse_predicate(self):
        left = self.parse_and()
        while self.at_keyword("OR"):
            self.advance()
            left = Or(left, self.parse_and())
        return left

    def parse_and(self):
        left = self.parse_not()
        while self.at_keyword("AND"):
            self.advance()
            left = And(left, self.parse_not())
        return left

    def parse_not(self):
        if self.at_keyword("NOT"):
            self.advance()
            return Not(self.parse_not())
        if self.at_op("("):
            self.advance()
            inner = self.parse_predicate()
            self.eat_op(")")
            return inner
        return self.parse_comparison()

    def parse_comparison(self):
        attr = self.eat_attr()
        if self.at_keyword("IS"):
            self.advance()
            op = "is"
        elif self.cur.kind == "op" and self.cur.text in ("=", "!=", "<", "<=", ">", ">="):
            op = self.advance().text
        else:
            self.error(f"expected a comparator, found {self.cur.text!r}")
        if self.cur.kind == "string":
            return Comparison(attr, op, self.eat_string())
        if self.cur.kind == "number":
            return Comparison(attr, op, self.advance().text)
        if self.at_op("-"):
            self.advance()
            return Comparison(attr, op, None)
        return Comparison(attr, op, other_attr=self.eat_attr())

    # -- calc expressions ------------------------------------------------------

    def parse_expr(self):
        left = self.parse_term()
        while self.cur.kind == "op" and self.cur.text in ("+", "-"):
            op = self.advance().text
            left = BinOp(op, left, self.parse_term())
        return left

    def parse_term(self):
        left = self.parse_factor()
        while self.cur.kind == "op" and self.cur.text in ("*", "/"):
            op = self.advance().text
            left = BinOp(op, left, self.parse_factor())
        return left

    def parse_factor(self):
        if self.at_op("("):
            self.advance()
            inner = self.parse_expr()
            self.eat_op(")")
            return inner
        if self.cur.kind == "number":
            return Num(Decimal(self.advance().text))
        return Ref(self.eat_attr())

    # -- statements ------------------------------------------------------------

    def parse_statement(self):
        if self.at_keyword("LOAD"):
            return self.parse_load()
        if self.at_keyword("SET"):
            return self.parse_set()
        if self.at_keyword("EXPLAIN"):
            self.advance()
            ref = self.eat_name()
            self.eat_op(".")
            return Explain(ref, self.eat_attr())
        if self.at_keyword("BACKTRACK"):
            self.advance()
            return Backtrack(self.eat_name())
        if self.at_keyword("SAVE"):
            self.advance()
            self.eat_keyword("VIEW")
            name = self.eat_name()
            self.eat_op("=")
            return SaveView(name, self.eat_name())
        if self.at_keyword("EXPORT"):
            self.advance()
            ref = self.eat_name()
            self.eat_keyword("TO")
            return Export(ref, self.eat_string())
        if self.cur.kind == "ident" and self.tokens[self.i + 1].kind == "op" \
                and self.tokens[self.i + 1].text == "=":
            alias = self.eat_name()
            self.eat_op("=")
            return self.parse_query(alias)
        if self.at_keyword("FILTER", "PROJECT", "AGG", "PIVOT", "MERGE",
                           "UNION", "DIFF", "FORCE"):
            return self.parse_query(None)  # REPL statement applied to focus
        self.error(f"unexpected {self.cur.text!r}")

    def parse_load(self):
        self.eat_keyword("LOAD")
        what = self.eat_keyword("DIMENSION", "FACT")
        name = self.eat_name()
        self.eat_keyword("FROM")
        path = self.eat_string()
        if what == "DIMENSION":
            self.eat_keyword("HIERARCHY")
            pairs: list[tuple[str, str]] = []
            attrs: list[str] = []
            nullable: list[str] = []

            def eat_level():
                a = self.eat_attr()
                if self.at_op("?"):
                    self.advance()
                    if a not in nullable:
                        nullable.append(a)
                if a not in attrs:
                    attrs.append(a)
                return a

            while True:
                child = eat_level()
                while self.at_op("<"):
                    self.advance()
                    parent = eat_level()
                    if (child, parent) not in pairs:
                        pairs.append((child, parent))
                    child = parent
                if self.at_op(","):
                    self.advance()
                    continue
                break
            return LoadDimension(name, path, tuple(pairs), tuple(attrs),
                                 tuple(nullable))
        self.eat_keyword("DIMS")
        dims = []
        while True:
            dname = self.eat_name()
            dims.append((dname, self.eat_attr_set()))
            if self.at_op(","):
                self.advance()
                continue
            break
        self.eat_keyword("MEASURES")
        measures = []
        while True:
            mname = self.eat_attr()
            cat = "NUM"
            if self.at_keyword("NUM", "DESC", "STAT"):
                cat = self.advance().text.upper()
            measures.append((mname, cat))
            if self.at_op(","):
                self.advance()
                continue
            break
        return LoadFact(name, path, tuple(dims), tuple(measures))

    def parse_set(self):
        self.eat_keyword("SET")
        what = self.eat_keyword("PROPERTY", "MODE")
        if what == "MODE":
            word = self.eat_keyword("BASIC", "SUM", "GSUM")
            return SetMode(MODE_WORDS[word])
        table = self.eat_name()
        self.eat_op(".")
        attr = self.eat_attr()
        x_d = x_f = None
        while self.at_keyword("XD", "XF"):
            which = self.advance().text.upper()
            val = self.eat_attr_set()
            if which == "XD":
                x_d = val
            else:
                x_f = val
        if x_d is None and x_f is None:
            self.error("SET PROPERTY needs XD {...} or XF {...}")
        return SetProperty(table, attr, x_d, x_f)

    def parse_query(self, alias):
        force = False
        if self.at_keyword("FORCE"):
            self.advance()
            force = True
        word = self.eat_keyword("FILTER", "PROJECT", "AGG", "PIVOT", "MERGE",
                                "UNION", "DIFF")
        if word == "FILTER":
            pred = self.parse_predicate()
            inputs = self.parse_from()
            return Assign(alias, Filter(pred), inputs, force)
        if word == "PROJECT":
            attrs = self.eat_attr_set()
            calcs = []
            if self.at_keyword("CALC"):
                self.advance()
                while True:
                    expr = self.parse_expr()
                    self.eat_keyword("AS")
                    calcs.append((expr, self.eat_name()))
                    if self.at_op(","):
                        self.advance()
                        continue
                    break
            inputs = self.parse_from()
            return Assign(alias, Project(attrs, tuple(calcs)), inputs, force)
        if word == "AGG":
            fn = self.eat_keyword(*AGG_FNS)
            self.eat_op("(")
            attr = self.eat_attr()
            self.eat_op(")")
            agg_alias = None
            if self.at_keyword("AS"):
                self.advance()
                agg_alias = self.eat_name()
            self.eat_keyword("BY")
            by = self.eat_attr_set()
            inputs = self.parse_from()
            return Assign(alias, Aggregate(fn, attr, by, agg_alias), inputs, force)
        if word == "PIVOT":
            attr = self.eat_attr()
            self.eat_keyword("OVER")
            over = self.eat_attr_set()
            inputs = self.parse_from()
            return Assign(alias, Pivot(attr, over), inputs, force)
        if word == "MERGE":
            kind = self.eat_keyword("LEFT", "RIGHT", "FULL", "STRICT").lower()
            a = self.eat_name()
            self.eat_keyword("WITH")
            b = self.eat_name()
            on = None
            if self.at_keyword("ON"):
                self.advance()
                on = self.eat_attr_set()
            return Assign(alias, Merge(kind, on), (a, b), force)
        a = self.eat_name()
        self.eat_keyword("WITH")
        b = self.eat_name()
        spec = Union() if word == "UNION" else Difference()
        return Assign(alias, spec, (a, b), force)

    def parse_from(self) -> tuple[str, ...]:
        if self.at_keyword("FROM"):
            self.advance()
            return (self.eat_name(),)
        return ()


def parse(text: str) -> list:
    """Parse a script (one statement per line; blank lines and ``#`` comments
    allowed) into statements."""
    statements = []
    for offset, line in enumerate(text.splitlines()):
        if not line.strip() or line.strip().startswith("#"):
            continue
        tokens = tokenize(line, line_offset=offset)
        parser = Parser(tokens)
        statements.append(parser.parse_statement())
        if parser.cur.kind != "eof":
            parser.error(f"trailing input {parser.cur.text!r}")
    return statements


# -- pretty printer -----------------------------------------------------------


def _quote(path: str) -> str:
    return "'" + path.replace("\\", "\\\\").replace("'", "\\'") + "'"


def _attr_set(names) -> str:
    return "{" + ", ".join(names) + "}"


def print_predicate(p, parent_prec=0) -> str:
    if isinstance(p, Comparison):
        op = "IS" if p.op == "is" else p.op
        if p.other_attr is not None:
            rhs = p.other_attr
        elif p.value is None:
            rhs = "-"
        elif isinstance(p.value, str) and not re.fullmatch(r"\d+(\.\d+)?", p.value):
            rhs = _quote(p.value)
        else:
            rhs = str(p.value)
        return f"{p.attr} {op} {rhs}"
    if isinstance(p, Not):
        return f"NOT {print_predicate(p.child, 3)}"
    if isinstance(p, And):
        s = f"{print_predicate(p.left, 2)} AND {print_predicate(p.right, 2)}"
        return f"({s})" if parent_prec > 2 else s
    if isinstance(p, Or):
        s = f"{print_predicate(p.left, 1)} OR {print_predicate(p.right, 1)}"
        return f"({s})" if parent_prec > 1 else s
    raise ValueError(f"not a predicate: {p!r}")


def print_expr(e, parent_prec=0) -> str:
    if isinstance(e, Num):
        return str(e.value)
    if isinstance(e, Ref):
        return e.name
    if isinstance(e, BinOp):
        prec = 1 if e.op in "+-" else 2
        s = f"{print_expr(e.left, prec)} {e.op} {print_expr(e.right, prec + 1)}"
        return f"({s})" if parent_prec > prec else s
    raise ValueError(f"not an expression: {e!r}")


def print_statement(stmt) -> str:
    if isinstance(stmt, LoadDimension):
        chains = _hierarchy_chains(stmt)
        hier = ", ".join(" < ".join(a + ("?" if a in stmt.nullable else "")
                                    for a in chain)
                         for chain in chains)
        return f"LOAD DIMENSION {stmt.name} FROM {_quote(stmt.path)} HIERARCHY {hier}"
    if isinstance(stmt, LoadFact):
        dims = ", ".join(f"{d} {_attr_set(attrs)}" for d, attrs in stmt.dims)
        measures = ", ".join(f"{m} {c}" for m, c in stmt.measures)
        return (f"LOAD FACT {stmt.name} FROM {_quote(stmt.path)} "
                f"DIMS {dims} MEASURES {measures}")
    if isinstance(stmt, SetProperty):
        parts = [f"SET PROPERTY {stmt.table}.{stmt.attr}"]
        if stmt.x_d is not None:
            parts.append(f"XD {_attr_set(stmt.x_d)}")
        if stmt.x_f is not None:
            parts.append(f"XF {_attr_set(stmt.x_f)}")
        return " ".join(parts)
    if isinstance(stmt, SetMode):
        word = {v: k for k, v in MODE_WORDS.items()}[stmt.mode]
        return f"SET MODE {word}"
    if isinstance(stmt, Assign):
        body = print_query(stmt.spec, stmt.inputs)
        prefix = f"{stmt.alias} = " if stmt.alias else ""
        force = "FORCE " if stmt.force else ""
        return f"{prefix}{force}{body}"
    if isinstance(stmt, Explain):
        return f"EXPLAIN {stmt.ref}.{stmt.attr}"
    if isinstance(stmt, Backtrack):
        return f"BACKTRACK {stmt.ref}"
    if isinstance(stmt, SaveView):
        return f"SAVE VIEW {stmt.name} = {stmt.ref}"
    if isinstance(stmt, Export):
        return f"EXPORT {stmt.ref} TO {_quote(stmt.path)}"
    raise ValueError(f"not a statement: {stmt!r}")


def _hierarchy_chains(stmt: LoadDimension):
    """Reconstruct comma-separated chains from the parent pairs."""
    pairs = list(stmt.hierarchy)
    if not pairs:
        return [[a] for a in stmt.attrs] or [[]]
    chains = []
    children = {c for c, _ in pairs}
    parents = {p for _, p in pairs}
    starts = [a for a in stmt.attrs if a in children and a not in parents]
    used = set()
    for start in starts:
        node = start
        chain = [node]
        while True:
            nexts = [p for c, p in pairs if c == node and (c, p) not in used]
            if not nexts:
                break
            used.add((node, nexts[0]))
            node = nexts[0]
            chain.append(node)
        chains.append(chain)
    for pair in pairs:
        if pair not in used:
            chains.append([pair[0], pair[1]])
            used.add(pair)
    lone = [a for a in stmt.attrs if a not in children and a not in parents]
    chains.extend([a] for a in lone)
    return chains


def print_query(spec, inputs) -> str:
    suffix = f" FROM {inputs[0]}" if len(inputs) == 1 else ""
    if isinstance(spec, Filter):
        return f"FILTER {print_predicate(spec.predicate)}{suffix}"
    if isinstance(spec, Project):
        calc = ""
        if spec.calcs:
            calc = " CALC " + ", ".join(f"{print_expr(e)} AS {n}"
                                        for e, n in spec.calcs)
        return f"PROJECT {_attr_set(spec.attrs)}{calc}{suffix}"
    if isinstance(spec, Aggregate):
        alias = f" AS {spec.alias}" if spec.alias else ""
        return f"AGG {spec.fn}({spec.attr}){alias} BY {_attr_set(spec.by)}{suffix}"
    if isinstance(spec, Pivot):
        return f"PIVOT {spec.attr} OVER {_attr_set(spec.over)}{suffix}"
    if isinstance(spec, Merge):
        on = f" ON {_attr_set(spec.on)}" if spec.on is not None else ""
        return f"MERGE {spec.kind.upper()} {inputs[0]} WITH {inputs[1]}{on}"
    if isinstance(spec, Union):
        return f"UNION {inputs[0]} WITH {inputs[1]}"
    if isinstance(spec, Difference):
        return f"DIFF {inputs[0]} WITH {inputs[1]}"
    raise ValueError(f"not a query spec: {spec!r}")
