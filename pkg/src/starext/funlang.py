"""Total-function expression language over the naturals.

The base structure is X = N, with 0 and 1 available as constants. Every
expression denotes a *total* function N -> N: the grammar has no unbounded
search, division and modulus only take a nonzero constant divisor, and
subtraction truncates at 0. Expressions double as index-set predicates
under the convention "0 is false, nonzero is true".

Concrete syntax accepted by :func:`parse_fn`::

    expr := term (('+' | '-' | '*') term)*      # flat, left-associative
    term := atom ('mod' NAT | 'div' NAT)*
    atom := NAT | 'x' | 'ifeq(' e ',' e ',' e ',' e ')'
          | 'pair(' e ',' e ')' | 'p1(' e ')' | 'p2(' e ')'
          | NAME '(' e ')'                      # call of a defined function
          | '(' e ')'

Note the deliberately flat arithmetic level: ``a + b * c`` parses as
``(a + b) * c``. Named definitions (``def name = expr``) are inlined at
parse time, so an FnExpr is always self-contained.

Canonical text is produced by :func:`pretty` applied to a normalized
expression (:func:`normalize`). Normalization inlines compositions and
cancels exact pairing redexes; it is what makes structurally different
routes to the same function collapse to one decision-log key.
"""

from __future__ import annotations

from dataclasses import dataclass
from hashlib import sha256
from math import isqrt
from typing import Callable

import numpy as np

from .errors import ParseError

# ---------------------------------------------------------------------------
# Cantor pairing

def pair(x: int, y: int) -> int:
    """Bijection N x N -> N, closed form (x+y)(x+y+1)/2 + y."""
    s = x + y
    return s * (s + 1) // 2 + y


def unpair(z: int) -> tuple[int, int]:
    """Inverse of :func:`pair`."""
    w = (isqrt(8 * z + 1) - 1) // 2
    y = z - w * (w + 1) // 2
    return w - y, y


# ---------------------------------------------------------------------------
# AST

class FnExpr:
    """Base class of expression nodes. Nodes are immutable and hashable."""

    __slots__ = ()


@dataclass(frozen=True)
class Const(FnExpr):
    value: int


@dataclass(frozen=True)
class Var(FnExpr):
    pass


VAR = Var()


@dataclass(frozen=True)
class Add(FnExpr):
    left: FnExpr
    right: FnExpr


@dataclass(frozen=True)
class Sub(FnExpr):
    """Truncated subtraction: max(left - right, 0)."""

    left: FnExpr
    right: FnExpr


@dataclass(frozen=True)
class Mul(FnExpr):
    left: FnExpr
    right: FnExpr


@dataclass(frozen=True)
class DivC(FnExpr):
    """Floor division by a nonzero constant."""

    arg: FnExpr
    divisor: int

    def __post_init__(self):
        if self.divisor <= 0:
            raise ValueError("division only by a positive constant")


@dataclass(frozen=True)
class ModC(FnExpr):
    """Remainder modulo a nonzero constant."""

    arg: FnExpr
    divisor: int

    def __post_init__(self):
        if self.divisor <= 0:
            raise ValueError("modulus only by a positive constant")


@dataclass(frozen=True)
class IfEq(FnExpr):
    """ifeq(a, b, t, o): t if a = b else o."""

    a: FnExpr
    b: FnExpr
    then: FnExpr
    other: FnExpr


@dataclass(frozen=True)
class PairE(FnExpr):
    left: FnExpr
    right: FnExpr


@dataclass(frozen=True)
class P1(FnExpr):
    arg: FnExpr


@dataclass(frozen=True)
class P2(FnExpr):
    arg: FnExpr


@dataclass(frozen=True)
class Compose(FnExpr):
    """outer after inner: x -> outer(inner(x))."""

    outer: FnExpr
    inner: FnExpr


@dataclass(frozen=True)
class Table(FnExpr):
    """Finite lookup applied to a subexpression.

    Not part of the published grammar; used internally for functions that
    are only known on a finite sample. ``default`` of None means identity
    outside the table, otherwise the given constant.
    """

    arg: FnExpr
    entries: tuple[tuple[int, int], ...]
    default: int | None

    def __post_init__(self):
        keys = [k for k, _ in self.entries]
        if keys != sorted(set(keys)):
            raise ValueError("table entries must be sorted by unique key")


def succ(e: FnExpr) -> FnExpr:
    return Add(e, Const(1))


def pred(e: FnExpr) -> FnExpr:
    return Sub(e, Const(1))


#: characteristic function of the diagonal on pair-encoded arguments
CHI_DIAG = IfEq(P1(VAR), P2(VAR), Const(1), Const(0))


# ---------------------------------------------------------------------------
# Evaluation

def interpret(e: FnExpr, x: int) -> int:
    """Reference evaluator. Total for every grammar-valid expression."""
    match e:
        case Const(v):
            return v
        case Var():
            return x
        case Add(a, b):
            return interpret(a, x) + interpret(b, x)
        case Sub(a, b):
            l, r = interpret(a, x), interpret(b, x)
            return l - r if l >= r else 0
        case Mul(a, b):
            return interpret(a, x) * interpret(b, x)
        case DivC(a, d):
            return interpret(a, x) // d
        case ModC(a, d):
            return interpret(a, x) % d
        case IfEq(a, b, t, o):
            if interpret(a, x) == interpret(b, x):
                return interpret(t, x)
            return interpret(o, x)
        case PairE(a, b):
            return pair(interpret(a, x), interpret(b, x))
        case P1(a):
            return unpair(interpret(a, x))[0]
        case P2(a):
            return unpair(interpret(a, x))[1]
        case Compose(f, g):
            return interpret(f, interpret(g, x))
        case Table(a, entries, default):
            v = interpret(a, x)
            for k, out in entries:
                if k == v:
                    return out
            return v if default is None else default
        case _:
            raise TypeError(f"not an FnExpr: {e!r}")


def compile_fn(e: FnExpr) -> Callable[[int], int]:
    """Compile to a Python function.

    Generates straight-line assignments with one temp per distinct subterm,
    so shared subtrees (ubiquitous after composition inlining) are
    evaluated once.
    """
    lines: list[str] = []
    names: dict[tuple[int, str], str] = {}
    namespace: dict[str, object] = {"_pair": pair, "_unpair": unpair}
    counter = 0

    def fresh(rhs: str) -> str:
        nonlocal counter
        name = f"t{counter}"
        counter += 1
        lines.append(f"    {name} = {rhs}")
        return name

    def emit(node: FnExpr, var: str) -> str:
        key = (id(node), var)
        if key in names:
            return names[key]
        match node:
            case Const(v):
                out = repr(v)
            case Var():
                out = var
            case Add(a, b):
                out = fresh(f"{emit(a, var)} + {emit(b, var)}")
            case Sub(a, b):
                la, lb = emit(a, var), emit(b, var)
                out = fresh(f"{la} - {lb} if {la} >= {lb} else 0")
            case Mul(a, b):
                out = fresh(f"{emit(a, var)} * {emit(b, var)}")
            case DivC(a, d):
                out = fresh(f"{emit(a, var)} // {d}")
            case ModC(a, d):
                out = fresh(f"{emit(a, var)} % {d}")
            case IfEq(a, b, t, o):
                cond = fresh(f"{emit(a, var)} == {emit(b, var)}")
                out = fresh(f"{emit(t, var)} if {cond} else {emit(o, var)}")
            case PairE(a, b):
                out = fresh(f"_pair({emit(a, var)}, {emit(b, var)})")
            case P1(a):
                out = fresh(f"_unpair({emit(a, var)})[0]")
            case P2(a):
                out = fresh(f"_unpair({emit(a, var)})[1]")
            case Compose(f, g):
                out = emit(f, emit(g, var))
            case Table(a, entries, default):
                tname = f"_tab{len(namespace)}"
                namespace[tname] = dict(entries)
                av = emit(a, var)
                if default is None:
                    out = fresh(f"{tname}.get({av}, {av})")
                else:
                    out = fresh(f"{tname}.get({av}, {default})")
            case _:
                raise TypeError(f"not an FnExpr: {node!r}")
        names[key] = out
        return out

    result = emit(e, "x")
    src = "def _f(x):\n" + "\n".join(lines) + f"\n    return {result}\n"
    exec(compile(src, "<funlang>", "exec"), namespace)
    return namespace["_f"]  # type: ignore[return-value]


def is_closed(e: FnExpr) -> bool:
    """True when the expression contains no input variable."""
    match e:
        case Const():
            return True
        case Var():
            return False
        case Add(a, b) | Sub(a, b) | Mul(a, b) | PairE(a, b):
            return is_closed(a) and is_closed(b)
        case DivC(a, _) | ModC(a, _) | P1(a) | P2(a):
            return is_closed(a)
        case IfEq(a, b, t, o):
            return all(is_closed(s) for s in (a, b, t, o))
        case Compose(f, g):
            return is_closed(g) or is_closed(f)
        case Table(a, _, _):
            return is_closed(a)
    raise TypeError(f"not an FnExpr: {e!r}")


# ---------------------------------------------------------------------------
# Substitution and normalization

def substitute(e: FnExpr, repl: FnExpr) -> FnExpr:
    """Replace the input variable by ``repl``."""
    memo: dict[int, FnExpr] = {}

    def go(node: FnExpr) -> FnExpr:
        key = id(node)
        if key in memo:
            return memo[key]
        match node:
            case Var():
                out: FnExpr = repl
            case Const():
                out = node
            case Add(a, b):
                out = Add(go(a), go(b))
            case Sub(a, b):
                out = Sub(go(a), go(b))
            case Mul(a, b):
                out = Mul(go(a), go(b))
            case DivC(a, d):
                out = DivC(go(a), d)
            case ModC(a, d):
                out = ModC(go(a), d)
            case IfEq(a, b, t, o):
                out = IfEq(go(a), go(b), go(t), go(o))
            case PairE(a, b):
                out = PairE(go(a), go(b))
            case P1(a):
                out = P1(go(a))
            case P2(a):
                out = P2(go(a))
            case Compose(f, g):
                out = Compose(f, go(g))
            case Table(a, entries, default):
                out = Table(go(a), entries, default)
            case _:
                raise TypeError(f"not an FnExpr: {node!r}")
        memo[key] = out
        return out

    return go(e)


def normalize(e: FnExpr) -> FnExpr:
    """Canonical form: no Compose nodes, exact redexes cancelled.

    Rewrites applied (all exact identities of the denoted functions):
      * ``Compose(f, g)``      -> f with its variable replaced by g
      * ``p1(pair(a, b))``     -> a,  ``p2(pair(a, b))`` -> b
      * ``ifeq(a, a, t, o)``   -> t  (structural identity of a)
    """

    def inline(node: FnExpr) -> FnExpr:
        match node:
            case Compose(f, g):
                return substitute(inline(f), inline(g))
            case Const() | Var():
                return node
            case Add(a, b):
                return Add(inline(a), inline(b))
            case Sub(a, b):
                return Sub(inline(a), inline(b))
            case Mul(a, b):
                return Mul(inline(a), inline(b))
            case DivC(a, d):
                return DivC(inline(a), d)
            case ModC(a, d):
                return ModC(inline(a), d)
            case IfEq(a, b, t, o):
                return IfEq(inline(a), inline(b), inline(t), inline(o))
            case PairE(a, b):
                return PairE(inline(a), inline(b))
            case P1(a):
                return P1(inline(a))
            case P2(a):
                return P2(inline(a))
            case Table(a, entries, default):
                return Table(inline(a), entries, default)
        raise TypeError(f"not an FnExpr: {node!r}")

    memo: dict[int, FnExpr] = {}

    def simp(node: FnExpr) -> FnExpr:
        key = id(node)
        if key in memo:
            return memo[key]
        match node:
            case Const() | Var():
                out = node
            case Add(a, b):
                out = Add(simp(a), simp(b))
            case Sub(a, b):
                out = Sub(simp(a), simp(b))
            case Mul(a, b):
                out = Mul(simp(a), simp(b))
            case DivC(a, d):
                out = DivC(simp(a), d)
            case ModC(a, d):
                out = ModC(simp(a), d)
            case IfEq(a, b, t, o):
                sa, sb = simp(a), simp(b)
                if sa == sb:
                    out = simp(t)
                else:
                    out = IfEq(sa, sb, simp(t), simp(o))
            case PairE(a, b):
                out = PairE(simp(a), simp(b))
            case P1(a):
                sa = simp(a)
                out = sa.left if isinstance(sa, PairE) else P1(sa)
            case P2(a):
                sa = simp(a)
                out = sa.right if isinstance(sa, PairE) else P2(sa)
            case Table(a, entries, default):
                out = Table(simp(a), entries, default)
            case _:
                raise TypeError(f"not an FnExpr: {node!r}")
        memo[key] = out
        return out

    return simp(inline(e))


# ---------------------------------------------------------------------------
# Pretty printing

_CHAIN = (Add, Sub, Mul)


def pretty(e: FnExpr) -> str:
    """Canonical concrete syntax. ``parse_fn(pretty(e)) == e`` for
    normalized, Table-free expressions."""
    memo: dict[int, tuple[str, bool]] = {}

    def go(node: FnExpr) -> tuple[str, bool]:
        # returns (text, is_chain) where is_chain marks a top-level + - *
        key = id(node)
        if key in memo:
            return memo[key]
        match node:
            case Const(v):
                out = (str(v), False)
            case Var():
                out = ("x", False)
            case Add(a, b):
                out = (f"{chain(a)} + {atom(b)}", True)
            case Sub(a, b):
                out = (f"{chain(a)} - {atom(b)}", True)
            case Mul(a, b):
                out = (f"{chain(a)} * {atom(b)}", True)
            case DivC(a, d):
                out = (f"{atom(a)} div {d}", False)
            case ModC(a, d):
                out = (f"{atom(a)} mod {d}", False)
            case IfEq(a, b, t, o):
                out = (
                    f"ifeq({go(a)[0]}, {go(b)[0]}, {go(t)[0]}, {go(o)[0]})",
                    False,
                )
            case PairE(a, b):
                out = (f"pair({go(a)[0]}, {go(b)[0]})", False)
            case P1(a):
                out = (f"p1({go(a)[0]})", False)
            case P2(a):
                out = (f"p2({go(a)[0]})", False)
            case Compose(_, _):
                out = go(normalize(node))
            case Table(a, entries, default):
                digest = sha256(repr((entries, default)).encode()).hexdigest()[:12]
                out = (f"table#{digest}({go(a)[0]})", False)
            case _:
                raise TypeError(f"not an FnExpr: {node!r}")
        memo[key] = out
        return out

    def chain(node: FnExpr) -> str:
        # left operand of a chain may itself be a chain
        return go(node)[0]

    def atom(node: FnExpr) -> str:
        text, is_chain = go(node)
        return f"({text})" if is_chain else text

    return go(e)[0]


# ---------------------------------------------------------------------------
# Parsing

_SYMBOLS = {"+", "-", "*", "(", ")", ","}
_KEYWORDS = {"ifeq", "pair", "p1", "p2", "mod", "div"}


def _tokenize(src: str) -> list[tuple[str, str, int, int]]:
    tokens = []
    line, col = 1, 1
    i = 0
    while i < len(src):
        c = src[i]
        if c == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if c.isspace():
            i += 1
            col += 1
            continue
        if c == "#":
            while i < len(src) and src[i] != "\n":
                i += 1
            continue
        if c in _SYMBOLS:
            tokens.append(("sym", c, line, col))
            i += 1
            col += 1
            continue
        if c.isdigit():
            j = i
            while j < len(src) and src[j].isdigit():
                j += 1
            tokens.append(("nat", src[i:j], line, col))
            col += j - i
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < len(src) and (src[j].isalnum() or src[j] == "_"):
                j += 1
            tokens.append(("name", src[i:j], line, col))
            col += j - i
            i = j
            continue
        raise ParseError(f"unexpected character {c!r}", line, col)
    tokens.append(("eof", "", line, col))
    return tokens


class _Parser:
    def __init__(self, tokens, defs: dict[str, FnExpr] | None):
        self.tokens = tokens
        self.pos = 0
        self.defs = defs or {}

    def peek(self):
        return self.tokens[self.pos]

    def next(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, value: str):
        kind, text, line, col = self.next()
        if text != value:
            raise ParseError(f"expected {value!r}, found {text or 'end of input'!r}", line, col)

    def fail(self, message: str):
        _, text, line, col = self.peek()
        raise ParseError(message, line, col)

    def parse_expr(self) -> FnExpr:
        node = self.parse_term()
        while True:
            kind, text, _, _ = self.peek()
            if kind == "sym" and text in "+-*":
                self.next()
                rhs = self.parse_term()
                node = {"+": Add, "-": Sub, "*": Mul}[text](node, rhs)
            else:
                return node

    def parse_term(self) -> FnExpr:
        node = self.parse_atom()
        while True:
            kind, text, _, _ = self.peek()
            if kind == "name" and text in ("mod", "div"):
                self.next()
                nkind, ntext, line, col = self.next()
                if nkind != "nat":
                    raise ParseError(f"{text} requires a constant divisor", line, col)
                d = int(ntext)
                if d == 0:
                    raise ParseError(f"{text} by zero rejected", line, col)
                node = (ModC if text == "mod" else DivC)(node, d)
            else:
                return node

    def parse_atom(self) -> FnExpr:
        kind, text, line, col = self.next()
        if kind == "nat":
            return Const(int(text))
        if kind == "sym" and text == "(":
            node = self.parse_expr()
            self.expect(")")
            return node
        if kind == "name":
            if text == "x":
                return VAR
            if text == "ifeq":
                self.expect("(")
                a = self.parse_expr()
                self.expect(",")
                b = self.parse_expr()
                self.expect(",")
                t = self.parse_expr()
                self.expect(",")
                o = self.parse_expr()
                self.expect(")")
                return IfEq(a, b, t, o)
            if text == "pair":
                self.expect("(")
                a = self.parse_expr()
                self.expect(",")
                b = self.parse_expr()
                self.expect(")")
                return PairE(a, b)
            if text in ("p1", "p2"):
                self.expect("(")
                a = self.parse_expr()
                self.expect(")")
                return (P1 if text == "p1" else P2)(a)
            if text in ("mod", "div"):
                raise ParseError(f"{text!r} is not an atom", line, col)
            if text in self.defs:
                self.expect("(")
                arg = self.parse_expr()
                self.expect(")")
                return substitute(self.defs[text], arg)
            raise ParseError(f"unknown name {text!r}", line, col)
        raise ParseError(
            f"expected an expression, found {text or 'end of input'!r}", line, col
        )


def parse_fn(source: str, defs: dict[str, FnExpr] | None = None) -> FnExpr:
    """Parse one expression. ``defs`` supplies named functions for calls,
    which are inlined."""
    parser = _Parser(_tokenize(source), defs)
    node = parser.parse_expr()
    kind, text, line, col = parser.peek()
    if kind != "eof":
        raise ParseError(f"trailing input {text!r}", line, col)
    return node


def parse_definitions(source: str) -> dict[str, FnExpr]:
    """Parse a block of ``def name = expr`` lines. Later definitions may
    call earlier ones."""
    defs: dict[str, FnExpr] = {}
    for lineno, raw in enumerate(source.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if not line.startswith("def "):
            raise ParseError("expected 'def name = expr'", lineno, 1)
        head, _, body = line[4:].partition("=")
        name = head.strip()
        if not name.isidentifier() or name in _KEYWORDS or name == "x":
            raise ParseError(f"bad definition name {name!r}", lineno, 1)
        if name in defs:
            raise ParseError(f"duplicate definition {name!r}", lineno, 1)
        if not body.strip():
            raise ParseError("empty definition body", lineno, 1)
        defs[name] = parse_fn(body, defs)
    return defs


# ---------------------------------------------------------------------------
# Index predicates

class IndexPredicate:
    """A decidable subset of the index set N.

    ``text`` is the canonical identity: two predicates with equal text are
    the same oracle query and share a decision-log entry. Truth at n means
    the underlying value is nonzero.
    """

    __slots__ = ("text", "expr", "_fn", "_mask_builder", "_compiled")

    def __init__(
        self,
        text: str,
        expr: FnExpr | None = None,
        fn: Callable[[int], int] | None = None,
        mask_builder: Callable[[int], np.ndarray] | None = None,
    ):
        if expr is None and fn is None:
            raise ValueError("predicate needs an expression or a callable")
        self.text = text
        self.expr = expr
        self._fn = fn
        self._mask_builder = mask_builder
        self._compiled: Callable[[int], int] | None = None

    def __repr__(self):
        return f"IndexPredicate({self.text!r})"

    # -- construction ------------------------------------------------------

    @classmethod
    def from_expr(cls, expr: FnExpr) -> "IndexPredicate":
        norm = normalize(expr)
        return cls(pretty(norm), expr=norm)

    @classmethod
    def from_fn(cls, fn: Callable[[int], int], text: str) -> "IndexPredicate":
        return cls(text, fn=fn)

    @classmethod
    def agreement(
        cls,
        a: FnExpr,
        b: FnExpr,
        values_a: Callable[[int], list[int]] | None = None,
        values_b: Callable[[int], list[int]] | None = None,
    ) -> "IndexPredicate":
        """The set {n : a(n) = b(n)}. Optional value-vector providers let
        the mask reuse cached sequence values."""
        na, nb = normalize(a), normalize(b)
        norm = normalize(IfEq(na, nb, Const(1), Const(0)))
        builder = None
        if values_a is not None and values_b is not None and not isinstance(norm, Const):
            def builder(horizon: int) -> np.ndarray:
                va = values_a(horizon)
                vb = values_b(horizon)
                return np.fromiter(
                    (p == q for p, q in zip(va, vb)), dtype=bool, count=horizon + 1
                )

        return cls(pretty(norm), expr=norm, mask_builder=builder)

    @classmethod
    def full(cls) -> "IndexPredicate":
        return cls.from_expr(Const(1))

    @classmethod
    def empty(cls) -> "IndexPredicate":
        return cls.from_expr(Const(0))

    # -- combinators ---------------------------------------------------------

    def negate(self) -> "IndexPredicate":
        if self.expr is not None:
            norm = normalize(IfEq(self.expr, Const(0), Const(1), Const(0)))
            text = pretty(norm)
            expr = norm
        else:
            text = f"not[{self.text}]"
            expr = None
        inner = self
        return IndexPredicate(
            text,
            expr=expr,
            fn=(lambda n: 0 if inner.truth_at(n) else 1) if expr is None else None,
            mask_builder=lambda horizon: ~inner.mask(horizon),
        )

    def conj(self, other: "IndexPredicate") -> "IndexPredicate":
        return _combine(self, other, "and")

    def disj(self, other: "IndexPredicate") -> "IndexPredicate":
        return _combine(self, other, "or")

    # -- evaluation ----------------------------------------------------------

    def constant_value(self) -> bool | None:
        """Truth value when the predicate does not depend on the index."""
        if self.expr is not None and is_closed(self.expr):
            return interpret(self.expr, 0) != 0
        return None

    def truth_at(self, n: int) -> bool:
        if self._fn is not None:
            return self._fn(n) != 0
        if self._compiled is None:
            self._compiled = compile_fn(self.expr)  # type: ignore[arg-type]
        return self._compiled(n) != 0

    def mask(self, horizon: int) -> np.ndarray:
        """Boolean truth vector over indices 0..horizon inclusive."""
        const = self.constant_value()
        if const is not None:
            return np.full(horizon + 1, const, dtype=bool)
        if self._mask_builder is not None:
            return self._mask_builder(horizon)
        if self._fn is not None:
            f = self._fn
        else:
            if self._compiled is None:
                self._compiled = compile_fn(self.expr)  # type: ignore[arg-type]
            f = self._compiled
        return np.fromiter(
            (f(n) != 0 for n in range(horizon + 1)), dtype=bool, count=horizon + 1
        )


def _combine(p: IndexPredicate, q: IndexPredicate, op: str) -> IndexPredicate:
    if p.expr is not None and q.expr is not None:
        if op == "and":
            raw = IfEq(p.expr, Const(0), Const(0), IfEq(q.expr, Const(0), Const(0), Const(1)))
        else:
            raw = IfEq(p.expr, Const(0), IfEq(q.expr, Const(0), Const(0), Const(1)), Const(1))
        norm = normalize(raw)
        text = pretty(norm)
        expr = norm
    else:
        text = f"{op}[{p.text} ; {q.text}]"
        expr = None

    if op == "and":
        fn = lambda n: 1 if (p.truth_at(n) and q.truth_at(n)) else 0
        builder = lambda horizon: p.mask(horizon) & q.mask(horizon)
    else:
        fn = lambda n: 1 if (p.truth_at(n) or q.truth_at(n)) else 0
        builder = lambda horizon: p.mask(horizon) | q.mask(horizon)
    return IndexPredicate(text, expr=expr, fn=fn if expr is None else None, mask_builder=builder)
