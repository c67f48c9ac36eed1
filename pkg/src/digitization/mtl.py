"""Metric temporal logic over finite timed state sequences.

The AST has six node kinds: Atom, Not, And, Or, Until, Unless.  ``->``,
``F[I]`` and ``G[I]`` are parser sugar::

    p -> q       ==  !p | q
    F[I] p       ==  true U[I] p
    G[I] p       ==  p W[I] false

Semantics are pointwise (indexed by observation) on finite traces:

* ``p U[I] q`` holds at i iff some j >= i has ``T_j - T_i`` in I, q at j and
  p at every k with i <= k < j.  Position i itself is a candidate witness.
* ``p W[I] q`` holds at i iff ``p U[I] q`` does, or p holds at every j >= i
  whose distance ``T_j - T_i`` does not exceed the upper end of I (honouring
  its closedness).  Positions past the end of the trace impose nothing.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Mapping

from digitization.errors import DomainError, ParseError
from digitization.timed_traces import TimedStateSequence, format_time, parse_time


@dataclass(frozen=True)
class Interval:
    lower: Fraction = Fraction(0)
    lower_closed: bool = True
    upper: Fraction | None = None  # None is +infinity
    upper_closed: bool = False

    def __post_init__(self):
        object.__setattr__(self, "lower", Fraction(self.lower))
        if self.upper is not None:
            object.__setattr__(self, "upper", Fraction(self.upper))
        if self.lower < 0:
            raise DomainError("interval lower bound must be nonnegative")
        if self.upper is None:
            if self.upper_closed:
                raise DomainError("an infinite upper bound cannot be closed")
        elif self.lower > self.upper or (
            self.lower == self.upper and not (self.lower_closed and self.upper_closed)
        ):
            raise DomainError(f"empty interval {self}")

    @property
    def bounded(self) -> bool:
        return self.upper is not None

    def is_unconstrained(self) -> bool:
        return self.lower == 0 and self.lower_closed and self.upper is None

    def contains(self, d) -> bool:
        if d < self.lower or (d == self.lower and not self.lower_closed):
            return False
        if self.upper is None:
            return True
        return d < self.upper or (d == self.upper and self.upper_closed)

    def within_upper(self, d) -> bool:
        if self.upper is None:
            return True
        return d < self.upper or (d == self.upper and self.upper_closed)

    def __str__(self):
        left = "[" if self.lower_closed else "("
        if self.upper is None:
            return f"{left}{format_time(self.lower)},inf)"
        right = "]" if self.upper_closed else ")"
        return f"{left}{format_time(self.lower)},{format_time(self.upper)}{right}"


ALWAYS = Interval()


class Formula:
    """Base class of MTL formula nodes."""

    def children(self) -> tuple["Formula", ...]:
        return ()

    def subformulas(self) -> Iterator["Formula"]:
        yield self
        for c in self.children():
            yield from c.subformulas()


@dataclass(frozen=True)
class Atom(Formula):
    name: str

    def __str__(self):
        return self.name


TRUE = Atom("true")
FALSE = Atom("false")


@dataclass(frozen=True)
class Not(Formula):
    arg: Formula

    def children(self):
        return (self.arg,)

    def __str__(self):
        return f"!{_wrap(self.arg)}"


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)

    def __str__(self):
        return f"{_wrap(self.left)} & {_wrap(self.right)}"


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)

    def __str__(self):
        return f"{_wrap(self.left)} | {_wrap(self.right)}"


@dataclass(frozen=True)
class Until(Formula):
    interval: Interval
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)

    def __str__(self):
        if self.left == TRUE:
            return f"F{_interval_suffix(self.interval)} {_wrap(self.right)}"
        return f"{_wrap(self.left)} U{_interval_suffix(self.interval)} {_wrap(self.right)}"


@dataclass(frozen=True)
class Unless(Formula):
    interval: Interval
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)

    def __str__(self):
        if self.right == FALSE:
            return f"G{_interval_suffix(self.interval)} {_wrap(self.left)}"
        return f"{_wrap(self.left)} W{_interval_suffix(self.interval)} {_wrap(self.right)}"


def _interval_suffix(interval: Interval) -> str:
    return "" if interval.is_unconstrained() else str(interval)


def _wrap(f: Formula) -> str:
    if isinstance(f, Atom) or isinstance(f, Not):
        return str(f)
    if isinstance(f, Until) and f.left == TRUE or isinstance(f, Unless) and f.right == FALSE:
        return str(f)
    return f"({f})"


def eventually(f: Formula, interval: Interval = ALWAYS) -> Until:
    return Until(interval, TRUE, f)


def always(f: Formula, interval: Interval = ALWAYS) -> Unless:
    return Unless(interval, f, FALSE)


def implies(a: Formula, b: Formula) -> Or:
    return Or(Not(a), b)


def atoms(f: Formula) -> set[str]:
    return {g.name for g in f.subformulas() if isinstance(g, Atom) and g not in (TRUE, FALSE)}


def rename_atoms(f: Formula, mapping: Mapping[str, str]) -> Formula:
    if isinstance(f, Atom):
        return Atom(mapping.get(f.name, f.name)) if f not in (TRUE, FALSE) else f
    if isinstance(f, Not):
        return Not(rename_atoms(f.arg, mapping))
    if isinstance(f, (And, Or)):
        return type(f)(rename_atoms(f.left, mapping), rename_atoms(f.right, mapping))
    return type(f)(f.interval, rename_atoms(f.left, mapping), rename_atoms(f.right, mapping))


# ---------------------------------------------------------------- parsing

_NUM = r"\d+(?:\.\d+)?(?:/\d+)?"
_TOKEN = re.compile(rf"\s*(?:(?P<num>{_NUM})|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>->|[()\[\],!&|]))")
_INTERVAL = re.compile(rf"\s*([\[(])\s*({_NUM})\s*,\s*({_NUM}|inf)\s*([\])])")
_KEYWORDS = {"U", "W", "F", "G", "inf"}


@dataclass
class _Token:
    kind: str
    text: str
    pos: int


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = self._tokenize(text)
        self.i = 0

    @staticmethod
    def _tokenize(text):
        tokens = []
        pos = 0
        while True:
            while pos < len(text) and text[pos].isspace():
                pos += 1
            if pos >= len(text):
                break
            m = _TOKEN.match(text, pos)
            if not m:
                raise ParseError(f"unexpected character {text[pos]!r}", pos)
            kind = m.lastgroup
            tokens.append(_Token(kind, m.group(kind), m.start(kind)))
            pos = m.end()
        tokens.append(_Token("eof", "", len(text)))
        return tokens

    @property
    def tok(self) -> _Token:
        return self.tokens[self.i]

    def advance(self) -> _Token:
        t = self.tokens[self.i]
        self.i += 1
        return t

    def expect(self, text):
        if self.tok.text != text:
            raise ParseError(f"expected {text!r}, found {self.tok.text or 'end of input'!r}", self.tok.pos)
        return self.advance()

    def parse(self) -> Formula:
        f = self.implication()
        if self.tok.kind != "eof":
            raise ParseError(f"unexpected {self.tok.text!r}", self.tok.pos)
        return f

    def implication(self):
        left = self.until()
        if self.tok.text == "->":
            self.advance()
            return implies(left, self.implication())
        return left

    def until(self):
        left = self.disjunction()
        if self.tok.kind == "ident" and self.tok.text in ("U", "W"):
            node = Until if self.advance().text == "U" else Unless
            interval = self.maybe_interval()
            return node(interval, left, self.until())
        return left

    def disjunction(self):
        f = self.conjunction()
        while self.tok.text == "|":
            self.advance()
            f = Or(f, self.conjunction())
        return f

    def conjunction(self):
        f = self.unary()
        while self.tok.text == "&":
            self.advance()
            f = And(f, self.unary())
        return f

    def unary(self):
        t = self.tok
        if t.text == "!":
            self.advance()
            return Not(self.unary())
        if t.kind == "ident" and t.text in ("F", "G"):
            self.advance()
            interval = self.maybe_interval()
            body = self.unary()
            return eventually(body, interval) if t.text == "F" else always(body, interval)
        return self.primary()

    def primary(self):
        t = self.tok
        if t.text == "(":
            self.advance()
            f = self.implication()
            self.expect(")")
            return f
        if t.kind == "ident" and t.text not in _KEYWORDS:
            self.advance()
            return Atom(t.text)
        raise ParseError(f"expected a formula, found {t.text or 'end of input'!r}", t.pos)

    def maybe_interval(self) -> Interval:
        t = self.tok
        if t.text not in ("[", "("):
            return ALWAYS
        m = _INTERVAL.match(self.text, t.pos)
        if not m:
            if t.text == "[":
                raise ParseError("malformed interval", t.pos)
            return ALWAYS  # a parenthesised operand, not an interval
        lo = parse_time(m.group(2))
        hi = None if m.group(3) == "inf" else parse_time(m.group(3))
        lower_closed = m.group(1) == "["
        upper_closed = m.group(4) == "]"
        if hi is None and upper_closed:
            raise ParseError("an infinite upper bound must be written 'inf)'", t.pos)
        try:
            interval = Interval(lo, lower_closed, hi, upper_closed)
        except DomainError as exc:
            raise ParseError(str(exc), t.pos) from None
        while self.tok.pos < m.end():
            self.advance()
        return interval


def parse_formula(text: str) -> Formula:
    return _Parser(text).parse()


# ---------------------------------------------------------- normalisation


def propositional_nnf(f: Formula) -> Formula:
    """Push negations through And/Or and drop double negations; temporal nodes keep theirs."""
    if isinstance(f, Atom):
        return f
    if isinstance(f, (And, Or)):
        return type(f)(propositional_nnf(f.left), propositional_nnf(f.right))
    if isinstance(f, (Until, Unless)):
        return type(f)(f.interval, propositional_nnf(f.left), propositional_nnf(f.right))
    g = f.arg
    if isinstance(g, Not):
        return propositional_nnf(g.arg)
    if isinstance(g, And):
        return Or(propositional_nnf(Not(g.left)), propositional_nnf(Not(g.right)))
    if isinstance(g, Or):
        return And(propositional_nnf(Not(g.left)), propositional_nnf(Not(g.right)))
    return Not(propositional_nnf(g))


# ------------------------------------------------------------ classifiers


@dataclass(frozen=True)
class Violation:
    subformula: Formula
    condition: str  # "i", "ii" or "iii"
    reason: str

    def __str__(self):
        return f"({self.condition}) {self.reason}: {self.subformula}"


@dataclass(frozen=True)
class WeakConstraintCheck:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok


def is_weakly_constrained(f: Formula) -> WeakConstraintCheck:
    """Check the three syntactic conditions on *f* exactly as written.

    (i) negation only directly on atoms; (ii) Until intervals open at every
    finite endpoint; (iii) Unless intervals closed at every finite endpoint.
    An infinite upper end counts as open.
    """
    found = []
    for g in f.subformulas():
        if isinstance(g, Not) and not isinstance(g.arg, Atom):
            found.append(Violation(g, "i", "negation not in front of an atomic proposition"))
        elif isinstance(g, Until):
            iv = g.interval
            if iv.lower_closed or (iv.bounded and iv.upper_closed):
                found.append(Violation(g, "ii", f"until constrained by non-open interval {iv}"))
        elif isinstance(g, Unless):
            iv = g.interval
            if not iv.lower_closed or (iv.bounded and not iv.upper_closed):
                found.append(Violation(g, "iii", f"unless constrained by non-closed interval {iv}"))
    return WeakConstraintCheck(tuple(found))


@dataclass(frozen=True)
class Pattern:
    kind: str  # BoundedInvariance, BoundedResponse, QualitativeSyntactic, Other
    bound: Fraction | None = None

    def __str__(self):
        if self.bound is None:
            return self.kind
        return f"{self.kind}({format_time(self.bound)})"


def _is_literal(f) -> bool:
    return isinstance(f, Atom) or isinstance(f, Not) and isinstance(f.arg, Atom)


def _is_trigger(f) -> bool:
    # the "!p" disjunct of "p -> ..." where p is itself a literal
    return _is_literal(f) or isinstance(f, Not) and _is_literal(f.arg)


def _bounded_from_zero(iv: Interval) -> bool:
    return iv.lower == 0 and iv.lower_closed and iv.bounded and iv.upper_closed


def _match_consequent(f) -> Pattern | None:
    if isinstance(f, Until) and f.left == TRUE and _is_literal(f.right) and _bounded_from_zero(f.interval):
        return Pattern("BoundedResponse", f.interval.upper)
    if isinstance(f, Unless) and f.right == FALSE and _is_literal(f.left) and _bounded_from_zero(f.interval):
        return Pattern("BoundedInvariance", f.interval.upper)
    return None


def is_qualitative_syntactic(f: Formula) -> bool:
    return all(
        g.interval.is_unconstrained() for g in f.subformulas() if isinstance(g, (Until, Unless))
    )


def classify_pattern(f: Formula) -> Pattern:
    """Recognise G(p -> F[0,c] q), G(p -> G[0,c] q), or an untimed formula."""
    if isinstance(f, Unless) and f.right == FALSE and f.interval.is_unconstrained():
        body = f.left
        if isinstance(body, Or):
            for trigger, consequent in ((body.left, body.right), (body.right, body.left)):
                if _is_trigger(trigger):
                    match = _match_consequent(consequent)
                    if match:
                        return match
    if is_qualitative_syntactic(f):
        return Pattern("QualitativeSyntactic")
    return Pattern("Other")


# -------------------------------------------------------------- semantics


def _vector(f: Formula, eta: TimedStateSequence, memo: dict) -> list[bool]:
    if f in memo:
        return memo[f]
    states = eta.states
    times = eta.times
    n = len(states)
    if f == TRUE:
        v = [True] * n
    elif f == FALSE:
        v = [False] * n
    elif isinstance(f, Atom):
        v = [f.name in s for s in states]
    elif isinstance(f, Not):
        v = [not b for b in _vector(f.arg, eta, memo)]
    elif isinstance(f, And):
        v = [a and b for a, b in zip(_vector(f.left, eta, memo), _vector(f.right, eta, memo))]
    elif isinstance(f, Or):
        v = [a or b for a, b in zip(_vector(f.left, eta, memo), _vector(f.right, eta, memo))]
    else:
        v1 = _vector(f.left, eta, memo)
        v2 = _vector(f.right, eta, memo)
        iv = f.interval
        v = []
        for i in range(n):
            holds = False
            for j in range(i, n):
                d = times[j] - times[i]
                if not iv.within_upper(d):
                    break
                if v2[j] and iv.contains(d):
                    holds = True
                    break
                if not v1[j]:
                    break
            if not holds and isinstance(f, Unless):
                holds = all(v1[j] for j in range(i, n) if iv.within_upper(times[j] - times[i]))
            v.append(holds)
    memo[f] = v
    return v


def evaluate(f: Formula, eta: TimedStateSequence, i: int = 0) -> bool:
    if not 0 <= i < len(eta):
        raise DomainError(f"position {i} is out of range for a trace of length {len(eta)}")
    return _vector(f, eta, {})[i]


def satisfies(f: Formula, eta: TimedStateSequence) -> bool:
    if len(eta) == 0:
        raise DomainError("satisfaction is undefined on the empty trace")
    return evaluate(f, eta, 0)
