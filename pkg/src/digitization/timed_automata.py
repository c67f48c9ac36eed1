"""Timed automata: data model, Closed/Open classification, exact simulation.

Clock values are never stored directly.  A run configuration records, per
clock, the global time of its last reset; the value of clock ``x`` at global
time ``t`` is ``t - reset[x]``.  With exact Fractions this makes every
boundary decision (``x = c`` against ``<=`` and ``<``) exact.
"""

from __future__ import annotations

import enum
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from digitization.errors import DomainError, ParseError
from digitization.timed_traces import (
    Observation,
    TimedStateSequence,
    as_time,
    digitize_times,
    format_time,
    representative_epsilons,
)

TICK = "TICK"


class Op(str, enum.Enum):
    LT = "<"
    LE = "<="
    GE = ">="
    GT = ">"

    @property
    def strict(self) -> bool:
        return self in (Op.LT, Op.GT)

    @property
    def upper(self) -> bool:
        return self in (Op.LT, Op.LE)

    def closed(self) -> "Op":
        return {Op.LT: Op.LE, Op.GT: Op.GE}.get(self, self)

    def opened(self) -> "Op":
        return {Op.LE: Op.LT, Op.GE: Op.GT}.get(self, self)


@dataclass(frozen=True)
class ClockConstraint:
    clock: str
    op: Op
    bound: int

    def __post_init__(self):
        object.__setattr__(self, "op", Op(self.op))
        if isinstance(self.bound, bool) or not isinstance(self.bound, int) or self.bound < 0:
            raise DomainError(f"clock bound must be a nonnegative integer, got {self.bound!r}")

    def holds(self, value) -> bool:
        if self.op is Op.LT:
            return value < self.bound
        if self.op is Op.LE:
            return value <= self.bound
        if self.op is Op.GE:
            return value >= self.bound
        return value > self.bound

    def __str__(self):
        return f"{self.clock} {self.op.value} {self.bound}"


def holds_all(constraints: Iterable[ClockConstraint], values: Mapping[str, object]) -> bool:
    return all(c.holds(values[c.clock]) for c in constraints)


@dataclass(frozen=True)
class Edge:
    source: str
    target: str
    action: str
    guard: tuple[ClockConstraint, ...] = ()
    resets: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "guard", tuple(self.guard))
        object.__setattr__(self, "resets", frozenset(self.resets))

    def __str__(self):
        guard = " & ".join(map(str, self.guard)) or "true"
        resets = ",".join(sorted(self.resets))
        return f"{self.source} -[{self.action} | {guard} | reset {{{resets}}}]-> {self.target}"


class TAClass(enum.Enum):
    CLOSED = "Closed"
    OPEN = "Open"
    MIXED = "Mixed"


@dataclass(frozen=True)
class TimedAutomaton:
    locations: tuple[str, ...]
    clocks: tuple[str, ...]
    initial: str
    accepting: frozenset
    edges: tuple[Edge, ...]
    invariants: Mapping[str, tuple[ClockConstraint, ...]] = field(default_factory=dict)
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "locations", tuple(self.locations))
        object.__setattr__(self, "clocks", tuple(self.clocks))
        object.__setattr__(self, "accepting", frozenset(self.accepting))
        object.__setattr__(self, "edges", tuple(self.edges))
        object.__setattr__(
            self, "invariants", {loc: tuple(cs) for loc, cs in self.invariants.items() if cs}
        )
        self._validate()

    def _validate(self):
        locs = set(self.locations)
        clocks = set(self.clocks)
        if not locs:
            raise DomainError("a timed automaton needs at least one location")
        if self.initial not in locs:
            raise DomainError(f"initial location {self.initial!r} is not declared")
        if not self.accepting <= locs:
            raise DomainError(f"undeclared accepting locations: {sorted(self.accepting - locs)}")
        for e in self.edges:
            if e.source not in locs or e.target not in locs:
                raise DomainError(f"edge {e} uses an undeclared location")
            if not e.resets <= clocks:
                raise DomainError(f"edge {e} resets an undeclared clock")
            if e.action == TICK:
                raise DomainError(f"{TICK!r} is reserved and cannot label an edge")
            for c in e.guard:
                if c.clock not in clocks:
                    raise DomainError(f"guard {c} uses an undeclared clock")
        for loc, cs in self.invariants.items():
            if loc not in locs:
                raise DomainError(f"invariant for undeclared location {loc!r}")
            for c in cs:
                if c.clock not in clocks:
                    raise DomainError(f"invariant {c} uses an undeclared clock")

    @property
    def alphabet(self) -> tuple[str, ...]:
        return tuple(sorted({e.action for e in self.edges}))

    def invariant(self, location: str) -> tuple[ClockConstraint, ...]:
        return self.invariants.get(location, ())

    def constraints(self) -> list[tuple[str, ClockConstraint]]:
        """Every atomic constraint tagged with where it occurs."""
        out = []
        for loc in self.locations:
            out.extend((f"invariant of {loc}", c) for c in self.invariant(loc))
        for i, e in enumerate(self.edges):
            out.extend((f"guard of edge {i} ({e.source}->{e.target}, {e.action})", c) for c in e.guard)
        return out

    def max_constant(self) -> int:
        return max((c.bound for _, c in self.constraints()), default=0)

    def outgoing(self, location: str) -> list[Edge]:
        return [e for e in self.edges if e.source == location]

    def map_constraints(self, fn) -> "TimedAutomaton":
        edges = tuple(
            Edge(e.source, e.target, e.action, tuple(fn(c) for c in e.guard), e.resets)
            for e in self.edges
        )
        invariants = {loc: tuple(fn(c) for c in cs) for loc, cs in self.invariants.items()}
        return TimedAutomaton(
            self.locations, self.clocks, self.initial, self.accepting, edges, invariants, self.name
        )

    def to_dict(self) -> dict:
        def cdict(c):
            return {"clock": c.clock, "op": c.op.value, "const": c.bound}

        doc = {
            "clocks": list(self.clocks),
            "locations": list(self.locations),
            "initial": self.initial,
            "accepting": sorted(self.accepting),
            "invariants": {loc: [cdict(c) for c in cs] for loc, cs in sorted(self.invariants.items())},
            "edges": [
                {
                    "from": e.source,
                    "to": e.target,
                    "action": e.action,
                    "guard": [cdict(c) for c in e.guard],
                    "resets": sorted(e.resets),
                }
                for e in self.edges
            ],
        }
        if self.name:
            doc["name"] = self.name
        return doc

    @classmethod
    def from_dict(cls, doc: Mapping) -> "TimedAutomaton":
        try:
            edges = [
                Edge(
                    e["from"],
                    e["to"],
                    e["action"],
                    tuple(_parse_constraints(e.get("guard", []))),
                    frozenset(e.get("resets", [])),
                )
                for e in doc["edges"]
            ]
            invariants = {
                loc: tuple(_parse_constraints(cs)) for loc, cs in doc.get("invariants", {}).items()
            }
            return cls(
                tuple(doc["locations"]),
                tuple(doc.get("clocks", [])),
                doc["initial"],
                frozenset(doc.get("accepting", [])),
                tuple(edges),
                invariants,
                doc.get("name", ""),
            )
        except (KeyError, TypeError, AttributeError) as exc:
            raise ParseError(f"malformed automaton document: missing or bad field {exc}") from None


def _parse_constraints(items) -> list[ClockConstraint]:
    out = []
    for item in items:
        op = item["op"]
        bound = item["const"]
        if op == "==":
            out.append(ClockConstraint(item["clock"], Op.LE, bound))
            out.append(ClockConstraint(item["clock"], Op.GE, bound))
            continue
        try:
            out.append(ClockConstraint(item["clock"], Op(op), bound))
        except ValueError:
            raise ParseError(f"unknown comparison operator {op!r}") from None
    return out


def classify(A: TimedAutomaton) -> TAClass:
    """Closed if every constraint is non-strict, Open if every one is strict.

    Constraint-free automata satisfy both and are reported Closed.
    """
    ops = [c.op for _, c in A.constraints()]
    if all(not op.strict for op in ops):
        return TAClass.CLOSED
    if all(op.strict for op in ops):
        return TAClass.OPEN
    return TAClass.MIXED


def closure_transform(A: TimedAutomaton) -> TimedAutomaton:
    """Weaken every strict constraint to its non-strict counterpart."""
    return A.map_constraints(lambda c: ClockConstraint(c.clock, c.op.closed(), c.bound))


def interior_transform(A: TimedAutomaton) -> TimedAutomaton:
    """Strengthen every non-strict constraint to its strict counterpart."""
    return A.map_constraints(lambda c: ClockConstraint(c.clock, c.op.opened(), c.bound))


@dataclass(frozen=True)
class TimedWord:
    """A finite weakly monotone sequence of ``(action, time)`` pairs."""

    pairs: tuple[tuple[str, Fraction], ...] = ()

    def __post_init__(self):
        pairs = tuple((a, as_time(t)) for a, t in self.pairs)
        object.__setattr__(self, "pairs", pairs)
        for (_, s), (_, t) in zip(pairs, pairs[1:]):
            if t < s:
                raise DomainError(f"timed word is not monotone: {format_time(s)} > {format_time(t)}")
        if any(t < 0 for _, t in pairs):
            raise DomainError("timed word times must be nonnegative")

    @classmethod
    def of(cls, *pairs) -> "TimedWord":
        return cls(tuple(pairs))

    def __len__(self):
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)

    @property
    def actions(self) -> tuple[str, ...]:
        return tuple(a for a, _ in self.pairs)

    @property
    def times(self) -> tuple[Fraction, ...]:
        return tuple(t for _, t in self.pairs)

    def is_integral(self) -> bool:
        return all(t.denominator == 1 for t in self.times)

    def digitize(self, eps) -> "TimedWord":
        return TimedWord(tuple(zip(self.actions, map(Fraction, digitize_times(self.times, eps)))))

    def digitizations(self) -> dict[Fraction, "TimedWord"]:
        """Map a representative eps to each distinct digitization."""
        out = {}
        for eps in representative_epsilons(self.times):
            w = self.digitize(eps)
            if w not in out.values():
                out[eps] = w
        return out

    def as_state_sequence(self, atom_map: Mapping[str, Iterable[str]] | None = None) -> TimedStateSequence:
        """Observation per event; the state is the action's atom set."""
        obs = []
        for a, t in self.pairs:
            atoms = atom_map[a] if atom_map and a in atom_map else (a,)
            obs.append(Observation(frozenset(atoms), t))
        return TimedStateSequence(tuple(obs))

    def to_list(self) -> list:
        return [[a, format_time(t)] for a, t in self.pairs]

    def __str__(self):
        return " ".join(f"({a},{format_time(t)})" for a, t in self.pairs) or "<empty>"


@dataclass(frozen=True)
class Membership:
    accepted: bool
    run: tuple[Edge, ...] = ()

    def __bool__(self):
        return self.accepted


def _values(clocks, resets, t):
    return {x: t - r for x, r in zip(clocks, resets)}


def simulate_membership(A: TimedAutomaton, w) -> Membership:
    """Decide exactly whether *A* accepts the finite timed word *w*."""
    if not isinstance(w, TimedWord):
        w = TimedWord(tuple(w))
    clocks = A.clocks
    zero = Fraction(0)
    start = tuple(zero for _ in clocks)
    if not holds_all(A.invariant(A.initial), _values(clocks, start, zero)):
        return Membership(False)
    n = len(w)
    dead = set()

    def search(i, loc, resets):
        if i == n:
            return [] if loc in A.accepting else None
        key = (i, loc, resets)
        if key in dead:
            return None
        action, t = w.pairs[i]
        vals = _values(clocks, resets, t)
        # invariants are convex, so checking at both ends of a delay suffices
        if holds_all(A.invariant(loc), vals):
            for e in A.outgoing(loc):
                if e.action != action or not holds_all(e.guard, vals):
                    continue
                nxt = tuple(t if x in e.resets else r for x, r in zip(clocks, resets))
                if not holds_all(A.invariant(e.target), _values(clocks, nxt, t)):
                    continue
                rest = search(i + 1, e.target, nxt)
                if rest is not None:
                    return [e] + rest
        dead.add(key)
        return None

    run = search(0, A.initial, start)
    if run is None:
        return Membership(False)
    return Membership(True, tuple(run))


@dataclass(frozen=True)
class TimeInterval:
    """A set of global times: lower bound always finite, upper may be None (infinity)."""

    lo: Fraction
    lo_closed: bool
    hi: Fraction | None
    hi_closed: bool

    def is_empty(self) -> bool:
        if self.hi is None:
            return False
        return self.lo > self.hi or (self.lo == self.hi and not (self.lo_closed and self.hi_closed))

    def restrict(self, op: Op, bound: Fraction) -> "TimeInterval":
        lo, lc, hi, hc = self.lo, self.lo_closed, self.hi, self.hi_closed
        closed = not op.strict
        if op.upper:
            if hi is None or bound < hi:
                hi, hc = bound, closed
            elif bound == hi:
                hc = hc and closed
        else:
            if bound > lo:
                lo, lc = bound, closed
            elif bound == lo:
                lc = lc and closed
        return TimeInterval(lo, lc, hi, hc)

    def contains(self, t) -> bool:
        above = t >= self.lo if self.lo_closed else t > self.lo
        if self.hi is None:
            return above
        below = t <= self.hi if self.hi_closed else t < self.hi
        return above and below

    def sample(self, rng: random.Random, denominator: int, max_delay: Fraction) -> Fraction:
        """A closed endpoint or an interior point with bounded denominator."""
        choices = []
        if self.lo_closed:
            choices.append("lo")
        if self.hi is not None and self.hi_closed:
            choices.append("hi")
        if self.hi is None or self.lo < self.hi:
            choices.append("interior")
        pick = rng.choice(choices)
        if pick == "lo":
            return self.lo
        if pick == "hi":
            return self.hi
        hi = self.hi if self.hi is not None else self.lo + max_delay
        kmin = math.floor(self.lo * denominator) + 1
        kmax = math.ceil(hi * denominator) - 1
        if kmin <= kmax:
            return Fraction(rng.randint(kmin, kmax), denominator)
        return (self.lo + hi) / 2


def firing_window(A: TimedAutomaton, loc: str, resets: Sequence[Fraction], now: Fraction, edge: Edge):
    """Global times >= now at which *edge* can fire from (loc, resets), or None."""
    window = TimeInterval(now, True, None, False)
    reset_of = dict(zip(A.clocks, resets))
    for c in A.invariant(loc) + edge.guard:
        window = window.restrict(c.op, c.bound + reset_of[c.clock])
    for c in A.invariant(edge.target):
        if c.clock in edge.resets:
            if not c.holds(0):
                return None
        else:
            window = window.restrict(c.op, c.bound + reset_of[c.clock])
    return None if window.is_empty() else window


def _rng(seed) -> random.Random:
    return seed if isinstance(seed, random.Random) else random.Random(seed)


def random_run(
    A: TimedAutomaton,
    length: int,
    seed=0,
    denominator: int = 64,
    max_delay: Fraction = Fraction(3),
) -> list[tuple[Edge, Fraction]]:
    """A random run prefix of at most *length* steps, stopping early when stuck."""
    rng = _rng(seed)
    zero = Fraction(0)
    resets = tuple(zero for _ in A.clocks)
    if not holds_all(A.invariant(A.initial), _values(A.clocks, resets, zero)):
        return []
    loc, now, steps = A.initial, zero, []
    for _ in range(length):
        options = []
        for e in A.outgoing(loc):
            window = firing_window(A, loc, resets, now, e)
            if window is not None:
                options.append((e, window))
        if not options:
            break
        e, window = rng.choice(options)
        now = window.sample(rng, denominator, max_delay)
        resets = tuple(now if x in e.resets else r for x, r in zip(A.clocks, resets))
        loc = e.target
        steps.append((e, now))
    return steps


def generate_accepted_trace(
    A: TimedAutomaton,
    length: int,
    seed=0,
    denominator: int = 64,
    max_delay: Fraction = Fraction(3),
    budget: int = 2000,
) -> TimedWord | None:
    """Randomized backtracking search for an accepted word of exactly *length* events.

    Returns None once *budget* edge expansions are spent without success.
    """
    if length < 1:
        raise DomainError("length must be positive")
    rng = _rng(seed)
    zero = Fraction(0)
    start = tuple(zero for _ in A.clocks)
    if not holds_all(A.invariant(A.initial), _values(A.clocks, start, zero)):
        return None
    remaining = [budget]

    def search(depth, loc, resets, now):
        if depth == length:
            return [] if loc in A.accepting else None
        edges = A.outgoing(loc)
        rng.shuffle(edges)
        for e in edges:
            if remaining[0] <= 0:
                return None
            remaining[0] -= 1
            window = firing_window(A, loc, resets, now, e)
            if window is None:
                continue
            t = window.sample(rng, denominator, max_delay)
            nxt = tuple(t if x in e.resets else r for x, r in zip(A.clocks, resets))
            rest = search(depth + 1, e.target, nxt, t)
            if rest is not None:
                return [(e.action, t)] + rest
        return None

    pairs = search(0, A.initial, start, zero)
    return None if pairs is None else TimedWord(tuple(pairs))
