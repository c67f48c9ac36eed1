"""Exact timestamps, timed state sequences and eps-digitization.

Every time value is a :class:`fractions.Fraction`.  Floats are refused at the
boundary because the rounding rule ``x <= floor(x) + eps`` has to be decided
exactly at ``x = floor(x) + eps``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence

from digitization.errors import DomainError, ParseError

ONE = Fraction(1)


def as_time(value) -> Fraction:
    """Coerce *value* to an exact Fraction.

    Accepts ints, Fractions and strings holding a decimal literal or ``p/q``.
    """
    if isinstance(value, bool):
        raise DomainError(f"not a time value: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, Rational):
        return Fraction(value.numerator, value.denominator)
    if isinstance(value, str):
        return parse_time(value)
    raise DomainError(f"time values must be exact (int, Fraction or str), got {type(value).__name__}")


def parse_time(text: str) -> Fraction:
    """Parse ``"3"``, ``"0.75"``, ``"7/10"`` exactly."""
    s = text.strip()
    try:
        if "/" in s:
            num, den = s.split("/")
            if not den.strip().isdigit():
                raise ValueError(text)
            return Fraction(int(num), int(den))
        # Fraction parses decimal strings exactly, never through a float
        return Fraction(s)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"invalid rational literal {text!r}") from None


def format_time(value: Fraction) -> str:
    """Canonical rendering: bare integer or ``p/q``."""
    value = as_time(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def frac_part(x: Fraction) -> Fraction:
    return x - math.floor(x)


def _check_eps(eps) -> Fraction:
    eps = as_time(eps)
    if not 0 < eps <= 1:
        raise DomainError("eps must lie in (0,1]")
    return eps


def digitize_scalar(x, eps) -> int:
    """Round *x* down when its fractional part is at most *eps*, else up."""
    eps = _check_eps(eps)
    x = as_time(x)
    if x < 0:
        raise DomainError(f"time value must be nonnegative, got {format_time(x)}")
    lo = math.floor(x)
    if x <= lo + eps:
        return lo
    return math.ceil(x)


def digitize_times(times: Sequence, eps) -> tuple[int, ...]:
    eps = _check_eps(eps)
    return tuple(digitize_scalar(t, eps) for t in times)


@dataclass(frozen=True)
class EpsClass:
    """A maximal range of eps values that digitize a time vector identically."""

    lower: Fraction
    lower_closed: bool
    upper: Fraction
    upper_closed: bool
    representative: Fraction

    def __contains__(self, eps) -> bool:
        eps = as_time(eps)
        above = eps >= self.lower if self.lower_closed else eps > self.lower
        below = eps <= self.upper if self.upper_closed else eps < self.upper
        return above and below

    def render(self) -> str:
        left = "[" if self.lower_closed else "("
        right = "]" if self.upper_closed else ")"
        return f"{left}{format_time(self.lower)},{format_time(self.upper)}{right}"


def _thresholds(times: Iterable) -> list[Fraction]:
    fracs = {frac_part(as_time(t)) for t in times}
    fracs.discard(Fraction(0))
    return sorted(fracs) + [ONE]


def epsilon_classes(times: Sequence) -> list[EpsClass]:
    """Partition (0,1] into the classes on which digitization is constant.

    A timestamp with fractional part f rounds down exactly when eps >= f, so
    the classes are ``(0,f1), [f1,f2), ..., [fm,1]``.
    """
    thresholds = _thresholds(times)
    fracs = thresholds[:-1]
    if not fracs:
        return [EpsClass(Fraction(0), False, ONE, True, ONE)]
    classes = [EpsClass(Fraction(0), False, fracs[0], False, fracs[0] / 2)]
    for k, f in enumerate(fracs):
        if k + 1 < len(fracs):
            classes.append(EpsClass(f, True, fracs[k + 1], False, f))
        else:
            classes.append(EpsClass(f, True, ONE, True, f))
    return classes


def representative_epsilons(times: Sequence) -> list[Fraction]:
    """Each threshold plus the midpoint of every open gap below it."""
    thresholds = _thresholds(times)
    reps = []
    prev = Fraction(0)
    for t in thresholds:
        reps.append((prev + t) / 2)
        reps.append(t)
        prev = t
    return sorted(set(reps))


@dataclass(frozen=True)
class Observation:
    state: frozenset
    time: Fraction

    def __post_init__(self):
        object.__setattr__(self, "state", frozenset(self.state))
        t = as_time(self.time)
        if t < 0:
            raise DomainError(f"observation time must be nonnegative, got {format_time(t)}")
        object.__setattr__(self, "time", t)


@dataclass(frozen=True, eq=False)
class TimedStateSequence:
    """A finite, weakly monotone sequence of observations (possibly empty)."""

    observations: tuple[Observation, ...] = ()

    # digitally timed sequences compare equal to dense ones with the same content
    def __eq__(self, other):
        if not isinstance(other, TimedStateSequence):
            return NotImplemented
        return self.observations == other.observations

    def __hash__(self):
        return hash(self.observations)

    def __post_init__(self):
        obs = tuple(self.observations)
        object.__setattr__(self, "observations", obs)
        for a, b in zip(obs, obs[1:]):
            if b.time < a.time:
                raise DomainError(
                    f"timestamps must be weakly monotone: {format_time(a.time)} > {format_time(b.time)}"
                )

    @classmethod
    def of(cls, pairs: Iterable[tuple[Iterable[str], object]]) -> "TimedStateSequence":
        """Build from ``(atoms, time)`` pairs."""
        return cls(tuple(Observation(frozenset(atoms), as_time(t)) for atoms, t in pairs))

    def __len__(self):
        return len(self.observations)

    def __iter__(self):
        return iter(self.observations)

    def __getitem__(self, i):
        return self.observations[i]

    @property
    def times(self) -> tuple[Fraction, ...]:
        return tuple(o.time for o in self.observations)

    @property
    def states(self) -> tuple[frozenset, ...]:
        return tuple(o.state for o in self.observations)

    def is_integral(self) -> bool:
        return all(t.denominator == 1 for t in self.times)

    def retimed(self, times: Sequence) -> "TimedStateSequence":
        if len(times) != len(self):
            raise DomainError("retiming must supply one time per observation")
        return TimedStateSequence(
            tuple(Observation(o.state, as_time(t)) for o, t in zip(self.observations, times))
        )

    def to_dict(self) -> dict:
        return {
            "observations": [
                {"atoms": sorted(o.state), "time": format_time(o.time)} for o in self.observations
            ]
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "TimedStateSequence":
        try:
            items = doc["observations"]
            return cls.of((item.get("atoms", []), parse_time(str(item["time"]))) for item in items)
        except (KeyError, TypeError, AttributeError) as exc:
            raise ParseError(f"malformed trace document: {exc}") from None

    def __str__(self):
        parts = []
        for o in self.observations:
            atoms = ",".join(sorted(o.state))
            parts.append(f"({{{atoms}}}, {format_time(o.time)})")
        return " -> ".join(parts) if parts else "<empty>"


class DigitallyTimedSequence(TimedStateSequence):
    """A timed state sequence whose timestamps are all integers."""

    def __post_init__(self):
        super().__post_init__()
        if not self.is_integral():
            raise DomainError("digitally timed sequences need integer timestamps")


def digitize_trace(eta: TimedStateSequence, eps) -> DigitallyTimedSequence:
    new_times = digitize_times(eta.times, eps)
    return DigitallyTimedSequence(
        tuple(Observation(o.state, Fraction(t)) for o, t in zip(eta.observations, new_times))
    )


def critical_epsilons(eta: TimedStateSequence) -> list[Fraction]:
    """Sorted distinct nonzero fractional parts of the timestamps, then 1."""
    return _thresholds(eta.times)


def digitization_set(eta: TimedStateSequence) -> set[DigitallyTimedSequence]:
    """All distinct digitizations of *eta* over eps in (0,1]."""
    return {digitize_trace(eta, e) for e in representative_epsilons(eta.times)}


def digitization_classes(eta: TimedStateSequence) -> list[tuple[EpsClass, DigitallyTimedSequence]]:
    """One ``(eps range, digitization)`` pair per class, in increasing eps order."""
    return [(c, digitize_trace(eta, c.representative)) for c in epsilon_classes(eta.times)]
