"""Closure analyses: decision procedures, seeded falsifiers, and the verify pipeline.

Only :func:`check_ta_cud` ever returns a ``Holds`` verdict.  Every sampling
procedure reports ``NoCounterexampleFound`` with its trial count instead,
because closure under inverse digitization is undecidable and a clean fuzz
run proves nothing.
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from digitization.mtl import (
    ALWAYS,
    FALSE,
    TRUE,
    And,
    Atom,
    Formula,
    Interval,
    Not,
    Or,
    Until,
    Unless,
    atoms,
    classify_pattern,
    is_weakly_constrained,
    satisfies,
)
from digitization.tick_semantics import (
    DEFAULT_STATE_CAP,
    accepted_words,
    build_tick_automaton,
    decode_tick_word,
    encode_integer_word,
    language_inclusion,
    nfa_accepts,
    reachable_locations_tick,
)
from digitization.timed_automata import (
    TAClass,
    TimedAutomaton,
    TimedWord,
    TimeInterval,
    classify,
    closure_transform,
    generate_accepted_trace,
    holds_all,
    random_run,
    simulate_membership,
)
from digitization.timed_traces import TimedStateSequence, digitization_classes, format_time


class Kind(str, enum.Enum):
    HOLDS = "Holds"
    NO_COUNTEREXAMPLE = "NoCounterexampleFound"
    COUNTEREXAMPLE = "Counterexample"
    INCONCLUSIVE = "Inconclusive"


@dataclass
class Verdict:
    kind: Kind
    trials: int | None = None
    evidence: dict = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        ev = {}
        for key, value in self.evidence.items():
            ev[key] = _jsonable(value)
        return {
            "kind": self.kind.value,
            "trials": self.trials,
            "evidence": ev,
            "notes": list(self.notes),
            "details": {k: _jsonable(v) for k, v in self.details.items()},
        }

    def summary(self) -> str:
        if self.kind is Kind.NO_COUNTEREXAMPLE:
            return f"{self.kind.value} ({self.trials} trials)"
        return self.kind.value


def _jsonable(value):
    if isinstance(value, Fraction):
        return format_time(value)
    if isinstance(value, (TimedStateSequence, TimedWord)):
        return value.to_dict() if isinstance(value, TimedStateSequence) else value.to_list()
    if isinstance(value, (set, frozenset)):
        return sorted(value)
    if isinstance(value, tuple):
        return list(value)
    return value


@dataclass(frozen=True)
class FuzzConfig:
    seed: int = 0
    trials: int = 1000
    max_length: int = 6
    max_time: int = 4
    denominator: int = 8

    def __post_init__(self):
        for name in ("trials", "max_length", "max_time", "denominator"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")

    def rng(self, trial: int) -> random.Random:
        # string seeds hash through sha512, stable across runs and platforms
        return random.Random(f"{self.seed}/{trial}")


# --------------------------------------------------------------- generators


def random_times(rng: random.Random, n: int, cfg: FuzzConfig) -> list[Fraction]:
    den = rng.randint(1, cfg.denominator)
    return sorted(Fraction(rng.randint(0, cfg.max_time * den), den) for _ in range(n))


def random_trace(rng: random.Random, names: Sequence[str], cfg: FuzzConfig) -> TimedStateSequence:
    n = rng.randint(1, cfg.max_length)
    times = random_times(rng, n, cfg)
    states = [frozenset(a for a in names if rng.random() < 0.5) for _ in range(n)]
    return TimedStateSequence.of(zip(states, times))


def random_formula(
    rng: random.Random, names: Sequence[str], depth: int, qualitative: bool = False
) -> Formula:
    """Random formula over *names*; with *qualitative* every interval is [0,inf)."""
    if depth <= 0 or rng.random() < 0.25:
        choice = rng.random()
        if choice < 0.05:
            return TRUE
        if choice < 0.1:
            return FALSE
        return Atom(rng.choice(names))
    kind = rng.choice(["not", "and", "or", "until", "unless"])
    if kind == "not":
        return Not(random_formula(rng, names, depth - 1, qualitative))
    left = random_formula(rng, names, depth - 1, qualitative)
    right = random_formula(rng, names, depth - 1, qualitative)
    if kind == "and":
        return And(left, right)
    if kind == "or":
        return Or(left, right)
    interval = ALWAYS if qualitative else random_interval(rng)
    return (Until if kind == "until" else Unless)(interval, left, right)


def random_interval(rng: random.Random) -> Interval:
    lo = Fraction(rng.randint(0, 4), rng.choice([1, 2]))
    if rng.random() < 0.25:
        return Interval(lo, rng.random() < 0.5, None, False)
    hi = lo + Fraction(rng.randint(0, 4), rng.choice([1, 2]))
    if hi == lo:
        return Interval(lo, True, hi, True)
    return Interval(lo, rng.random() < 0.5, hi, rng.random() < 0.5)


def random_word(rng: random.Random, alphabet: Sequence[str], cfg: FuzzConfig) -> TimedWord:
    n = rng.randint(1, cfg.max_length)
    times = random_times(rng, n, cfg)
    return TimedWord(tuple((rng.choice(alphabet), t) for t in times))


# ------------------------------------------------------- formula testers


def test_formula_cud(phi: Formula, cfg: FuzzConfig = FuzzConfig()) -> Verdict:
    """Search for a satisfying dense trace with a falsifying digitization."""
    names = sorted(atoms(phi)) or ["p"]
    satisfied = 0
    for trial in range(cfg.trials):
        eta = random_trace(cfg.rng(trial), names, cfg)
        if not satisfies(phi, eta):
            continue
        satisfied += 1
        for eps_class, d in digitization_classes(eta):
            if not satisfies(phi, d):
                return Verdict(
                    Kind.COUNTEREXAMPLE,
                    trial + 1,
                    {"trace": eta, "eps": eps_class.representative, "digitization": d},
                    [f"dense trace satisfies {phi}; its digitization for eps in {eps_class.render()} does not"],
                )
    return Verdict(
        Kind.NO_COUNTEREXAMPLE,
        cfg.trials,
        notes=[f"{satisfied} of {cfg.trials} sampled traces satisfied the formula"],
    )


def test_formula_cuid(phi: Formula, cfg: FuzzConfig = FuzzConfig()) -> Verdict:
    """Search for a falsifying dense trace all of whose digitizations satisfy *phi*."""
    names = sorted(atoms(phi)) or ["p"]
    violated = 0
    for trial in range(cfg.trials):
        eta = random_trace(cfg.rng(trial), names, cfg)
        if satisfies(phi, eta):
            continue
        violated += 1
        if all(satisfies(phi, d) for _, d in digitization_classes(eta)):
            return Verdict(
                Kind.COUNTEREXAMPLE,
                trial + 1,
                {"trace": eta},
                [f"every digitization satisfies {phi} but the dense trace does not"],
            )
    return Verdict(
        Kind.NO_COUNTEREXAMPLE,
        cfg.trials,
        notes=[f"{violated} of {cfg.trials} sampled traces violated the formula"],
    )


# ---------------------------------------------------------- automaton testers


def test_ta_cud_fuzz(
    A: TimedAutomaton, cfg: FuzzConfig = FuzzConfig(), state_cap: int = DEFAULT_STATE_CAP
) -> Verdict:
    """Every digitization of a densely accepted word must be accepted integrally."""
    N = build_tick_automaton(A, state_cap)
    found = 0
    for trial in range(cfg.trials):
        rng = cfg.rng(trial)
        w = generate_accepted_trace(
            A, rng.randint(1, cfg.max_length), rng, denominator=cfg.denominator, max_delay=Fraction(cfg.max_time)
        )
        if w is None:
            continue
        found += 1
        for eps, d in w.digitizations().items():
            u = encode_integer_word(d)
            if not nfa_accepts(N, u):
                return Verdict(
                    Kind.COUNTEREXAMPLE,
                    trial + 1,
                    {"trace": w, "eps": eps, "tick_word": u},
                    [f"dense word accepted; its eps={format_time(eps)} digitization {d} is rejected integrally"],
                )
    notes = [f"{found} of {cfg.trials} trials produced an accepted dense word"]
    if found == 0:
        notes.append("vacuous: the generator found no accepted word")
    return Verdict(Kind.NO_COUNTEREXAMPLE, cfg.trials, notes=notes)


def test_ta_cuid_fuzz(
    A: TimedAutomaton, cfg: FuzzConfig = FuzzConfig(), state_cap: int = DEFAULT_STATE_CAP
) -> Verdict:
    """A densely rejected word must have some integrally rejected digitization."""
    N = build_tick_automaton(A, state_cap)
    closed = closure_transform(A)
    alphabet = list(A.alphabet)
    if not alphabet:
        return Verdict(Kind.NO_COUNTEREXAMPLE, cfg.trials, notes=["vacuous: the automaton has no edges"])
    checked = 0
    for trial in range(cfg.trials):
        rng = cfg.rng(trial)
        # boundary-hugging candidates from the closure, or arbitrary words
        w = None
        if trial % 2 == 0:
            w = generate_accepted_trace(
                closed, rng.randint(1, cfg.max_length), rng,
                denominator=cfg.denominator, max_delay=Fraction(cfg.max_time),
            )
        if w is None:
            w = random_word(rng, alphabet, cfg)
        if simulate_membership(A, w):
            continue
        checked += 1
        digits = w.digitizations()
        if all(nfa_accepts(N, encode_integer_word(d)) for d in digits.values()):
            return Verdict(
                Kind.COUNTEREXAMPLE,
                trial + 1,
                {"trace": w},
                ["dense word rejected although every digitization is accepted integrally"],
            )
    return Verdict(
        Kind.NO_COUNTEREXAMPLE,
        cfg.trials,
        notes=[f"{checked} of {cfg.trials} sampled words were densely rejected"],
    )


def find_dense_witness(
    A: TimedAutomaton, target: TimedWord, budget: int = 2000, seed=0
) -> tuple[TimedWord, Fraction] | None:
    """Look for a densely accepted word whose eps-digitization equals *target*.

    A time t digitizes to n under eps exactly when n - 1 + eps < t <= n + eps.
    """
    rng = random.Random(seed)
    ints = [int(t) for t in target.times]
    for attempt in range(budget):
        eps = Fraction(1, 2) if attempt == 0 else Fraction(rng.randint(1, 16), 16)
        pairs = []
        prev = Fraction(0)
        for action, n in zip(target.actions, ints):
            hi = n + eps
            if attempt == 0:
                t = max(hi, prev)
            else:
                window = _window(prev, n, eps)
                if window.is_empty():
                    break
                t = window.sample(rng, 64, Fraction(1))
            pairs.append((action, t))
            prev = t
        if len(pairs) != len(ints):
            continue
        w = TimedWord(tuple(pairs))
        if w.digitize(eps) == target and simulate_membership(A, w):
            return w, eps
    return None


def _window(prev: Fraction, n: int, eps: Fraction) -> TimeInterval:
    lo = n - 1 + eps
    if prev > lo:
        return TimeInterval(prev, True, n + eps, True)
    return TimeInterval(lo, False, n + eps, True)


def check_ta_cud(
    A: TimedAutomaton, state_cap: int = DEFAULT_STATE_CAP, budget: int = 2000, seed: int = 0
) -> Verdict:
    """Decide closure under digitization by the closure-inclusion criterion.

    Compares the integral languages of the closure of A and of A itself.  A
    counterexample word is only reported once a dense accepted word that
    digitizes to it has been found; otherwise the verdict is Inconclusive.
    """
    N = build_tick_automaton(A, state_cap)
    N_cl = build_tick_automaton(closure_transform(A), state_cap)
    u = language_inclusion(N_cl, N, state_cap)
    if u is None:
        return Verdict(Kind.HOLDS, notes=["decision via closure-inclusion criterion"])
    target = decode_tick_word(u)
    notes = [
        "closure-inclusion criterion failed: the closed over-approximation accepts "
        f"integral word {target} that the automaton rejects",
        "the closure transform may introduce false negatives in emptiness-based analyses",
    ]
    if nfa_accepts(N, encode_integer_word(target)):
        notes.append("the counterexample tick word differs from its event word only by trailing ticks")
        return Verdict(Kind.INCONCLUSIVE, evidence={"tick_word": u}, notes=notes)
    found = find_dense_witness(A, target, budget, seed)
    if found is None:
        notes.append(f"no dense witness found within {budget} attempts")
        return Verdict(Kind.INCONCLUSIVE, evidence={"tick_word": u}, notes=notes)
    w, eps = found
    notes.append(
        f"dense word {w} is accepted but its eps={format_time(eps)} digitization {target} is not"
    )
    return Verdict(Kind.COUNTEREXAMPLE, evidence={"trace": w, "eps": eps, "tick_word": u}, notes=notes)


def check_reach_equivalence(
    A: TimedAutomaton, cfg: FuzzConfig = FuzzConfig(), state_cap: int = DEFAULT_STATE_CAP
) -> Verdict:
    """Compare integrally reachable locations with those met by random dense runs."""
    tick_locs = reachable_locations_tick(A, state_cap)
    dense_locs = set()
    notes = []
    if classify(A) is not TAClass.CLOSED:
        notes.append(f"warning: automaton is {classify(A).value}; equality is only expected for Closed TA")
    if holds_all(A.invariant(A.initial), {x: 0 for x in A.clocks}):
        dense_locs.add(A.initial)
    for trial in range(cfg.trials):
        run = random_run(A, cfg.max_length, cfg.rng(trial), cfg.denominator, Fraction(cfg.max_time))
        for edge, _ in run:
            dense_locs.add(edge.target)
        extra = {e.target for e, _ in run} - tick_locs
        if extra:
            w = TimedWord(tuple((e.action, t) for e, t in run))
            return Verdict(
                Kind.COUNTEREXAMPLE,
                trial + 1,
                {"trace": w},
                notes + [f"dense run reaches {sorted(extra)} which integral semantics never reaches"],
                {"dense": dense_locs, "tick": tick_locs},
            )
    details = {"dense": dense_locs, "tick": tick_locs}
    if dense_locs == tick_locs:
        notes.append(f"equal location sets: {sorted(tick_locs)}")
        return Verdict(Kind.NO_COUNTEREXAMPLE, cfg.trials, notes=notes, details=details)
    notes.append(f"dense exploration missed {sorted(tick_locs - dense_locs)}")
    return Verdict(Kind.INCONCLUSIVE, cfg.trials, notes=notes, details=details)


# ------------------------------------------------------------ verification


GATE1 = "closed under digitization"
GATE2 = "closed under inverse digitization"


def verify(
    A: TimedAutomaton,
    phi: Formula,
    bound: int,
    atom_map: Mapping[str, Sequence[str]] | None = None,
    state_cap: int = DEFAULT_STATE_CAP,
) -> Verdict:
    """Reduce dense-time verification of A against phi to integer time, up to *bound*.

    Gate 1 needs a Closed automaton, gate 2 a qualitative or weakly
    constrained formula.  Then every accepted tick word of length at most
    *bound* is decoded to an integer-timed state sequence and checked.
    """
    if bound < 1:
        raise ValueError("bound must be positive")
    notes = []
    cls = classify(A)
    if cls is not TAClass.CLOSED:
        notes.append(f"gate 1 failed: automaton is {cls.value}, so it is not known to be {GATE1}")
        return Verdict(Kind.INCONCLUSIVE, notes=notes, details={"gate1": False})
    notes.append(f"gate 1 passed: Closed automaton, hence {GATE1}")
    pattern = classify_pattern(phi)
    weak = is_weakly_constrained(phi)
    if pattern.kind == "QualitativeSyntactic":
        notes.append(f"gate 2 passed: qualitative formula, hence {GATE2}")
    elif weak:
        notes.append(f"gate 2 passed: weakly constrained formula, hence {GATE2}")
    else:
        notes.append(
            f"gate 2 failed: formula is neither qualitative nor weakly constrained, so it is not known to be {GATE2}"
        )
        notes.extend(f"  violation {v}" for v in weak.violations)
        return Verdict(Kind.INCONCLUSIVE, notes=notes, details={"gate1": True, "gate2": False})

    N = build_tick_automaton(A, state_cap)
    seen = set()
    checked = 0
    for u in accepted_words(N, bound):
        w = decode_tick_word(u)
        if len(w) == 0 or w in seen:
            continue
        seen.add(w)
        checked += 1
        eta = w.as_state_sequence(atom_map)
        if not satisfies(phi, eta):
            notes.append(f"integer-timed trace {eta} violates {phi}")
            return Verdict(
                Kind.COUNTEREXAMPLE,
                checked,
                {"trace": eta, "tick_word": u},
                notes,
                {"gate1": True, "gate2": True},
            )
    notes.append(f"S |=_N phi up to bound {bound} ({checked} distinct nonempty traces checked)")
    return Verdict(
        Kind.NO_COUNTEREXAMPLE, checked, notes=notes, details={"gate1": True, "gate2": True, "bound": bound}
    )


# keep pytest from collecting the testers when a test module imports them
for _fn in (test_formula_cud, test_formula_cuid, test_ta_cud_fuzz, test_ta_cuid_fuzz):
    _fn.__test__ = False
