"""Independent reference implementations used only by the tests.

Nothing here imports the code paths it checks: the digitization oracle works
on raw integer numerators/denominators, the MTL oracle expands quantifiers
directly, and the NFA oracle walks individual paths.
"""

from fractions import Fraction
from itertools import product

from digitization import mtl


def digitize_oracle(x: Fraction, eps: Fraction) -> int:
    # x = p/q, eps = r/s; x <= floor(x) + eps  <=>  p*s <= (fl*q)*s + r*q
    p, q = x.numerator, x.denominator
    r, s = eps.numerator, eps.denominator
    fl = p // q
    if p * s <= fl * q * s + r * q:
        return fl
    return fl if p % q == 0 else fl + 1


def digitization_set_grid(times, grid=1000):
    """Distinct digitized time vectors over eps = k/grid, k = 1..grid."""
    return {
        tuple(digitize_oracle(t, Fraction(k, grid)) for t in times) for k in range(1, grid + 1)
    }


def holds_at(f, states, times, i) -> bool:
    """Direct quantifier expansion of the pointwise finite-trace semantics."""
    n = len(states)
    if isinstance(f, mtl.Atom):
        if f.name == "true":
            return True
        if f.name == "false":
            return False
        return f.name in states[i]
    if isinstance(f, mtl.Not):
        return not holds_at(f.arg, states, times, i)
    if isinstance(f, mtl.And):
        return holds_at(f.left, states, times, i) and holds_at(f.right, states, times, i)
    if isinstance(f, mtl.Or):
        return holds_at(f.left, states, times, i) or holds_at(f.right, states, times, i)
    iv = f.interval

    def in_interval(d):
        lo_ok = d > iv.lower or (iv.lower_closed and d == iv.lower)
        if iv.upper is None:
            return lo_ok
        return lo_ok and (d < iv.upper or (iv.upper_closed and d == iv.upper))

    until = any(
        in_interval(times[j] - times[i])
        and holds_at(f.right, states, times, j)
        and all(holds_at(f.left, states, times, k) for k in range(i, j))
        for j in range(i, n)
    )
    if isinstance(f, mtl.Until):
        return until

    def not_past_upper(d):
        if iv.upper is None:
            return True
        return d < iv.upper or (iv.upper_closed and d == iv.upper)

    return until or all(
        holds_at(f.left, states, times, j) for j in range(i, n) if not_past_upper(times[j] - times[i])
    )


def nfa_path_accepts(initial, accepting, delta, word) -> bool:
    """Depth-first search over individual runs."""

    def run(state, k):
        if k == len(word):
            return state in accepting
        return any(run(t, k + 1) for t in delta.get((state, word[k]), ()))

    return any(run(s, 0) for s in initial)


def all_words(alphabet, max_len):
    for n in range(max_len + 1):
        yield from product(sorted(alphabet), repeat=n)


def monotone_int_words(alphabet, max_time, max_len):
    """Every integer-timed word with weakly monotone times in [0, max_time]."""
    for n in range(max_len + 1):
        for actions in product(sorted(alphabet), repeat=n):
            for times in _monotone(n, 0, max_time):
                yield tuple(zip(actions, times))


def _monotone(n, lo, hi):
    if n == 0:
        yield ()
        return
    for t in range(lo, hi + 1):
        for rest in _monotone(n - 1, t, hi):
            yield (t,) + rest
