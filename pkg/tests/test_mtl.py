import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from digitization.closure_lab import FuzzConfig, random_formula, random_trace
from digitization.errors import DomainError, ParseError
from digitization.mtl import (
    ALWAYS,
    FALSE,
    TRUE,
    And,
    Atom,
    Interval,
    Not,
    Or,
    Until,
    Unless,
    always,
    classify_pattern,
    evaluate,
    eventually,
    is_qualitative_syntactic,
    is_weakly_constrained,
    parse_formula,
    propositional_nnf,
    rename_atoms,
    satisfies,
)
from digitization.timed_traces import TimedStateSequence, digitization_set
from oracles import holds_at

p, q, r = Atom("p"), Atom("q"), Atom("r")
HALF_Q = TimedStateSequence.of([(set(), 0), ({"q"}, F(1, 2))])


class TestParser:
    def test_response_sugar(self):
        f = parse_formula("G (p -> F[0,2] q)")
        assert f == Unless(ALWAYS, Or(Not(p), Until(Interval(0, True, 2, True), TRUE, q)), FALSE)

    def test_open_until(self):
        assert parse_formula("p U(0,1) q") == Until(Interval(0, False, 1, False), p, q)

    def test_empty_interval(self):
        with pytest.raises(ParseError, match="empty interval"):
            parse_formula("p U[1,0] q")

    def test_degenerate_open_interval(self):
        with pytest.raises(ParseError):
            parse_formula("F(1,1] p")

    def test_point_interval(self):
        assert parse_formula("F[1,1] p").interval == Interval(1, True, 1, True)

    def test_default_interval(self):
        assert parse_formula("p W q") == Unless(ALWAYS, p, q)

    def test_unbounded(self):
        assert parse_formula("F[1/2,inf) p").interval == Interval(F(1, 2), True, None, False)

    def test_decimal_bounds(self):
        assert parse_formula("F[0.5,1.25] p").interval == Interval(F(1, 2), True, F(5, 4), True)

    def test_closed_infinity_rejected(self):
        with pytest.raises(ParseError):
            parse_formula("F[0,inf] p")

    def test_precedence(self):
        assert parse_formula("!p & q | r") == Or(And(Not(p), q), r)
        assert parse_formula("p | q U r") == Until(ALWAYS, Or(p, q), r)
        assert parse_formula("p U q U r") == Until(ALWAYS, p, Until(ALWAYS, q, r))
        assert parse_formula("p -> q -> r") == Or(Not(p), Or(Not(q), r))

    def test_parenthesised_operand_after_g(self):
        assert parse_formula("G (p)") == always(p)
        assert parse_formula("F(p & q)") == eventually(And(p, q))

    def test_true_false(self):
        assert parse_formula("true U false") == Until(ALWAYS, TRUE, FALSE)

    @pytest.mark.parametrize("text, pos", [("p &", 3), ("p q", 2), ("(p", 2), ("p $ q", 2), ("U", 0)])
    def test_errors_report_position(self, text, pos):
        with pytest.raises(ParseError) as info:
            parse_formula(text)
        assert info.value.position == pos

    def test_str_round_trip(self):
        rng = random.Random(5)
        for _ in range(300):
            f = random_formula(rng, ["p", "q"], 4)
            assert parse_formula(str(f)) == f


class TestNnf:
    def test_double_negation(self):
        assert propositional_nnf(Not(Not(p))) == p

    def test_de_morgan(self):
        assert propositional_nnf(Not(And(p, q))) == Or(Not(p), Not(q))
        assert propositional_nnf(Not(Or(p, Not(q)))) == And(Not(p), q)

    def test_temporal_untouched(self):
        f = Not(Until(ALWAYS, p, q))
        assert propositional_nnf(f) == f

    def test_equivalent(self):
        rng = random.Random(8)
        cfg = FuzzConfig(max_length=5)
        for _ in range(300):
            f = random_formula(rng, ["p", "q"], 4)
            eta = random_trace(rng, ["p", "q"], cfg)
            assert satisfies(f, eta) == satisfies(propositional_nnf(f), eta)


class TestWeaklyConstrained:
    def test_yes(self):
        assert is_weakly_constrained(parse_formula("p U(0,1) q")).ok

    def test_closed_until(self):
        check = is_weakly_constrained(parse_formula("p U[0,1] q"))
        assert not check.ok
        assert [v.condition for v in check.violations] == ["ii"]

    def test_negated_conjunction(self):
        check = is_weakly_constrained(parse_formula("!(p & q)"))
        assert [v.condition for v in check.violations] == ["i"]

    def test_open_unless(self):
        check = is_weakly_constrained(parse_formula("p W(0,1] q"))
        assert [v.condition for v in check.violations] == ["iii"]

    def test_infinite_end_counts_as_open(self):
        assert is_weakly_constrained(parse_formula("p U(1,inf) q")).ok
        assert is_weakly_constrained(parse_formula("G[0,inf) p")).ok

    def test_lower_end_of_unbounded_until(self):
        assert not is_weakly_constrained(parse_formula("F q")).ok

    def test_no_normalisation(self):
        f = parse_formula("!!p")
        assert not is_weakly_constrained(f).ok
        assert is_weakly_constrained(propositional_nnf(f)).ok

    def test_reports_all(self):
        check = is_weakly_constrained(parse_formula("!(p U[0,1] q) & (r W(0,2) p)"))
        assert sorted(v.condition for v in check.violations) == ["i", "ii", "iii"]


class TestPatterns:
    @pytest.mark.parametrize(
        "text, expected",
        [
            ("G(p -> F[0,2] q)", "BoundedResponse(2)"),
            ("G(p -> G[0,3] q)", "BoundedInvariance(3)"),
            ("G(p -> F q)", "QualitativeSyntactic"),
            ("G(F[0,2] q | !p)", "BoundedResponse(2)"),
            ("G(!p -> F[0,1/2] !q)", "BoundedResponse(1/2)"),
            ("G(p -> F(0,2] q)", "Other"),
            ("G[0,5](p -> F[0,2] q)", "Other"),
            ("G(p -> F[0,2] (q & r))", "Other"),
            ("p U q", "QualitativeSyntactic"),
            ("p", "QualitativeSyntactic"),
        ],
    )
    def test_classify(self, text, expected):
        assert str(classify_pattern(parse_formula(text))) == expected

    def test_renaming_invariance(self):
        rng = random.Random(2)
        for _ in range(200):
            f = random_formula(rng, ["p", "q"], 4)
            g = rename_atoms(f, {"p": "alpha", "q": "beta"})
            assert classify_pattern(f).kind == classify_pattern(g).kind
            assert is_weakly_constrained(f).ok == is_weakly_constrained(g).ok


class TestEvaluate:
    def test_atom(self):
        assert evaluate(p, TimedStateSequence.of([({"p"}, 0)]), 0)

    def test_open_eventually_dense(self):
        assert evaluate(parse_formula("F(0,1) q"), HALF_Q, 0)

    def test_open_eventually_lost_by_digitization(self):
        f = parse_formula("F(0,1) q")
        digits = digitization_set(HALF_Q)
        assert {d.times for d in digits} == {(0, 0), (0, 1)}
        assert not any(evaluate(f, d, 0) for d in digits)

    def test_position_out_of_range(self):
        with pytest.raises(DomainError):
            evaluate(p, HALF_Q, 2)

    def test_satisfies_empty(self):
        with pytest.raises(DomainError):
            satisfies(p, TimedStateSequence())

    def test_satisfies(self):
        f = parse_formula("F(0,1) q")
        assert satisfies(f, HALF_Q)
        half = TimedStateSequence.of([(set(), 0), ({"q"}, 0)])
        assert not satisfies(f, half)

    def test_nonstrict_until_present(self):
        eta = TimedStateSequence.of([({"q"}, 0)])
        assert evaluate(parse_formula("p U q"), eta, 0)
        assert not evaluate(parse_formula("p U(0,1) q"), eta, 0)

    def test_unless_weak_at_trace_end(self):
        eta = TimedStateSequence.of([({"p"}, 0), ({"p"}, 1)])
        assert evaluate(parse_formula("p W q"), eta, 0)
        assert not evaluate(parse_formula("p U q"), eta, 0)

    def test_bounded_always_window(self):
        eta = TimedStateSequence.of([({"p"}, 0), ({"p"}, 2), (set(), 3)])
        assert evaluate(parse_formula("G[0,2] p"), eta, 0)
        assert not evaluate(parse_formula("G[0,3] p"), eta, 0)
        assert evaluate(parse_formula("G[0,3) p"), eta, 0)

    def test_eventually_duality(self):
        rng = random.Random(4)
        cfg = FuzzConfig(max_length=6)
        for _ in range(200):
            eta = random_trace(rng, ["p"], cfg)
            for i in range(len(eta)):
                assert evaluate(eventually(p), eta, i) == any("p" in eta[j].state for j in range(i, len(eta)))
                assert evaluate(always(p), eta, i) == all("p" in eta[j].state for j in range(i, len(eta)))

    def test_integer_traces(self):
        eta = TimedStateSequence.of([({"p"}, 0), ({"q"}, 2)])
        assert evaluate(parse_formula("p -> F[0,2] q"), eta, 0)
        assert not evaluate(parse_formula("p -> F[0,1] q"), eta, 0)


@st.composite
def traces(draw, max_len=8):
    n = draw(st.integers(1, max_len))
    times = sorted(draw(st.lists(st.fractions(0, 6, max_denominator=4), min_size=n, max_size=n)))
    states = draw(st.lists(st.frozensets(st.sampled_from("pq")), min_size=n, max_size=n))
    return TimedStateSequence.of(zip(states, times))


class TestAgainstOracle:
    def test_random_pairs(self):
        rng = random.Random(17)
        cfg = FuzzConfig(max_length=8, max_time=4, denominator=4)
        for _ in range(2000):
            f = random_formula(rng, ["p", "q"], 4)
            eta = random_trace(rng, ["p", "q"], cfg)
            for i in range(len(eta)):
                assert evaluate(f, eta, i) == holds_at(f, eta.states, eta.times, i), (str(f), str(eta), i)

    @settings(max_examples=200, deadline=None)
    @given(traces(), st.integers(0, 10**6))
    def test_qualitative_ignores_time(self, eta, seed):
        rng = random.Random(seed)
        f = random_formula(rng, ["p", "q"], 4, qualitative=True)
        assert is_qualitative_syntactic(f)
        new_times = sorted(F(rng.randint(0, 100), rng.randint(1, 7)) for _ in range(len(eta)))
        other = eta.retimed(new_times)
        for i in range(len(eta)):
            assert evaluate(f, eta, i) == evaluate(f, other, i)
