import random
from fractions import Fraction

import pytest

from stc.bundled import load_example
from stc.geometry import Boost, DimensionError, SpacetimePoint, apply_boost, future_closure
from stc.propositions import FALSE, TRUE, And, Atom, Not, Or
from stc.semantics import (
    ChoiceError,
    SupportSet,
    any_frame_eval,
    compute_support,
    dstc_eval,
    dstc_eval_via_clause2,
    frame_eval,
    free_choice_eval,
    is_closed,
    is_primary,
    lewis_alt_eval,
    phi_worlds,
    supports,
)
from stc.worlds import Scenario, World, build_scenario, deviation_region

from gen import random_formula, random_scenario

a_plus = Atom("a", "+1")
c_plus = Atom("c", "+1")
c_minus = Atom("c", "-1")
W1 = World.of({"a": "+1", "b": "-1", "c": "+1"})
W2 = World.of({"a": "+1", "b": "+1", "c": "-1"})


@pytest.fixture(scope="module")
def fig1():
    return load_example("ghz-fig1").scenario


@pytest.fixture(scope="module")
def fig2():
    return load_example("ghz-fig2").scenario


@pytest.fixture(scope="module")
def epr():
    return load_example("epr").scenario


@pytest.fixture(scope="module")
def vaidman():
    return load_example("vaidman").scenario


@pytest.fixture(scope="module")
def divergence():
    return load_example("divergence").scenario


def chain_scenario(rng: random.Random) -> Scenario:
    """Three mutually time-like points with random table constraints."""
    s = random_scenario(rng, max_points=1, max_vars=4)
    t0 = Fraction(rng.randint(-3, 3))
    pts = {
        "P0": SpacetimePoint(t0, (0,)),
        "P1": SpacetimePoint(t0 + 2, (Fraction(rng.randint(-2, 2), 2),)),
        "P2": SpacetimePoint(t0 + 5, (Fraction(rng.randint(-2, 2), 2),)),
    }
    variables = tuple(
        type(v)(v.name, rng.choice(list(pts)), v.domain) for v in s.variables
    )
    return Scenario(pts, variables, s.constraints, s.actual)


class TestPhiWorlds:
    def test_ghz_a_plus(self, fig2):
        assert set(phi_worlds(fig2, a_plus)) == {W1, W2}

    def test_contradiction_and_tautology(self, fig2):
        assert phi_worlds(fig2, FALSE) == []
        assert phi_worlds(fig2, And((a_plus, Atom("a", "-1")))) == []
        assert phi_worlds(fig2, TRUE) == list(fig2.worlds)


class TestPrimary:
    def test_fig2_both_primary(self, fig2):
        assert is_primary(fig2, a_plus, W1) and is_primary(fig2, a_plus, W2)

    def test_fig1_only_w1(self, fig1):
        assert is_primary(fig1, a_plus, W1)
        assert not is_primary(fig1, a_plus, W2)

    def test_unique_world_is_primary(self, fig2):
        phi = And((a_plus, c_minus))
        assert is_primary(fig2, phi, W2)

    def test_not_a_phi_world(self, fig2):
        with pytest.raises(ValueError):
            is_primary(fig2, a_plus, fig2.actual)

    def test_closed(self, fig1, fig2):
        assert is_closed(fig2, a_plus)
        assert is_closed(fig1, a_plus)
        assert is_closed(fig1, FALSE)
        assert deviation_region(fig1, W1) < deviation_region(fig1, W2)


class TestDSTC:
    def test_epr(self, epr):
        phi = Atom("B-setting", "Sx")
        assert dstc_eval(epr, phi, Atom("B-outcome", "-1")).truth
        assert not dstc_eval(epr, phi, Atom("B-outcome", "+1")).truth

    def test_ghz_fig2_false(self, fig2):
        v = dstc_eval(fig2, a_plus, c_plus)
        assert not v.truth
        assert set(v.primaries) == {W1, W2}
        assert [w.world for w in v.witnesses] == [W2]
        assert v.witnesses[0].dominated_by is None

    def test_ghz_fig1_true(self, fig1):
        v = dstc_eval(fig1, a_plus, c_plus)
        assert v.truth
        assert v.primaries == (W1,)
        assert v.witnesses[0].world == W2 and v.witnesses[0].dominated_by == W1

    def test_vaidman(self, vaidman):
        measured = Atom("A-measured", "yes")
        assert not dstc_eval(vaidman, measured, Atom("A-result", "+1")).truth
        both = And((measured, Atom("B-result", "-1")))
        assert dstc_eval(vaidman, both, Atom("A-result", "+1")).truth

    def test_vacuous(self, fig2):
        for ev in (dstc_eval, dstc_eval_via_clause2, lewis_alt_eval):
            v = ev(fig2, FALSE, c_plus)
            assert v.truth and v.vacuous
        v = frame_eval(fig2, FALSE, c_plus, Boost(0))
        assert v.truth and v.vacuous
        v = any_frame_eval(fig2, FALSE, c_plus)
        assert v.truth and v.vacuous

    def test_clause2_examples(self, fig2):
        assert not dstc_eval_via_clause2(fig2, a_plus, c_plus).truth

    def test_unknown_variable(self, fig2):
        with pytest.raises(ValueError):
            dstc_eval(fig2, Atom("zz", "+1"), c_plus)


class TestFootnoteVariant:
    def test_divergence_hand_enumeration(self, divergence):
        # phi = (u=on OR v=on) picks four worlds:
        #   W1 u=on          region F(L1)           psi
        #   W2 v=on          region F(L2)           psi
        #   Q1 u=on p=on     region F(L1) u F(L3)   not psi
        #   Q2 v=on q=on     region F(L2) u F(L4)   not psi
        # Primaries are W1 and W2, so the statement holds. W1 beats Q1 only,
        # W2 beats Q2 only, so no single psi-world beats both.
        phi = Or((Atom("u", "on"), Atom("v", "on")))
        psi = And((Atom("p", "off"), Atom("q", "off")))
        ws = phi_worlds(divergence, phi)
        assert len(ws) == 4
        assert dstc_eval(divergence, phi, psi).truth
        assert dstc_eval_via_clause2(divergence, phi, psi).truth
        assert not lewis_alt_eval(divergence, phi, psi).truth

    def test_agrees_under_total_order(self):
        rng = random.Random(5)
        for _ in range(200):
            s = chain_scenario(rng)
            phi, psi = random_formula(rng, s), random_formula(rng, s)
            assert lewis_alt_eval(s, phi, psi).truth == dstc_eval(s, phi, psi).truth


class TestSupport:
    def test_ghz_fig2(self, fig2):
        pts = fig2.points
        sigma = compute_support(fig2, a_plus)
        assert sigma.regions == (
            future_closure([pts["A"], pts["B"]]),
            future_closure([pts["A"], pts["C"]]),
        )
        assert supports(fig2, sigma, a_plus)

    def test_missing_member_fails(self, fig2):
        pts = fig2.points
        partial = SupportSet((future_closure([pts["A"], pts["B"]]),))
        assert not supports(fig2, partial, a_plus)

    def test_non_phi_region_fails(self, fig2):
        pts = fig2.points
        sigma = SupportSet(tuple(compute_support(fig2, a_plus)) + (future_closure([pts["B"]]),))
        assert not supports(fig2, sigma, a_plus)

    def test_tautology_support_is_empty_region(self, fig2):
        assert compute_support(fig2, TRUE).regions == (future_closure([]),)

    def test_free_choice_support(self, epr):
        sigma = compute_support(epr, Atom("B-setting", "Sx"))
        assert sigma.regions == (future_closure([epr.points["B"]]),)


class TestFreeChoice:
    def test_epr(self, epr):
        v = free_choice_eval(epr, "B-setting", "Sx", Atom("B-outcome", "-1"))
        assert v.truth

    def test_outside_future_cone_tracks_actual(self, epr):
        # A lies outside F(B)
        assert free_choice_eval(epr, "B-setting", "Sx", Atom("A-outcome", "+1")).truth
        assert not free_choice_eval(epr, "B-setting", "Sx", Atom("A-outcome", "-1")).truth

    def test_tautology(self, epr):
        assert free_choice_eval(epr, "B-setting", "Sx", TRUE).truth

    def test_errors(self, epr):
        with pytest.raises(ChoiceError):
            free_choice_eval(epr, "A-outcome", "-1", TRUE)
        with pytest.raises(ChoiceError):
            free_choice_eval(epr, "B-setting", "Sy", TRUE)

    def test_invalid_choice(self):
        s = Scenario(
            {"A": SpacetimePoint.of(0, 0), "B": SpacetimePoint.of(0, 5)},
            build_scenario(
                {"A": (0, 0), "B": (0, 5)},
                [("s", "A", ["0", "1"]), ("t", "B", ["0", "1"])],
                {"s": "0", "t": "0"},
            ).variables,
            (__import__("stc").TableConstraint(("s", "t"), (("0", "0"), ("1", "1"))),),
            World.of({"s": "0", "t": "0"}),
            ("s",),
        )
        with pytest.raises(ChoiceError):
            free_choice_eval(s, "s", "1", TRUE)


class TestFrames:
    def test_fig2_alpha_true_beta_false(self, fig2):
        alpha = frame_eval(fig2, a_plus, c_plus, Boost(Fraction(-1, 2)))
        beta = frame_eval(fig2, a_plus, c_plus, Boost(Fraction(1, 2)))
        assert alpha.frame.ordering == ("C", "A", "B") and alpha.truth
        assert alpha.primaries == (W1,)
        assert beta.frame.ordering == ("B", "A", "C") and not beta.truth
        assert beta.primaries == (W2,)

    def test_any_frame_contradiction(self, fig2):
        assert any_frame_eval(fig2, a_plus, c_plus).truth
        assert any_frame_eval(fig2, a_plus, c_minus).truth

    def test_tie_requires_all(self, fig2):
        # v = 0: W1 and W2 both first deviate at t = 0
        v = frame_eval(fig2, a_plus, c_plus, Boost(0))
        assert set(v.primaries) == {W1, W2} and not v.truth

    def test_actual_world_is_most_similar(self, fig2):
        v = frame_eval(fig2, Or((a_plus, Atom("a", "-1"))), Atom("a", "-1"), Boost(0))
        assert v.primaries == (fig2.actual,) and v.truth

    def test_timelike_chain_agrees_with_dstc(self):
        rng = random.Random(9)
        for _ in range(150):
            s = chain_scenario(rng)
            phi, psi = random_formula(rng, s), random_formula(rng, s)
            expected = dstc_eval(s, phi, psi).truth
            for v in (Fraction(-9, 10), Fraction(-1, 3), 0, Fraction(1, 2), Fraction(7, 8)):
                assert frame_eval(s, phi, psi, Boost(v)).truth == expected
            assert any_frame_eval(s, phi, psi).truth == expected

    def test_requires_1d(self):
        s = build_scenario({"A": (0, 0, 0, 0)}, [("x", "A", ["0", "1"])], {"x": "0"})
        with pytest.raises(DimensionError):
            frame_eval(s, TRUE, TRUE, Boost(0))
        with pytest.raises(DimensionError):
            any_frame_eval(s, TRUE, TRUE)


def test_verdict_invariants():
    rng = random.Random(21)
    for _ in range(300):
        s = random_scenario(rng)
        phi, psi = random_formula(rng, s), random_formula(rng, s)
        for ev in (dstc_eval, dstc_eval_via_clause2):
            v = ev(s, phi, psi)
            assert v.vacuous == (not phi_worlds(s, phi))
            if v.vacuous:
                assert v.truth
            if not v.truth:
                assert any(
                    is_primary(s, phi, w.world) and not psi.evaluate(w.world)
                    for w in v.witnesses
                )
        v = dstc_eval(s, phi, psi)
        if not v.truth:
            assert any(not psi.evaluate(p) for p in v.primaries)


def test_dstc_is_frame_independent():
    rng = random.Random(33)
    for _ in range(300):
        s = random_scenario(rng)
        b = Boost(Fraction(rng.randint(-15, 15), 16))
        moved = Scenario(
            {n: apply_boost(b, p) for n, p in s.points.items()},
            s.variables, s.constraints, s.actual,
        )
        phi, psi = random_formula(rng, s), random_formula(rng, s)
        assert dstc_eval(s, phi, psi).truth == dstc_eval(moved, phi, psi).truth


def test_antecedent_strengthening_counterexample(epr, fig1):
    phi_a = Atom("B-setting", "Sx")
    psi = Atom("B-outcome", "-1")
    assert dstc_eval(epr, phi_a, psi).truth
    strengthened = dstc_eval(epr, And((phi_a, Atom("A-outcome", "-1"))), psi)
    assert not strengthened.truth and not strengthened.vacuous

    assert dstc_eval(fig1, a_plus, c_plus).truth
    assert not dstc_eval(fig1, And((a_plus, c_minus)), c_plus).truth


def test_negated_consequent(fig2):
    assert not dstc_eval(fig2, a_plus, Not(c_plus)).truth
