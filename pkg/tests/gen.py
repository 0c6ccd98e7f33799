"""Seeded generators for random finite scenarios and formulas."""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

from stc.geometry import SpacetimePoint, causally_precedes
from stc.propositions import FALSE, TRUE, And, Atom, Not, Or, Proposition
from stc.worlds import EventVariable, Scenario, TableConstraint, World

VALUES = ("x", "y", "z")


def random_point(rng: random.Random, dim: int = 1, span: int = 4) -> SpacetimePoint:
    def coord() -> Fraction:
        return Fraction(rng.randint(-span * 2, span * 2), rng.choice((1, 2)))

    return SpacetimePoint(coord(), tuple(coord() for _ in range(dim)))


def distinct_points(rng: random.Random, n: int, dim: int = 1) -> list[SpacetimePoint]:
    pts: list[SpacetimePoint] = []
    while len(pts) < n:
        p = random_point(rng, dim)
        if p not in pts:
            pts.append(p)
    return pts


def random_table(
    rng: random.Random,
    scope: list[EventVariable],
    actual: dict[str, str],
    keep: float = 0.6,
) -> TableConstraint:
    rows = []
    target = tuple(actual[v.name] for v in scope)
    for row in itertools.product(*(v.domain for v in scope)):
        if row == target or rng.random() < keep:
            rows.append(row)
    return TableConstraint(tuple(v.name for v in scope), tuple(rows))


def random_scenario(
    rng: random.Random,
    max_points: int = 4,
    max_vars: int = 4,
    max_constraints: int = 2,
    dim: int = 1,
) -> Scenario:
    n_points = rng.randint(1, max_points)
    pts = distinct_points(rng, n_points, dim)
    names = [f"P{i}" for i in range(n_points)]
    variables = [
        EventVariable(f"v{i}", rng.choice(names), VALUES[: rng.randint(1, 3)])
        for i in range(rng.randint(1, max_vars))
    ]
    actual = {v.name: rng.choice(v.domain) for v in variables}
    constraints = []
    for _ in range(rng.randint(0, max_constraints)):
        scope = rng.sample(variables, rng.randint(1, min(3, len(variables))))
        constraints.append(random_table(rng, scope, actual))
    return Scenario(dict(zip(names, pts)), tuple(variables), tuple(constraints), World.of(actual))


def atoms_of(s: Scenario) -> list[Atom]:
    return [Atom(v.name, val) for v in s.variables for val in v.domain]


def random_formula(rng: random.Random, s: Scenario, depth: int = 2, vars_: list[str] | None = None) -> Proposition:
    pool = [v for v in s.variables if vars_ is None or v.name in vars_]
    if not pool:
        return rng.choice((TRUE, FALSE))
    if depth == 0 or rng.random() < 0.35:
        v = rng.choice(pool)
        return Atom(v.name, rng.choice(v.domain), negated=rng.random() < 0.2)
    kind = rng.choice(("and", "or", "not"))
    if kind == "not":
        return Not(random_formula(rng, s, depth - 1, vars_))
    args = tuple(random_formula(rng, s, depth - 1, vars_) for _ in range(2))
    return And(args) if kind == "and" else Or(args)


def formulas_up_to_depth_2(s: Scenario) -> list[Proposition]:
    """Atoms, then NOT/AND/OR of those, then NOT/AND/OR of everything so far."""
    level0: list[Proposition] = [*atoms_of(s), TRUE, FALSE]
    level1: list[Proposition] = [Not(a) for a in level0]
    for a, b in itertools.combinations(level0, 2):
        level1 += [And((a, b)), Or((a, b))]
    upto1 = level0 + level1
    level2: list[Proposition] = [Not(f) for f in level1]
    for a, b in itertools.combinations(upto1, 2):
        level2 += [And((a, b)), Or((a, b))]
    return upto1 + level2


def by_extension(s: Scenario, formulas: list[Proposition]) -> dict[tuple[bool, ...], Proposition]:
    """One representative formula per set of worlds it is true in."""
    reps: dict[tuple[bool, ...], Proposition] = {}
    for f in formulas:
        key = tuple(f.evaluate(w) for w in s.worlds)
        reps.setdefault(key, f)
    return reps


def random_choice_scenario(rng: random.Random, spacelike: bool = True) -> Scenario:
    """Two declared choices ``s1@R1``, ``s2@R2`` plus a few other variables.

    The random constraints may break the free-choice property, so callers
    filter draws with ``validate_free_choice``.
    """
    while True:
        r1, r2 = distinct_points(rng, 2)
        related = causally_precedes(r1, r2) or causally_precedes(r2, r1)
        if related != spacelike:
            break
    others = distinct_points(rng, rng.randint(1, 3))
    others = [p for p in others if p not in (r1, r2)] or [SpacetimePoint(100, (100,))]
    points = {"R1": r1, "R2": r2}
    points.update({f"Q{i}": p for i, p in enumerate(others)})
    names = list(points)
    variables = [
        EventVariable("s1", "R1", ("k0", "k1", "k2")),
        EventVariable("s2", "R2", ("k0", "k1", "k2")),
    ]
    for i in range(rng.randint(1, 3)):
        variables.append(EventVariable(f"o{i}", rng.choice(names), VALUES[: rng.randint(2, 3)]))
    actual = {v.name: rng.choice(v.domain) for v in variables}
    constraints = []
    for _ in range(rng.randint(0, 2)):
        scope = rng.sample(variables, rng.randint(2, min(3, len(variables))))
        constraints.append(random_table(rng, scope, actual, keep=0.7))
    return Scenario(points, tuple(variables), tuple(constraints), World.of(actual), ("s1", "s2"))
