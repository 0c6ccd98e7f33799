"""Event variables, possible worlds and their deviation from the actual world."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, Mapping, Sequence, Union

from stc.geometry import (
    ConeRegion,
    SpacetimePoint,
    causally_precedes,
    future_closure,
)


class ScenarioError(ValueError):
    """An inconsistent scenario definition."""

    def __init__(self, message: str, constraint: "Constraint | None" = None):
        super().__init__(message)
        self.constraint = constraint


@dataclass(frozen=True)
class EventVariable:
    name: str
    point: str
    domain: tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "domain", tuple(self.domain))
        if not self.domain:
            raise ScenarioError(f"variable {self.name!r} has an empty domain")
        if len(set(self.domain)) != len(self.domain):
            raise ScenarioError(f"variable {self.name!r} has repeated domain values")


@dataclass(frozen=True, eq=False)
class World(Mapping[str, str]):
    """Total assignment of values to variables, keyed by variable name."""

    assignment: tuple[tuple[str, str], ...]

    @classmethod
    def of(cls, assignment: Mapping[str, str] | None = None, **kw: str) -> "World":
        merged = dict(assignment or {}, **kw)
        return cls(tuple(sorted(merged.items())))

    def __getitem__(self, var: str) -> str:
        for k, v in self.assignment:
            if k == var:
                return v
        raise KeyError(var)

    def __iter__(self) -> Iterator[str]:
        return (k for k, _ in self.assignment)

    def __len__(self) -> int:
        return len(self.assignment)

    def __hash__(self) -> int:
        return hash(self.assignment)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, World):
            return self.assignment == other.assignment
        return NotImplemented

    def replace(self, **changes: str) -> "World":
        return World.of(dict(self.assignment), **changes)

    def __str__(self) -> str:
        return " ".join(f"{k}={v}" for k, v in self.assignment)


def _int_value(value: str) -> int | None:
    try:
        return int(value)
    except ValueError:
        return None


@dataclass(frozen=True)
class TableConstraint:
    """Explicit list of permitted value tuples for ``scope``."""

    scope: tuple[str, ...]
    rows: tuple[tuple[str, ...], ...]
    _allowed: frozenset = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "scope", tuple(self.scope))
        object.__setattr__(self, "rows", tuple(tuple(r) for r in self.rows))
        object.__setattr__(self, "_allowed", frozenset(self.rows))

    @property
    def variables(self) -> tuple[str, ...]:
        return self.scope

    def permits(self, world: Mapping[str, str]) -> bool:
        return tuple(world[v] for v in self.scope) in self._allowed

    def __str__(self) -> str:
        rows = ", ".join("(" + ", ".join(r) + ")" for r in self.rows)
        return f"table({', '.join(self.scope)}) {{ {rows} }}"


@dataclass(frozen=True)
class ProductConstraint:
    """Signed values of ``scope`` multiply to ``sign`` whenever ``guard`` holds.

    Tuples containing a non-integer value never satisfy the product rule.
    """

    scope: tuple[str, ...]
    sign: int
    guard: tuple[tuple[str, str], ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "scope", tuple(self.scope))
        object.__setattr__(self, "guard", tuple(tuple(g) for g in self.guard))

    @property
    def variables(self) -> tuple[str, ...]:
        out = list(self.scope)
        out.extend(v for v, _ in self.guard if v not in out)
        return tuple(out)

    def permits(self, world: Mapping[str, str]) -> bool:
        if not all(world[v] == val for v, val in self.guard):
            return True
        product = 1
        for v in self.scope:
            n = _int_value(world[v])
            if n is None:
                return False
            product *= n
        return product == self.sign

    def __str__(self) -> str:
        sign = f"{self.sign:+d}" if self.sign else "0"
        text = f"product({', '.join(self.scope)}) = {sign}"
        if self.guard:
            text += " when " + ", ".join(f"{v} = {val}" for v, val in self.guard)
        return text


Constraint = Union[TableConstraint, ProductConstraint]


@dataclass(frozen=True)
class Scenario:
    """Named points, variables, physics constraints, actual world, free choices.

    Free choices are listed by variable name; the choice point is the
    variable's location. Declared choices are not validated here, see
    :func:`validate_free_choice`.
    """

    points: Mapping[str, SpacetimePoint]
    variables: tuple[EventVariable, ...]
    constraints: tuple[Constraint, ...]
    actual: World
    choices: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "points", dict(self.points))
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "constraints", tuple(self.constraints))
        object.__setattr__(self, "choices", tuple(self.choices))
        if not isinstance(self.actual, World):
            object.__setattr__(self, "actual", World.of(self.actual))
        self._validate()

    def _validate(self) -> None:
        dims = {p.dim for p in self.points.values()}
        if len(dims) > 1:
            raise ScenarioError("all points must have the same spatial dimension")
        seen: dict[SpacetimePoint, str] = {}
        for name, p in self.points.items():
            if p in seen:
                raise ScenarioError(f"points {seen[p]!r} and {name!r} coincide")
            seen[p] = name
        names = [v.name for v in self.variables]
        if len(set(names)) != len(names):
            raise ScenarioError("duplicate variable names")
        for v in self.variables:
            if v.point not in self.points:
                raise ScenarioError(f"variable {v.name!r} is located at unknown point {v.point!r}")
        for c in self.constraints:
            self._validate_constraint(c)
        for v in self.variables:
            if v.name not in self.actual:
                raise ScenarioError(f"actual world does not assign {v.name!r}")
            if self.actual[v.name] not in v.domain:
                raise ScenarioError(
                    f"actual value {self.actual[v.name]!r} of {v.name!r} is not in its domain"
                )
        extra = set(self.actual) - set(names)
        if extra:
            raise ScenarioError(f"actual world assigns unknown variables {sorted(extra)}")
        for c in self.constraints:
            if not c.permits(self.actual):
                raise ScenarioError(f"actual world violates constraint {c}", constraint=c)
        for ch in self.choices:
            if ch not in self.variable_map:
                raise ScenarioError(f"choice refers to unknown variable {ch!r}")

    def _validate_constraint(self, c: Constraint) -> None:
        vm = self.variable_map
        for v in c.variables:
            if v not in vm:
                raise ScenarioError(f"constraint {c} references unknown variable {v!r}", c)
        if isinstance(c, TableConstraint):
            for row in c.rows:
                if len(row) != len(c.scope):
                    raise ScenarioError(f"table row {row} does not match scope arity {len(c.scope)}", c)
                for var, val in zip(c.scope, row):
                    if val not in vm[var].domain:
                        raise ScenarioError(f"table value {val!r} not in domain of {var!r}", c)
        else:
            if c.sign not in (1, -1):
                raise ScenarioError(f"product sign must be +1 or -1, got {c.sign}", c)
            for var, val in c.guard:
                if val not in vm[var].domain:
                    raise ScenarioError(f"guard value {val!r} not in domain of {var!r}", c)

    @cached_property
    def variable_map(self) -> dict[str, EventVariable]:
        return {v.name: v for v in self.variables}

    @property
    def dim(self) -> int | None:
        for p in self.points.values():
            return p.dim
        return None

    def location(self, var: str) -> SpacetimePoint:
        return self.points[self.variable_map[var].point]

    def point_name(self, p: SpacetimePoint) -> str:
        for name, q in self.points.items():
            if q == p:
                return name
        raise KeyError(p)

    def region_names(self, region: ConeRegion) -> tuple[str, ...]:
        return tuple(self.point_name(a) for a in region.apices)

    @cached_property
    def worlds(self) -> tuple[World, ...]:
        return tuple(_enumerate(self))

    @cached_property
    def regions(self) -> dict[World, ConeRegion]:
        closures: dict[frozenset[SpacetimePoint], ConeRegion] = {}
        out = {}
        for w in self.worlds:
            pts = diff_points(self, w)
            if pts not in closures:
                closures[pts] = future_closure(pts)
            out[w] = closures[pts]
        return out


def _enumerate(s: Scenario) -> Iterator[World]:
    order = sorted(s.variables, key=lambda v: v.name)
    position = {v.name: i for i, v in enumerate(order)}
    # constraints are checked as soon as their last variable is assigned
    due: list[list[Constraint]] = [[] for _ in order]
    for c in s.constraints:
        for v in c.variables:
            if v not in position:
                raise ScenarioError(f"constraint {c} references unknown variable {v!r}", c)
        last = max((position[v] for v in c.variables), default=0)
        if order:
            due[last].append(c)
    assignment: dict[str, str] = {}

    def walk(i: int) -> Iterator[World]:
        if i == len(order):
            yield World.of(assignment)
            return
        var = order[i]
        for value in var.domain:
            assignment[var.name] = value
            if all(c.permits(assignment) for c in due[i]):
                yield from walk(i + 1)
        del assignment[var.name]

    if not order:
        if all(c.permits({}) for c in s.constraints):
            yield World.of({})
        return
    yield from walk(0)


def enumerate_worlds(s: Scenario) -> list[World]:
    """Every assignment permitted by the constraints, in lexicographic order."""
    return list(s.worlds)


def satisfies(s: Scenario, w: Mapping[str, str]) -> bool:
    return all(
        w[v.name] in v.domain for v in s.variables
    ) and all(c.permits(w) for c in s.constraints)


def diff_variables(s: Scenario, w: Mapping[str, str]) -> list[str]:
    return [v.name for v in s.variables if w[v.name] != s.actual[v.name]]


def diff_points(s: Scenario, w: Mapping[str, str]) -> frozenset[SpacetimePoint]:
    """Locations of the variables whose value in ``w`` differs from actual."""
    return frozenset(s.location(v) for v in diff_variables(s, w))


def diff_point_names(s: Scenario, w: Mapping[str, str]) -> tuple[str, ...]:
    names = {s.variable_map[v].point for v in diff_variables(s, w)}
    return tuple(n for n in s.points if n in names)


def deviation_region(s: Scenario, w: World) -> ConeRegion:
    region = s.regions.get(w) if isinstance(w, World) else None
    if region is None:
        region = future_closure(diff_points(s, w))
    return region


def within_cone(s: Scenario, w: Mapping[str, str], apex: SpacetimePoint) -> bool:
    """True iff ``w`` agrees with the actual world everywhere outside ``F(apex)``."""
    return all(causally_precedes(apex, p) for p in diff_points(s, w))


@dataclass(frozen=True)
class FreeChoiceReport:
    variable: str
    point: str
    witnesses: tuple[tuple[str, World], ...]
    failing: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.failing

    def __bool__(self) -> bool:
        return self.ok


def validate_free_choice(s: Scenario, var: str) -> FreeChoiceReport:
    """Check that every alternative value of ``var`` has a world differing
    from the actual one only within the future cone of the choice point."""
    if var not in s.choices:
        raise KeyError(f"{var!r} is not a declared choice")
    variable = s.variable_map[var]
    apex = s.points[variable.point]
    witnesses = []
    failing = []
    for value in variable.domain:
        if value == s.actual[var]:
            continue
        found = next(
            (w for w in s.worlds if w[var] == value and within_cone(s, w, apex)),
            None,
        )
        if found is None:
            failing.append(value)
        else:
            witnesses.append((value, found))
    return FreeChoiceReport(var, variable.point, tuple(witnesses), tuple(failing))


def build_scenario(
    points: Mapping[str, Sequence],
    variables: Sequence[tuple[str, str, Sequence[str]]],
    actual: Mapping[str, str],
    constraints: Sequence[Constraint] = (),
    choices: Sequence[str] = (),
) -> Scenario:
    """Convenience builder: ``points={"A": (0, 0)}``, ``variables=[("a", "A", ["+1", "-1"])]``."""
    pts = {
        name: SpacetimePoint(coords[0], tuple(coords[1:])) for name, coords in points.items()
    }
    evs = tuple(EventVariable(n, p, tuple(d)) for n, p, d in variables)
    return Scenario(pts, evs, tuple(constraints), World.of(actual), tuple(choices))
