"""Counterfactual evaluation over finite scenarios.

``phi => psi`` is true when there are no phi-worlds, or when every phi-world
where psi fails is beaten by a psi-world whose deviation region (the future
closure of the points where it departs from the actual world) is a proper
subset of its own. On finite models this is the same as psi holding in
every primary phi-world.

Alongside that evaluator the module carries the rejected alternatives:
the existential-first variant, a fixed Lorentz frame ordering worlds by
latest first deviation, and "true in any frame".
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from stc.geometry import (
    Boost,
    ConeRegion,
    DimensionError,
    enumerate_orderings,
    future_closure,
    region_proper_subset,
    region_subset,
)
from stc.propositions import Atom, Proposition, Not
from stc.worlds import (
    Scenario,
    World,
    deviation_region,
    diff_points,
    validate_free_choice,
)

EVALUATORS = ("dstc", "clause2", "footnote", "frame", "anyframe")


class PropositionError(ValueError):
    """A formula refers to an undeclared variable or out-of-domain value."""


class ChoiceError(ValueError):
    """A free-choice query on a choice that is undeclared or fails validation."""


@dataclass(frozen=True)
class SupportSet:
    regions: tuple[ConeRegion, ...] = ()

    def __post_init__(self) -> None:
        unique: list[ConeRegion] = []
        for r in self.regions:
            if r not in unique:
                unique.append(r)
        object.__setattr__(self, "regions", tuple(unique))

    def __len__(self) -> int:
        return len(self.regions)

    def __iter__(self):
        return iter(self.regions)

    def __contains__(self, region: object) -> bool:
        return region in self.regions


@dataclass(frozen=True)
class Witness:
    """A phi-world where psi fails, and the psi-world beating it if any."""

    world: World
    dominated_by: World | None


@dataclass(frozen=True)
class FrameResult:
    ordering: tuple[str, ...]
    velocity: Fraction
    truth: bool
    most_similar: tuple[World, ...] = ()


@dataclass(frozen=True)
class Verdict:
    truth: bool
    evaluator: str
    vacuous: bool = False
    phi_worlds: tuple[World, ...] = ()
    primaries: tuple[World, ...] = ()
    witnesses: tuple[Witness, ...] = ()
    frame: FrameResult | None = None
    frames: tuple[FrameResult, ...] = field(default=())

    def __bool__(self) -> bool:
        return self.truth


def check_proposition(s: Scenario, phi: Proposition) -> None:
    vm = s.variable_map
    for atom in phi.atoms():
        if atom.var not in vm:
            raise PropositionError(f"unknown variable {atom.var!r}")
        if atom.value not in vm[atom.var].domain:
            raise PropositionError(f"value {atom.value!r} not in domain of {atom.var!r}")


def phi_worlds(s: Scenario, phi: Proposition) -> list[World]:
    check_proposition(s, phi)
    return [w for w in s.worlds if phi.evaluate(w)]


def _region(s: Scenario, w: World) -> ConeRegion:
    return deviation_region(s, w)


def _beats(s: Scenario, p: World, q: World) -> bool:
    """``p`` is strictly more similar to the actual world than ``q``."""
    return region_proper_subset(_region(s, p), _region(s, q))


def _primaries(s: Scenario, worlds: Sequence[World]) -> list[World]:
    # many worlds share a region, so compare the distinct regions only
    regions = {_region(s, w) for w in worlds}
    minimal = {r for r in regions if not any(region_proper_subset(q, r) for q in regions)}
    return [w for w in worlds if _region(s, w) in minimal]


def is_primary(s: Scenario, phi: Proposition, w: World) -> bool:
    if w not in s.regions or not phi.evaluate(w):
        raise ValueError(f"{w} is not a possible phi-world")
    regions = {_region(s, q) for q in phi_worlds(s, phi)}
    return not any(region_proper_subset(q, _region(s, w)) for q in regions)


def is_closed(s: Scenario, phi: Proposition) -> bool:
    """Every phi-world is primary or beaten by a primary phi-world.

    Always true on finite world sets; kept as an explicit check.
    """
    ws = phi_worlds(s, phi)
    prim = {_region(s, p) for p in _primaries(s, ws)}
    return all(
        r in prim or any(region_proper_subset(p, r) for p in prim)
        for r in {_region(s, w) for w in ws}
    )


def _witnesses(
    s: Scenario, ws: Sequence[World], psi: Proposition, prefer: Iterable[World] = ()
) -> tuple[Witness, ...]:
    prefer = list(prefer)
    good = [w for w in ws if psi.evaluate(w)]
    good.sort(key=lambda w: w not in prefer)
    first_beater: dict[ConeRegion, World | None] = {}
    out = []
    for q in ws:
        if psi.evaluate(q):
            continue
        r = _region(s, q)
        if r not in first_beater:
            first_beater[r] = next((p for p in good if _beats(s, p, q)), None)
        out.append(Witness(q, first_beater[r]))
    return tuple(out)


def dstc_eval(s: Scenario, phi: Proposition, psi: Proposition) -> Verdict:
    """psi holds in every primary phi-world (vacuously true without phi-worlds)."""
    check_proposition(s, psi)
    ws = phi_worlds(s, phi)
    if not ws:
        return Verdict(True, "dstc", vacuous=True)
    if not is_closed(s, phi):
        raise AssertionError("antecedent is not closed")
    prim = _primaries(s, ws)
    truth = all(psi.evaluate(p) for p in prim)
    return Verdict(
        truth,
        "dstc",
        phi_worlds=tuple(ws),
        primaries=tuple(prim),
        witnesses=_witnesses(s, ws, psi, prefer=prim),
    )


def dstc_eval_via_clause2(s: Scenario, phi: Proposition, psi: Proposition) -> Verdict:
    """Direct for-all/exists reading: each psi-failing phi-world is beaten by
    some psi-satisfying phi-world. Never computes primaries."""
    check_proposition(s, psi)
    ws = phi_worlds(s, phi)
    if not ws:
        return Verdict(True, "clause2", vacuous=True)
    witnesses = _witnesses(s, ws, psi)
    truth = all(w.dominated_by is not None for w in witnesses)
    return Verdict(truth, "clause2", phi_worlds=tuple(ws), witnesses=witnesses)


def lewis_alt_eval(s: Scenario, phi: Proposition, psi: Proposition) -> Verdict:
    """Existential-first variant: one psi-world beats every psi-failing phi-world.

    Agrees with :func:`dstc_eval` when similarity is total, diverges on
    genuinely partial orders.
    """
    check_proposition(s, psi)
    ws = phi_worlds(s, phi)
    if not ws:
        return Verdict(True, "footnote", vacuous=True)
    bad = [w for w in ws if not psi.evaluate(w)]
    champion = next(
        (p for p in ws if psi.evaluate(p) and all(_beats(s, p, q) for q in bad)),
        None,
    )
    return Verdict(
        champion is not None,
        "footnote",
        phi_worlds=tuple(ws),
        primaries=(champion,) if champion is not None else (),
        witnesses=tuple(Witness(q, champion) for q in bad),
    )


def compute_support(s: Scenario, phi: Proposition) -> SupportSet:
    """Minimal deviation regions among phi-worlds (the least coinitial set)."""
    ws = phi_worlds(s, phi)
    regions = {_region(s, w) for w in _primaries(s, ws)}
    rank = {p: i for i, p in enumerate(s.points.values())}

    def key(r: ConeRegion) -> tuple[int, ...]:
        return tuple(sorted(rank.get(a, len(rank)) for a in r.apices))

    return SupportSet(tuple(sorted(regions, key=key)))


def supports(s: Scenario, sigma: SupportSet | Iterable[ConeRegion], phi: Proposition) -> bool:
    """Every member is a phi-region and every phi-world's region contains a member."""
    members = list(sigma.regions if isinstance(sigma, SupportSet) else sigma)
    ws = phi_worlds(s, phi)
    phi_regions = {_region(s, w) for w in ws}
    if any(r not in phi_regions for r in members):
        return False
    return all(any(region_subset(d, _region(s, w)) for d in members) for w in ws)


def worlds_within(s: Scenario, phi: Proposition, region: ConeRegion) -> list[World]:
    """phi-worlds that agree with the actual world everywhere outside ``region``."""
    return [
        w for w in phi_worlds(s, phi)
        if all(p in region for p in diff_points(s, w))
    ]


def free_choice_eval(s: Scenario, var: str, value: str, psi: Proposition) -> Verdict:
    """``(var = value) => psi`` for a validated free choice.

    True iff psi holds in every world choosing ``value`` that matches the
    actual world outside the future cone of the choice point.
    """
    if var not in s.choices:
        raise ChoiceError(f"{var!r} is not a declared choice")
    if value == s.actual[var]:
        raise ChoiceError(f"{var} = {value} is the actual choice, not an alternative")
    report = validate_free_choice(s, var)
    if value in report.failing:
        raise ChoiceError(f"{var} = {value} is not a free alternative")
    if value not in s.variable_map[var].domain:
        raise ChoiceError(f"{value!r} not in domain of {var!r}")
    check_proposition(s, psi)
    chi = Atom(var, value)
    cone = future_closure([s.location(var)])
    near = worlds_within(s, chi, cone)
    return Verdict(
        all(psi.evaluate(w) for w in near),
        "free-choice",
        phi_worlds=tuple(phi_worlds(s, chi)),
        primaries=tuple(near),
        witnesses=tuple(Witness(w, None) for w in near if not psi.evaluate(w)),
    )


def _require_1d(s: Scenario) -> None:
    if s.dim not in (None, 1):
        raise DimensionError("frames require 1+1")


def _first_deviation(s: Scenario, w: World, b: Boost) -> Fraction | None:
    pts = diff_points(s, w)
    if not pts:
        return None
    return min(b.time_key(p) for p in pts)


def frame_eval(s: Scenario, phi: Proposition, psi: Proposition, b: Boost) -> Verdict:
    """Frame-dependent reading: psi holds in the phi-worlds that first deviate
    latest in frame ``b``. Ties all count; the actual world counts as never
    deviating."""
    _require_1d(s)
    check_proposition(s, psi)
    names = list(s.points)
    ordering = tuple(sorted(names, key=lambda n: (b.time_key(s.points[n]), names.index(n))))
    ws = phi_worlds(s, phi)
    if not ws:
        fr = FrameResult(ordering, b.v, True)
        return Verdict(True, "frame", vacuous=True, frame=fr)

    def key(w: World) -> tuple[int, Fraction]:
        t = _first_deviation(s, w, b)
        return (1, Fraction(0)) if t is None else (0, t)

    best = max(key(w) for w in ws)
    most = tuple(w for w in ws if key(w) == best)
    truth = all(psi.evaluate(w) for w in most)
    fr = FrameResult(ordering, b.v, truth, most)
    return Verdict(
        truth,
        "frame",
        phi_worlds=tuple(ws),
        primaries=most,
        witnesses=tuple(Witness(w, None) for w in most if not psi.evaluate(w)),
        frame=fr,
    )


def frame_table(s: Scenario, phi: Proposition, psi: Proposition) -> list[FrameResult]:
    """One frame verdict per realisable time ordering of the scenario points."""
    _require_1d(s)
    names = list(s.points)
    pts = [s.points[n] for n in names]
    rows = []
    for _order, v in enumerate_orderings(pts):
        rows.append(frame_eval(s, phi, psi, Boost(v)).frame)
    return rows


def any_frame_eval(s: Scenario, phi: Proposition, psi: Proposition) -> Verdict:
    """True iff some realisable frame verifies the statement."""
    _require_1d(s)
    check_proposition(s, psi)
    ws = phi_worlds(s, phi)
    if not ws:
        return Verdict(True, "anyframe", vacuous=True)
    rows = tuple(frame_table(s, phi, psi))
    hit = next((r for r in rows if r.truth), None)
    return Verdict(
        hit is not None,
        "anyframe",
        phi_worlds=tuple(ws),
        primaries=hit.most_similar if hit else (),
        frame=hit,
        frames=rows,
    )


def evaluate(
    s: Scenario,
    phi: Proposition,
    psi: Proposition,
    evaluator: str = "dstc",
    velocity: Fraction | None = None,
) -> Verdict:
    if evaluator == "dstc":
        return dstc_eval(s, phi, psi)
    if evaluator == "clause2":
        return dstc_eval_via_clause2(s, phi, psi)
    if evaluator == "footnote":
        return lewis_alt_eval(s, phi, psi)
    if evaluator == "frame":
        return frame_eval(s, phi, psi, Boost(velocity if velocity is not None else 0))
    if evaluator == "anyframe":
        return any_frame_eval(s, phi, psi)
    raise ValueError(f"unknown evaluator {evaluator!r}")


def negate(psi: Proposition) -> Proposition:
    if isinstance(psi, Not):
        return psi.operand
    if isinstance(psi, Atom):
        return Atom(psi.var, psi.value, not psi.negated)
    return Not(psi)
