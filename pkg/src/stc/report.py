"""Explain reports: the worlds, regions and witnesses behind a verdict."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Any

from stc.dsl import QueryExpression
from stc.geometry import ConeRegion, region_proper_subset
from stc.propositions import Atom, Proposition
from stc.semantics import (
    FrameResult,
    Verdict,
    any_frame_eval,
    compute_support,
    evaluate,
    frame_table,
    negate,
    phi_worlds,
)
from stc.worlds import Scenario, World, deviation_region, diff_point_names

SCHEMA = "stc.explain/1"
FRAMES_SCHEMA = "stc.frames/1"


def region_label(s: Scenario, region: ConeRegion) -> list[str]:
    """Apex point names of ``region`` in declaration order."""
    names = set(s.region_names(region))
    return [n for n in s.points if n in names]


def region_text(s: Scenario, region: ConeRegion) -> str:
    names = region_label(s, region)
    if not names:
        return "{}"
    return " u ".join(f"F({n})" for n in names)


def ordering_text(ordering: tuple[str, ...]) -> str:
    return " < ".join(f"t_{n}" for n in ordering)


@dataclass(frozen=True)
class WorldRow:
    world: World
    diff_points: tuple[str, ...]
    region: tuple[str, ...]
    primary: bool
    selected: bool
    consequent: bool
    dominated_by: int | None


@dataclass(frozen=True)
class ExplainReport:
    query: str
    evaluator: str
    velocity: Fraction | None
    truth: bool
    vacuous: bool
    variables: tuple[str, ...]
    worlds: tuple[WorldRow, ...]
    support: tuple[tuple[str, ...], ...]
    witnesses: tuple[tuple[int, int | None], ...]
    frames: tuple[FrameResult, ...]
    frame: FrameResult | None

    def to_dict(self) -> dict[str, Any]:
        def frame_dict(f: FrameResult) -> dict[str, Any]:
            return {
                "ordering": list(f.ordering),
                "velocity": str(f.velocity),
                "truth": f.truth,
            }

        return {
            "schema": SCHEMA,
            "query": self.query,
            "evaluator": self.evaluator,
            "velocity": None if self.velocity is None else str(self.velocity),
            "truth": self.truth,
            "vacuous": self.vacuous,
            "phi_worlds": [
                {
                    "assignment": {v: r.world[v] for v in self.variables},
                    "diff_points": list(r.diff_points),
                    "region": list(r.region),
                    "primary": r.primary,
                    "selected": r.selected,
                    "consequent": r.consequent,
                    "dominated_by": r.dominated_by,
                }
                for r in self.worlds
            ],
            "support": [list(r) for r in self.support],
            "witnesses": [
                {"world": w, "dominated_by": d} for w, d in self.witnesses
            ],
            "frames": [frame_dict(f) for f in self.frames],
            "frame": None if self.frame is None else frame_dict(self.frame),
        }

    def render(self, color: bool = False) -> str:
        lines = [
            f"query: {self.query}",
            f"evaluator: {self.evaluator}"
            + (f" (v = {self.velocity})" if self.velocity is not None else ""),
            f"verdict: {_verdict_word(self.truth, color)}"
            + (" (vacuous)" if self.vacuous else ""),
        ]
        if self.vacuous:
            lines.append("no phi-worlds: the antecedent is impossible")
            return "\n".join(lines) + "\n"
        lines.append("")
        lines.append("phi-worlds:")
        for i, r in enumerate(self.worlds):
            flags = []
            if r.primary:
                flags.append("primary")
            if r.selected and self.evaluator not in ("dstc",):
                flags.append("selected")
            flags.append("psi" if r.consequent else "not psi")
            region = " u ".join(f"F({n})" for n in r.region) or "{}"
            lines.append(
                f"  W{i}: " + " ".join(f"{v}={r.world[v]}" for v in self.variables)
            )
            lines.append(
                f"      differs at {{{', '.join(r.diff_points)}}}  region {region}"
                f"  [{', '.join(flags)}]"
            )
            if r.dominated_by is not None:
                lines.append(f"      dominated by W{r.dominated_by} (region properly contained)")
        lines.append("")
        lines.append(
            "support: {"
            + ", ".join(" u ".join(f"F({n})" for n in reg) or "{}" for reg in self.support)
            + "}"
        )
        if self.witnesses:
            lines.append("psi fails in:")
            for w, d in self.witnesses:
                tail = f"beaten by W{d}" if d is not None else "not beaten by any psi-world"
                lines.append(f"  W{w}: {tail}")
        if self.frame is not None and self.evaluator == "frame":
            lines.append(f"frame ordering: {ordering_text(self.frame.ordering)}")
        if self.frames:
            lines.append("frames:")
            for f in self.frames:
                lines.append(
                    f"  {ordering_text(f.ordering):<30} v = {str(f.velocity):<6} "
                    f"{_verdict_word(f.truth, color)}"
                )
        return "\n".join(lines) + "\n"


_GREEN, _RED, _RESET = "\x1b[32m", "\x1b[31m", "\x1b[0m"


def _verdict_word(truth: bool, color: bool) -> str:
    word = "TRUE" if truth else "FALSE"
    if color:
        return f"{_GREEN if truth else _RED}{word}{_RESET}"
    return word


def verdict_word(truth: bool, color: bool = False) -> str:
    return _verdict_word(truth, color)


def run_query(s: Scenario, q: QueryExpression) -> Verdict:
    return evaluate(s, q.antecedent, q.consequent, q.evaluator, q.velocity)


def explain(s: Scenario, q: QueryExpression, verdict: Verdict | None = None) -> ExplainReport:
    if verdict is None:
        verdict = run_query(s, q)
    ws = phi_worlds(s, q.antecedent)
    index = {w: i for i, w in enumerate(ws)}
    regions = [deviation_region(s, w) for w in ws]
    primary = [
        not any(region_proper_subset(regions[j], regions[i]) for j in range(len(ws)))
        for i in range(len(ws))
    ]
    rows = []
    for i, w in enumerate(ws):
        dom = None
        if not primary[i]:
            dom = next(
                j for j in range(len(ws))
                if primary[j] and region_proper_subset(regions[j], regions[i])
            )
        rows.append(
            WorldRow(
                world=w,
                diff_points=diff_point_names(s, w),
                region=tuple(region_label(s, regions[i])),
                primary=primary[i],
                selected=w in verdict.primaries,
                consequent=q.consequent.evaluate(w),
                dominated_by=dom,
            )
        )
    support = tuple(tuple(region_label(s, r)) for r in compute_support(s, q.antecedent))
    witnesses = tuple(
        (index[x.world], None if x.dominated_by is None else index[x.dominated_by])
        for x in verdict.witnesses
    )
    return ExplainReport(
        query=str(q),
        evaluator=verdict.evaluator,
        velocity=q.velocity if q.evaluator == "frame" else None,
        truth=verdict.truth,
        vacuous=verdict.vacuous,
        variables=tuple(v.name for v in s.variables),
        worlds=tuple(rows),
        support=support,
        witnesses=witnesses,
        frames=verdict.frames,
        frame=verdict.frame,
    )


@dataclass(frozen=True)
class FramesReport:
    query: str
    rows: tuple[FrameResult, ...]
    consequent: str
    twin: str
    anyframe: bool
    anyframe_twin: bool

    def to_dict(self) -> dict[str, Any]:
        return {
            "schema": FRAMES_SCHEMA,
            "query": self.query,
            "rows": [
                {"ordering": list(r.ordering), "velocity": str(r.velocity), "truth": r.truth}
                for r in self.rows
            ],
            "anyframe": {self.consequent: self.anyframe, self.twin: self.anyframe_twin},
        }

    def render(self, color: bool = False) -> str:
        lines = [f"query: {self.query}", ""]
        width = max([len(ordering_text(r.ordering)) for r in self.rows] + [8])
        lines.append(f"{'ordering':<{width}}  {'v':<6}  verdict")
        for r in self.rows:
            lines.append(
                f"{ordering_text(r.ordering):<{width}}  {str(r.velocity):<6}  "
                f"{_verdict_word(r.truth, color)}"
            )
        lines.append("")
        lines.append(f"anyframe({self.consequent}) = {_verdict_word(self.anyframe, color)}")
        lines.append(f"anyframe({self.twin}) = {_verdict_word(self.anyframe_twin, color)}")
        return "\n".join(lines) + "\n"


def frames(s: Scenario, q: QueryExpression) -> FramesReport:
    phi, psi = q.antecedent, q.consequent
    twin: Proposition = negate(psi)
    if isinstance(psi, Atom) and not psi.negated:
        others = [v for v in s.variable_map[psi.var].domain if v != psi.value]
        if len(others) == 1:
            twin = Atom(psi.var, others[0])
    rows = tuple(frame_table(s, phi, psi))
    return FramesReport(
        query=f"({phi}) => ({psi})",
        rows=rows,
        consequent=str(psi),
        twin=str(twin),
        anyframe=any_frame_eval(s, phi, psi).truth,
        anyframe_twin=any_frame_eval(s, phi, twin).truth,
    )
