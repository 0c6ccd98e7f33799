"""Scenario files for the worked examples, shipped as package data."""

from __future__ import annotations

from importlib import resources

from stc.dsl import ScenarioDocument, parse_scenario

EXAMPLES = ("epr", "vaidman", "ghz-fig1", "ghz-fig2", "divergence")


def example_text(name: str) -> str:
    if name not in EXAMPLES:
        raise KeyError(f"unknown example {name!r}; choose from {', '.join(EXAMPLES)}")
    return resources.files("stc").joinpath("data", f"{name}.stc").read_text(encoding="utf-8")


def load_example(name: str) -> ScenarioDocument:
    return parse_scenario(example_text(name))
