"""Boolean formulas over event-variable atoms."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Union


@dataclass(frozen=True)
class Atom:
    """``var = value`` (or ``var != value`` when ``negated``)."""

    var: str
    value: str
    negated: bool = False

    def evaluate(self, world: Mapping[str, str]) -> bool:
        return (world[self.var] == self.value) != self.negated

    def variables(self) -> frozenset[str]:
        return frozenset({self.var})

    def atoms(self) -> tuple["Atom", ...]:
        return (self,)

    def __str__(self) -> str:
        op = "!=" if self.negated else "="
        return f"{self.var} {op} {self.value}"


@dataclass(frozen=True)
class Const:
    value: bool

    def evaluate(self, world: Mapping[str, str]) -> bool:
        return self.value

    def variables(self) -> frozenset[str]:
        return frozenset()

    def atoms(self) -> tuple[Atom, ...]:
        return ()

    def __str__(self) -> str:
        return "TRUE" if self.value else "FALSE"


@dataclass(frozen=True)
class Not:
    operand: "Proposition"

    def evaluate(self, world: Mapping[str, str]) -> bool:
        return not self.operand.evaluate(world)

    def variables(self) -> frozenset[str]:
        return self.operand.variables()

    def atoms(self) -> tuple[Atom, ...]:
        return self.operand.atoms()

    def __str__(self) -> str:
        if isinstance(self.operand, Const):
            return f"NOT {self.operand}"
        return f"NOT ({self.operand})"


@dataclass(frozen=True)
class And:
    args: tuple["Proposition", ...]

    def evaluate(self, world: Mapping[str, str]) -> bool:
        return all(a.evaluate(world) for a in self.args)

    def variables(self) -> frozenset[str]:
        return frozenset().union(*(a.variables() for a in self.args))

    def atoms(self) -> tuple[Atom, ...]:
        return tuple(x for a in self.args for x in a.atoms())

    def __str__(self) -> str:
        return " AND ".join(_operand(a) for a in self.args)


@dataclass(frozen=True)
class Or:
    args: tuple["Proposition", ...]

    def evaluate(self, world: Mapping[str, str]) -> bool:
        return any(a.evaluate(world) for a in self.args)

    def variables(self) -> frozenset[str]:
        return frozenset().union(*(a.variables() for a in self.args))

    def atoms(self) -> tuple[Atom, ...]:
        return tuple(x for a in self.args for x in a.atoms())

    def __str__(self) -> str:
        return " OR ".join(_operand(a) for a in self.args)


Proposition = Union[Atom, Const, Not, And, Or]

TRUE = Const(True)
FALSE = Const(False)


def _operand(p: Proposition) -> str:
    return f"({p})" if isinstance(p, (And, Or)) else str(p)


def conj(*args: Proposition) -> Proposition:
    if len(args) == 1:
        return args[0]
    return And(tuple(args))


def disj(*args: Proposition) -> Proposition:
    if len(args) == 1:
        return args[0]
    return Or(tuple(args))


def eq(var: str, value: str) -> Atom:
    return Atom(var, value)


def ne(var: str, value: str) -> Atom:
    return Atom(var, value, negated=True)
