"""Improving flips under the ceteris paribus reading of a statement.

A statement ``cond: x=v > x=v' [omega]`` licenses a flip from beta to alpha
when beta has x=v', alpha has x=v, both agree with ``cond`` on the
conditioned variables, and every variable outside {x}, cond and omega is
left untouched.  Variables in omega may take any value in alpha, their
current value included.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .errors import OutcomeMismatch
from .model import Outcome, PreferenceSpec, PreferenceStatement


@dataclass(frozen=True)
class Flip:
    source: Outcome  # beta, the worse outcome
    target: Outcome  # alpha, the better outcome
    statement_id: str

    def __str__(self):
        return f"({self.source}) -> ({self.target}) [{self.statement_id}]"


class CompiledStatement:
    """A statement with variable names resolved to positions."""

    __slots__ = ("id", "target", "better", "worse", "condition", "free", "frame")

    def __init__(self, spec: PreferenceSpec, st: PreferenceStatement):
        pos = {n: i for i, n in enumerate(spec.variable_names)}
        self.id = st.id
        self.target = pos[st.target]
        self.better = st.better
        self.worse = st.worse
        self.condition = tuple((pos[n], v) for n, v in st.condition)
        self.free = tuple(sorted(pos[n] for n in st.less_important))
        fixed = {self.target, *self.free, *(p for p, _ in self.condition)}
        self.frame = tuple(i for i in range(len(pos)) if i not in fixed)

    def enabled(self, beta: tuple) -> bool:
        if beta[self.target] != self.worse:
            return False
        return all(beta[p] == v for p, v in self.condition)

    def licenses(self, beta: tuple, alpha: tuple) -> bool:
        if beta[self.target] != self.worse or alpha[self.target] != self.better:
            return False
        for p, v in self.condition:
            if beta[p] != v or alpha[p] != v:
                return False
        return all(beta[k] == alpha[k] for k in self.frame)

    def successors(self, beta: tuple, domains) -> list[tuple]:
        if not self.enabled(beta):
            return []
        base = list(beta)
        base[self.target] = self.better
        if not self.free:
            return [tuple(base)]
        out = []
        for combo in itertools.product(*(domains[i] for i in self.free)):
            for i, val in zip(self.free, combo):
                base[i] = val
            out.append(tuple(base))
        return out


def compile_spec(spec: PreferenceSpec) -> list[CompiledStatement]:
    return [CompiledStatement(spec, st) for st in spec.statements]


def _check(spec: PreferenceSpec, outcome: Outcome) -> tuple:
    if outcome.names != spec.variable_names:
        raise OutcomeMismatch(
            f"outcome over {outcome.names} does not match variables {spec.variable_names}"
        )
    for var, val in zip(spec.variables, outcome.values):
        if val not in var.domain:
            raise OutcomeMismatch(f"{val!r} is not a value of {var.name!r}")
    return outcome.values


def is_improving_flip(spec: PreferenceSpec, beta: Outcome, alpha: Outcome) -> set[str]:
    """Ids of the statements licensing a flip from ``beta`` to ``alpha``."""
    b = _check(spec, beta)
    a = _check(spec, alpha)
    return {cs.id for cs in compile_spec(spec) if cs.licenses(b, a)}


def improving_successors(spec: PreferenceSpec, beta: Outcome) -> set[Flip]:
    b = _check(spec, beta)
    names = spec.variable_names
    domains = [v.domain for v in spec.variables]
    flips = set()
    for cs in compile_spec(spec):
        for a in cs.successors(b, domains):
            flips.add(Flip(beta, Outcome(tuple(zip(names, a))), cs.id))
    return flips
