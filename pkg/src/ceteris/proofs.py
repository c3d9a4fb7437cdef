"""Justifications for query answers and their independent replay.

Three kinds of proof exist: a flip path witnessing dominance, a flip cycle
witnessing inconsistency, and a single counter-flip witnessing that one
specification does not subsume another.  Path and cycle proofs are checked
against the flip semantics alone; counter-flips additionally need a
reachability check in the second specification.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace

from .errors import OutcomeMismatch, ShapeMismatch
from .model import Outcome, PreferenceSpec, Query, QueryKind, id_key
from .semantics import Flip, is_improving_flip


class ProofKind(enum.Enum):
    DOMINANCE_PATH = "DOMINANCE_PATH"
    INCONSISTENCY_CYCLE = "INCONSISTENCY_CYCLE"
    NON_SUBSUMPTION_FLIP = "NON_SUBSUMPTION_FLIP"


class Direction(enum.Enum):
    P1_NOT_IN_P2 = "P1_NOT_IN_P2"
    P2_NOT_IN_P1 = "P2_NOT_IN_P1"


@dataclass(frozen=True)
class Proof:
    kind: ProofKind
    steps: tuple[Flip, ...]
    direction: Direction | None = None

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(self.steps))
        if isinstance(self.direction, str):
            object.__setattr__(self, "direction", Direction(self.direction))

    def outcomes(self) -> list[Outcome]:
        if not self.steps:
            return []
        return [self.steps[0].source] + [s.target for s in self.steps]

    def render(self) -> str:
        lines = [self.kind.value + (f" ({self.direction.value})" if self.direction else "")]
        for i, st in enumerate(self.steps, 1):
            lines.append(f"  {i}. {st.source}  ->  {st.target}   by {st.statement_id}")
        return "\n".join(lines)


_EXPECTED = {
    QueryKind.DOMINANCE: ProofKind.DOMINANCE_PATH,
    QueryKind.CONSISTENCY: ProofKind.INCONSISTENCY_CYCLE,
    QueryKind.SUBSUMPTION: ProofKind.NON_SUBSUMPTION_FLIP,
    QueryKind.EQUIVALENCE: ProofKind.NON_SUBSUMPTION_FLIP,
}


def _chains(steps) -> bool:
    return all(a.target == b.source for a, b in zip(steps, steps[1:]))


def _licensed(spec: PreferenceSpec, step: Flip) -> bool:
    try:
        return step.statement_id in is_improving_flip(spec, step.source, step.target)
    except OutcomeMismatch:
        return False


def _pair(spec_or_pair):
    if isinstance(spec_or_pair, PreferenceSpec):
        return spec_or_pair, None
    p1, p2 = spec_or_pair
    return p1, p2


def _reaches(spec: PreferenceSpec, source: Outcome, target: Outcome) -> bool:
    from . import explicit, symbolic

    if spec.outcome_count <= explicit.DEFAULT_NODE_LIMIT // 16:
        return explicit.dominates_explicit(spec, target, source)[0]
    return symbolic.dominates_symbolic(spec, target, source)


def verify_proof(spec_or_pair, query: Query, proof: Proof) -> bool:
    """Replay ``proof`` for ``query``; True only if every step checks out.

    ``spec_or_pair`` is one spec for dominance and consistency, or the pair
    (P1, P2) for subsumption and equivalence.
    """
    expected = _EXPECTED[query.kind]
    if proof.kind is not expected:
        raise ShapeMismatch(f"{query.kind.value} query cannot carry a {proof.kind.value} proof")
    steps = proof.steps
    if not steps or not _chains(steps):
        return False

    if proof.kind is ProofKind.DOMINANCE_PATH:
        spec, _ = _pair(spec_or_pair)
        if steps[0].source != query.worse or steps[-1].target != query.better:
            return False
        return all(_licensed(spec, s) for s in steps)

    if proof.kind is ProofKind.INCONSISTENCY_CYCLE:
        spec, _ = _pair(spec_or_pair)
        if steps[-1].target != steps[0].source:
            return False
        return all(_licensed(spec, s) for s in steps)

    p1, p2 = _pair(spec_or_pair)
    if p2 is None:
        raise ShapeMismatch("a counter-flip needs the pair (P1, P2)")
    if len(steps) != 1:
        return False
    if proof.direction is Direction.P2_NOT_IN_P1:
        if query.kind is QueryKind.SUBSUMPTION:
            return False
        p1, p2 = p2, p1
    elif proof.direction is None and query.kind is QueryKind.EQUIVALENCE:
        return False
    (step,) = steps
    if not _licensed(p1, step):
        return False
    return not _reaches(p2, step.source, step.target)


def _least_id(spec: PreferenceSpec, step: Flip) -> Flip:
    ids = is_improving_flip(spec, step.source, step.target)
    if not ids:
        return step
    return replace(step, statement_id=min(ids, key=id_key))


def _outcome_key(spec: PreferenceSpec | None):
    if spec is None:
        return Outcome.sort_key
    return lambda o: tuple(spec.variable(n).index(v) for n, v in o.items)


def normalize_proof(proof: Proof, spec_or_pair=None) -> Proof:
    """Canonical form: cycles start at their least outcome; steps cite the least licensing id.

    Without a spec the statement ids are kept as they are.
    """
    spec = None
    if spec_or_pair is not None:
        p1, p2 = _pair(spec_or_pair)
        spec = p2 if (proof.direction is Direction.P2_NOT_IN_P1 and p2 is not None) else p1
    steps = list(proof.steps)
    if proof.kind is ProofKind.INCONSISTENCY_CYCLE and steps:
        key = _outcome_key(spec)
        start = min(range(len(steps)), key=lambda i: key(steps[i].source))
        steps = steps[start:] + steps[:start]
    if spec is not None:
        steps = [_least_id(spec, s) for s in steps]
    return Proof(proof.kind, tuple(steps), proof.direction)
