"""Dispatch a query to an engine and package the answer with its proof."""

from __future__ import annotations

import logging
import time

from . import explicit, symbolic
from .bdd import DEFAULT_NODE_BUDGET
from .errors import InternalInconsistency, NodeBudgetExceeded
from .model import Engine, PreferenceSpec, Query, QueryKind, QueryResult
from .proofs import Direction, Proof, ProofKind, normalize_proof, verify_proof

log = logging.getLogger(__name__)

# symbolic runs that blow the node budget fall back to the explicit engine up to this size
FALLBACK_OUTCOMES = 2 ** 16


def _specs_arg(query: Query, specs):
    if query.kind in (QueryKind.SUBSUMPTION, QueryKind.EQUIVALENCE):
        if len(specs) != 2:
            raise ValueError(f"{query.kind.value} needs two specifications")
        return tuple(specs)
    if len(specs) != 1:
        raise ValueError(f"{query.kind.value} needs exactly one specification")
    return specs[0]


def _explicit(query: Query, specs, node_limit):
    if query.kind is QueryKind.DOMINANCE:
        ok, path = explicit.dominates_explicit(specs[0], query.better, query.worse, node_limit)
        return ok, (Proof(ProofKind.DOMINANCE_PATH, path) if ok else None)
    if query.kind is QueryKind.CONSISTENCY:
        ok, cycle = explicit.consistent_explicit(specs[0], node_limit)
        return ok, (None if ok else Proof(ProofKind.INCONSISTENCY_CYCLE, cycle))
    if query.kind is QueryKind.SUBSUMPTION:
        ok, flip = explicit.subsumes_explicit(specs[0], specs[1], node_limit)
        return ok, (None if ok else Proof(ProofKind.NON_SUBSUMPTION_FLIP, (flip,), Direction.P1_NOT_IN_P2))
    ok, flip, direction = explicit.equivalent_explicit(specs[0], specs[1], node_limit)
    return ok, (None if ok else Proof(ProofKind.NON_SUBSUMPTION_FLIP, (flip,), direction))


def _symbolic(query: Query, specs, node_budget, backend):
    kw = dict(node_budget=node_budget, backend=backend)
    if query.kind is QueryKind.DOMINANCE:
        model = symbolic.encode_spec(specs[0], **kw)
        ok = symbolic.dominates_symbolic(model, query.better, query.worse)
        if not ok:
            return False, None
        return True, Proof(ProofKind.DOMINANCE_PATH, symbolic.extract_witness(model, query.worse, query.better))
    if query.kind is QueryKind.CONSISTENCY:
        model = symbolic.encode_spec(specs[0], **kw)
        if symbolic.consistent_symbolic(model):
            return True, None
        return False, Proof(ProofKind.INCONSISTENCY_CYCLE, symbolic.find_cycle(model))
    if query.kind is QueryKind.SUBSUMPTION:
        ok, flip = symbolic.subsumes_symbolic(specs[0], specs[1], **kw)
        return ok, (None if ok else Proof(ProofKind.NON_SUBSUMPTION_FLIP, (flip,), Direction.P1_NOT_IN_P2))
    ok, flip, direction = symbolic.equivalent_symbolic(specs[0], specs[1], **kw)
    return ok, (None if ok else Proof(ProofKind.NON_SUBSUMPTION_FLIP, (flip,), direction))


def run_query(query: Query, specs, engine: Engine | str = Engine.SYMBOLIC, *,
              node_budget: int = DEFAULT_NODE_BUDGET,
              node_limit: int = explicit.DEFAULT_NODE_LIMIT,
              backend: str | None = None,
              fallback: bool = True) -> QueryResult:
    """Answer ``query`` over ``specs`` (one spec, or P1 and P2 in order).

    Any proof is normalised and replayed before it is returned; a proof
    that fails replay raises InternalInconsistency.
    """
    engine = Engine(engine)
    specs = [s.check() for s in specs]
    target = _specs_arg(query, specs)
    start = time.perf_counter()
    used = engine
    if engine is Engine.EXPLICIT:
        answer, proof = _explicit(query, specs, node_limit)
    else:
        try:
            answer, proof = _symbolic(query, specs, node_budget, backend)
        except NodeBudgetExceeded:
            largest = max(s.outcome_count for s in specs)
            if not fallback or largest > FALLBACK_OUTCOMES:
                raise
            log.warning("node budget exceeded; falling back to the explicit engine")
            used = Engine.EXPLICIT
            answer, proof = _explicit(query, specs, node_limit)
    elapsed = time.perf_counter() - start
    if proof is not None:
        proof = normalize_proof(proof, target)
        if not verify_proof(target, query, proof):
            raise InternalInconsistency(f"{used.value} engine produced a proof that does not replay")
    return QueryResult(answer, used, proof, elapsed)
