"""Ceteris paribus preference reasoning.

Answers dominance, consistency, subsumption and equivalence queries over
CP-nets, TCP-nets and CP-theories, with an explicit graph engine, a BDD-based
symbolic engine, checkable proofs, and SMV export for external model checkers.

>>> from ceteris import load_spec, Query, QueryKind, run_query
>>> spec = load_spec("tests/data/p1.xml")                      # doctest: +SKIP
>>> run_query(Query(QueryKind.CONSISTENCY, (spec.name,)), [spec]).answer  # doctest: +SKIP
True
"""

from .errors import CeterisError
from .model import (
    Engine,
    Language,
    Outcome,
    PreferenceSpec,
    PreferenceStatement,
    Query,
    QueryKind,
    QueryResult,
    Variable,
    classify_language,
    make_spec,
)
from .proofs import Proof, ProofKind, verify_proof
from .reasoner import run_query
from .smv import emit_for_query, emit_smv
from .xmlio import emit_result, emit_spec, load_spec, parse_query, parse_spec

__version__ = "0.1.0"

__all__ = [
    "CeterisError",
    "Engine",
    "Language",
    "Outcome",
    "PreferenceSpec",
    "PreferenceStatement",
    "Proof",
    "ProofKind",
    "Query",
    "QueryKind",
    "QueryResult",
    "Variable",
    "classify_language",
    "emit_for_query",
    "emit_result",
    "emit_smv",
    "emit_spec",
    "load_spec",
    "make_spec",
    "parse_query",
    "parse_spec",
    "run_query",
    "verify_proof",
]
