"""Acceptance criteria, one test each; every test records a PASS/FAIL line."""

import itertools
import os
import random
import re
import time

import pytest

from ceteris import explicit, symbolic
from ceteris.generators import random_cpnet, random_outcome_values, random_spec, random_statement
from ceteris.model import Language, Outcome, Query, QueryKind, Variable, make_spec
from ceteris.proofs import Direction, Proof, ProofKind, verify_proof
from ceteris.reasoner import run_query
from ceteris.semantics import improving_successors
from ceteris.smv import emit_for_query, emit_smv, run_external
from ceteris.symbolic import CUR, Encoding
from ceteris.xmlio import emit_spec, parse_spec

from conftest import GOLDEN, BIN, d2, o, p1, p3, report

# every proof produced by criteria 1-3 is logged here for criterion 4
PROOFS: list = []


def _log(target, query, proof):
    if proof is not None:
        PROOFS.append((target, query, proof))


def test_criterion_1_p1_suite():
    P1 = p1()
    start = time.perf_counter()
    results = {}
    for engine in ("explicit", "symbolic"):
        cons = run_query(Query(QueryKind.CONSISTENCY, ("P1",)), [P1], engine)
        q_yes = Query(QueryKind.DOMINANCE, ("P1",), o(P1, "010"), o(P1, "101"))
        yes = run_query(q_yes, [P1], engine)
        q_no = Query(QueryKind.DOMINANCE, ("P1",), o(P1, "111"), o(P1, "011"))
        no = run_query(q_no, [P1], engine)
        _log(P1, q_yes, yes.proof)
        results[engine] = (cons.answer, yes.answer, no.answer,
                           yes.proof is not None and len(yes.proof.steps) == 3 and verify_proof(P1, q_yes, yes.proof))
    elapsed = time.perf_counter() - start
    ok = all(r == (True, True, False, True) for r in results.values()) and elapsed < 1.0
    report(1, ok, f"consistent/dominates/not-dominates/3-flip proof per engine {results}, {elapsed:.3f}s (< 1 s)")
    assert ok


def test_criterion_2_inconsistency():
    D2 = d2()
    start = time.perf_counter()
    verdicts = {}
    q = Query(QueryKind.CONSISTENCY, ("D2",))
    for engine in ("explicit", "symbolic"):
        r = run_query(q, [D2], engine)
        _log(D2, q, r.proof)
        verdicts[engine] = (r.answer, len(r.proof.steps) if r.proof else 0,
                            r.proof is not None and verify_proof(D2, q, r.proof))
    elapsed = time.perf_counter() - start
    ok = all(v == (False, 4, True) for v in verdicts.values()) and elapsed < 1.0
    report(2, ok, f"D2 (answer, cycle length, verified) {verdicts}, {elapsed:.3f}s (< 1 s)")
    assert ok


def _variant(rng, spec, lang):
    """A second spec over the same variables: drop, keep or add statements."""
    kept = [s for s in spec.statements if rng.random() < 0.7]
    extra = [random_statement(rng, spec.variables, f"t{i}", lang) for i in range(rng.randint(0, 2))]
    if rng.random() < 0.25:
        kept = list(spec.statements)
        extra = []
    return spec.with_statements(kept + extra, name=spec.name + "'")


def test_criterion_3_oracle_equivalence():
    rng = random.Random(20140901)
    start = time.perf_counter()
    mismatches = []
    counts = dict(specs=0, dominance=0, pairs=0)
    for lang in Language:
        for i in range(200):
            spec = random_spec(rng, lang, variables=(3, 6), statements=(2, 12), name=f"{lang.name}{i}")
            counts["specs"] += 1
            g = explicit.build_ipg(spec)
            m = symbolic.encode_spec(spec)

            ce, cycle = explicit.consistent_explicit(g)
            cs = symbolic.consistent_symbolic(m)
            if ce != cs:
                mismatches.append(("consistency", spec))
            q_c = Query(QueryKind.CONSISTENCY, (spec.name,))
            if not ce:
                _log(spec, q_c, Proof(ProofKind.INCONSISTENCY_CYCLE, cycle))
                _log(spec, q_c, Proof(ProofKind.INCONSISTENCY_CYCLE, symbolic.find_cycle(m)))

            outs = list(spec.outcomes())
            if len(outs) <= 64:
                pairs = list(itertools.product(outs, repeat=2))
            else:
                pairs = [(rng.choice(outs), rng.choice(outs)) for _ in range(20)]
            for better, worse in pairs:
                counts["dominance"] += 1
                de, path = explicit.dominates_explicit(g, better, worse)
                ds = symbolic.dominates_symbolic(m, better, worse)
                if de != ds:
                    mismatches.append(("dominance", spec, better, worse))
                if de and ds:
                    q_d = Query(QueryKind.DOMINANCE, (spec.name,), better, worse)
                    _log(spec, q_d, Proof(ProofKind.DOMINANCE_PATH, path))
                    _log(spec, q_d, Proof(ProofKind.DOMINANCE_PATH, symbolic.extract_witness(m, worse, better)))

            if i < 100:
                other = _variant(rng, spec, lang)
                counts["pairs"] += 1
                for kind in (QueryKind.SUBSUMPTION, QueryKind.EQUIVALENCE):
                    q_s = Query(kind, (spec.name, other.name))
                    if kind is QueryKind.SUBSUMPTION:
                        se, fe = explicit.subsumes_explicit(spec, other)
                        ss, fs = symbolic.subsumes_symbolic(spec, other)
                        de_, ds_ = Direction.P1_NOT_IN_P2, Direction.P1_NOT_IN_P2
                    else:
                        se, fe, de_ = explicit.equivalent_explicit(spec, other)
                        ss, fs, ds_ = symbolic.equivalent_symbolic(spec, other)
                    if se != ss:
                        mismatches.append((kind.value, spec, other))
                    for flip, d in ((fe, de_), (fs, ds_)):
                        if flip is not None:
                            _log((spec, other), q_s, Proof(ProofKind.NON_SUBSUMPTION_FLIP, (flip,), d))
    elapsed = time.perf_counter() - start
    ok = not mismatches and elapsed < 300 and counts["pairs"] >= 100
    report(3, ok, f"{counts['specs']} specs, {counts['dominance']} dominance pairs, {counts['pairs']} spec pairs, "
                  f"{len(mismatches)} disagreements, {elapsed:.1f}s (< 300 s)")
    assert ok, mismatches[:3]


def test_criterion_4_proof_replay():
    if not PROOFS:
        pytest.skip("criteria 1-3 did not run in this session")
    failed = [p for p in PROOFS if not verify_proof(*p)]
    kinds = {k: sum(1 for p in PROOFS if p[2].kind is k) for k in ProofKind}
    ok = not failed
    report(4, ok, f"{len(PROOFS) - len(failed)}/{len(PROOFS)} proofs replay "
                  f"({', '.join(f'{k.value}={n}' for k, n in kinds.items())})")
    assert ok


def test_criterion_5_subsumption_laws():
    rng = random.Random(5)
    checked = 0
    failures = []
    while checked < 100:
        lang = rng.choice(list(Language))
        spec = random_spec(rng, lang, variables=(3, 6), statements=(2, 10))
        if not symbolic.consistent_symbolic(spec):
            continue
        checked += 1
        s = random_statement(rng, spec.variables, "added", lang)
        bigger = spec.with_statements(spec.statements + (s,), name="bigger")
        for engine in ("explicit", "symbolic"):
            sub = {"explicit": explicit.subsumes_explicit, "symbolic": symbolic.subsumes_symbolic}[engine]
            eq = {"explicit": explicit.equivalent_explicit, "symbolic": symbolic.equivalent_symbolic}[engine]
            if not sub(spec, spec)[0]:
                failures.append(("reflexivity", engine, spec))
            if not sub(spec, bigger)[0]:
                failures.append(("monotonicity", engine, spec, s))
            if eq(spec, bigger)[0] != eq(bigger, spec)[0]:
                failures.append(("symmetry", engine, spec, s))
    ok = not failures
    report(5, ok, f"{checked} consistent specs, reflexivity/monotonicity/symmetry violations: {len(failures)}")
    assert ok, failures[:3]


def _norm(text):
    return re.sub(r"\s+", " ", text).strip()


def test_criterion_6_smv_fidelity():
    text1 = _norm(emit_smv(p1()).text)
    text3 = _norm(emit_smv(p3()).text)
    lines = [
        "a=1 & cha=1 & chb=0 & chc=0 : 0",
        "c=1 & b=0 & cha=0 & chb=0 & chc=1 : 0",
        "b=0 & c=0 & cha=0 & chb=1 & chc=0 : 1",
    ]
    g_block = _norm("""next(g) := case
        a=1 & cha=1 & chb=0 & chc=0 : 1;
        b=0 & c=0 & cha=0 & chb=1 & chc=0 : 1;
        c=1 & b=0 & cha=0 & chb=0 & chc=1 : 1;
        TRUE: 0;
      esac;""")
    checks = {
        "P1 guard lines": all(_norm(ln) in text1 for ln in lines),
        "P1 next(g)": g_block in text1,
        "P3 relative importance": "a=1 & cha=1 & chb=1 & chc=0 : {0,1}" in text3,
        "P1 golden": text1 == _norm((GOLDEN / "p1.smv").read_text()),
        "P3 golden": text3 == _norm((GOLDEN / "p3.smv").read_text()),
    }
    checker = os.environ.get("CETERIS_CHECKER")
    if checker:
        P1, D2 = p1(), d2()
        (c1,) = emit_for_query(Query(QueryKind.CONSISTENCY), [P1])
        (c2,) = emit_for_query(Query(QueryKind.CONSISTENCY), [D2])
        q = Query(QueryKind.DOMINANCE, ("P1",), o(P1, "010"), o(P1, "101"))
        (dm,) = emit_for_query(q, [P1])
        checks["external P1 consistency"] = run_external(c1, checker)[0].holds
        checks["external D2 inconsistency"] = not run_external(c2, checker)[0].holds
        checks["external P1 dominance"] = run_external(dm, checker)[0].holds
    ok = all(checks.values())
    extra = "" if checker else " (no CETERIS_CHECKER set, external replay skipped)"
    report(6, ok, ", ".join(f"{k}={'ok' if v else 'FAIL'}" for k, v in checks.items()) + extra)
    assert ok


def _walk(rng, spec, start, steps):
    cur = start
    for _ in range(steps):
        succ = sorted(improving_successors(spec, cur), key=lambda f: f.target.values)
        if not succ:
            break
        cur = rng.choice(succ).target
    return cur


def test_criterion_7_scalability():
    rng = random.Random(30)
    worst = 0.0
    answered = positives = 0
    wrong = []
    for k in range(10):
        spec = random_cpnet(rng, n=20, max_parents=2, per_variable=(1, 2))
        model = symbolic.encode_spec(spec)
        for j in range(6):
            worse = Outcome.of(spec, random_outcome_values(rng, spec))
            if j % 2:
                better = Outcome.of(spec, random_outcome_values(rng, spec))
                expect = None
            else:
                better = _walk(rng, spec, worse, rng.randint(3, 25))
                expect = better != worse
            q = Query(QueryKind.DOMINANCE, (spec.name,), better, worse)
            t0 = time.perf_counter()
            r = run_query(q, [spec], "symbolic")
            worst = max(worst, time.perf_counter() - t0)
            answered += 1
            positives += r.answer
            if expect is not None and r.answer != expect:
                wrong.append((spec.name, better, worse))
            if r.answer and not verify_proof(spec, q, r.proof):
                wrong.append(("proof", spec.name))
        assert symbolic.consistent_symbolic(model)
    ok = worst < 60 and not wrong
    report(7, ok, f"{answered} dominance queries on 10 random 20-variable CP-nets, {positives} true, "
                  f"slowest {worst:.3f}s (< 60 s each), {len(wrong)} wrong answers")
    assert ok


def test_criterion_8_multivalued():
    spec = make_spec("T4", {"x": ("0", "1", "2"), "a": BIN, "b": BIN, "c": BIN}, [
        ("p1", "x", "0", "1"),
        ("p2", "x", "1", "2", {"a": "1"}),
        ("p3", "x", "2", "1", {"a": "0"}),
        ("p4", "a", "1", "0", {"x": "2"}),
        ("p5", "b", "0", "1", {}, {"c"}),
        ("p6", "c", "1", "0", {"x": "0"}, {"a"}),
    ])
    parsed = parse_spec(emit_spec(spec))
    enc = Encoding(parsed)
    valid = enc.valid(CUR)
    excluded = enc.manager.satcount(~valid, enc.cur_levels) // (1 << 3)
    bad_pattern = {enc.level(b, CUR): True for b in enc.bits["x"]}
    pattern_ok = (excluded == 1 and not enc.manager.evaluate(valid, {**bad_pattern})
                  and enc.manager.satcount(valid, enc.cur_levels) == 24)
    g = explicit.build_ipg(parsed)
    m = symbolic.encode_spec(parsed)
    outs = list(parsed.outcomes())
    disagreements = sum(
        explicit.dominates_explicit(g, a, b)[0] != symbolic.dominates_symbolic(m, a, b)
        for a, b in itertools.product(outs, repeat=2)
    )
    edges_ok = m.edge_count() == g.edge_count
    ok = parsed == spec and pattern_ok and disagreements == 0 and edges_ok and len(outs) == 24
    report(8, ok, f"round-trip={'ok' if parsed == spec else 'FAIL'}, {len(outs)} outcomes, "
                  f"{len(outs) ** 2} dominance pairs with {disagreements} disagreements, "
                  f"validEncoding excludes {excluded} pattern (x=11), edge counts {g.edge_count}/{m.edge_count()}")
    assert ok
