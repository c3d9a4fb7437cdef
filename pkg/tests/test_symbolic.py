import itertools
import random

import pytest

from ceteris import explicit, symbolic
from ceteris.bdd import available_backends
from ceteris.errors import NodeBudgetExceeded, VariableMismatch
from ceteris.generators import random_spec
from ceteris.model import Language, make_spec
from ceteris.semantics import is_improving_flip
from ceteris.symbolic import (
    CUR,
    NXT,
    Encoding,
    consistent_symbolic,
    cyclic_states,
    dominates_symbolic,
    encode_spec,
    equivalent_symbolic,
    extract_witness,
    find_cycle,
    post_image,
    pre_image,
    subsumes_symbolic,
    transitive_closure,
)

from conftest import BIN, o


@pytest.fixture(params=available_backends())
def backend(request):
    return request.param


def test_p1_encoding(P1, backend):
    m = encode_spec(P1, backend=backend)
    assert m.enc.nbits == 3
    assert m.edge_count() == 8
    assert (m.T & m.manager.conj(m.enc.same(n) for n in P1.variable_names)).is_false


def test_p3_edge_count_matches_graph(P3):
    assert encode_spec(P3).edge_count() == explicit.build_ipg(P3).edge_count == 12


def test_ternary_domain_encoding():
    spec = make_spec("t", {"x": ("0", "1", "2")}, [("p", "x", "0", "2")])
    enc = Encoding(spec)
    assert enc.bits["x"] == [0, 1]
    valid = enc.valid(CUR)
    assert enc.manager.satcount(valid, enc.cur_levels) == 3
    assert enc.manager.evaluate(valid, {enc.level(0, CUR): True, enc.level(1, CUR): True}) is False
    assert [str(s) for s in enc.states(valid)] == ["x=0", "x=1", "x=2"]


def test_statement_relations_match_semantics():
    rng = random.Random(2)
    for _ in range(20):
        spec = random_spec(rng, rng.choice(list(Language)), variables=(2, 4), statements=(1, 5),
                           domain_sizes=(2, 3))
        m = encode_spec(spec)
        enc = m.enc
        for beta, alpha in itertools.product(spec.outcomes(), repeat=2):
            a = {**enc.assignment(beta, CUR), **enc.assignment(alpha, NXT)}
            got = {sid for sid, R in m.relations.items() if m.manager.evaluate(R, a)}
            assert got == is_improving_flip(spec, beta, alpha)


def test_images(P1):
    m = encode_spec(P1)
    assert m.enc.states(post_image(m, m.state(o(P1, "111")))) == [o(P1, "011")]
    assert post_image(m, m.state(o(P1, "010"))).is_false
    assert post_image(m, m.manager.false).is_false
    assert pre_image(m, m.manager.false).is_false


def test_image_duality():
    rng = random.Random(4)
    spec = random_spec(rng, Language.CPTHEORY, variables=4, statements=8)
    m = encode_spec(spec)
    for beta, alpha in itertools.product(spec.outcomes(), repeat=2):
        fwd = not (post_image(m, m.state(beta)) & m.state(alpha)).is_false
        bwd = not (pre_image(m, m.state(alpha)) & m.state(beta)).is_false
        assert fwd == bwd


def test_dominance_examples(P1, backend):
    m = encode_spec(P1, backend=backend)
    for direction in ("forward", "backward"):
        assert dominates_symbolic(m, o(P1, "010"), o(P1, "101"), direction=direction)
        assert not dominates_symbolic(m, o(P1, "111"), o(P1, "011"), direction=direction)
        assert not dominates_symbolic(m, o(P1, "101"), o(P1, "101"), direction=direction)


def test_witness_is_shortest_and_replays(P1):
    m = encode_spec(P1)
    path = extract_witness(m, o(P1, "101"), o(P1, "010"))
    assert len(path) == 3
    assert path[0].source == o(P1, "101") and path[-1].target == o(P1, "010")
    for step in path:
        assert step.statement_id in is_improving_flip(P1, step.source, step.target)
    one = extract_witness(m, o(P1, "111"), o(P1, "011"))
    assert len(one) == 1 and one[0].statement_id == "s1"


def test_layers_grow_and_are_bounded():
    rng = random.Random(8)
    spec = random_spec(rng, Language.TCPNET, variables=5, statements=10)
    m = encode_spec(spec)
    for beta in itertools.islice(spec.outcomes(), 8):
        layers, reach = symbolic._forward_layers(m, m.state(beta))
        assert len(layers) <= spec.outcome_count
        seen = m.manager.false
        for layer in layers:
            assert (layer & seen).is_false
            seen = seen | layer
        assert seen == reach


def test_consistency(P1, D2, backend):
    assert consistent_symbolic(P1, backend=backend)
    assert consistent_symbolic(make_spec("e", {"x": BIN}, []))
    m = encode_spec(D2, backend=backend)
    assert not consistent_symbolic(m)
    cycle = find_cycle(m)
    assert len(cycle) == 4 and cycle[-1].target == cycle[0].source
    assert find_cycle(encode_spec(P1)) is None


def test_cycle_found_when_gfp_contains_tails():
    # x0 flips into a two-outcome cycle on x1 only when x0=1 → gfp holds tail states too
    spec = make_spec("tail", {"x0": BIN, "x1": BIN, "x2": BIN}, [
        ("a", "x0", "1", "0"),
        ("b", "x1", "1", "0", {"x0": "1"}),
        ("c", "x1", "0", "1", {"x0": "1"}),
    ])
    m = encode_spec(spec)
    assert not cyclic_states(m).is_false
    cycle = find_cycle(m)
    assert cycle[-1].target == cycle[0].source
    for step in cycle:
        assert is_improving_flip(spec, step.source, step.target)


def test_transitive_closure_matches_reachability():
    rng = random.Random(6)
    spec = random_spec(rng, Language.CPNET, variables=4, statements=7)
    m = encode_spec(spec)
    tc = transitive_closure(m.enc, m.T)
    g = explicit.build_ipg(spec)
    for beta, alpha in itertools.product(spec.outcomes(), repeat=2):
        a = {**m.enc.assignment(beta, CUR), **m.enc.assignment(alpha, NXT)}
        want = g.index_of(alpha) in explicit.reachable_from(g, g.index_of(beta))
        assert m.manager.evaluate(tc, a) == want


def test_subsumption_examples(P1, P1m, backend):
    assert subsumes_symbolic(P1, P1, backend=backend) == (True, None)
    assert subsumes_symbolic(P1m, P1, backend=backend) == (True, None)
    ok, flip = subsumes_symbolic(P1, P1m, backend=backend)
    assert not ok and flip.statement_id == "s3"
    assert not explicit.dominates_explicit(P1m, flip.target, flip.source)[0]


def test_equivalence_examples(P1, P1m, D2):
    assert equivalent_symbolic(P1, P1)[0]
    ok, flip, direction = equivalent_symbolic(P1, P1m)
    assert not ok and direction == "P1_NOT_IN_P2"
    assert equivalent_symbolic(P1m, P1)[2] == "P2_NOT_IN_P1"
    assert equivalent_symbolic(D2, D2.with_statements(reversed(D2.statements)))[0]


def test_variable_mismatch(P1, D2):
    with pytest.raises(VariableMismatch):
        subsumes_symbolic(P1, D2)


def test_node_budget_is_reported():
    rng = random.Random(1)
    spec = random_spec(rng, Language.CPTHEORY, variables=6, statements=12)
    with pytest.raises(NodeBudgetExceeded):
        consistent_symbolic(spec, node_budget=50)


@pytest.mark.parametrize("lang", list(Language))
def test_engines_agree_on_random_specs(lang):
    rng = random.Random(hash(lang.value) % 1000)
    for _ in range(15):
        spec = random_spec(rng, lang, variables=(2, 5), statements=(1, 8), domain_sizes=(2, 3))
        g = explicit.build_ipg(spec)
        m = encode_spec(spec)
        assert m.edge_count() == g.edge_count
        assert consistent_symbolic(m) == explicit.consistent_explicit(g)[0]
        outs = list(spec.outcomes())
        for _ in range(40):
            a, b = rng.choice(outs), rng.choice(outs)
            want = explicit.dominates_explicit(g, a, b)[0]
            assert dominates_symbolic(m, a, b) == want
            assert dominates_symbolic(m, a, b, direction="backward") == want
