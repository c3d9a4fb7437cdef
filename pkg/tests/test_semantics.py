import itertools
import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from ceteris.errors import OutcomeMismatch
from ceteris.generators import random_spec
from ceteris.model import Language, make_spec
from ceteris.semantics import Flip, improving_successors, is_improving_flip

from conftest import BIN, o


def brute_successors(spec, beta):
    return {(a, sid) for a in spec.outcomes() for sid in is_improving_flip(spec, beta, a)}


def test_definition_one_examples(P1):
    assert is_improving_flip(P1, o(P1, "111"), o(P1, "011")) == {"s1"}
    assert is_improving_flip(P1, o(P1, "111"), o(P1, "001")) == set()
    assert is_improving_flip(P1, o(P1, "011"), o(P1, "111")) == set()


def test_definition_two_example(P3):
    assert is_improving_flip(P3, o(P3, "100"), o(P3, "010")) == {"s1"}
    # unchanged Omega variable is also a flip
    assert is_improving_flip(P3, o(P3, "100"), o(P3, "000")) == {"s1"}


def test_successor_examples(P1, P3):
    assert improving_successors(P1, o(P1, "111")) == {Flip(o(P1, "111"), o(P1, "011"), "s1")}
    assert improving_successors(P1, o(P1, "010")) == set()
    assert improving_successors(P1, o(P1, "101")) == {
        Flip(o(P1, "101"), o(P1, "001"), "s1"),
        Flip(o(P1, "101"), o(P1, "100"), "s3"),
    }
    beta = o(P3, "100")
    assert improving_successors(P3, beta) == {
        Flip(beta, o(P3, "000"), "s1"),
        Flip(beta, o(P3, "010"), "s1"),
        Flip(beta, o(P3, "110"), "sb"),
    }


def test_all_licensing_ids_reported():
    spec = make_spec("x", {"a": BIN, "b": BIN}, [("p", "a", "0", "1"), ("q", "a", "0", "1", {"b": "0"})])
    assert is_improving_flip(spec, spec.outcome(a="1", b="0"), spec.outcome(a="0", b="0")) == {"p", "q"}


def test_wrong_variables_rejected(P1, D2):
    with pytest.raises(OutcomeMismatch):
        is_improving_flip(P1, o(D2, "00"), o(D2, "10"))
    with pytest.raises(OutcomeMismatch):
        improving_successors(P1, o(D2, "00"))


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 10 ** 6), lang=st.sampled_from(list(Language)))
def test_successors_match_pairwise_definition(seed, lang):
    rng = random.Random(seed)
    spec = random_spec(rng, lang, variables=(2, 4), statements=(1, 6), domain_sizes=(2, 3))
    bound = sum(
        max(1, math.prod(len(spec.variable(y).domain) for y in s.less_important))
        for s in spec.statements
    )
    for beta in spec.outcomes():
        succ = improving_successors(spec, beta)
        assert {(f.target, f.statement_id) for f in succ} == brute_successors(spec, beta)
        assert len(succ) <= bound
        for f in succ:
            st_ = spec.statement(f.statement_id)
            assert f.source[st_.target] == st_.worse and f.target[st_.target] == st_.better
            free = {st_.target} | set(st_.less_important)
            for n in spec.variable_names:
                if n not in free:
                    assert f.source[n] == f.target[n]
            if lang is Language.CPNET:
                assert sum(f.source[n] != f.target[n] for n in spec.variable_names) == 1


def test_flip_never_self_loop():
    rng = random.Random(5)
    for _ in range(30):
        spec = random_spec(rng, Language.CPTHEORY)
        for beta in itertools.islice(spec.outcomes(), 16):
            assert all(f.target != beta for f in improving_successors(spec, beta))
