import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import load_json
from ilkit import decide as dec
from ilkit.formula import TOP, Box, Rhd, adequate_set, neg, parse, random_formula
from ilkit.labels import (
    HARNESS_PRINCIPLES,
    assures,
    assuring_failure,
    boxdotset,
    boxset,
    eval_q_expr,
    format_q_expr,
    full_closure_phi,
    harness_labelling,
    model_boxdot,
    q_labels,
    random_pool,
    rhd_pool,
    semantic_assuring,
    unfold_q,
    witness_w_defies,
    witness_w_probs,
)
from ilkit.veltman import OrdinaryModel, bits, random_model


def fixture(name):
    data = load_json("models", name)
    return OrdinaryModel.from_json(data), [parse(s) for s in data.get("pool", [])]


def fs(*texts):
    return frozenset(parse(t) for t in texts)


# -- shipped models -------------------------------------------------------------

def test_box_versus_assuringness():
    m, pool = fixture("box_vs_assuringness.json")
    assert semantic_assuring(m, "x", "y", fs(), pool)
    assert not semantic_assuring(m, "x", "y", fs("p"), pool)
    assert assuring_failure(m, "x", "y", fs("p")) == ("z", parse("p"))
    # y still forces []p although the p-label is not assured
    assert m.force("y", parse("[]p"))


def test_labels_need_not_be_maximal():
    m, pool = fixture("nonmaximal_labels.json")
    assert semantic_assuring(m, "x", "y", fs("p", "q"), pool)
    assert not semantic_assuring(m, "x", "y'", fs("p", "q"), pool)
    assert assures(m, "x", "y'", fs("p"))


def test_incomparable_maximal_labels():
    # u1 and u2 agree on their theory yet carry incomparable labels
    m, _ = fixture("fig_no_maximum.json")
    assert assures(m, "w", "u1", fs("p")) and not assures(m, "w", "u1", fs("q"))
    assert assures(m, "w", "u2", fs("q")) and not assures(m, "w", "u2", fs("p"))


def test_not_a_successor():
    m, pool = fixture("box_vs_assuringness.json")
    assert not semantic_assuring(m, "y", "z", fs(), pool)
    assert assuring_failure(m, "y", "z", fs()) == (None, None)


# -- properties of the two readings ----------------------------------------------

def _random_setup(seed, logic="IL"):
    rng = random.Random(seed)
    m = random_model(rng, logic=logic)
    pool = random_pool(rng, size=5)
    return rng, m, pool


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=40, deadline=None)
def test_strong_reading_implies_pool_reading(seed):
    rng, m, pool = _random_setup(seed)
    for x in range(m.n):
        for y in bits(m.R[x]):
            S = frozenset(A for A in pool if rng.random() < 0.5)
            if assures(m, x, y, S):
                assert semantic_assuring(m, x, y, S, pool)


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=40, deadline=None)
def test_weakening_the_label(seed):
    rng, m, pool = _random_setup(seed)
    for x in range(m.n):
        for y in bits(m.R[x]):
            S = frozenset(pool)
            smaller = frozenset(A for A in S if rng.random() < 0.5)
            if semantic_assuring(m, x, y, S, pool):
                assert semantic_assuring(m, x, y, smaller, pool)
            if assures(m, x, y, S):
                assert assures(m, x, y, smaller)


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=40, deadline=None)
def test_boxdotset_is_monotone_in_label(seed):
    rng, m, pool = _random_setup(seed)
    T = frozenset(A for A in pool if rng.random() < 0.5)
    for x in range(m.n):
        base = boxdotset(m, x, (), pool)
        assert base <= boxdotset(m, x, T, pool) <= boxdotset(m, x, pool, pool)
        boxes = boxset(m, x, T, pool)
        assert boxes | {f.inner for f in boxes} == boxdotset(m, x, T, pool)


def test_boxdotset_of_empty_label_is_boxes():
    chain = OrdinaryModel(["a", "b"], [("a", "b")], complete_s=True, valuation={"p": ["b"]})
    pool = [parse("p"), parse("q")]
    assert boxdotset(chain, "a", (), pool) == fs("p", "[]p")
    assert boxdotset(chain, "b", (), pool) == fs("p", "[]p", "q", "[]q")
    assert boxdotset(chain, "a", (), []) == frozenset()
    assert boxdotset(chain, "a", (), [TOP]) == frozenset([TOP, Box(TOP)])


# -- closure inside an adequate set -----------------------------------------------

@pytest.fixture(scope="module")
def small():
    phi = adequate_set(parse("~(p |> q)"))
    return phi, dec.Catalogue(phi, 3)


def test_full_closure_is_extensive_and_idempotent(small):
    phi, cat = small
    rng = random.Random(4)
    for gamma in cat.order[:20]:
        S = frozenset(f for f in phi.formulas if rng.random() < 0.2)
        c = full_closure_phi(S, gamma, phi, cat)
        assert S <= c <= set(phi.formulas)
        assert full_closure_phi(c, gamma, phi, cat) == c
        for f in c:
            if Box(f) in phi.index:
                assert Box(f) in c


def test_full_closure_rejects_outside_formulas(small):
    phi, cat = small
    with pytest.raises(ValueError):
        full_closure_phi([parse("r")], cat.order[0], phi, cat)


# -- Q-labels -----------------------------------------------------------------

B = parse("q")


def test_q_label_single_step():
    m = OrdinaryModel(["a", "b"], [("a", "b")], complete_s=True)
    seq = q_labels(["b", "a"], [fs("p")], B, model_boxdot(m, [parse("p")]))
    assert seq.Q(1) == fs("p", "[]~q")


def test_q_label_two_steps():
    m = OrdinaryModel(["a", "b", "c"], [("a", "b"), ("a", "c"), ("b", "c")], complete_s=True, valuation={"p": ["c"]})
    pool = [parse("p"), parse("~q")]
    seq = q_labels(["c", "b", "a"], [fs("p"), fs()], B, model_boxdot(m, pool))
    assert seq.Q(1) == fs("[]~q")
    # b sees only c, where p and ~q hold, so both are boxed at b
    assert seq.Q(2) == fs("p", "[]~q") | boxdotset(m, "b", seq.Q(1), pool)
    assert fs("p", "[]p", "~q", "[]~q") <= seq.Q(2)


def test_q_label_length_mismatch():
    m = OrdinaryModel(["a"], [])
    with pytest.raises(ValueError):
        q_labels(["a"], [fs("p")], B, model_boxdot(m, []))
    with pytest.raises(ValueError):
        unfold_q(0)


def test_format_unfolded():
    assert format_q_expr(unfold_q(1)) == "S1 + {[]~B}"
    assert format_q_expr(unfold_q(2)) == "S2 + {[]~B} + dot(w1, S1 + {[]~B})"


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=40, deadline=None)
def test_recursive_and_unfolded_q_labels_agree(seed):
    rng, m, pool = _random_setup(seed)
    chain = [rng.randrange(m.n)]
    for _ in range(rng.randint(1, 5)):
        succ = list(bits(m.R[chain[0]]))
        if not succ:
            break
        chain.insert(0, rng.choice(succ))
    if len(chain) < 2:
        return
    labels = [frozenset(A for A in pool if rng.random() < 0.3) for _ in range(len(chain) - 1)]
    Bf = random_formula(rng, ("p", "q"), 1)
    bd = model_boxdot(m, pool)
    seq = q_labels(chain, labels, Bf, bd)
    for j in range(1, len(chain)):
        assert eval_q_expr(unfold_q(j), chain, labels, Bf, bd) == seq.Q(j)
        if j > 1:
            assert seq.Q(j) >= {Box(neg(Bf))}


# -- lemma harness -------------------------------------------------------------

LOGIC_OF = {"P": "ILP", "Pfull": "ILP", "M": "ILM", "M0": "ILM0", "R": "ILR", "Rfull": "ILR", "RTrans": "ILR"}


@pytest.mark.parametrize("principle", sorted(HARNESS_PRINCIPLES))
def test_harness_finds_nothing_on_sound_frames(principle):
    rng = random.Random(17)
    for _ in range(30):
        m = random_model(rng, logic=LOGIC_OF[principle])
        pool = random_pool(rng)
        assert harness_labelling(principle, m, pool, trials=5, rng=rng) == []


@pytest.mark.parametrize("name, principle", [("control_P.json", "P"), ("control_R.json", "R")])
def test_harness_negative_controls(name, principle):
    m, pool = fixture(name)
    with pytest.raises(ValueError):
        harness_labelling(principle, m, pool)
    found = harness_labelling(principle, m, pool, trials=20, allow_violating=True)
    assert found
    v = found[0]
    assert set(v) >= {"chain", "labels", "failing formula"}


def test_harness_unknown_principle():
    m = OrdinaryModel(["a"], [])
    with pytest.raises(ValueError):
        harness_labelling("Q", m, [])


# -- ILW witnesses on models -------------------------------------------------------

@given(st.integers(0, 2**32 - 1))
@settings(max_examples=30, deadline=None)
def test_w_witnesses_exist_on_ilw_models(seed):
    rng = random.Random(seed)
    m = random_model(rng, logic="ILW")
    f = random_formula(rng, ("p", "q"), 3)
    pairs = rhd_pool(f) or [(parse("p"), parse("q"))]
    for A, Bf in pairs:
        for x in range(m.n):
            if not m.truth(Rhd(A, Bf)) >> x & 1:
                if m.R[x] & m.truth(A):
                    y = witness_w_probs(m, x, A, Bf)
                    assert y is not None
                    assert assures(m, x, y, {Box(neg(A)), neg(Bf)})
                continue
            for y in bits(m.R[x] & m.truth(A)):
                z = witness_w_defies(m, x, y, (), A, Bf)
                assert z is not None
                assert m.force(z, Bf) and m.force(z, Box(neg(Bf)))


def test_witness_preconditions():
    m = OrdinaryModel(["a", "b"], [("a", "b")], complete_s=True, valuation={"p": ["b"]})
    p, q = parse("p"), parse("q")
    with pytest.raises(ValueError):
        witness_w_probs(m, "a", q, p)
    assert witness_w_probs(m, "a", p, q) == "b"
    with pytest.raises(ValueError):
        witness_w_defies(m, "a", "b", (), p, q)
    assert witness_w_defies(m, "a", "b", (), p, p) == "b"
