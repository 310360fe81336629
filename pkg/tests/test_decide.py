import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ilkit import decide as dec
from ilkit.formula import BOT, Box, Rhd, adequate_set, neg, parse, random_formula
from ilkit.veltman import OrdinaryModel, bits, check_condition, find_cycle, satisfies_logic, validate, w_composite


# -- frame enumeration ---------------------------------------------------------

def test_skeleton_counts_are_poset_counts():
    # unlabelled posets on n points: 1, 2, 5, 16, 63
    assert [len(dec.skeletons(n)) for n in range(1, 6)] == [1, 2, 5, 16, 63]


def _canonical(n, R, S):
    best = None
    for perm in itertools.permutations(range(n)):
        r = tuple(sorted((perm[a], perm[b]) for a, b in R))
        s = tuple(sorted((perm[w], perm[u], perm[v]) for w, u, v in S))
        key = (r, s)
        if best is None or key < best:
            best = key
    return best


def _brute_force_frames(n, logic):
    pairs = [(a, b) for a in range(n) for b in range(n) if a != b]
    classes = set()
    names = [str(i) for i in range(n)]
    for rsub in range(1 << len(pairs)):
        R = [pairs[k] for k in range(len(pairs)) if rsub >> k & 1]
        succ = {w: [b for a, b in R if a == w] for w in range(n)}
        triples = [(w, u, v) for w in range(n) for u in succ[w] for v in succ[w]]
        for ssub in range(1 << len(triples)):
            S = [triples[k] for k in range(len(triples)) if ssub >> k & 1]
            sd = {names[w]: [(names[u], names[v]) for x, u, v in S if x == w] for w in range(n)}
            m = OrdinaryModel(names, [(names[a], names[b]) for a, b in R], sd)
            if validate(m) is None and satisfies_logic(m, logic):
                classes.add(_canonical(n, R, S))
    return len(classes)


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("logic", ["IL", "ILW"])
def test_frame_counts_match_brute_force(n, logic):
    assert len(dec.frames(n, logic)) == _brute_force_frames(n, logic)


@pytest.mark.parametrize("logic", ["IL", "ILW", "ILP", "ILM"])
def test_enumerated_frames_are_valid(logic):
    for n in range(1, 5):
        for fr in dec.frames(n, logic):
            m = fr.model()
            assert validate(m) is None
            assert satisfies_logic(m, logic)


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=40, deadline=None)
def test_frame_eval_matches_model_truth(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 4)
    fr = rng.choice(dec.frames(n, "IL"))
    f = random_formula(rng, ("p", "q"), 3)
    ev = dec.FrameEval(fr, ["p", "q"])
    rows = ev.truth(f)
    for _ in range(5):
        t = rng.randrange(ev.V)
        m = fr.model(ev.valuation(t))
        want = m.truth(f)
        got = sum(1 << i for i in range(n) if rows[i] >> t & 1)
        assert got == want


# -- bounded search -------------------------------------------------------------

def test_sat_bounded_bot():
    assert dec.sat_bounded(BOT, "IL", 4).verdict == dec.UNSAT


def test_sat_bounded_diamond_true_needs_two_worlds():
    r = dec.sat_bounded(parse("<>true"), "IL", 2)
    assert r.verdict == dec.SAT and r.model.n == 2
    assert r.model.force(r.designated, parse("<>true"))


def test_w_fails_on_some_il_frame():
    r = dec.sat_bounded(neg(parse("p |> q -> p |> (q & []~p)")), "IL", 5)
    assert r.verdict == dec.SAT
    assert check_condition(r.model, "W") is not None


def test_loeb_is_provable():
    assert dec.decide_bounded(parse("[]([]p -> p) -> []p"), "IL", 4).verdict == dec.PROVABLE


@pytest.mark.parametrize("text", ["<>true", "p |> q -> q |> p", "[]p -> p", "p |> q -> [](p |> q)"])
def test_countermodel_is_monotone_in_bound(text):
    g = parse(text)
    first = dec.decide_bounded(g, "IL", 2)
    later = dec.decide_bounded(g, "IL", 4)
    if first.verdict == dec.COUNTERMODEL:
        assert later.verdict == dec.COUNTERMODEL
        assert later.model.to_json() == first.model.to_json()


def test_search_is_deterministic():
    g = parse("p |> q -> (p & []r) |> (q & []r)")
    a = dec.decide_bounded(g, "IL", 4)
    b = dec.decide_bounded(g, "IL", 4)
    assert a.model.to_json() == b.model.to_json() and a.designated == b.designated


def test_ceiling(monkeypatch):
    with pytest.raises(dec.BoundError):
        dec.sat_bounded(parse("p"), "IL", dec.DEFAULT_CEILING + 1)
    monkeypatch.setenv("VELTMAN_CEILING", "2")
    with pytest.raises(dec.BoundError):
        dec.sat_bounded(parse("p"), "IL", 3)


def test_default_oracle_examples():
    for bound in (1, 2, 3):
        assert not dec.default_oracle([BOT], bound).consistent
    ans = dec.default_oracle([parse("<>true")], 3)
    assert ans.consistent and ans.model.n == 2
    ans = dec.default_oracle([parse("p |> q"), parse("~(p |> (q & []~p))")], 4)
    assert str(ans) == "inconsistent-up-to-bound(4)"


# -- catalogue and the finite assuring relation -------------------------------------

@pytest.fixture(scope="module")
def small():
    phi = adequate_set(parse("~(p |> q)"))
    cat = dec.Catalogue(phi, 3)
    return phi, cat


def test_catalogue_theories_are_maximal_and_self_proving(small):
    phi, cat = small
    for t in cat.order:
        assert dec.PhiMCS(phi, t).is_maximal()
        for f in phi.members(t):
            assert cat.proves(t, f)
        for f in phi.members(~t & ((1 << len(phi)) - 1)):
            assert not cat.proves(t, f)


def test_phi_assuring_reflexive_pair_is_false(small):
    phi, cat = small
    for t in cat.order:
        assert not dec.phi_assuring(t, 0, t, cat)


def test_phi_assuring_with_empty_label_is_box_transfer(small):
    phi, cat = small
    logic = dec.PhiLogic(cat)
    boxes = [i for i in phi.boxed]
    for g in cat.order:
        for d in cat.order:
            # []X in gamma must give X and []X in delta, plus a new box
            transfer = all(d >> phi.index[phi.formulas[b].inner] & 1 and d >> b & 1 for b in boxes if g >> b & 1)
            new_box = any(d >> b & 1 and not g >> b & 1 for b in boxes)
            assert logic.assuring(g, 0, d) == (transfer and new_box)


def test_wfin_probs_witness_is_assuring(small):
    phi, cat = small
    A, B = parse("p"), parse("q")
    label = [neg(B), Box(neg(A))]
    found = 0
    for g in cat.order:
        if g >> phi.index[Rhd(A, B)] & 1:
            with pytest.raises(ValueError):
                dec.witness_wfin_probs(g, A, B, cat)
            continue
        d = dec.witness_wfin_probs(g, A, B, cat)
        assert d is not None
        assert A in d
        assert dec.phi_assuring(g, label, d, cat)
        assert d.box_count() > dec.PhiMCS(phi, g).box_count()
        found += 1
    assert found


def test_wfin_defies_witness(small):
    phi, cat = small
    logic = dec.PhiLogic(cat)
    A, B = parse("p"), parse("q")
    checked = 0
    for g in cat.order:
        if not g >> phi.index[Rhd(A, B)] & 1:
            continue
        for d in cat.order:
            if d >> phi.index[A] & 1 and logic.assuring(g, 0, d):
                d2 = dec.witness_wfin_defies(g, 0, d, A, B, cat)
                assert d2 is not None and B in d2
                assert logic.assuring(g, phi.mask([Box(neg(A))]), d2.members)
                checked += 1
    assert checked


# -- the ILW construction ------------------------------------------------------

def test_ilw_examples():
    assert dec.ilw_decide(parse("[]([]p -> p) -> []p")).verdict == dec.PROVABLE
    assert dec.ilw_decide(parse("p |> q -> p |> (q & []~p)")).verdict == dec.PROVABLE
    r = dec.ilw_decide(parse("<>true"))
    assert r.verdict == dec.COUNTERMODEL and r.model.n == 1 and not r.model.r_pairs()


def _check_construction(g, r):
    m = r.model
    assert validate(m) is None
    assert check_condition(m, "W") is None
    assert dec.verify_truth_lemma(r.construction) is None
    assert not m.force(r.designated, g)
    for w in range(m.n):
        succ = m.R[w]
        for u in bits(succ):
            assert m.S[w][u] >> u & 1
            assert m.S[w][u] & ~succ == 0
            assert succ & m.R[u] & ~m.S[w][u] == 0
        assert find_cycle(w_composite(m, w)) is None
    for i, (sigma, theory) in enumerate(r.construction.worlds):
        height = dec.PhiMCS(r.construction.phi, theory).box_count() - dec.PhiMCS(r.construction.phi, r.construction.root).box_count()
        assert len(sigma) <= height


@pytest.mark.parametrize(
    "text",
    [
        "p |> q",
        "p -> []p",
        "[]p | []~p",
        "p |> q -> [](p |> q)",
        "(p |> q) -> (p |> (q & r))",
        "<>p |> false",
        "(p |> q) | (q |> p)",
    ],
)
def test_ilw_countermodels_are_verified(text):
    g = parse(text)
    r = dec.ilw_decide(g, 4)
    assert r.verdict == dec.COUNTERMODEL
    assert dec.sat_bounded(neg(g), "ILW", 4).verdict == dec.SAT
    _check_construction(g, r)


def test_truth_lemma_catches_a_flipped_bit():
    r = dec.ilw_decide(parse("p |> q"), 4)
    m = r.model
    val = dict(m.val)
    val["p"] = val.get("p", 0) ^ 1
    broken = m.with_valuation(val)
    hit = dec.verify_truth_lemma(r.construction, broken)
    assert hit is not None and hit[0] == "w0"


def test_single_world_construction():
    r = dec.ilw_decide(parse("~[]false"))
    assert r.model.n == 1
    assert dec.verify_truth_lemma(r.construction) is None


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=15, deadline=None)
def test_ilw_decide_agrees_with_bounded_search(seed):
    rng = random.Random(seed)
    g = random_formula(rng, ("p", "q"), 2)
    r = dec.ilw_decide(g, 3)
    s = dec.sat_bounded(neg(g), "ILW", 3)
    assert (r.verdict == dec.COUNTERMODEL) == (s.verdict == dec.SAT)
    if r.model is not None:
        _check_construction(g, r)
