"""Assuring labels: successor checks, box-sets, closures, Q-sequences and the lemma harness.

Two semantic readings of "y is an S-assuring successor of x" are provided.

``semantic_assuring`` (the pool reading) asks that xRy and that every pool
formula A with x forcing ~A |> \\/~S is forced at y together with []A.

``assures`` (the strong reading) asks that xRy and that every world v with
y S_x v forces every member of S.  It implies the pool reading for every
pool, and it is the reading in which the labelling lemmas are checked: the
lemmas speak about maximal consistent sets, and a world's S_x-cone is the
semantic counterpart of the formulas such a set must respect.

Labels are frozensets of formulas.  The empty disjunction is false.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from .decide import Catalogue
from .formula import BOT, AdequateSet, Box, Formula, Rhd, big_or, neg, random_formula, sort_key, subformulas, to_string
from .veltman import OrdinaryModel, bits, check_condition

Label = frozenset

HARNESS_PRINCIPLES = {
    "P": "P",
    "Pfull": "P",
    "M": "M",
    "M0": "M0",
    "R": "R",
    "Rfull": "R",
    "RTrans": "R",
}


def disjunction_of_negations(S: Iterable[Formula]) -> Formula:
    return big_or(neg(s) for s in sorted(S, key=sort_key))


def _world(m: OrdinaryModel, x) -> int:
    return x if isinstance(x, int) else m.pos[x]


def semantic_assuring(m: OrdinaryModel, x, y, S: Iterable[Formula], pool: Iterable[Formula]) -> bool:
    """Pool reading of the assuring-successor relation."""
    xi, yi = _world(m, x), _world(m, y)
    if not m.R[xi] >> yi & 1:
        return False
    disj = disjunction_of_negations(S)
    for A in pool:
        if m.truth(Rhd(neg(A), disj)) >> xi & 1:
            if not (m.truth(A) >> yi & 1 and m.truth(Box(A)) >> yi & 1):
                return False
    return True


def assuring_failure(m: OrdinaryModel, x, y, S: Iterable[Formula]):
    """None if ``assures`` holds, else (world, formula) refuting it, world None if not xRy."""
    xi, yi = _world(m, x), _world(m, y)
    if not m.R[xi] >> yi & 1:
        return None, None
    cone = m.S[xi][yi]
    for s in sorted(S, key=sort_key):
        bad = cone & ~m.truth(s)
        if bad:
            return m.worlds[(bad & -bad).bit_length() - 1], s
    return None


def assures(m: OrdinaryModel, x, y, S: Iterable[Formula]) -> bool:
    """Strong reading: xRy and every S_x-successor of y forces all of S."""
    return assuring_failure(m, x, y, S) is None


def boxdotset(m: OrdinaryModel, x, T: Iterable[Formula], pool: Iterable[Formula]) -> frozenset:
    """{A, []A : A in pool, x forces ~A |> \\/~T}."""
    xi = _world(m, x)
    disj = disjunction_of_negations(T)
    out = set()
    for A in pool:
        if m.truth(Rhd(neg(A), disj)) >> xi & 1:
            out.add(A)
            out.add(Box(A))
    return frozenset(out)


def boxset(m: OrdinaryModel, x, T: Iterable[Formula], pool: Iterable[Formula]) -> frozenset:
    """The boxed half of :func:`boxdotset`."""
    xi = _world(m, x)
    disj = disjunction_of_negations(T)
    return frozenset(Box(A) for A in pool if m.truth(Rhd(neg(A), disj)) >> xi & 1)


def box_each(T: Iterable[Formula]) -> frozenset:
    return frozenset(Box(t) for t in T)


# -- Phi-relative closures ----------------------------------------------------

def phi_boxdotset(theory: int, T: Iterable[Formula], phi: AdequateSet, oracle: Catalogue) -> frozenset:
    """{A, []A in Phi : the oracle proves ~A |> \\/~T from the theory}; []A only if in Phi."""
    disj = disjunction_of_negations(T)
    out = set()
    for A in phi.formulas:
        if oracle.proves(theory, Rhd(neg(A), disj)):
            out.add(A)
            if Box(A) in phi.index:
                out.add(Box(A))
    return frozenset(out)


def full_closure_phi(S: Iterable[Formula], gamma, phi: AdequateSet, oracle: Catalogue) -> frozenset:
    """Least set inside Phi containing S and closed under the box-dot rule at gamma.

    Consequences and necessitations of members need no separate rule: for
    s in the set, ~s |> \\/~S holds by J1, so s and []s are added.
    """
    theory = gamma if isinstance(gamma, int) else gamma.members
    cur = frozenset(S)
    outside = [f for f in cur if f not in phi.index]
    if outside:
        raise ValueError(f"{to_string(outside[0])} is not in the adequate set")
    while True:
        nxt = cur | phi_boxdotset(theory, cur, phi, oracle)
        if nxt == cur:
            return cur
        cur = nxt


# -- Q-label sequences --------------------------------------------------------

@dataclass(frozen=True)
class QLabelSequence:
    chain: tuple  # w_n .. w_0
    base_labels: tuple  # S_n .. S_1
    pivot: Formula
    q: tuple  # Q_1(B) .. Q_n(B)

    def Q(self, j: int) -> frozenset:
        return self.q[j - 1]


BoxDot = Callable[[object, frozenset], frozenset]


def model_boxdot(m: OrdinaryModel, pool: Iterable[Formula]) -> BoxDot:
    pool = list(pool)
    return lambda w, T: boxdotset(m, w, T, pool)


def _chain_parts(chain: Sequence, base_labels: Sequence):
    if len(chain) != len(base_labels) + 1:
        raise ValueError(f"chain of {len(chain)} worlds needs {len(chain) - 1} labels, got {len(base_labels)}")
    n = len(base_labels)
    w = {i: chain[n - i] for i in range(n + 1)}
    S = {j: frozenset(base_labels[n - j]) for j in range(1, n + 1)}
    return n, w, S


def q_labels(chain: Sequence, base_labels: Sequence, B: Formula, boxdot: BoxDot) -> QLabelSequence:
    """Q_1 = S_1 + {[]~B}, and Q_{j+1} = S_{j+1} + {[]~B} + box-dot of w_j at Q_j.

    ``chain`` lists w_n .. w_0 and ``base_labels`` lists S_n .. S_1.
    """
    n, w, S = _chain_parts(chain, base_labels)
    pin = frozenset([Box(neg(B))])
    q = []
    for j in range(1, n + 1):
        cur = S[j] | pin
        if j > 1:
            cur |= boxdot(w[j - 1], q[-1])
        q.append(cur)
    return QLabelSequence(tuple(chain), tuple(frozenset(s) for s in base_labels), B, tuple(q))


def unfold_q(j: int):
    """Nested expression for Q_j: ("union", j, inner) where inner is None or Q_{j-1}'s expression."""
    if j < 1:
        raise ValueError("Q labels start at index 1")
    expr = ("union", 1, None)
    for k in range(2, j + 1):
        expr = ("union", k, ("boxdot", k - 1, expr))
    return expr


def eval_q_expr(expr, chain: Sequence, base_labels: Sequence, B: Formula, boxdot: BoxDot) -> frozenset:
    _, w, S = _chain_parts(chain, base_labels)

    def ev(e) -> frozenset:
        _, k, inner = e
        out = S[k] | {Box(neg(B))}
        if inner is not None:
            _, i, sub = inner
            out |= boxdot(w[i], ev(sub))
        return frozenset(out)

    return ev(expr)


def format_q_expr(expr) -> str:
    """ASCII rendering, e.g. ``S2 + {[]~B} + dot(w1, S1 + {[]~B})``."""
    _, k, inner = expr
    text = f"S{k} + {{[]~B}}"
    if inner is not None:
        text += f" + dot(w{inner[1]}, {format_q_expr(inner[2])})"
    return text


# -- labelling-lemma harness --------------------------------------------------

def _cone_theory(m: OrdinaryModel, cone: int, pool: Sequence[Formula]) -> list[Formula]:
    """Pool formulas forced at every world of ``cone``."""
    return [A for A in pool if cone & ~m.truth(A) == 0]


def _sample_label(rng: random.Random, candidates: Sequence[Formula]) -> frozenset:
    if not candidates or rng.random() < 0.2:
        return frozenset()
    return frozenset(A for A in candidates if rng.random() < 0.5)


def _chains(m: OrdinaryModel, length: int) -> list[tuple[int, ...]]:
    out = [(x,) for x in range(len(m.worlds))]
    for _ in range(length - 1):
        out = [c + (y,) for c in out for y in bits(m.R[c[-1]])]
    return out


def _conclusion(principle: str, m: OrdinaryModel, chain, S, T, pool):
    """(x, z, label) the lemma says must be an assuring pair, or a failing subset test."""
    if principle in ("M",):
        x, y = chain
        return x, y, S | boxset(m, y, (), pool)
    if principle == "M0":
        x, y, z = chain
        return x, z, S | boxset(m, y, (), pool)
    x, y, z = chain
    if principle == "P":
        return x, z, S | boxdotset(m, y, T, pool)
    if principle == "Pfull":
        return x, z, T
    if principle == "R":
        return x, z, S | boxset(m, y, T, pool)
    if principle == "Rfull":
        return x, z, S | box_each(T)
    raise ValueError(principle)


def harness_labelling(
    principle: str,
    m: OrdinaryModel,
    pool: Iterable[Formula],
    trials: int = 20,
    rng: random.Random | None = None,
    allow_violating: bool = False,
) -> list[dict]:
    """Violations of a labelling lemma on ``m``; empty when the lemma holds.

    Each chain is tried with empty labels first, then with ``trials``
    sampled labels built from formulas that hold on the relevant
    S-cones, so the premises are met often.  Premises and conclusions use
    the strong reading.
    """
    if principle not in HARNESS_PRINCIPLES:
        raise ValueError(f"unknown principle {principle!r}; expected one of {', '.join(HARNESS_PRINCIPLES)}")
    cond = HARNESS_PRINCIPLES[principle]
    if not allow_violating:
        bad = check_condition(m, cond)
        if bad is not None:
            raise ValueError(f"frame violates condition {cond} at {bad}")
    rng = rng or random.Random(0)
    pool = sorted(set(pool), key=sort_key)
    names = m.worlds
    if principle == "M":
        chains = _chains(m, 2)
    elif principle == "RTrans":
        chains = _chains(m, 2)
    else:
        chains = _chains(m, 3)
    violations: list[dict] = []
    seen = set()

    def report(chain, S, T, formula, where=None):
        key = (chain, S, T, formula)
        if key in seen:
            return
        seen.add(key)
        entry = {
            "chain": [names[i] for i in chain],
            "labels": {
                "S": sorted(to_string(f) for f in S),
                "T": sorted(to_string(f) for f in T),
            },
            "failing formula": to_string(formula),
        }
        if where is not None:
            entry["world"] = where
        violations.append(entry)

    for chain in chains:
        for trial in range(trials + 1):
            x, y = chain[0], chain[1]
            if trial == 0:
                S, T = frozenset(), frozenset()
            else:
                S = _sample_label(rng, _cone_theory(m, m.S[x][y], pool))
                if len(chain) == 3:
                    T = _sample_label(rng, _cone_theory(m, m.S[y][chain[2]], pool))
                else:
                    T = _sample_label(rng, pool)
            if not assures(m, x, y, S):
                continue
            if len(chain) == 3 and principle not in ("M0",) and not assures(m, y, chain[2], T):
                continue
            if principle == "RTrans":
                lhs = boxset(m, x, S | boxset(m, y, T, pool), pool)
                rhs = boxset(m, y, T, pool)
                for f in sorted(lhs - rhs, key=sort_key):
                    report(chain, S, T, f)
                continue
            a, b, lab = _conclusion(principle, m, chain, S, T, pool)
            fail = assuring_failure(m, a, b, lab)
            if fail is not None:
                where, f = fail
                report(chain, S, T, f if f is not None else BOT, where)
    return violations


def random_pool(rng: random.Random, size: int = 6, vars=("p", "q"), depth: int = 2) -> list[Formula]:
    """Up to ``size`` distinct random formulas, smallest first."""
    pool: set[Formula] = set()
    for _ in range(size * 4):
        if len(pool) >= size:
            break
        pool.add(random_formula(rng, vars, depth))
    return sorted(pool, key=sort_key)[:size]


# -- witness searches for ILW ----------------------------------------------------

def witness_w_probs(m: OrdinaryModel, x, A: Formula, B: Formula):
    """A successor y of x forcing A with y assured at {[]~A, ~B}; None if none exists.

    Requires x to refute A |> B.
    """
    xi = _world(m, x)
    if m.truth(Rhd(A, B)) >> xi & 1:
        raise ValueError(f"precondition fails: {m.worlds[xi]} forces {to_string(Rhd(A, B))}")
    label = frozenset([Box(neg(A)), neg(B)])
    for y in bits(m.R[xi] & m.truth(A)):
        if assures(m, xi, y, label):
            return m.worlds[y]
    return None


def witness_w_defies(m: OrdinaryModel, x, y, S: Iterable[Formula], B: Formula, C: Formula):
    """A world z forcing C and []~C with z assured at S + {[]~B}; None if none exists.

    Requires x to force B |> C, y to force B and y to be S-assured above x.
    """
    xi, yi = _world(m, x), _world(m, y)
    S = frozenset(S)
    if not m.truth(Rhd(B, C)) >> xi & 1:
        raise ValueError(f"precondition fails: {m.worlds[xi]} does not force {to_string(Rhd(B, C))}")
    if not m.truth(B) >> yi & 1 or not assures(m, xi, yi, S):
        raise ValueError("precondition fails: y is not an S-assured successor forcing B")
    label = S | {Box(neg(B))}
    cand = m.R[xi] & m.truth(C) & m.truth(Box(neg(C)))
    for z in bits(cand):
        if assures(m, xi, z, label):
            return m.worlds[z]
    return None


def rhd_pool(f: Formula) -> list[tuple[Formula, Formula]]:
    """Argument pairs of the |>-subformulas of f."""
    return sorted(((g.left, g.right) for g in subformulas(f) if isinstance(g, Rhd)), key=lambda p: (sort_key(p[0]), sort_key(p[1])))
