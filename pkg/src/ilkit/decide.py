"""Bounded model search, and the finite-model decision procedure for ILW.

Bounded search
    Frames are enumerated by size, one per isomorphism class.  R runs over
    transitive irreflexive relations; each S_w runs over the preorders on
    R[w] that contain R restricted to R[w].  Frames failing the conditions
    of the requested logic are skipped.  All valuations of a frame are evaluated at
    once: the truth value of a formula at a world is an int whose bit t
    says whether it holds under valuation number t.

ILW procedure
    ``ilw_decide`` first looks for a bounded countermodel.  If one exists,
    it builds the model whose worlds are pairs (sequence of labels, theory),
    using the adequate set of the negated goal.  Only worlds demanded by a
    witness search are materialised.  Provability inside the construction is
    answered by a :class:`Catalogue`: the Phi-theories realised in all ILW
    models up to a size, with F derivable from Gamma iff F holds wherever
    Gamma is realised.  The truth lemma is checked on the result before it
    is returned.
"""
from __future__ import annotations

import itertools
import os
from importlib import resources
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .formula import (
    BOT,
    AdequateSet,
    Bot,
    Box,
    Formula,
    Implies,
    Rhd,
    Var,
    adequate_set,
    big_and,
    big_or,
    neg,
    parse,
    sort_key,
    to_string,
    variables,
)
from .veltman import OrdinaryModel, bits, check_condition, closure_masks, logic_principles, validate

DEFAULT_CEILING = 5


def ceiling() -> int:
    """Largest frame size the bounded search accepts (env ``VELTMAN_CEILING``)."""
    return int(os.environ.get("VELTMAN_CEILING", DEFAULT_CEILING))


class BoundError(ValueError):
    pass


class DecisionError(RuntimeError):
    """The construction could not be completed within the catalogue bound."""


# -- frame enumeration --------------------------------------------------------

def _permute(succ: Sequence[int], perm: Sequence[int]) -> tuple[int, ...]:
    out = [0] * len(succ)
    for i, s in enumerate(succ):
        m = 0
        for j in bits(s):
            m |= 1 << perm[j]
        out[perm[i]] = m
    return tuple(out)


def _upward(succ: Sequence[int]) -> bool:
    return all(s & ((1 << (i + 1)) - 1) == 0 for i, s in enumerate(succ))


@lru_cache(maxsize=None)
def skeletons(n: int) -> tuple[tuple[int, ...], ...]:
    """Transitive irreflexive relations on n points, one per isomorphism class.

    Representatives only have edges i -> j with i < j and are the least
    such relabelling, so world 0 is always a root.
    """
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    perms = list(itertools.permutations(range(n)))
    seen = set()
    out = []
    for sub in range(1 << len(pairs)):
        succ = [0] * n
        for k, (i, j) in enumerate(pairs):
            if sub >> k & 1:
                succ[i] |= 1 << j
        if closure_masks(succ) != succ:
            continue
        best = None
        for perm in perms:
            cand = _permute(succ, perm)
            if _upward(cand) and (best is None or cand < best):
                best = cand
        if best not in seen:
            seen.add(best)
            out.append(best)
    return tuple(sorted(out))


@lru_cache(maxsize=None)
def s_options(R: tuple[int, ...], w: int) -> tuple[tuple[int, ...], ...]:
    """All admissible S_w, as rows of successor masks, in a fixed order."""
    n = len(R)
    succ = list(bits(R[w]))
    base = [0] * n
    for u in succ:
        base[u] = (1 << u) | (R[u] & R[w])
    start = tuple(base)
    seen = {start}
    todo = [start]
    while todo:
        s = todo.pop()
        for u in succ:
            for v in succ:
                if not s[u] >> v & 1:
                    t = list(s)
                    t[u] |= 1 << v
                    t = tuple(closure_masks(t))
                    if t not in seen:
                        seen.add(t)
                        todo.append(t)
    return tuple(sorted(seen))


@dataclass(frozen=True)
class Frame:
    R: tuple[int, ...]
    S: tuple[tuple[int, ...], ...]

    @property
    def n(self) -> int:
        return len(self.R)

    def model(self, val: dict[str, int] | None = None, names: Sequence[str] | None = None) -> OrdinaryModel:
        names = list(names) if names is not None else [f"w{i}" for i in range(self.n)]
        return OrdinaryModel.from_masks(names, self.R, self.S, val or {})


def _automorphisms(R: tuple[int, ...]) -> list[tuple[int, ...]]:
    return [p for p in itertools.permutations(range(len(R))) if _permute(R, p) == R]


def _permute_s(S: tuple[tuple[int, ...], ...], perm: Sequence[int]) -> tuple[tuple[int, ...], ...]:
    out: list[tuple[int, ...]] = [()] * len(S)
    for w, row in enumerate(S):
        out[perm[w]] = _permute(row, perm)
    return tuple(out)


@lru_cache(maxsize=None)
def frames(n: int, logic: str = "IL") -> tuple[Frame, ...]:
    """Frames of size n for ``logic`` in the documented enumeration order.

    One frame per isomorphism class: S choices that a symmetry of the
    skeleton maps onto an earlier choice are skipped.
    """
    principles = logic_principles(logic)
    out = []
    for R in skeletons(n):
        autos = _automorphisms(R)
        seen: set = set()
        for S in itertools.product(*(s_options(R, w) for w in range(n))):
            if len(autos) > 1:
                key = min(_permute_s(S, p) for p in autos)
                if key in seen:
                    continue
                seen.add(key)
            fr = Frame(R, S)
            if principles:
                m = fr.model()
                if any(check_condition(m, p) is not None for p in principles):
                    continue
            out.append(fr)
    return tuple(out)


# -- bit-parallel evaluation --------------------------------------------------

@lru_cache(maxsize=None)
def _patterns(m: int) -> tuple[int, ...]:
    """Bit t of pattern i is bit i of t, for t < 2**m."""
    size = 1 << m
    out = []
    for i in range(m):
        half = 1 << i
        pat = ((1 << half) - 1) << half
        length = half << 1
        while length < size:
            pat |= pat << length
            length <<= 1
        out.append(pat)
    return tuple(out)


class FrameEval:
    """Truth of formulas on one frame under all valuations of ``vars`` at once.

    Valuation number t makes variable j true at world i iff bit j*n+i of t
    is set.
    """

    def __init__(self, frame: Frame, vars: Sequence[str]) -> None:
        self.frame = frame
        self.n = frame.n
        self.vars = list(vars)
        m = self.n * len(self.vars)
        self.V = 1 << m
        self.full = (1 << self.V) - 1
        pats = _patterns(m)
        self.atoms = {p: [pats[j * self.n + i] for i in range(self.n)] for j, p in enumerate(self.vars)}
        self.memo: dict[Formula, list[int]] = {}

    def valuation(self, t: int) -> dict[str, int]:
        """World masks of valuation number t."""
        out = {}
        for j, p in enumerate(self.vars):
            out[p] = (t >> (j * self.n)) & ((1 << self.n) - 1)
        return out

    def truth(self, f: Formula) -> list[int]:
        hit = self.memo.get(f)
        if hit is not None:
            return hit
        n, full = self.n, self.full
        R, S = self.frame.R, self.frame.S
        if isinstance(f, Bot):
            out = [0] * n
        elif isinstance(f, Var):
            out = self.atoms.get(f.name) or [0] * n
        elif isinstance(f, Implies):
            a, b = self.truth(f.left), self.truth(f.right)
            out = [(~a[i] | b[i]) & full for i in range(n)]
        elif isinstance(f, Box):
            a = self.truth(f.inner)
            out = []
            for w in range(n):
                acc = full
                for u in bits(R[w]):
                    acc &= a[u]
                out.append(acc)
        elif isinstance(f, Rhd):
            a, b = self.truth(f.left), self.truth(f.right)
            out = []
            for w in range(n):
                acc = full
                for u in bits(R[w]):
                    rescue = 0
                    for v in bits(S[w][u]):
                        rescue |= b[v]
                    acc &= ~a[u] | rescue
                out.append(acc & full)
        else:
            raise TypeError(f"cannot evaluate {f!r}")
        self.memo[f] = out
        return out


# -- results ------------------------------------------------------------------

SAT = "sat"
UNSAT = "unsat-up-to-bound"
PROVABLE = "provable-up-to-bound"
COUNTERMODEL = "countermodel"


@dataclass
class DecisionResult:
    verdict: str
    formula: Formula
    logic: str
    bound: int
    model: OrdinaryModel | None = None
    designated: str | None = None
    frames_checked: int = 0
    construction: "IlwConstruction | None" = None
    catalogue_bound: int | None = None

    @property
    def has_model(self) -> bool:
        return self.model is not None

    def to_json(self) -> dict:
        out = {
            "verdict": self.verdict,
            "formula": to_string(self.formula),
            "logic": self.logic,
            "bound": self.bound,
            "frames_checked": self.frames_checked,
        }
        if self.model is not None:
            out["designated"] = self.designated
            out["model"] = self.model.to_json()
        if self.catalogue_bound is not None:
            out["catalogue_bound"] = self.catalogue_bound
        return out


def _check_bound(max_worlds: int) -> None:
    if max_worlds > ceiling():
        raise BoundError(f"bound {max_worlds} exceeds the search ceiling {ceiling()} (set VELTMAN_CEILING)")
    if max_worlds < 1:
        raise BoundError("bound must be at least 1")


def sat_bounded(f: Formula, logic: str = "IL", max_worlds: int = 4) -> DecisionResult:
    """First model (by size, frame, valuation, world) forcing ``f`` somewhere.

    Returns a ``sat`` result carrying the model, or ``unsat-up-to-bound``
    when no frame of at most ``max_worlds`` worlds has one.
    """
    _check_bound(max_worlds)
    vars = variables(f)
    checked = 0
    for n in range(1, max_worlds + 1):
        for fr in frames(n, logic):
            checked += 1
            ev = FrameEval(fr, vars)
            tr = ev.truth(f)
            best = None
            for i, mask in enumerate(tr):
                if mask:
                    t = (mask & -mask).bit_length() - 1
                    if best is None or t < best[0]:
                        best = (t, i)
            if best is not None:
                t, i = best
                model = fr.model(ev.valuation(t))
                return DecisionResult(SAT, f, logic, max_worlds, model, model.worlds[i], checked)
    return DecisionResult(UNSAT, f, logic, max_worlds, frames_checked=checked)


def decide_bounded(g: Formula, logic: str = "IL", max_worlds: int = 4) -> DecisionResult:
    """Validity of ``g`` up to the bound, via a search for a model of its negation."""
    r = sat_bounded(neg(g), logic, max_worlds)
    verdict = COUNTERMODEL if r.verdict == SAT else PROVABLE
    return DecisionResult(verdict, g, logic, max_worlds, r.model, r.designated, r.frames_checked)


@dataclass(frozen=True)
class OracleAnswer:
    consistent: bool
    bound: int
    model: OrdinaryModel | None = None

    def __str__(self) -> str:
        return "consistent" if self.consistent else f"inconsistent-up-to-bound({self.bound})"


def default_oracle(formulas: Formula | Iterable[Formula], bound: int = 4, logic: str = "ILW") -> OracleAnswer:
    """Consistency of a finite set as bounded satisfiability of its conjunction."""
    fs = [formulas] if isinstance(formulas, Formula) else list(formulas)
    r = sat_bounded(big_and(fs), logic, bound)
    return OracleAnswer(r.verdict == SAT, bound, r.model)


# -- catalogue of realised Phi-theories ---------------------------------------

def _int_to_bits(x: int, V: int) -> np.ndarray:
    nbytes = (V + 7) // 8
    raw = np.frombuffer(x.to_bytes(nbytes, "little"), dtype=np.uint8)
    return np.unpackbits(raw, bitorder="little")[:V]


def _bits_to_int(row: np.ndarray) -> int:
    return int.from_bytes(np.packbits(row, bitorder="little").tobytes(), "little")


class Catalogue:
    """Phi-theories of all worlds in all ``logic`` models with at most ``bound`` worlds.

    ``proves(gamma, F)`` holds iff F is true at every realisation of the
    theory ``gamma``.  This is the bounded stand-in for derivability from a
    maximal consistent subset of Phi.
    """

    def __init__(self, phi: AdequateSet, bound: int, logic: str = "ILW") -> None:
        _check_bound(bound)
        self.phi = phi
        self.bound = bound
        self.logic = logic
        self.vars = sorted({p for f in phi for p in variables(f)})
        self.evals: list[FrameEval] = []
        self.where: dict[int, list[tuple[int, int, int]]] = {}
        self.order: list[int] = []
        self._proves: dict[tuple[int, Formula], bool] = {}
        for n in range(1, bound + 1):
            for fr in frames(n, logic):
                self._add_frame(fr)

    def _add_frame(self, fr: Frame) -> None:
        ev = FrameEval(fr, self.vars)
        pos = len(self.evals)
        self.evals.append(ev)
        rows = [ev.truth(f) for f in self.phi.formulas]
        V = ev.V
        for i in range(fr.n):
            mat = np.stack([_int_to_bits(r[i], V) for r in rows]) if rows else np.zeros((0, V), np.uint8)
            cols = np.ascontiguousarray(np.packbits(mat, axis=0, bitorder="little").T)
            uniq, first, inverse = np.unique(cols, axis=0, return_index=True, return_inverse=True)
            inverse = inverse.reshape(-1)
            for k in np.argsort(first, kind="stable"):
                theory = int.from_bytes(uniq[k].tobytes(), "little")
                valmask = _bits_to_int((inverse == k).astype(np.uint8))
                if theory not in self.where:
                    self.where[theory] = []
                    self.order.append(theory)
                self.where[theory].append((pos, i, valmask))
        ev.memo.clear()

    def __len__(self) -> int:
        return len(self.order)

    def __contains__(self, theory: int) -> bool:
        return theory in self.where

    def proves(self, gamma: int, f: Formula) -> bool:
        key = (gamma, f)
        hit = self._proves.get(key)
        if hit is not None:
            return hit
        out = True
        for pos, i, valmask in self.where[gamma]:
            if valmask & ~self.evals[pos].truth(f)[i]:
                out = False
                break
        self._proves[key] = out
        return out

    def realisation(self, theory: int) -> tuple[OrdinaryModel, str]:
        pos, i, valmask = self.where[theory][0]
        ev = self.evals[pos]
        t = (valmask & -valmask).bit_length() - 1
        model = ev.frame.model(ev.valuation(t))
        return model, model.worlds[i]


@dataclass(frozen=True)
class PhiMCS:
    phi: AdequateSet
    members: int

    def __contains__(self, f: Formula) -> bool:
        i = self.phi.index.get(f)
        return i is not None and bool(self.members >> i & 1)

    def formulas(self) -> list[Formula]:
        return self.phi.members(self.members)

    def box_count(self) -> int:
        return sum(1 for i in self.phi.boxed if self.members >> i & 1)

    def is_maximal(self) -> bool:
        return all((self.members >> i & 1) != (self.members >> j & 1) for i, j in enumerate(self.phi.negation))


def _mask(x) -> int:
    return x.members if isinstance(x, PhiMCS) else x


def _label_mask(phi: AdequateSet, S) -> int:
    if isinstance(S, int):
        return S
    return phi.mask(S)


def _boxes(phi: AdequateSet, theory: int) -> int:
    out = 0
    for i in phi.boxed:
        out |= theory & (1 << i)
    return out


class PhiLogic:
    """Phi-relative assuring successors and witness searches over a catalogue."""

    def __init__(self, catalogue: Catalogue) -> None:
        self.cat = catalogue
        self.phi = catalogue.phi
        phi = self.phi
        # each boxed member read as []~A with ~A its body
        self.box_parts = [(b, phi.index[phi.formulas[b].inner], neg(phi.formulas[b].inner)) for b in phi.boxed]
        self._req: dict[tuple[int, int], int] = {}

    def assuring_formula(self, A: Formula, S: int) -> Formula:
        label = sorted(self.phi.members(S), key=sort_key)
        return Rhd(A, big_or(neg(s) for s in label))

    def required(self, gamma: int, S: int) -> int:
        """Members forced into every <S,Phi>-assuring successor of gamma."""
        key = (gamma, S)
        hit = self._req.get(key)
        if hit is None:
            hit = 0
            for b, body, A in self.box_parts:
                if self.cat.proves(gamma, self.assuring_formula(A, S)):
                    hit |= (1 << b) | (1 << body)
            self._req[key] = hit
        return hit

    def assuring(self, gamma: int, S: int, delta: int) -> bool:
        if self.required(gamma, S) & ~delta:
            return False
        return bool(_boxes(self.phi, delta) & ~_boxes(self.phi, gamma))

    def find(self, gamma: int, S: int, must: int) -> int | None:
        """First catalogued theory containing ``must`` that is S-assuring above gamma."""
        for delta in self.cat.order:
            if must & ~delta == 0 and self.assuring(gamma, S, delta):
                return delta
        return None


def phi_assuring(gamma, S, delta, oracle: Catalogue) -> bool:
    """The finite assuring-successor relation, with provability from ``oracle``."""
    logic = PhiLogic(oracle) if isinstance(oracle, Catalogue) else oracle
    return logic.assuring(_mask(gamma), _label_mask(logic.phi, S), _mask(delta))


def _logic_of(oracle) -> PhiLogic:
    return PhiLogic(oracle) if isinstance(oracle, Catalogue) else oracle


def witness_wfin_probs(gamma, A: Formula, B: Formula, oracle) -> PhiMCS | None:
    """Delta containing A with gamma <{~B, []~A}, Phi>-assuring below it."""
    logic = _logic_of(oracle)
    phi = logic.phi
    g = _mask(gamma)
    rhd = Rhd(A, B)
    if rhd in phi.index:
        if g >> phi.index[rhd] & 1:
            raise ValueError(f"precondition fails: {to_string(rhd)} is in the theory")
    elif logic.cat.proves(g, rhd):
        raise ValueError(f"precondition fails: {to_string(rhd)} is derivable")
    label = phi.mask([neg(B), Box(neg(A))])
    hit = logic.find(g, label, 1 << phi.index[A])
    return None if hit is None else PhiMCS(phi, hit)


def witness_wfin_defies(gamma, S, delta, A: Formula, B: Formula, oracle) -> PhiMCS | None:
    """Delta' containing B with gamma <S + {[]~A}, Phi>-assuring below it."""
    logic = _logic_of(oracle)
    phi = logic.phi
    g, d = _mask(gamma), _mask(delta)
    S = _label_mask(phi, S)
    if not g >> phi.index[Rhd(A, B)] & 1:
        raise ValueError("precondition fails: A |> B is not in the theory")
    if not d >> phi.index[A] & 1 or not logic.assuring(g, S, d):
        raise ValueError("precondition fails: delta is not an S-assuring successor containing A")
    hit = logic.find(g, S | (1 << phi.index[Box(neg(A))]), 1 << phi.index[B])
    return None if hit is None else PhiMCS(phi, hit)


# -- the ILW model construction ----------------------------------------------

@dataclass
class IlwConstruction:
    phi: AdequateSet
    root: int
    worlds: list[tuple[tuple[int, ...], int]]
    model: OrdinaryModel
    catalogue: Catalogue

    def theory(self, i: int) -> PhiMCS:
        return PhiMCS(self.phi, self.worlds[i][1])

    def label_text(self, i: int) -> list[list[str]]:
        return [[to_string(f) for f in self.phi.members(S)] for S in self.worlds[i][0]]


class _Builder:
    def __init__(self, logic: PhiLogic, root: int, max_worlds: int) -> None:
        self.logic = logic
        self.phi = logic.phi
        self.worlds: list[tuple[tuple[int, ...], int]] = [((), root)]
        self.key = {((), root): 0}
        self.max_worlds = max_worlds
        self.root_boxes = _boxes(self.phi, root)
        self._R: dict[tuple[int, int], bool] = {}
        phi = self.phi
        self.rhd_parts = [(r, phi.formulas[r].left, phi.formulas[r].right) for r in phi.rhd]
        self.idx = phi.index

    def height(self, theory: int) -> int:
        return bin(_boxes(self.phi, theory)).count("1") - bin(self.root_boxes).count("1")

    def add(self, sigma: tuple[int, ...], theory: int) -> bool:
        k = (sigma, theory)
        if k in self.key:
            return False
        if len(sigma) > self.height(theory):
            raise DecisionError("label sequence longer than the height of its theory")
        if len(self.worlds) >= self.max_worlds:
            raise DecisionError(f"construction exceeded {self.max_worlds} worlds")
        self.key[k] = len(self.worlds)
        self.worlds.append(k)
        return True

    def R(self, w: int, v: int) -> bool:
        k = (w, v)
        hit = self._R.get(k)
        if hit is None:
            sw, tw = self.worlds[w]
            sv, tv = self.worlds[v]
            hit = len(sv) > len(sw) and sv[: len(sw)] == sw and self.logic.assuring(tw, sv[len(sw)], tv)
            self._R[k] = hit
        return hit

    def S(self, w: int, x: int, y: int) -> bool:
        if not (self.R(w, x) and self.R(w, y)):
            return False
        if x == y or self.R(x, y):
            return True
        d = len(self.worlds[w][0])
        Sx = self.worlds[x][0][d]
        Ty = self.worlds[y][0][d]
        if Sx & ~Ty:
            return False
        tw, tx = self.worlds[w][1], self.worlds[x][1]
        for r, C, _ in self.rhd_parts:
            if not tw >> r & 1:
                continue
            bc = self.idx[Box(neg(C))]
            if Ty >> bc & 1 and (tx >> self.idx[C] & 1 or not tx >> bc & 1):
                return True
        return False

    def _child(self, w: int, label: int, theory: int | None, what: str) -> bool:
        if theory is None:
            raise DecisionError(f"no catalogued witness for {what}")
        sigma = self.worlds[w][0] + (label,)
        return self.add(sigma, theory)

    def expand_existential(self, w: int) -> bool:
        """Witnesses for every ~(A |> B) and every ~[]X in the theory of w."""
        phi, idx = self.phi, self.idx
        tw = self.worlds[w][1]
        changed = False
        for r, A, B in self.rhd_parts:
            if tw >> r & 1:
                continue
            label = (1 << idx[neg(B)]) | (1 << idx[Box(neg(A))])
            delta = self.logic.find(tw, label, 1 << idx[A])
            changed |= self._child(w, label, delta, f"~({to_string(Rhd(A, B))})")
        for b in phi.boxed:
            if tw >> b & 1:
                continue
            X = phi.formulas[b].inner
            label = (1 << b) | (1 << idx[neg(BOT)])
            delta = self.logic.find(tw, label, 1 << idx[neg(X)])
            changed |= self._child(w, label, delta, f"~[]{to_string(X)}")
        return changed

    def expand_universal(self) -> bool:
        """For A |> B at w and wRv with A at v, make sure some vS_wu has B."""
        idx = self.idx
        changed = False
        w = 0
        while w < len(self.worlds):
            tw = self.worlds[w][1]
            d = len(self.worlds[w][0])
            for r, A, B in self.rhd_parts:
                if not tw >> r & 1:
                    continue
                ia, ib = idx[A], idx[B]
                for v in range(len(self.worlds)):
                    if not (self.worlds[v][1] >> ia & 1) or not self.R(w, v):
                        continue
                    if any(self.worlds[u][1] >> ib & 1 and self.S(w, v, u) for u in range(len(self.worlds))):
                        continue
                    S = self.worlds[v][0][d]
                    label = S | (1 << idx[Box(neg(A))])
                    delta = self.logic.find(tw, label, 1 << ib)
                    if not self._child(w, label, delta, f"{to_string(Rhd(A, B))} at a successor"):
                        raise DecisionError("witness world exists but does not discharge its demand")
                    changed = True
            w += 1
        return changed

    def run(self) -> None:
        done = 0
        while True:
            while done < len(self.worlds):
                self.expand_existential(done)
                done += 1
            if not self.expand_universal() and done == len(self.worlds):
                return

    def model(self, vars: Sequence[str]) -> OrdinaryModel:
        n = len(self.worlds)
        names = [f"w{i}" for i in range(n)]
        R = [0] * n
        for w in range(n):
            for v in range(n):
                if self.R(w, v):
                    R[w] |= 1 << v
        S = [[0] * n for _ in range(n)]
        for w in range(n):
            succ = list(bits(R[w]))
            for x in succ:
                for y in succ:
                    if self.S(w, x, y):
                        S[w][x] |= 1 << y
        val = {}
        for p in vars:
            i = self.idx.get(Var(p))
            m = 0
            if i is not None:
                for w in range(n):
                    if self.worlds[w][1] >> i & 1:
                        m |= 1 << w
            val[p] = m
        return OrdinaryModel.from_masks(names, R, S, val)


def verify_truth_lemma(construction: IlwConstruction, model: OrdinaryModel | None = None):
    """None if membership in each world's theory matches forcing, else (world, formula)."""
    model = model or construction.model
    model._memo.clear()
    for i, (_, theory) in enumerate(construction.worlds):
        for j, f in enumerate(construction.phi.formulas):
            if bool(theory >> j & 1) != bool(model.truth(f) >> i & 1):
                return model.worlds[i], f
    return None


def build_ilw_model(root: int, catalogue: Catalogue, max_worlds: int = 2000) -> IlwConstruction:
    """Materialise the witness-demanded part of the model rooted at ``root``."""
    if root not in catalogue:
        raise ValueError("root theory is not realised in the catalogue")
    b = _Builder(PhiLogic(catalogue), root, max_worlds)
    b.run()
    model = b.model(catalogue.vars)
    return IlwConstruction(catalogue.phi, root, b.worlds, model, catalogue)


def ilw_decide(
    g: Formula,
    bound: int = 4,
    oracle: Catalogue | None = None,
    max_worlds: int = 2000,
) -> DecisionResult:
    """Decide ILW-validity of ``g`` up to ``bound``, with an ILW countermodel if not valid.

    The catalogue starts at the size of the smallest bounded countermodel
    and grows by one world whenever the construction cannot find a witness
    or the truth lemma fails, up to ``bound``.
    """
    _check_bound(bound)
    target = neg(g)
    first = sat_bounded(target, "ILW", bound)
    if first.verdict != SAT:
        return DecisionResult(PROVABLE, g, "ILW", bound, frames_checked=first.frames_checked)
    phi = adequate_set(target)
    problems = []
    sizes = [oracle.bound] if oracle is not None else range(first.model.n, bound + 1)
    for size in sizes:
        cat = oracle if oracle is not None else Catalogue(phi, size, "ILW")
        ti = cat.phi.index[target]
        root = next((t for t in cat.order if t >> ti & 1), None)
        if root is None:
            problems.append(f"catalogue {size}: no theory contains the negated goal")
            continue
        try:
            con = build_ilw_model(root, cat, max_worlds)
        except DecisionError as e:
            problems.append(f"catalogue {size}: {e}")
            continue
        m = con.model
        bad = validate(m) or check_condition(m, "W")
        if bad:
            problems.append(f"catalogue {size}: built model fails {bad}")
            continue
        tl = verify_truth_lemma(con)
        if tl:
            problems.append(f"catalogue {size}: truth lemma fails at {tl[0]} for {to_string(tl[1])}")
            continue
        return DecisionResult(
            COUNTERMODEL, g, "ILW", bound, m, m.worlds[0], first.frames_checked, con, size
        )
    raise DecisionError("; ".join(problems) + " (increase the bound)")


# -- shipped corpus -------------------------------------------------------------

@dataclass(frozen=True)
class CorpusEntry:
    formula: Formula
    expect: str | None  # "provable", "countermodel" or "countermodel-<worlds>"
    line: int


def load_corpus(path: str | None = None) -> list[CorpusEntry]:
    """Formulas of a corpus file; ``#`` starts a comment, ``# expect: v`` pins a verdict."""
    if path is None:
        text = resources.files("ilkit").joinpath("data", "corpus", "ilw_corpus.txt").read_text()
    else:
        with open(path) as fh:
            text = fh.read()
    out = []
    for no, raw in enumerate(text.splitlines(), 1):
        body, _, comment = raw.partition("#")
        if not body.strip():
            continue
        expect = None
        comment = comment.strip()
        if comment.startswith("expect:"):
            expect = comment[len("expect:"):].split()[0]
        out.append(CorpusEntry(parse(body), expect, no))
    return out
