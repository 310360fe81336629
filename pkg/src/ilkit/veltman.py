"""Ordinary Veltman frames and models.

A model is a finite set of worlds with a transitive, irreflexive relation R,
one relation S_w per world on R[w], and a valuation.  Internally worlds are
numbered 0..n-1 and every relation is stored as integer bitmasks, so the
truth set of a formula is a single int.

Converse well-foundedness is replaced by acyclicity, which is equivalent on
finite carriers.  The W condition is checked as acyclicity of the composite
relation "S_w then R" on R[w].
"""
from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass
from typing import Hashable, Iterable, Iterator, Mapping, Sequence

from .formula import Bot, Box, Formula, Implies, Meta, Rhd, Var, parse, variables

World = Hashable
PRINCIPLES = ("P", "M", "M0", "R", "W")


def bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def closure_masks(succ: list[int]) -> list[int]:
    """Transitive closure of a relation given as successor masks."""
    succ = list(succ)
    n = len(succ)
    for k in range(n):
        kb = 1 << k
        sk = succ[k]
        for i in range(n):
            if succ[i] & kb:
                succ[i] |= sk
    return succ


def find_cycle(succ: Sequence[int], nodes: int | None = None) -> list[int] | None:
    """Return a cycle [a, b, ..., a] in the relation, or None."""
    n = len(succ)
    allowed = (1 << n) - 1 if nodes is None else nodes
    colour = [0] * n
    parent = [-1] * n
    for start in bits(allowed):
        if colour[start]:
            continue
        stack = [(start, iter(list(bits(succ[start] & allowed))))]
        colour[start] = 1
        while stack:
            node, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                colour[node] = 2
                stack.pop()
                continue
            if colour[nxt] == 1:
                cyc = [nxt]
                cur = node
                while cur != nxt:
                    cyc.append(cur)
                    cur = parent[cur]
                cyc.append(nxt)
                return cyc[::-1]
            if colour[nxt] == 0:
                colour[nxt] = 1
                parent[nxt] = node
                stack.append((nxt, iter(list(bits(succ[nxt] & allowed)))))
    return None


@dataclass
class Violation:
    clause: str
    witness: tuple

    def __str__(self) -> str:
        return f"{self.clause}: {self.witness}"


class OrdinaryModel:
    """Finite ordinary Veltman model.

    ``S`` maps a world w to the pairs (u, v) of S_w.  Worlds missing from
    ``S`` get the minimal relation (identity on R[w] plus R restricted to
    R[w]) only when ``complete_s=True`` is passed; otherwise S_w is taken
    as given and :func:`validate` will complain about missing pairs.
    """

    def __init__(
        self,
        worlds: Sequence[World],
        R: Iterable[tuple[World, World]],
        S: Mapping[World, Iterable[tuple[World, World]]] | None = None,
        valuation: Mapping[str, Iterable[World]] | None = None,
        complete_s: bool = False,
    ) -> None:
        self.worlds = list(worlds)
        if len(set(self.worlds)) != len(self.worlds):
            raise ValueError("world ids must be distinct")
        self.pos = {w: i for i, w in enumerate(self.worlds)}
        n = self.n = len(self.worlds)
        self.R = [0] * n
        for a, b in R:
            self.R[self._idx(a)] |= 1 << self._idx(b)
        self.S = [[0] * n for _ in range(n)]
        for w, pairs in (S or {}).items():
            wi = self._idx(w)
            for u, v in pairs:
                self.S[wi][self._idx(u)] |= 1 << self._idx(v)
        if complete_s:
            for wi in range(n):
                for u in bits(self.R[wi]):
                    self.S[wi][u] |= (1 << u) | (self.R[u] & self.R[wi])
        self.val: dict[str, int] = {}
        for p, ws in (valuation or {}).items():
            m = 0
            for w in ws:
                m |= 1 << self._idx(w)
            self.val[p] = m
        self._memo: dict[Formula, int] = {}

    def _idx(self, w: World) -> int:
        try:
            return self.pos[w]
        except KeyError:
            raise KeyError(f"unknown world {w!r}") from None

    @property
    def all_mask(self) -> int:
        return (1 << self.n) - 1

    @classmethod
    def from_masks(cls, worlds, R: Sequence[int], S: Sequence[Sequence[int]], val: Mapping[str, int]):
        m = cls.__new__(cls)
        m.worlds = list(worlds)
        m.pos = {w: i for i, w in enumerate(m.worlds)}
        m.n = len(m.worlds)
        m.R = list(R)
        m.S = [list(row) for row in S]
        m.val = dict(val)
        m._memo = {}
        return m

    def with_valuation(self, val: Mapping[str, int]) -> "OrdinaryModel":
        return OrdinaryModel.from_masks(self.worlds, self.R, self.S, val)

    # -- views ------------------------------------------------------------
    def r_pairs(self) -> list[tuple[World, World]]:
        return [(self.worlds[a], self.worlds[b]) for a in range(self.n) for b in bits(self.R[a])]

    def s_pairs(self, w: World) -> list[tuple[World, World]]:
        wi = self._idx(w)
        return [(self.worlds[u], self.worlds[v]) for u in range(self.n) for v in bits(self.S[wi][u])]

    def successors(self, w: World) -> list[World]:
        return [self.worlds[i] for i in bits(self.R[self._idx(w)])]

    def names(self, mask: int) -> list[World]:
        return [self.worlds[i] for i in bits(mask)]

    # -- semantics --------------------------------------------------------
    def truth(self, f: Formula) -> int:
        """Bitmask of worlds forcing ``f``."""
        hit = self._memo.get(f)
        if hit is not None:
            return hit
        if isinstance(f, Bot):
            out = 0
        elif isinstance(f, Var):
            out = self.val.get(f.name, 0)
        elif isinstance(f, Implies):
            out = (~self.truth(f.left) | self.truth(f.right)) & self.all_mask
        elif isinstance(f, Box):
            a = self.truth(f.inner)
            out = 0
            for w in range(self.n):
                if self.R[w] & ~a == 0:
                    out |= 1 << w
        elif isinstance(f, Rhd):
            a = self.truth(f.left)
            b = self.truth(f.right)
            out = 0
            for w in range(self.n):
                sw = self.S[w]
                if all(sw[u] & b for u in bits(self.R[w] & a)):
                    out |= 1 << w
        elif isinstance(f, Meta):
            raise ValueError("cannot evaluate a schema metavariable")
        else:
            raise TypeError(f"not a formula: {f!r}")
        self._memo[f] = out
        return out

    def force(self, w: World, f: Formula | str) -> bool:
        if isinstance(f, str):
            f = parse(f)
        return bool(self.truth(f) >> self._idx(w) & 1)

    def theory(self, w: World, pool: Iterable[Formula]) -> frozenset[Formula]:
        i = self._idx(w)
        return frozenset(f for f in pool if self.truth(f) >> i & 1)

    # -- serialisation ----------------------------------------------------
    def to_json(self) -> dict:
        return {
            "type": "ordinary",
            "worlds": list(self.worlds),
            "R": [list(p) for p in self.r_pairs()],
            "S": {str(w): [list(p) for p in self.s_pairs(w)] for w in self.worlds},
            "valuation": {p: self.names(m) for p, m in sorted(self.val.items())},
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "OrdinaryModel":
        if data.get("type", "ordinary") != "ordinary":
            raise ValueError(f"expected an ordinary model, got type {data.get('type')!r}")
        worlds = [str(w) for w in data["worlds"]]
        return cls(
            worlds,
            [(str(a), str(b)) for a, b in data.get("R", [])],
            {str(w): [(str(u), str(v)) for u, v in ps] for w, ps in data.get("S", {}).items()},
            {p: [str(w) for w in ws] for p, ws in data.get("valuation", {}).items()},
            complete_s=bool(data.get("complete_s", False)),
        )

    def to_dot(self, name: str = "model") -> str:
        lines = [f"digraph {name} {{"]
        for i, w in enumerate(self.worlds):
            props = sorted(p for p, m in self.val.items() if m >> i & 1)
            label = f"{w}" + (f"\\n{','.join(props)}" if props else "")
            lines.append(f'  "{w}" [label="{label}"];')
        for a, b in self.r_pairs():
            lines.append(f'  "{a}" -> "{b}";')
        for w in self.worlds:
            for u, v in self.s_pairs(w):
                if u == v:
                    continue
                lines.append(f'  "{u}" -> "{v}" [style=dashed, label="{w}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"

    def __repr__(self) -> str:
        return f"OrdinaryModel({self.n} worlds, vars={sorted(self.val)})"


def load_json(path) -> dict:
    with open(path) as fh:
        return json.load(fh)


# -- validation ---------------------------------------------------------------

def validate(m: OrdinaryModel) -> Violation | None:
    """Return the first failed frame clause, or None when ``m`` is a Veltman model."""
    w = m.worlds
    for a in range(m.n):
        if m.R[a] >> a & 1:
            return Violation("R irreflexive", (w[a],))
    cyc = find_cycle(m.R)
    if cyc:
        return Violation("R-cycle", tuple(w[i] for i in cyc))
    for a in range(m.n):
        for b in bits(m.R[a]):
            missing = m.R[b] & ~m.R[a]
            if missing:
                c = next(bits(missing))
                return Violation("R transitive", (w[a], w[b], w[c]))
    for x in range(m.n):
        rx = m.R[x]
        sx = m.S[x]
        for u in range(m.n):
            if sx[u] and not rx >> u & 1:
                return Violation("S_w domain in R[w]", (w[x], w[u], w[next(bits(sx[u]))]))
            if sx[u] & ~rx:
                return Violation("S_w range in R[w]", (w[x], w[u], w[next(bits(sx[u] & ~rx))]))
        for u in bits(rx):
            if not sx[u] >> u & 1:
                return Violation("S_w reflexive", (w[x], w[u]))
        for u in bits(rx):
            for v in bits(sx[u]):
                missing = sx[v] & ~sx[u]
                if missing:
                    z = next(bits(missing))
                    return Violation("S_w transitive", (w[x], w[u], w[v], w[z]))
        for u in bits(rx):
            missing = m.R[u] & rx & ~sx[u]
            if missing:
                v = next(bits(missing))
                return Violation("R inside S_w", (w[x], w[u], w[v]))
    return None


# -- frame conditions ---------------------------------------------------------

def _check_P(m: OrdinaryModel):
    for w in range(m.n):
        for w2 in bits(m.R[w]):
            for u in bits(m.R[w2]):
                missing = m.S[w][u] & ~m.S[w2][u]
                if missing:
                    return (w, w2, u, next(bits(missing)))
    return None


def _check_M(m: OrdinaryModel):
    for w in range(m.n):
        for u in bits(m.R[w]):
            for v in bits(m.S[w][u]):
                missing = m.R[v] & ~m.R[u]
                if missing:
                    return (w, u, v, next(bits(missing)))
    return None


def _check_M0(m: OrdinaryModel):
    for w in range(m.n):
        for u in bits(m.R[w]):
            for x in bits(m.R[u]):
                for v in bits(m.S[w][x]):
                    missing = m.R[v] & ~m.R[u]
                    if missing:
                        return (w, u, x, v, next(bits(missing)))
    return None


def _check_R(m: OrdinaryModel):
    for w in range(m.n):
        for x in bits(m.R[w]):
            for y in bits(m.R[x]):
                for y2 in bits(m.S[w][y]):
                    missing = m.R[y2] & ~m.S[x][y]
                    if missing:
                        return (w, x, y, y2, next(bits(missing)))
    return None


def w_composite(m: OrdinaryModel, w: int) -> list[int]:
    """Successor masks of x -> x' iff x S_w y R x' for some y."""
    comp = [0] * m.n
    for x in bits(m.R[w]):
        c = 0
        for y in bits(m.S[w][x]):
            c |= m.R[y]
        comp[x] = c
    return comp


def _check_W(m: OrdinaryModel):
    for w in range(m.n):
        cyc = find_cycle(w_composite(m, w), m.R[w])
        if cyc:
            return (w, *cyc)
    return None


_CHECKS = {"P": _check_P, "M": _check_M, "M0": _check_M0, "R": _check_R, "W": _check_W}


def check_condition(m: OrdinaryModel, principle: str):
    """None if the frame satisfies the condition, else a tuple of world ids.

    Shapes: P (w, w', u, v); M (w, u, v, z); M0 (w, u, x, v, z);
    R (w, x, y, y', z); W (w, x0, ..., x0) listing a cycle of the composite.
    """
    try:
        fn = _CHECKS[principle]
    except KeyError:
        raise ValueError(f"unknown principle {principle!r}") from None
    hit = fn(m)
    return None if hit is None else tuple(m.worlds[i] for i in hit)


def logic_principles(logic: str) -> tuple[str, ...]:
    """Split a logic name such as ``ILWP`` or ``ILM0`` into principle names."""
    if not logic.startswith("IL"):
        raise ValueError(f"unknown logic {logic!r}")
    rest = logic[2:]
    out = []
    while rest:
        if rest.startswith("M0"):
            out.append("M0")
            rest = rest[2:]
        elif rest[0] in "WMPR":
            out.append(rest[0])
            rest = rest[1:]
        else:
            raise ValueError(f"unknown logic {logic!r}")
    return tuple(out)


def satisfies_logic(m: OrdinaryModel, logic: str) -> bool:
    return all(check_condition(m, p) is None for p in logic_principles(logic))


# -- validity on a frame ------------------------------------------------------

FRAME_CAP = 24


def valid_on_frame(
    frame: OrdinaryModel,
    f: Formula | str,
    vars: Sequence[str] | None = None,
    *,
    cap: int = FRAME_CAP,
    samples: int | None = None,
    rng: random.Random | None = None,
) -> bool:
    """True iff ``f`` holds at every world under every valuation of ``vars``.

    Beyond ``cap`` (worlds times variables) the exhaustive sweep is refused
    unless ``samples`` is given, in which case that many random valuations
    are tried instead.
    """
    if isinstance(f, str):
        f = parse(f)
    vars = list(variables(f) if vars is None else vars)
    full = frame.all_mask
    if frame.n * len(vars) > cap:
        if samples is None:
            raise ValueError(f"frame validity sweep exceeds cap {cap}; pass samples= for random mode")
        rng = rng or random.Random(0)
        vals = ({p: rng.getrandbits(frame.n) for p in vars} for _ in range(samples))
    else:
        vals = (dict(zip(vars, combo)) for combo in itertools.product(range(1 << frame.n), repeat=len(vars)))
    for val in vals:
        if frame.with_valuation(val).truth(f) != full:
            return False
    return True


# -- random generation ---------------------------------------------------------

def random_frame_R(rng: random.Random, n: int, density: float | None = None) -> list[int]:
    """Random transitive irreflexive relation on 0..n-1 (edges only go upward)."""
    p = rng.uniform(0.2, 0.8) if density is None else density
    succ = [0] * n
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < p:
                succ[i] |= 1 << j
    return closure_masks(succ)


def minimal_S(R: Sequence[int]) -> list[list[int]]:
    n = len(R)
    S = [[0] * n for _ in range(n)]
    for w in range(n):
        for u in bits(R[w]):
            S[w][u] = (1 << u) | (R[u] & R[w])
    return S


def _random_S(rng: random.Random, R: Sequence[int], extra: float) -> list[list[int]]:
    S = minimal_S(R)
    for w in range(len(R)):
        succ = list(bits(R[w]))
        for u in succ:
            for v in succ:
                if u != v and rng.random() < extra:
                    S[w][u] |= 1 << v
        S[w] = closure_masks(S[w])
    return S


def random_model(
    rng: random.Random,
    n: int | None = None,
    vars: Sequence[str] = ("p", "q", "r"),
    logic: str = "IL",
    tries: int = 30,
) -> OrdinaryModel:
    """Random Veltman model whose frame satisfies the conditions of ``logic``.

    Extra S-pairs are sampled and the frame is rejected until the logic's
    conditions hold; the extra-pair rate shrinks with each rejection, and
    the minimal S (which satisfies every condition) is the last resort.
    """
    n = rng.randint(1, 6) if n is None else n
    R = random_frame_R(rng, n)
    principles = logic_principles(logic)
    worlds = [f"w{i}" for i in range(n)]
    val = {p: rng.getrandbits(n) for p in vars}
    extra = rng.uniform(0.1, 0.6)
    for _ in range(tries):
        S = _random_S(rng, R, extra)
        m = OrdinaryModel.from_masks(worlds, R, S, val)
        if all(_CHECKS[p](m) is None for p in principles):
            return m
        extra *= 0.7
    return OrdinaryModel.from_masks(worlds, R, minimal_S(R), val)
