"""Generalised Veltman frames and models.

Here S_w relates a world to a nonempty set of worlds.  The relation is
monotone, so only a generating set is stored: a list of pairs (u, V0) per
world w.  The effective relation contains (u, V) whenever some listed
(u, V0) has V0 <= V <= R[w].  Sets of worlds are bitmasks throughout.
"""
from __future__ import annotations

import itertools
import random
from typing import Iterable, Mapping, Sequence

from .formula import Bot, Box, Formula, Implies, Meta, Rhd, Var, parse
from .veltman import Violation, World, bits, find_cycle, random_frame_R


def _subsets(mask: int) -> Iterable[int]:
    """All submasks of ``mask``, including 0 and ``mask``."""
    sub = mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask


class GeneralisedModel:
    def __init__(
        self,
        worlds: Sequence[World],
        R: Iterable[tuple[World, World]],
        S: Mapping[World, Iterable[tuple[World, Iterable[World]]]] | None = None,
        valuation: Mapping[str, Iterable[World]] | None = None,
    ) -> None:
        self.worlds = list(worlds)
        if len(set(self.worlds)) != len(self.worlds):
            raise ValueError("world ids must be distinct")
        self.pos = {w: i for i, w in enumerate(self.worlds)}
        self.n = len(self.worlds)
        self.R = [0] * self.n
        for a, b in R:
            self.R[self._idx(a)] |= 1 << self._idx(b)
        # gens[w][u] is a list of masks V0
        self.gens: list[list[list[int]]] = [[[] for _ in range(self.n)] for _ in range(self.n)]
        for w, entries in (S or {}).items():
            wi = self._idx(w)
            for u, V in entries:
                mask = 0
                for v in V:
                    mask |= 1 << self._idx(v)
                self._add(wi, self._idx(u), mask)
        self.val: dict[str, int] = {}
        for p, ws in (valuation or {}).items():
            m = 0
            for w in ws:
                m |= 1 << self._idx(w)
            self.val[p] = m
        self._memo: dict[Formula, int] = {}

    def _add(self, w: int, u: int, mask: int) -> None:
        if mask not in self.gens[w][u]:
            self.gens[w][u].append(mask)

    def _idx(self, w: World) -> int:
        try:
            return self.pos[w]
        except KeyError:
            raise KeyError(f"unknown world {w!r}") from None

    @classmethod
    def from_masks(cls, worlds, R: Sequence[int], gens, val: Mapping[str, int]) -> "GeneralisedModel":
        m = cls(worlds, [])
        m.R = list(R)
        m.gens = [[list(g) for g in row] for row in gens]
        m.val = dict(val)
        return m

    @property
    def all_mask(self) -> int:
        return (1 << self.n) - 1

    def in_S(self, w: int, u: int, V: int) -> bool:
        """Membership in the effective (monotone) relation, on indices."""
        if V == 0 or V & ~self.R[w] or not self.R[w] >> u & 1:
            return False
        return any(g & ~V == 0 for g in self.gens[w][u])

    def entries(self, w: World) -> list[tuple[World, list[World]]]:
        wi = self._idx(w)
        return [
            (self.worlds[u], [self.worlds[v] for v in bits(g)])
            for u in range(self.n)
            for g in self.gens[wi][u]
        ]

    def truth(self, f: Formula) -> int:
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
                # a listed V0 inside [[B]] is enough, by monotonicity
                if all(any(g & ~b == 0 for g in self.gens[w][u]) for u in bits(self.R[w] & a)):
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

    def to_json(self) -> dict:
        return {
            "type": "generalised",
            "worlds": list(self.worlds),
            "R": [[self.worlds[a], self.worlds[b]] for a in range(self.n) for b in bits(self.R[a])],
            "S": {str(w): [{"u": u, "V": V} for u, V in self.entries(w)] for w in self.worlds},
            "valuation": {p: [self.worlds[i] for i in bits(m)] for p, m in sorted(self.val.items())},
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "GeneralisedModel":
        if data.get("type") != "generalised":
            raise ValueError(f"expected a generalised model, got type {data.get('type')!r}")
        return cls(
            [str(w) for w in data["worlds"]],
            [(str(a), str(b)) for a, b in data.get("R", [])],
            {
                str(w): [(str(e["u"]), [str(v) for v in e["V"]]) for e in es]
                for w, es in data.get("S", {}).items()
            },
            {p: [str(w) for w in ws] for p, ws in data.get("valuation", {}).items()},
        )

    def to_dot(self, name: str = "model") -> str:
        lines = [f"digraph {name} {{"]
        for i, w in enumerate(self.worlds):
            props = sorted(p for p, m in self.val.items() if m >> i & 1)
            label = f"{w}" + (f"\\n{','.join(props)}" if props else "")
            lines.append(f'  "{w}" [label="{label}"];')
        for a in range(self.n):
            for b in bits(self.R[a]):
                lines.append(f'  "{self.worlds[a]}" -> "{self.worlds[b]}";')
        k = 0
        for w in self.worlds:
            for u, V in self.entries(w):
                if V == [u]:
                    continue
                hub = f"_s{k}"
                k += 1
                lines.append(f'  "{hub}" [shape=point, label=""];')
                lines.append(f'  "{u}" -> "{hub}" [style=dashed, arrowhead=none, label="{w}"];')
                for v in V:
                    lines.append(f'  "{hub}" -> "{v}" [style=dashed];')
        lines.append("}")
        return "\n".join(lines) + "\n"

    def __repr__(self) -> str:
        return f"GeneralisedModel({self.n} worlds, vars={sorted(self.val)})"


# -- validation ---------------------------------------------------------------

def _quasi_transitivity_failure(m: GeneralisedModel, w: int):
    for u in range(m.n):
        for V0 in m.gens[w][u]:
            options = [m.gens[w][v] for v in bits(V0)]
            if any(not opt for opt in options):
                continue
            for choice in itertools.product(*options):
                union = 0
                for z in choice:
                    union |= z
                if not m.in_S(w, u, union):
                    return (u, V0, choice)
    return None


def validate_gen(m: GeneralisedModel) -> Violation | None:
    """First failing clause of the generalised frame definition, or None."""
    w = m.worlds
    names = lambda mask: tuple(w[i] for i in bits(mask))  # noqa: E731
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
                return Violation("R transitive", (w[a], w[b], w[next(bits(missing))]))
    for x in range(m.n):
        for u in range(m.n):
            for V0 in m.gens[x][u]:
                if not m.R[x] >> u & 1 or V0 == 0 or V0 & ~m.R[x]:
                    return Violation("S_w inside R[w] x nonempty subsets", (w[x], w[u], names(V0)))
        for u in bits(m.R[x]):
            if not m.in_S(x, u, 1 << u):
                return Violation("quasi-reflexive", (w[x], w[u]))
        for u in bits(m.R[x]):
            for v in bits(m.R[u]):
                if not m.in_S(x, u, 1 << v):
                    return Violation("clause d", (w[x], w[u], w[v]))
        hit = _quasi_transitivity_failure(m, x)
        if hit:
            u, V0, choice = hit
            return Violation("quasi-transitive", (w[x], w[u], names(V0), tuple(names(z) for z in choice)))
    return None


# -- frame conditions ---------------------------------------------------------

def check_gen_P(m: GeneralisedModel):
    """Counterexample (w, w', u, V) to wRw'RuS_wV => some V' <= V with uS_w'V'."""
    for w in range(m.n):
        for w2 in bits(m.R[w]):
            for u in bits(m.R[w2]):
                for V in m.gens[w][u]:
                    if not any(g & ~V == 0 for g in m.gens[w2][u]):
                        return (m.worlds[w], m.worlds[w2], m.worlds[u], tuple(m.worlds[i] for i in bits(V)))
    return None


def _s_inverse(m: GeneralisedModel, w: int, V: int) -> int:
    out = 0
    for z in bits(m.R[w]):
        if m.in_S(w, z, V):
            out |= 1 << z
    return out


def _image(m: GeneralisedModel, V: int) -> int:
    out = 0
    for v in bits(V):
        out |= m.R[v]
    return out


def check_gen_W(m: GeneralisedModel, strict: bool = False):
    """Counterexample (w, u, V) to the generalised W condition, or None.

    By default V ranges over listed generators; ``strict`` also tries every
    superset of a generator inside R[w].  Candidates V' are the listed
    generators of u contained in V, which suffices because R[V'] only grows
    with V'.
    """
    for w in range(m.n):
        for u in range(m.n):
            for V0 in m.gens[w][u]:
                Vs = [V0]
                if strict:
                    rest = m.R[w] & ~V0
                    Vs = [V0 | extra for extra in _subsets(rest)]
                for V in Vs:
                    back = _s_inverse(m, w, V)
                    if not any(g & ~V == 0 and _image(m, g) & back == 0 for g in m.gens[w][u]):
                        return (m.worlds[w], m.worlds[u], tuple(m.worlds[i] for i in bits(V)))
    return None


# -- random generation ---------------------------------------------------------

def minimal_gens(R: Sequence[int]) -> list[list[list[int]]]:
    n = len(R)
    gens = [[[] for _ in range(n)] for _ in range(n)]
    for w in range(n):
        for u in bits(R[w]):
            gens[w][u].append(1 << u)
            for v in bits(R[u]):
                gens[w][u].append(1 << v)
    return gens


def _prune(gs: list[int]) -> list[int]:
    """Drop generators that contain another one (they add nothing)."""
    gs = sorted(set(gs), key=lambda g: (bin(g).count("1"), g))
    out: list[int] = []
    for g in gs:
        if not any(h & ~g == 0 for h in out):
            out.append(g)
    return out


def close_quasi_transitive(m: GeneralisedModel, w: int, limit: int = 2000) -> bool:
    """Add unions until S_w is quasi-transitive.  False if ``limit`` is hit."""
    for _ in range(limit):
        hit = _quasi_transitivity_failure(m, w)
        if hit is None:
            for u in range(m.n):
                m.gens[w][u] = _prune(m.gens[w][u])
            return True
        u, _, choice = hit
        union = 0
        for z in choice:
            union |= z
        m.gens[w][u].append(union)
    return False


def random_gen_model(
    rng: random.Random,
    n: int | None = None,
    vars: Sequence[str] = ("p", "q", "r"),
    require: Sequence[str] = (),
    extra: int | None = None,
    tries: int = 20,
) -> GeneralisedModel:
    """Random generalised model; ``require`` lists conditions among "P", "W".

    Extra generators are added and quasi-transitively closed; frames that
    miss a required condition are resampled with fewer extras, and the
    minimal generating sets are used as the fallback.
    """
    n = rng.randint(1, 5) if n is None else n
    R = random_frame_R(rng, n, rng.uniform(0.2, 0.6))
    worlds = [f"w{i}" for i in range(n)]
    val = {p: rng.getrandbits(n) for p in vars}
    k = rng.randint(1, 2 * n) if extra is None else extra
    for _ in range(tries):
        m = GeneralisedModel.from_masks(worlds, R, minimal_gens(R), val)
        for _ in range(k):
            w = rng.randrange(n)
            if not m.R[w]:
                continue
            u = rng.choice(list(bits(m.R[w])))
            # sets meeting {u} or R[u] would be pruned away as redundant
            allowed = m.R[w] & ~((1 << u) | m.R[u])
            V = allowed if rng.random() < 0.5 else rng.getrandbits(n) & allowed
            if V:
                m.gens[w][u].append(V)
        if not all(close_quasi_transitive(m, w) for w in range(n)):
            k //= 2
            continue
        ok = ("P" not in require or check_gen_P(m) is None) and ("W" not in require or check_gen_W(m, strict=True) is None)
        if ok:
            return m
        k //= 2
    m = GeneralisedModel.from_masks(worlds, R, minimal_gens(R), val)
    for w in range(n):
        for u in range(n):
            m.gens[w][u] = _prune(m.gens[w][u])
    return m
