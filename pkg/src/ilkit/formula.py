"""Formulas of interpretability logic.

The internal language has five constructors: ``Bot``, ``Var``, ``Implies``,
``Box`` and ``Rhd`` (the binary modality written ``|>`` in ASCII).  Every
other connective is sugar and is eliminated by :func:`parse`:

    ~A      A -> false
    true    ~false
    A & B   ~(A -> ~B)
    A | B   ~A -> B
    <>A     ~[]~A

Precedence, tightest first: prefix operators, ``&``, ``|``, ``|>``, ``->``.
``&`` and ``|`` associate to the left, ``->`` to the right and ``|>`` not at
all.
"""
from __future__ import annotations

import random
import re
from dataclasses import dataclass
from typing import Iterable, Iterator


class Formula:
    """Base class for formula nodes.

    Nodes are immutable, hashable and compared structurally.  The hash is
    computed once at construction because formulas are used as dictionary
    keys all over the package.
    """

    __slots__ = ("_hash", "_size")
    _tag = 0

    def children(self) -> tuple["Formula", ...]:
        return ()

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"<{to_string(self)}>"

    def __str__(self) -> str:
        return to_string(self)

    @property
    def size(self) -> int:
        return self._size

    def __lt__(self, other: "Formula") -> bool:
        return sort_key(self) < sort_key(other)


class Bot(Formula):
    __slots__ = ()
    _tag = 1

    def __init__(self) -> None:
        self._hash = hash(("bot",))
        self._size = 1

    __hash__ = Formula.__hash__

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Bot)


class Var(Formula):
    __slots__ = ("name",)
    _tag = 2

    def __init__(self, name: str) -> None:
        self.name = name
        self._hash = hash(("var", name))
        self._size = 1

    __hash__ = Formula.__hash__

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Var) and other.name == self.name


class Meta(Formula):
    """Schema metavariable.  Only appears in axiom templates."""

    __slots__ = ("name",)
    _tag = 3

    def __init__(self, name: str) -> None:
        self.name = name
        self._hash = hash(("meta", name))
        self._size = 1

    __hash__ = Formula.__hash__

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Meta) and other.name == self.name


class _Binary(Formula):
    __slots__ = ("left", "right")

    def __init__(self, left: Formula, right: Formula) -> None:
        self.left = left
        self.right = right
        self._hash = hash((self._tag, left._hash, right._hash))
        self._size = 1 + left._size + right._size

    def children(self) -> tuple[Formula, ...]:
        return (self.left, self.right)

    __hash__ = Formula.__hash__

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        return (
            type(other) is type(self)
            and other._hash == self._hash
            and other.left == self.left
            and other.right == self.right
        )


class Implies(_Binary):
    __slots__ = ()
    _tag = 4


class Rhd(_Binary):
    __slots__ = ()
    _tag = 6


class Box(Formula):
    __slots__ = ("inner",)
    _tag = 5

    def __init__(self, inner: Formula) -> None:
        self.inner = inner
        self._hash = hash((self._tag, inner._hash))
        self._size = 1 + inner._size

    def children(self) -> tuple[Formula, ...]:
        return (self.inner,)

    __hash__ = Formula.__hash__

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        return isinstance(other, Box) and other._hash == self._hash and other.inner == self.inner


BOT = Bot()
TOP = Implies(BOT, BOT)


# -- derived connectives (syntactic, no simplification) ---------------------

def Not(a: Formula) -> Formula:
    return Implies(a, BOT)


def And(a: Formula, b: Formula) -> Formula:
    return Not(Implies(a, Not(b)))


def Or(a: Formula, b: Formula) -> Formula:
    return Implies(Not(a), b)


def Dia(a: Formula) -> Formula:
    return Not(Box(Not(a)))


def Iff(a: Formula, b: Formula) -> Formula:
    return And(Implies(a, b), Implies(b, a))


def big_or(items: Iterable[Formula]) -> Formula:
    """Right-nested disjunction; the empty disjunction is ``false``."""
    items = list(items)
    if not items:
        return BOT
    out = items[-1]
    for f in reversed(items[:-1]):
        out = Or(f, out)
    return out


def big_and(items: Iterable[Formula]) -> Formula:
    items = list(items)
    if not items:
        return TOP
    out = items[-1]
    for f in reversed(items[:-1]):
        out = And(f, out)
    return out


def neg(f: Formula) -> Formula:
    """Single negation: strips one ``~`` if present, otherwise adds one."""
    if isinstance(f, Implies) and isinstance(f.right, Bot):
        return f.left
    return Implies(f, BOT)


def is_negation(f: Formula) -> bool:
    return isinstance(f, Implies) and isinstance(f.right, Bot)


def subformulas(f: Formula) -> set[Formula]:
    out: set[Formula] = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if g in out:
            continue
        out.add(g)
        stack.extend(g.children())
    return out


def variables(f: Formula) -> list[str]:
    return sorted({g.name for g in subformulas(f) if isinstance(g, Var)})


def iter_postorder(f: Formula) -> Iterator[Formula]:
    for c in f.children():
        yield from iter_postorder(c)
    yield f


def random_formula(rng: random.Random, vars: Iterable[str] = ("p", "q"), depth: int = 3) -> Formula:
    """Random formula over ``vars`` of nesting depth at most ``depth``."""
    vars = list(vars)
    if depth <= 0 or rng.random() < 0.25:
        return BOT if rng.random() < 0.1 else Var(rng.choice(vars))
    k = rng.randrange(7)
    sub = lambda: random_formula(rng, vars, depth - 1)
    if k == 0:
        return Not(sub())
    if k == 1:
        return Box(sub())
    if k == 2:
        return Dia(sub())
    if k == 3:
        return And(sub(), sub())
    if k == 4:
        return Or(sub(), sub())
    if k == 5:
        return Implies(sub(), sub())
    return Rhd(sub(), sub())


# -- printing -----------------------------------------------------------------

_IMP, _RHD, _OR, _AND, _ATOM = 1, 2, 3, 4, 5


def _view(f: Formula):
    """Recognise sugar so that printed text re-parses to the same tree."""
    if isinstance(f, Implies):
        a, b = f.left, f.right
        if isinstance(a, Bot) and isinstance(b, Bot):
            return ("true",)
        if isinstance(b, Bot):
            if isinstance(a, Implies) and is_negation(a.right):
                return ("and", a.left, a.right.left)
            if isinstance(a, Box) and is_negation(a.inner):
                return ("dia", a.inner.left)
            return ("not", a)
        if is_negation(a) and not (isinstance(a.left, Implies) and is_negation(a.left.right)):
            # ~x -> b reads as a disjunction unless ~x is itself a conjunction
            return ("or", a.left, b)
        return ("imp", a, b)
    return None


def to_string(f: Formula) -> str:
    return _show(f, 0)


def _wrap(s: str, level: int, need: int) -> str:
    return f"({s})" if level < need else s


def _show(f: Formula, need: int) -> str:
    if isinstance(f, Bot):
        return "false"
    if isinstance(f, Var):
        return f.name
    if isinstance(f, Meta):
        return f"?{f.name}"
    if isinstance(f, Box):
        return "[]" + _show(f.inner, _ATOM)
    if isinstance(f, Rhd):
        s = f"{_show(f.left, _OR)} |> {_show(f.right, _OR)}"
        return _wrap(s, _RHD, need)
    v = _view(f)
    kind = v[0]
    if kind == "true":
        return "true"
    if kind == "not":
        return "~" + _show(v[1], _ATOM)
    if kind == "dia":
        return "<>" + _show(v[1], _ATOM)
    if kind == "and":
        return _wrap(f"{_show(v[1], _AND)} & {_show(v[2], _ATOM)}", _AND, need)
    if kind == "or":
        return _wrap(f"{_show(v[1], _OR)} | {_show(v[2], _AND)}", _OR, need)
    return _wrap(f"{_show(v[1], _RHD)} -> {_show(v[2], _IMP)}", _IMP, need)


def sort_key(f: Formula) -> tuple[int, str]:
    return (f.size, to_string(f))


# -- parsing ------------------------------------------------------------------

class FormulaSyntaxError(ValueError):
    def __init__(self, message: str, pos: int) -> None:
        super().__init__(f"{message} at position {pos}")
        self.pos = pos


_TOKEN = re.compile(r"\s*(?:(->|\|>|\[\]|<>|[~&|()])|([A-Za-z_][A-Za-z0-9_']*|\?[A-Za-z_][A-Za-z0-9_]*))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    toks = []
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if not m:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", pos)
        start = m.start(1) if m.group(1) else m.start(2)
        if m.group(1):
            toks.append(("op", m.group(1), start))
        else:
            toks.append(("id", m.group(2), start))
        pos = m.end()
    toks.append(("eof", "", n))
    return toks


class _Parser:
    def __init__(self, text: str) -> None:
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, value: str):
        t = self.take()
        if t[1] != value or t[0] != "op":
            raise FormulaSyntaxError(f"expected {value!r}, found {t[1] or 'end of input'!r}", t[2])

    def formula(self) -> Formula:
        left = self.rhd()
        if self.peek()[1] == "->":
            self.take()
            return Implies(left, self.formula())
        return left

    def rhd(self) -> Formula:
        left = self.disj()
        if self.peek()[1] == "|>":
            self.take()
            right = self.disj()
            t = self.peek()
            if t[1] == "|>":
                raise FormulaSyntaxError("'|>' is not associative; add parentheses", t[2])
            return Rhd(left, right)
        return left

    def disj(self) -> Formula:
        left = self.conj()
        while self.peek()[1] == "|" and self.peek()[0] == "op":
            self.take()
            left = Or(left, self.conj())
        return left

    def conj(self) -> Formula:
        left = self.prefix()
        while self.peek()[1] == "&":
            self.take()
            left = And(left, self.prefix())
        return left

    def prefix(self) -> Formula:
        kind, val, pos = self.take()
        if kind == "op":
            if val == "~":
                return Not(self.prefix())
            if val == "[]":
                return Box(self.prefix())
            if val == "<>":
                return Dia(self.prefix())
            if val == "(":
                f = self.formula()
                self.expect(")")
                return f
            raise FormulaSyntaxError(f"unexpected {val!r}", pos)
        if kind == "id":
            if val == "false":
                return BOT
            if val == "true":
                return TOP
            if val.startswith("?"):
                return Meta(val[1:])
            return Var(val)
        raise FormulaSyntaxError("unexpected end of input", pos)


def parse(text: str) -> Formula:
    p = _Parser(text)
    f = p.formula()
    kind, val, pos = p.peek()
    if kind != "eof":
        raise FormulaSyntaxError(f"unexpected {val!r}", pos)
    return f


# -- adequate sets ----------------------------------------------------------

@dataclass(frozen=True)
class AdequateSet:
    """A finite formula universe closed under the adequacy rules.

    ``formulas`` is sorted by :func:`sort_key`, so indices are reproducible
    and can be used as bit positions for set encodings.
    """

    formulas: tuple[Formula, ...]

    def __post_init__(self) -> None:
        index = {f: i for i, f in enumerate(self.formulas)}
        object.__setattr__(self, "index", index)
        object.__setattr__(self, "boxed", tuple(i for i, f in enumerate(self.formulas) if isinstance(f, Box)))
        object.__setattr__(self, "rhd", tuple(i for i, f in enumerate(self.formulas) if isinstance(f, Rhd)))
        object.__setattr__(self, "negation", tuple(index[neg(f)] for f in self.formulas))

    def __len__(self) -> int:
        return len(self.formulas)

    def __iter__(self):
        return iter(self.formulas)

    def __contains__(self, f: object) -> bool:
        return f in self.index

    def mask(self, fs: Iterable[Formula]) -> int:
        m = 0
        for f in fs:
            m |= 1 << self.index[f]
        return m

    def members(self, mask: int) -> list[Formula]:
        return [f for i, f in enumerate(self.formulas) if mask >> i & 1]

    def rhd_arguments(self) -> list[Formula]:
        args = set()
        for i in self.rhd:
            f = self.formulas[i]
            args.add(f.left)
            args.add(f.right)
        return sorted(args, key=sort_key)


def _close_sub_neg(fs: set[Formula]) -> set[Formula]:
    out = set()
    todo = list(fs)
    while todo:
        f = todo.pop()
        if f in out:
            continue
        out.add(f)
        todo.extend(f.children())
        todo.append(neg(f))
    return out


def adequate_closure(seed: Iterable[Formula]) -> set[Formula]:
    """Least adequate superset of ``seed`` including the box augmentation."""
    fs = set(seed) | {Rhd(BOT, BOT)}
    while True:
        fs = _close_sub_neg(fs)
        args = {g for f in fs if isinstance(f, Rhd) for g in (f.left, f.right)}
        extra = {Rhd(a, b) for a in args for b in args}
        for a in args:
            extra.add(Box(neg(a)))
        new = extra - fs
        if not new:
            return fs
        fs |= new


def adequate_set(f: Formula | Iterable[Formula]) -> AdequateSet:
    seed = [f] if isinstance(f, Formula) else list(f)
    return AdequateSet(tuple(sorted(adequate_closure(seed), key=sort_key)))


def check_adequate(fs: Iterable[Formula]) -> list[str]:
    """Independent validator for the adequacy invariants.  Returns problems found."""
    fs = set(fs)
    problems = []
    if Rhd(BOT, BOT) not in fs:
        problems.append("missing false |> false")
    args = set()
    for f in fs:
        for c in f.children():
            if c not in fs:
                problems.append(f"not closed under subformulas: {c} of {f}")
        if neg(f) not in fs:
            problems.append(f"not closed under single negation: {f}")
        if isinstance(f, Rhd):
            args.update((f.left, f.right))
    for a in args:
        if Box(neg(a)) not in fs:
            problems.append(f"missing box augmentation for {a}")
        for b in args:
            if Rhd(a, b) not in fs:
                problems.append(f"missing {a} |> {b}")
    return problems
