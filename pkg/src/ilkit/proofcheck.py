"""Hilbert-style proof checking for IL and its extensions.

Schemas are written as ordinary formulas in which ``?A``, ``?B``, ``?C``
are metavariables.  Matching is plain syntactic unification of the
template against the candidate (metavariables bind whole subformulas,
consistently).  ``Taut`` is different: a step is a Taut instance when it
is a propositional tautology after replacing each maximal boxed or
``|>``-formula, and each variable, by an atom.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .formula import Bot, Box, Formula, FormulaSyntaxError, Implies, Meta, Rhd, Var, parse
from .veltman import logic_principles

SCHEMA_TEXT = {
    "K": "[](?A -> ?B) -> []?A -> []?B",
    "L": "[]([]?A -> ?A) -> []?A",
    "J1": "[](?A -> ?B) -> ?A |> ?B",
    "J2": "(?A |> ?B) & (?B |> ?C) -> ?A |> ?C",
    "J3": "(?A |> ?C) & (?B |> ?C) -> (?A | ?B) |> ?C",
    "J4": "?A |> ?B -> <>?A -> <>?B",
    "J5": "<>?A |> ?A",
    "W": "?A |> ?B -> ?A |> (?B & []~?A)",
    "M": "?A |> ?B -> (?A & []?C) |> (?B & []?C)",
    "P": "?A |> ?B -> [](?A |> ?B)",
    "M0": "?A |> ?B -> (<>?A & []?C) |> (?B & []?C)",
    "R": "?A |> ?B -> ~(?A |> ~?C) |> (?B & []?C)",
}
SCHEMAS: dict[str, Formula] = {name: parse(text) for name, text in SCHEMA_TEXT.items()}
BASE_SCHEMAS = ("Taut", "K", "L", "J1", "J2", "J3", "J4", "J5")
TAUT_ATOM_LIMIT = 20


def schemas_of(logic: str) -> tuple[str, ...]:
    return BASE_SCHEMAS + logic_principles(logic)


def _match(t: Formula, f: Formula, sub: dict[str, Formula]) -> bool:
    if isinstance(t, Meta):
        bound = sub.get(t.name)
        if bound is None:
            sub[t.name] = f
            return True
        return bound == f
    if type(t) is not type(f):
        return False
    if isinstance(t, Var):
        return t.name == f.name
    if isinstance(t, Bot):
        return True
    return all(_match(a, b, sub) for a, b in zip(t.children(), f.children()))


def match_template(template: Formula, f: Formula) -> dict[str, Formula] | None:
    sub: dict[str, Formula] = {}
    return sub if _match(template, f, sub) else None


def substitute(template: Formula, sub: Mapping[str, Formula]) -> Formula:
    if isinstance(template, Meta):
        return sub[template.name]
    if isinstance(template, Implies):
        return Implies(substitute(template.left, sub), substitute(template.right, sub))
    if isinstance(template, Rhd):
        return Rhd(substitute(template.left, sub), substitute(template.right, sub))
    if isinstance(template, Box):
        return Box(substitute(template.inner, sub))
    return template


def instance(name: str, **sub: Formula | str) -> Formula:
    """Instantiate a named schema, e.g. ``instance("J5", A="p")``."""
    return substitute(SCHEMAS[name], {k: parse(v) if isinstance(v, str) else v for k, v in sub.items()})


class TautologyTooLarge(ValueError):
    pass


def _atoms(f: Formula, out: dict[Formula, int]) -> None:
    if isinstance(f, Implies):
        _atoms(f.left, out)
        _atoms(f.right, out)
    elif not isinstance(f, Bot):
        out.setdefault(f, len(out))


def is_tautology(f: Formula, limit: int = TAUT_ATOM_LIMIT) -> bool:
    """Propositional validity with boxed, ``|>`` and variable subformulas as atoms."""
    atoms: dict[Formula, int] = {}
    _atoms(f, atoms)
    k = len(atoms)
    if k > limit:
        raise TautologyTooLarge(f"{k} atoms exceeds the truth-table limit of {limit}")
    # Evaluate all 2^k rows at once: atom i is the bit pattern of row indices.
    rows = 1 << k
    full = (1 << rows) - 1
    patterns = []
    for i in range(k):
        block = (1 << (1 << i)) - 1
        unit = block << (1 << i)
        pat = 0
        step = 1 << (i + 1)
        for start in range(0, rows, step):
            pat |= unit << start
        patterns.append(pat)

    def ev(g: Formula) -> int:
        if isinstance(g, Bot):
            return 0
        if isinstance(g, Implies):
            return (~ev(g.left) | ev(g.right)) & full
        return patterns[atoms[g]]

    return ev(f) == full


def match_schema(f: Formula, name: str) -> dict[str, Formula] | None:
    """Substitution making schema ``name`` equal to ``f``; ``{}`` for Taut hits."""
    if name == "Taut":
        return {} if is_tautology(f) else None
    try:
        template = SCHEMAS[name]
    except KeyError:
        raise ValueError(f"unknown schema {name!r}") from None
    return match_template(template, f)


# -- proof scripts ----------------------------------------------------------

@dataclass(frozen=True)
class Step:
    formula: Formula
    rule: str  # "axiom" | "mp" | "nec" | "hyp"
    args: tuple = ()


@dataclass
class ProofScript:
    logic: str
    steps: list[Step] = field(default_factory=list)
    lines: list[int] = field(default_factory=list)  # source line of each step

    def conclusion(self) -> Formula | None:
        return self.steps[-1].formula if self.steps else None


@dataclass(frozen=True)
class ProofError:
    step: int
    reason: str

    def __str__(self) -> str:
        return f"step {self.step}: {self.reason}"


class ScriptSyntaxError(ValueError):
    def __init__(self, line: int, message: str) -> None:
        super().__init__(f"line {line}: {message}")
        self.line = line


_JUST = re.compile(r"^(axiom):(\w+)$|^(mp):(\d+),(\d+)$|^(nec):(\d+)$|^(hyp):(\d+)$")


def parse_script(text: str) -> ProofScript:
    """Read the line format ``FORMULA ; axiom:NAME | mp:i,j | nec:i | hyp:k``.

    Steps are numbered from 0 in order of appearance.  A ``logic: NAME``
    header is required before the first step.
    """
    logic = None
    steps: list[Step] = []
    lines: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.lower().startswith("logic:"):
            logic = line.split(":", 1)[1].strip()
            try:
                logic_principles(logic)
            except ValueError as e:
                raise ScriptSyntaxError(lineno, str(e)) from None
            continue
        if logic is None:
            raise ScriptSyntaxError(lineno, "missing 'logic:' header")
        if ";" not in line:
            raise ScriptSyntaxError(lineno, "expected 'FORMULA ; JUSTIFICATION'")
        ftext, jtext = line.rsplit(";", 1)
        try:
            f = parse(ftext)
        except FormulaSyntaxError as e:
            raise ScriptSyntaxError(lineno, str(e)) from None
        m = _JUST.match(jtext.replace(" ", ""))
        if not m:
            raise ScriptSyntaxError(lineno, f"bad justification {jtext.strip()!r}")
        lines.append(lineno)
        if m.group(1):
            steps.append(Step(f, "axiom", (m.group(2),)))
        elif m.group(3):
            steps.append(Step(f, "mp", (int(m.group(4)), int(m.group(5)))))
        elif m.group(6):
            steps.append(Step(f, "nec", (int(m.group(7)),)))
        else:
            steps.append(Step(f, "hyp", (int(m.group(9)),)))
    if logic is None:
        raise ScriptSyntaxError(0, "missing 'logic:' header")
    return ProofScript(logic, steps, lines)


def format_script(script: ProofScript) -> str:
    from .formula import to_string

    lines = [f"logic: {script.logic}"]
    for st in script.steps:
        if st.rule == "axiom":
            j = f"axiom:{st.args[0]}"
        elif st.rule == "mp":
            j = f"mp:{st.args[0]},{st.args[1]}"
        else:
            j = f"{st.rule}:{st.args[0]}"
        lines.append(f"{to_string(st.formula)} ; {j}")
    return "\n".join(lines) + "\n"


def check_proof(
    script: ProofScript, logic: str | None = None, hypotheses: Sequence[Formula] = ()
) -> ProofError | None:
    """None if every step is justified, else the first offending step.

    ``mp:i,j`` needs step j to be ``step_i -> current``; ``nec:i`` needs the
    current formula to be ``[]step_i``.  Necessitation is refused on steps
    that depend on hypotheses, since it is not sound for them.
    """
    logic = logic or script.logic
    allowed = schemas_of(logic)
    tainted: list[bool] = []
    for k, st in enumerate(script.steps):
        f = st.formula

        def ref(i: int) -> Formula:
            if not 0 <= i < k:
                raise _Bad(f"reference {i} is not an earlier step")
            return script.steps[i].formula

        try:
            if st.rule == "axiom":
                name = st.args[0]
                if name not in SCHEMAS and name != "Taut":
                    raise _Bad(f"unknown schema {name}")
                if name not in allowed:
                    raise _Bad(f"schema {name} not in logic {logic}")
                try:
                    hit = match_schema(f, name)
                except TautologyTooLarge as e:
                    raise _Bad(str(e)) from None
                if hit is None:
                    raise _Bad(f"not an instance of {name}")
                tainted.append(False)
            elif st.rule == "mp":
                i, j = st.args
                a, imp = ref(i), ref(j)
                if imp != Implies(a, f):
                    raise _Bad(f"step {j} is not step {i} -> this formula")
                tainted.append(tainted[i] or tainted[j])
            elif st.rule == "nec":
                (i,) = st.args
                a = ref(i)
                if f != Box(a):
                    raise _Bad(f"not the necessitation of step {i}")
                if tainted[i]:
                    raise _Bad(f"necessitation of step {i}, which depends on a hypothesis")
                tainted.append(False)
            elif st.rule == "hyp":
                (i,) = st.args
                if not 0 <= i < len(hypotheses):
                    raise _Bad(f"no hypothesis {i}")
                if hypotheses[i] != f:
                    raise _Bad(f"hypothesis {i} differs")
                tainted.append(True)
            else:
                raise _Bad(f"unknown rule {st.rule}")
        except _Bad as e:
            return ProofError(k, str(e))
    return None


class _Bad(Exception):
    pass


def all_instances(name: str, pool: Sequence[Formula]) -> list[Formula]:
    """Every instance of schema ``name`` with metavariables drawn from ``pool``."""
    template = SCHEMAS[name]
    metas = sorted({g.name for g in _metas(template)})
    return [substitute(template, dict(zip(metas, combo))) for combo in itertools.product(pool, repeat=len(metas))]


def _metas(f: Formula):
    if isinstance(f, Meta):
        yield f
    for c in f.children():
        yield from _metas(c)
