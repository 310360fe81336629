import json
import sys
from pathlib import Path

import pytest
from hypothesis import strategies as st

from ilkit.formula import BOT, Box, Implies, Rhd, Var

DATA = Path(__file__).resolve().parents[1] / "src" / "ilkit" / "data"


def load_json(*parts):
    return json.loads(DATA.joinpath(*parts).read_text())


@pytest.fixture
def data_dir():
    return DATA


atoms = st.one_of(st.just(BOT), st.sampled_from(["p", "q", "r"]).map(Var))


def _extend(children):
    return st.one_of(
        st.tuples(children, children).map(lambda t: Implies(*t)),
        st.tuples(children, children).map(lambda t: Rhd(*t)),
        children.map(Box),
    )


formulas = st.recursive(atoms, _extend, max_leaves=8)


def naive_force(data: dict, w: str, f) -> bool:
    """Forcing straight from the JSON pair lists, no bitmasks."""
    R = {(a, b) for a, b in data["R"]}
    S = {(x, u, v) for x, pairs in data["S"].items() for u, v in pairs}
    val = {p: set(ws) for p, ws in data["valuation"].items()}
    worlds = data["worlds"]

    def force(w, f):
        if f is BOT or type(f).__name__ == "Bot":
            return False
        if isinstance(f, Var):
            return w in val.get(f.name, ())
        if isinstance(f, Implies):
            return not force(w, f.left) or force(w, f.right)
        if isinstance(f, Box):
            return all(force(u, f.inner) for u in worlds if (w, u) in R)
        if isinstance(f, Rhd):
            return all(
                any((w, u, v) in S and force(v, f.right) for v in worlds)
                for u in worlds
                if (w, u) in R and force(u, f.left)
            )
        raise TypeError(f)

    return force(w, f)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        ok, detail = results[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'} ({detail})")
