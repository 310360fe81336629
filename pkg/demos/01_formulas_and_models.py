"""
Formulas, adequate sets and Veltman models
==========================================

Parse a few formulas, look at a finite adequate set, and evaluate formulas
on the shipped "incomparable labels" model.
"""

import json

from ilkit.cli import data_path
from ilkit.formula import adequate_set, parse, to_string
from ilkit.veltman import OrdinaryModel, check_condition, validate

# |> binds weaker than the boolean connectives and is not associative
f = parse("p |> q -> p |> (q & []~p)")
print("W instance:", to_string(f))

# the adequate set closes under subformulas, single negation and |>-pairing
phi = adequate_set(parse("p |> q"))
print(len(phi), "formulas in the adequate set of p |> q")
print([to_string(g) for g in phi.formulas[:8]], "...")

# a shipped model: w sees u1, v1, u2, v2 with u1 S_w v1 and u2 S_w v2
m = OrdinaryModel.from_json(json.loads(data_path("models", "fig_no_maximum.json").read_text()))
print("valid Veltman model:", validate(m) is None)
for text in ("r |> (~p | ~q)", "r |> ~p", "r |> ~q"):
    print(f"w forces {text}:", m.force("w", parse(text)))

# u1 and u2 cannot be told apart by any formula of the adequate set
pool = adequate_set([parse("r |> (~p | ~q)"), parse("r |> ~p"), parse("r |> ~q")]).formulas
print("u1 and u2 agree:", m.theory("u1", pool) == m.theory("u2", pool))

# frame conditions report a witness or None
for principle in ("P", "M", "W"):
    print(principle, "counterexample:", check_condition(m, principle))

print(m.to_dot())
