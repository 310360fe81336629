"""
Assuring successors and labels
==============================

A box at a successor does not make that successor assuring for the boxed
formula.  Labels also need not be maximal, and the lemma harness checks
how labels travel along chains.
"""

import json
import random

from ilkit import labels as lab
from ilkit.cli import data_path
from ilkit.formula import parse, to_string
from ilkit.veltman import OrdinaryModel, random_model


def load(name):
    data = json.loads(data_path("models", name).read_text())
    return OrdinaryModel.from_json(data), [parse(s) for s in data.get("pool", [])]


m, pool = load("box_vs_assuringness.json")
p = parse("p")
print("y forces []p:", m.force("y", parse("[]p")))
print("y assuring for {}:", lab.semantic_assuring(m, "x", "y", frozenset(), pool))
print("y assuring for {p}:", lab.semantic_assuring(m, "x", "y", frozenset([p]), pool))
# the strong reading names the world that breaks the label
print("failure:", lab.assuring_failure(m, "x", "y", frozenset([p])))

# box-dot sets: what x promises given a label
for label in ((), (p,)):
    got = lab.boxdotset(m, "x", label, pool)
    print(f"box-dot set for {[to_string(f) for f in label]}:", sorted(map(to_string, got)))

# the harness finds nothing on ILP frames, and something on a frame that breaks P
rng = random.Random(1)
hits = sum(len(lab.harness_labelling("P", random_model(rng, logic="ILP"), lab.random_pool(rng), 5, rng)) for _ in range(50))
print("violations on 50 ILP models:", hits)
bad, bad_pool = load("control_P.json")
print("violations on the P control:", lab.harness_labelling("P", bad, bad_pool, 20, allow_violating=True)[:1])

# Q-labels along a chain x R y R z, listed deepest first
ctrl, ctrl_pool = load("control_R.json")
bd = lab.model_boxdot(ctrl, ctrl_pool + [parse("~q")])
seq = lab.q_labels(["z", "y", "x"], [frozenset([p]), frozenset()], parse("q"), bd)
for j in (1, 2):
    print(f"Q_{j}:", sorted(map(to_string, seq.Q(j))), "=", lab.format_q_expr(lab.unfold_q(j)))
