"""
Generalised Veltman frames
==========================

In generalised frames S_w relates a world to a set of worlds.  Only the
generators are stored; supersets inside R[w] follow by monotonicity.
"""

import json
import random

from ilkit.cli import data_path
from ilkit.formula import parse
from ilkit.genveltman import GeneralisedModel, check_gen_P, check_gen_W, random_gen_model, validate_gen


def load(name):
    return GeneralisedModel.from_json(json.loads(data_path("models", name).read_text()))


for name in ("gen_P_ok.json", "gen_P_bad.json", "gen_W_ok.json", "gen_W_bad.json", "gen_qt_bad.json"):
    m = load(name)
    bad = validate_gen(m)
    print(f"{name:18} valid: {bad is None!s:5} P: {check_gen_P(m)}  W: {check_gen_W(m)}")

# a random generalised ILW model forces every W instance we try
m = random_gen_model(random.Random(2), n=5, require=("W",))
print("W instance everywhere:", m.truth(parse("p |> q -> p |> (q & []~p)")) == m.all_mask)
print(m.to_dot())
