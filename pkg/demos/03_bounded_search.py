"""
Bounded frame enumeration
=========================

Frames are enumerated one per isomorphism class, and every valuation of a
frame is evaluated at once with big-integer bit sets.
"""

import time

from ilkit import decide as dec
from ilkit.formula import neg, parse
from ilkit.veltman import check_condition

for logic in ("IL", "ILW"):
    counts = [len(dec.frames(n, logic)) for n in range(1, 5)]
    print(f"{logic} frames with 1..4 worlds:", counts)

# W is not an IL theorem: a small IL frame breaks it
w = parse("p |> q -> p |> (q & []~p)")
t = time.perf_counter()
r = dec.sat_bounded(neg(w), "IL", 5)
print(f"not-W under IL: {r.verdict} with {r.model.n} worlds after {r.frames_checked} frames ({time.perf_counter() - t:.2f}s)")
print("the model breaks the W frame condition at", check_condition(r.model, "W"))

# restricting to ILW frames makes it unsatisfiable up to the bound
print("not-W under ILW:", dec.sat_bounded(neg(w), "ILW", 4).verdict)

# a consistency oracle qualified by its bound
print(dec.default_oracle([parse("p |> q"), parse("~(p |> (q & []~p))")], 4))
print(dec.default_oracle([parse("<>true")], 4))
