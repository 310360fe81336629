"""
Deciding ILW with a labelled construction
=========================================

``ilw_decide`` builds a countermodel from worlds that pair a sequence of
labels with a maximal consistent subset of the adequate set.  The truth
lemma is checked on every model it returns.
"""

from ilkit import decide as dec
from ilkit.formula import neg, parse
from ilkit.veltman import check_condition, validate

for text in ("[]([]p -> p) -> []p", "p |> q -> p |> (q & []~p)", "<>true", "(p |> q) | (q |> p)"):
    r = dec.ilw_decide(parse(text), 4)
    print(f"{text:32} {r.verdict}")
    if r.model is None:
        continue
    con = r.construction
    for i in range(len(con.worlds)):
        print(f"    {r.model.worlds[i]}: labels {con.label_text(i)}")
    print("    valid:", validate(r.model) is None, "| W holds:", check_condition(r.model, "W") is None,
          "| truth lemma:", dec.verify_truth_lemma(con) is None)

# the corpus run agrees with plain bounded search
corpus = dec.load_corpus()
agree = sum(
    (dec.ilw_decide(e.formula, 3).verdict == dec.COUNTERMODEL)
    == (dec.sat_bounded(neg(e.formula), "ILW", 3).verdict == dec.SAT)
    for e in corpus
)
print(f"agreement on the corpus at bound 3: {agree}/{len(corpus)}")
