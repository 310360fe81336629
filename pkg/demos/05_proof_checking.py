"""
Checking Hilbert proofs
=======================

Proof scripts list one formula per line with its justification.  The
checker matches axiom schemas, modus ponens and necessitation.
"""

from ilkit.cli import data_path
from ilkit.proofcheck import check_proof, parse_script

path = data_path("proofs", "item1_box_transitive.txt")
text = path.read_text()
print(text)

script = parse_script(text)
print("check:", check_proof(script) or "ok", "| conclusion:", script.conclusion())

# break the last step and the checker points at its line
lines = text.splitlines()
k = script.lines[-1] - 1
formula, just = lines[k].split(";", 1)
lines[k] = f"~({formula.strip()}) ;{just}"
broken = parse_script("\n".join(lines))
err = check_proof(broken)
print(f"rejected at line {broken.lines[err.step]}: {err.reason}")
