"""Command-line interface.

Every command prints one JSON report (DOT for ``export-dot``) on stdout.
Reports carry ``schema_version`` and are checked against the shipped
schema before printing.  Exit codes: 64 for usage errors and malformed
input, 66 for unreadable files, 70 for internal failures.  ``decide``
exits 0 when the formula is provable up to the bound, 1 for a
countermodel and 2 when the search cannot answer.  Checking commands
(validate, proof-check, harness) exit 1 when the check fails.
"""
from __future__ import annotations

import argparse
import json
import random
import sys
from functools import lru_cache
from importlib import resources
from pathlib import Path

import jsonschema

from . import decide as dec
from . import labels as lab
from .formula import FormulaSyntaxError, adequate_set, parse, sort_key, to_string, variables
from .genveltman import GeneralisedModel, check_gen_P, check_gen_W, validate_gen
from .proofcheck import ScriptSyntaxError, check_proof, parse_script
from .veltman import PRINCIPLES, OrdinaryModel, check_condition, random_model, validate

SCHEMA_VERSION = 1
EX_USAGE, EX_NOINPUT, EX_SOFTWARE = 64, 66, 70
POOL_LIMIT = 32
HARNESS_LOGIC = {"P": "ILP", "Pfull": "ILP", "M": "ILM", "M0": "ILM0", "R": "ILR", "Rfull": "ILR", "RTrans": "ILR"}


class UsageError(Exception):
    pass


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EX_USAGE)


@lru_cache(maxsize=None)
def report_schema() -> dict:
    return json.loads(resources.files("ilkit").joinpath("data/report_schema.json").read_text())


def data_path(*parts: str) -> Path:
    return Path(str(resources.files("ilkit").joinpath("data", *parts)))


def _formula(text: str):
    try:
        return parse(text)
    except FormulaSyntaxError as e:
        raise UsageError(f"cannot parse {text!r}: {e}") from None


def _formulas(texts) -> list:
    return [_formula(t) for t in texts or []]


def _label(text: str) -> frozenset:
    """Comma-separated formulas; the empty string is the empty label."""
    return frozenset(_formula(t) for t in text.split(",") if t.strip())


def _show(fs) -> list[str]:
    return [to_string(f) for f in sorted(fs, key=sort_key)]


def load_model_data(path: str) -> dict:
    """Read a model file; bare names of shipped fixtures are found in the data directory."""
    p = Path(path)
    if not p.exists() and not p.is_absolute() and p.parent == Path("."):
        shipped = data_path("models", p.name)
        if shipped.exists():
            p = shipped
    try:
        return json.loads(p.read_text())
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror or e}") from None
    except json.JSONDecodeError as e:
        raise InputError(f"{path} is not JSON: {e}") from None


def load_model(path: str):
    data = load_model_data(path)
    try:
        if data.get("type", "ordinary") == "generalised":
            return GeneralisedModel.from_json(data), data
        return OrdinaryModel.from_json(data), data
    except (KeyError, ValueError, TypeError) as e:
        raise UsageError(f"bad model in {path}: {e}") from None


def _ordinary(path: str):
    m, data = load_model(path)
    if not isinstance(m, OrdinaryModel):
        raise UsageError("this command needs an ordinary Veltman model")
    return m, data


def _world(m, w: str) -> str:
    if w not in m.pos:
        raise UsageError(f"unknown world {w!r}")
    return w


def _pool(args, data: dict, seeds) -> list:
    if args.pool:
        return _formulas(args.pool)
    if "pool" in data:
        return _formulas(data["pool"])
    phi = adequate_set(list(seeds) or [parse("false")])
    return list(phi.formulas[:POOL_LIMIT])


# -- commands -----------------------------------------------------------------

def cmd_parse(args) -> tuple[dict, int]:
    f = _formula(args.formula)
    out = {"formula": to_string(f), "size": f.size, "variables": variables(f)}
    if args.phi:
        out["adequate_set"] = _show(adequate_set(f).formulas)
    return out, 0


def cmd_eval(args):
    m, _ = load_model(args.model)
    f = _formula(args.formula)
    return {"world": _world(m, args.world), "formula": to_string(f), "value": m.force(args.world, f)}, 0


def cmd_validate(args):
    m, _ = load_model(args.model)
    bad = validate_gen(m) if isinstance(m, GeneralisedModel) else validate(m)
    if bad is None:
        return {"ok": True}, 0
    return {"ok": False, "clause": bad.clause, "witness": [_jsonable(x) for x in bad.witness]}, 1


def _jsonable(x):
    if isinstance(x, (list, tuple)):
        return [_jsonable(y) for y in x]
    return x


def cmd_conditions(args):
    m, _ = load_model(args.model)
    out = {}
    if isinstance(m, GeneralisedModel):
        checks = {"P": check_gen_P(m), "W": check_gen_W(m, strict=args.strict)}
    else:
        checks = {p: check_condition(m, p) for p in PRINCIPLES}
    for name, hit in checks.items():
        out[name] = {"ok": True} if hit is None else {"ok": False, "counterexample": _jsonable(hit)}
    return {"conditions": out}, 0


def cmd_decide(args):
    g = _formula(args.formula)
    try:
        if args.logic == "ILW":
            r = dec.ilw_decide(g, args.bound)
        else:
            r = dec.decide_bounded(g, args.logic, args.bound)
    except (dec.BoundError, dec.DecisionError, ValueError) as e:
        return {"verdict": "error", "formula": to_string(g), "logic": args.logic, "bound": args.bound, "error": str(e)}, 2
    out = r.to_json()
    if r.construction is not None:
        con = r.construction
        out["construction"] = {
            "adequate_set_size": len(con.phi),
            "worlds": [
                {"id": r.model.worlds[i], "labels": con.label_text(i), "theory_boxes": con.theory(i).box_count()}
                for i in range(len(con.worlds))
            ],
        }
    if r.model is not None:
        if args.emit:
            _write(args.emit, json.dumps(r.model.to_json(), indent=1) + "\n")
        if args.dot:
            _write(args.dot, r.model.to_dot())
    return out, 0 if r.verdict == dec.PROVABLE else 1


def _write(path: str, text: str) -> None:
    try:
        Path(path).write_text(text)
    except OSError as e:
        raise InputError(f"cannot write {path}: {e.strerror or e}") from None


def cmd_labels(args):
    m, data = _ordinary(args.model)
    x, y = _world(m, args.x), _world(m, args.y)
    S = _label(args.label) if args.label is not None else frozenset(_formulas(data.get("label", [])))
    T = _label(args.T) if args.T is not None else S
    pool = _pool(args, data, S)
    return {
        "x": x,
        "y": y,
        "label": _show(S),
        "pool": _show(pool),
        "semantic_assuring": lab.semantic_assuring(m, x, y, S, pool),
        "assures": lab.assures(m, x, y, S),
        "boxset": _show(lab.boxset(m, x, T, pool)),
        "boxdotset": _show(lab.boxdotset(m, x, T, pool)),
    }, 0


def cmd_closure(args):
    g = _formula(args.formula)
    phi = adequate_set(g)
    S = _label(args.label)
    if any(s not in phi.index for s in S):
        raise UsageError("label formulas must belong to the adequate set of --formula")
    try:
        cat = dec.Catalogue(phi, args.bound)
    except dec.BoundError as e:
        raise UsageError(str(e)) from None
    gi = phi.index[g]
    theories = [t for t in cat.order if t >> gi & 1]
    if not theories:
        raise UsageError(f"no theory up to {args.bound} worlds contains the formula")
    if args.theory >= len(theories):
        raise UsageError(f"only {len(theories)} theories contain the formula")
    gamma = theories[args.theory]
    clo = lab.full_closure_phi(S, gamma, phi, cat)
    return {"label": _show(S), "closure": _show(clo), "theory": _show(phi.members(gamma)), "bound": args.bound}, 0


def cmd_qlabels(args):
    m, data = _ordinary(args.model)
    chain = [_world(m, w.strip()) for w in args.chain.split(",")]
    labels = [_label(t) for t in args.label or []]
    B = _formula(args.pivot)
    pool = _pool(args, data, [B, *(s for L in labels for s in L)])
    boxdot = lab.model_boxdot(m, pool)
    try:
        seq = lab.q_labels(chain, labels, B, boxdot)
    except ValueError as e:
        raise UsageError(str(e)) from None
    n = len(labels)
    unfolded = [lab.eval_q_expr(lab.unfold_q(j), chain, labels, B, boxdot) for j in range(1, n + 1)]
    return {
        "chain": chain,
        "pivot": to_string(B),
        "pool": _show(pool),
        "Q": [_show(q) for q in seq.q],
        "unfolded": [_show(q) for q in unfolded],
        "expressions": [lab.format_q_expr(lab.unfold_q(j)) for j in range(1, n + 1)],
        "agree": list(seq.q) == unfolded,
    }, 0


def cmd_harness(args):
    rng = random.Random(args.seed)
    violations = []
    if args.model:
        m, data = _ordinary(args.model)
        pool = _pool(args, data, [])
        try:
            found = lab.harness_labelling(args.principle, m, pool, args.label_trials, rng, args.allow_violating)
        except ValueError as e:
            raise UsageError(str(e)) from None
        violations.extend(found)
        models = 1
    else:
        logic = HARNESS_LOGIC[args.principle]
        for k in range(args.trials):
            m = random_model(rng, logic=logic)
            pool = lab.random_pool(rng, args.pool_size)
            for v in lab.harness_labelling(args.principle, m, pool, args.label_trials, rng):
                v["model"] = k
                violations.append(v)
        models = args.trials
    out = {"principle": args.principle, "seed": args.seed, "models": models, "violations": violations}
    return out, 1 if violations else 0


def cmd_proof_check(args):
    try:
        text = Path(args.script).read_text()
    except OSError as e:
        raise InputError(f"cannot read {args.script}: {e.strerror or e}") from None
    try:
        script = parse_script(text)
    except ScriptSyntaxError as e:
        return {"ok": False, "logic": args.logic or "", "steps": 0, "line": e.line, "reason": str(e)}, 1
    hyps = _formulas(args.hyp)
    err = check_proof(script, args.logic, hyps)
    out = {"logic": args.logic or script.logic, "steps": len(script.steps)}
    if err is None:
        concl = script.conclusion()
        out.update(ok=True)
        if concl is not None:
            out["conclusion"] = to_string(concl)
        return out, 0
    out.update(ok=False, step=err.step, line=script.lines[err.step], reason=err.reason)
    return out, 1


def cmd_export_dot(args):
    m, _ = load_model(args.model)
    text = m.to_dot()
    if args.out:
        _write(args.out, text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    return None, 0


# -- argument parsing -----------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ilkit", description="Interpretability logic toolkit.")
    p.add_argument("--seed", type=int, default=0, help="seed for every random choice")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="seed for every random choice")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name: str, help: str) -> argparse.ArgumentParser:
        return sub.add_parser(name, help=help, parents=[common])

    s = add("parse", help="parse and print a formula")
    s.add_argument("--formula", required=True)
    s.add_argument("--phi", action="store_true", help="also list the adequate set")
    s.set_defaults(func=cmd_parse)

    s = add("eval", help="evaluate a formula at a world")
    s.add_argument("--model", required=True)
    s.add_argument("--world", required=True)
    s.add_argument("--formula", required=True)
    s.set_defaults(func=cmd_eval)

    s = add("validate", help="check that a model is a Veltman model")
    s.add_argument("--model", required=True)
    s.set_defaults(func=cmd_validate)

    s = add("conditions", help="check frame conditions")
    s.add_argument("--model", required=True)
    s.add_argument("--strict", action="store_true", help="generalised W over all supersets")
    s.set_defaults(func=cmd_conditions)

    s = add("decide", help="bounded decision with countermodels")
    s.add_argument("--formula", required=True)
    s.add_argument("--logic", default="ILW")
    s.add_argument("--bound", type=int, default=4)
    s.add_argument("--emit", help="write the countermodel as JSON")
    s.add_argument("--dot", help="write the countermodel as DOT")
    s.set_defaults(func=cmd_decide)

    s = add("labels", help="assuring-successor checks and box-sets")
    s.add_argument("--model", required=True)
    s.add_argument("--x", required=True)
    s.add_argument("--y", required=True)
    s.add_argument("--label", help="comma-separated formulas")
    s.add_argument("--T", help="label for the box-sets at x (default: --label)")
    s.add_argument("--pool", action="append")
    s.set_defaults(func=cmd_labels)

    s = add("closure", help="full closure of a label inside an adequate set")
    s.add_argument("--formula", required=True)
    s.add_argument("--label", default="")
    s.add_argument("--theory", type=int, default=0, help="index among theories containing the formula")
    s.add_argument("--bound", type=int, default=3)
    s.set_defaults(func=cmd_closure)

    s = add("qlabels", help="Q-label sequence along a chain")
    s.add_argument("--model", required=True)
    s.add_argument("--chain", required=True, help="w_n,...,w_0")
    s.add_argument("--label", action="append", help="S_n first; repeat once per label")
    s.add_argument("--pivot", required=True)
    s.add_argument("--pool", action="append")
    s.set_defaults(func=cmd_qlabels)

    s = add("harness", help="labelling-lemma harness")
    s.add_argument("--principle", required=True, choices=sorted(lab.HARNESS_PRINCIPLES))
    s.add_argument("--trials", type=int, default=200, help="number of random models")
    s.add_argument("--label-trials", type=int, default=5, help="sampled labels per chain")
    s.add_argument("--pool-size", type=int, default=6)
    s.add_argument("--model", help="run on one model instead of random ones")
    s.add_argument("--pool", action="append")
    s.add_argument("--allow-violating", action="store_true")
    s.set_defaults(func=cmd_harness)

    s = add("proof-check", help="check a Hilbert proof script")
    s.add_argument("--script", required=True)
    s.add_argument("--logic")
    s.add_argument("--hyp", action="append")
    s.set_defaults(func=cmd_proof_check)

    s = add("export-dot", help="write a model as DOT")
    s.add_argument("--model", required=True)
    s.add_argument("--out")
    s.set_defaults(func=cmd_export_dot)
    return p


def _emit(report: dict) -> None:
    jsonschema.validate(report, report_schema())
    sys.stdout.write(json.dumps(report, sort_keys=True) + "\n")


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # --help exits 0; parse errors exit EX_USAGE
        return e.code if isinstance(e.code, int) else EX_USAGE
    try:
        out, code = args.func(args)
    except UsageError as e:
        print(f"ilkit: {e}", file=sys.stderr)
        return EX_USAGE
    except InputError as e:
        print(f"ilkit: {e}", file=sys.stderr)
        return EX_NOINPUT
    except Exception as e:  # internal failure
        print(f"ilkit: internal error: {type(e).__name__}: {e}", file=sys.stderr)
        return EX_SOFTWARE
    if out is not None:
        report = {"schema_version": SCHEMA_VERSION, "command": args.command, **out}
        try:
            _emit(report)
        except jsonschema.ValidationError as e:
            print(f"ilkit: internal error: report does not match schema: {e.message}", file=sys.stderr)
            return EX_SOFTWARE
    return code


def main(argv=None) -> int:
    return run(argv)


if __name__ == "__main__":
    sys.exit(main())
