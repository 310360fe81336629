"""Interpretability logic toolkit.

Formulas and adequate sets, ordinary and generalised Veltman models with
frame-condition checkers, a Hilbert proof checker, assuring labels, and a
bounded decision procedure that builds verified ILW countermodels.
"""
from .decide import (
    Catalogue,
    DecisionResult,
    decide_bounded,
    default_oracle,
    ilw_decide,
    load_corpus,
    phi_assuring,
    sat_bounded,
    verify_truth_lemma,
    witness_wfin_defies,
    witness_wfin_probs,
)
from .formula import AdequateSet, Formula, adequate_set, parse, to_string
from .genveltman import GeneralisedModel, check_gen_P, check_gen_W, validate_gen
from .labels import assures, boxdotset, boxset, full_closure_phi, harness_labelling, q_labels, semantic_assuring
from .proofcheck import check_proof, parse_script
from .veltman import OrdinaryModel, check_condition, validate

__all__ = [
    "AdequateSet",
    "Catalogue",
    "DecisionResult",
    "Formula",
    "GeneralisedModel",
    "OrdinaryModel",
    "adequate_set",
    "assures",
    "boxdotset",
    "boxset",
    "check_condition",
    "check_gen_P",
    "check_gen_W",
    "check_proof",
    "decide_bounded",
    "default_oracle",
    "full_closure_phi",
    "harness_labelling",
    "ilw_decide",
    "load_corpus",
    "parse",
    "parse_script",
    "phi_assuring",
    "q_labels",
    "sat_bounded",
    "semantic_assuring",
    "to_string",
    "validate",
    "validate_gen",
    "verify_truth_lemma",
    "witness_wfin_defies",
    "witness_wfin_probs",
]
