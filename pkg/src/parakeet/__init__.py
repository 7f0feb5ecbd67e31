"""Prove first-order problems with checkable proofs and suggest fact instantiations."""

from .instantiation import infer, transform, filter_fact_uses, merge_all
from .kernel import Proof, ProofNode, check_proof, count_steps, format_proof
from .parser import parse_problem, parse_file
from .prover import ProverLimits, prove

__version__ = "0.1.0"

__all__ = [
    "Proof",
    "ProofNode",
    "ProverLimits",
    "check_proof",
    "count_steps",
    "filter_fact_uses",
    "format_proof",
    "infer",
    "merge_all",
    "parse_file",
    "parse_problem",
    "prove",
    "transform",
]
