"""Witness-indistinguishable proof of knowledge for the OR language."""

from .branch import BlumBranch, BranchProtocol, CircuitPoKBranch, EvaluatorView, GarbledRep, GarblerView
from .compose import BRANCH_A, BRANCH_B, OrProtocol, OrResponse, OrWitness, or_compose
from .session import (ExtractionResult, OrStatement, ResettableProver, WipokConfig, WipokProver,
                      WipokVerifier, cycle_witness, extract_knowledge, make_protocol,
                      measure_extraction_exponent, openings_witness, wipok_run, witness_is_valid)

__all__ = [
    "BlumBranch", "BranchProtocol", "CircuitPoKBranch", "EvaluatorView", "GarbledRep", "GarblerView",
    "BRANCH_A", "BRANCH_B", "OrProtocol", "OrResponse", "OrWitness", "or_compose",
    "ExtractionResult", "OrStatement", "ResettableProver", "WipokConfig", "WipokProver",
    "WipokVerifier", "cycle_witness", "extract_knowledge", "make_protocol",
    "measure_extraction_exponent", "openings_witness", "wipok_run", "witness_is_valid",
]
