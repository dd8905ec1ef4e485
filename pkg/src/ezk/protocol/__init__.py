"""Protocol 1 (zero-knowledge proof) and Protocol 2 (argument) end to end."""

from .config import ARGUMENT, PROOF, ProtocolConfig, lint_config
from .messages import MAX_MESSAGE, MsgType, ProtocolMessage
from .run import RunResult, run_protocol
from .scripted import (ABORT_IF_FIRST_BIT, BAD_OPENING, HONEST, ScriptedVerifier,
                       first_bit_bias, first_commitment_bit)
from .sessions import CYCLE, OPENINGS, ProverSession, Verdict, VerifierSession
from .soundness import (BadChallengeReport, achievable_answer_sets, bad_challenge_report,
                        brute_force_soundness, count_accepting_responses,
                        exhaustive_soundness_bound, hamiltonian_cycles)
from .transcript import Transcript, replay, verify_transcript
from .transport import run_local, run_over_socket, serve_once

__all__ = [
    "ARGUMENT", "PROOF", "ProtocolConfig", "lint_config", "MAX_MESSAGE", "MsgType",
    "ProtocolMessage", "RunResult", "run_protocol", "ABORT_IF_FIRST_BIT", "BAD_OPENING",
    "HONEST", "ScriptedVerifier", "first_bit_bias", "first_commitment_bit", "ProverSession",
    "Verdict", "VerifierSession", "CYCLE", "OPENINGS", "BadChallengeReport", "achievable_answer_sets",
    "bad_challenge_report", "brute_force_soundness", "count_accepting_responses",
    "exhaustive_soundness_bound", "hamiltonian_cycles", "Transcript", "replay",
    "verify_transcript", "run_local", "run_over_socket", "serve_once",
]
