"""Hamiltonicity statements and Blum-style Sigma protocols."""

from .context import CommitContext
from .graph import (CycleWitness, GraphInstance, find_hamiltonian_cycle, instance_from_json,
                    instance_gen, is_hamiltonian, load_instance, positions_form_hamiltonian_cycle)
from .hamiltonicity import (MODIFIED, PLAIN, OpenAll, OpenCycle, SigmaFirstMsg, SigmaResponse,
                            SigmaState, decode_message, encode_message, extract_cycle, f_bad,
                            message_len, mh_commit, mh_resp, mh_samp, mh_simresp, mh_simsamp,
                            mh_verify, sigma_p1, sigma_p3, sigma_sim, sigma_verify)

__all__ = [
    "CommitContext", "CycleWitness", "GraphInstance", "find_hamiltonian_cycle",
    "instance_from_json", "instance_gen", "is_hamiltonian", "load_instance",
    "positions_form_hamiltonian_cycle", "MODIFIED", "PLAIN", "OpenAll", "OpenCycle",
    "SigmaFirstMsg", "SigmaResponse", "SigmaState", "decode_message", "encode_message",
    "extract_cycle", "f_bad", "message_len", "mh_commit", "mh_resp", "mh_samp", "mh_simresp",
    "mh_simsamp", "mh_verify", "sigma_p1", "sigma_p3", "sigma_sim", "sigma_verify",
]
