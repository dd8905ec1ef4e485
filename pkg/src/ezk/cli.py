"""Command-line interface.

Exit codes: 0 accept or pass, 1 reject or fail, 2 usage or configuration error.
``EZK_SEED`` supplies the seed when ``--seed`` is absent.
"""

from __future__ import annotations

import json
import socketserver
import sys
import threading
from pathlib import Path

import click

from . import __version__
from .errors import DecodeError, InvalidArgument, SessionError, Unsupported
from .primitives.rng import DeterministicRng
from .protocol import (ProtocolConfig, ProverSession, Transcript, Verdict, VerifierSession,
                       lint_config, run_protocol, verify_transcript)
from .protocol.config import ARGUMENT, PROOF
from .protocol.transport import DEFAULT_TIMEOUT, connect, run_over_socket
from .sigma import instance_gen
from .sigma.graph import load_instance

EXIT_OK, EXIT_REJECT, EXIT_USAGE = 0, 1, 2

seed_option = click.option("--seed", type=int, default=0, envvar="EZK_SEED", show_default=True,
                           help="Master seed (falls back to EZK_SEED).")
json_option = click.option("--json", "as_json", is_flag=True, help="Emit JSON on stdout.")


def _emit(obj: dict, as_json: bool, human: str) -> None:
    click.echo(json.dumps(obj, sort_keys=True) if as_json else human)


def _fail_usage(msg: str):
    click.echo(f"error: {msg}", err=True)
    sys.exit(EXIT_USAGE)


def _config(mode: str, lam: int, reps: int, wipok_reps: int, split: bool) -> ProtocolConfig:
    make = ProtocolConfig.proof if mode == PROOF else ProtocolConfig.argument
    kw = dict(lam=lam, lam_reps=reps, split_frames=split)
    if mode == ARGUMENT:
        kw["wipok_reps"] = wipok_reps
    try:
        cfg = make(**kw)
        lint_config(cfg)
    except (InvalidArgument, TypeError) as exc:
        _fail_usage(str(exc))
    return cfg


def _addr(value: str) -> tuple[str, int]:
    host, _, port = value.rpartition(":")
    if not host or not port.isdigit():
        raise click.BadParameter("expected HOST:PORT")
    return host, int(port)


def protocol_options(fn):
    fn = click.option("--split-frames", is_flag=True, help="Send parameters in their own frame.")(fn)
    fn = click.option("--wipok-reps", type=int, default=4, show_default=True)(fn)
    fn = click.option("--reps", type=int, default=8, show_default=True,
                      help="Parallel Sigma repetitions (challenge length).")(fn)
    fn = click.option("--lambda", "lam", type=int, default=16, show_default=True)(fn)
    fn = click.option("--mode", type=click.Choice([PROOF, ARGUMENT]), default=PROOF,
                      show_default=True)(fn)
    return fn


@click.group()
@click.version_option(version=__version__, message="%(version)s")
def main():
    """Zero-knowledge protocols over Hamiltonicity and an exact quantum testbed."""


# --- instances -----------------------------------------------------------------------------------

@main.group()
def instance():
    """Graph instances."""


@instance.command("gen")
@click.option("--n", type=int, required=True)
@click.option("--edge-prob", type=float, default=0.3, show_default=True)
@click.option("--non-member", is_flag=True, help="Certified non-Hamiltonian graph (n <= 10).")
@click.option("--out", type=click.Path(dir_okay=False), help="Write the instance here.")
@seed_option
def instance_gen_cmd(n, edge_prob, non_member, out, seed):
    try:
        x, w = instance_gen(n, edge_prob, not non_member, DeterministicRng(seed).fork("instance"))
    except (InvalidArgument, Unsupported) as exc:
        _fail_usage(str(exc))
    text = json.dumps(x.to_json(w), sort_keys=True)
    if out:
        Path(out).write_text(text + "\n")
    click.echo(text)


def _instance(path, n, seed):
    if path:
        try:
            return load_instance(path)
        except (OSError, ValueError, KeyError) as exc:
            _fail_usage(f"cannot load instance: {exc}")
    return instance_gen(n, 0.3, True, DeterministicRng(seed).fork("instance"))


# --- protocol ------------------------------------------------------------------------------------

@main.command()
@protocol_options
@click.option("--instance", "instance_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--n", type=int, default=5, show_default=True, help="Size of a generated instance.")
@click.option("--transport", type=click.Choice(["local", "tcp"]), default="local", show_default=True)
@click.option("--connect", "connect_to", help="HOST:PORT of a verifier server (tcp transport).")
@click.option("--transcript", type=click.Path(dir_okay=False), help="Save the transcript here.")
@click.option("--timeout", type=float, default=DEFAULT_TIMEOUT, show_default=True)
@seed_option
@json_option
def prove(mode, lam, reps, wipok_reps, split_frames, instance_path, n, transport, connect_to,
          transcript, timeout, seed, as_json):
    """Run the honest prover (against a local verifier, or a server over TCP)."""
    cfg = _config(mode, lam, reps, wipok_reps, split_frames)
    x, w = _instance(instance_path, n, seed)
    if w is None:
        _fail_usage("the instance carries no witness")
    if transport == "local":
        res = run_protocol(x, w, cfg, seed)
        if transcript:
            res.transcript.save(transcript)
        msgs = res.transcript.messages
        report = {"mode": mode, "transport": transport, "verdict": res.verdict.name,
                  "messages": len(msgs), "bytes": sum(len(m.frame()) for m in msgs),
                  "transcript_sha256": res.transcript.digest(), "seed": seed}
        _emit(report, as_json, f"{res.verdict.name} after {len(msgs)} messages")
        sys.exit(EXIT_OK if res.verdict is Verdict.ACCEPT else EXIT_REJECT)
    if not connect_to:
        _fail_usage("--connect HOST:PORT is required with --transport tcp")
    host, port = _addr(connect_to)
    session = ProverSession(x, w, cfg, DeterministicRng(seed).fork("prover"))
    try:
        with connect(host, port, timeout) as sock:
            log = run_over_socket(session, sock, timeout)
    except (OSError, SessionError, DecodeError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_REJECT)
    # the verifier's verdict never travels back; the prover only knows whether it aborted
    aborted = session.verdict is Verdict.ABORT
    report = {"mode": mode, "transport": transport, "messages": len(log),
              "bytes": sum(len(m.frame()) for m in log), "aborted": aborted, "seed": seed}
    _emit(report, as_json, "aborted: invalid challenge opening" if aborted
          else f"sent proof in {len(log)} messages")
    sys.exit(EXIT_REJECT if aborted else EXIT_OK)


@main.command()
@click.option("--transcript", type=click.Path(exists=True, dir_okay=False), required=True)
@json_option
def verify(transcript, as_json):
    """Replay a saved transcript; exit 0 only if it is an accepting run."""
    try:
        tr = Transcript.load(transcript)
        ok = verify_transcript(tr)
        verdict = tr.verdict.name
        reason = None
    except (DecodeError, InvalidArgument) as exc:
        ok, verdict, reason = False, None, str(exc)
    report = {"transcript": str(transcript), "valid": ok, "recorded_verdict": verdict}
    if reason:
        report["error"] = reason
    _emit(report, as_json, "valid" if ok else f"invalid{': ' + reason if reason else ''}")
    sys.exit(EXIT_OK if ok else EXIT_REJECT)


@main.command()
@protocol_options
@click.option("--instance", "instance_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--n", type=int, default=5, show_default=True)
@click.option("--listen", default="127.0.0.1:0", show_default=True, help="HOST:PORT to bind.")
@click.option("--sessions", type=int, default=0, help="Stop after this many sessions (0: forever).")
@click.option("--transcript-dir", type=click.Path(file_okay=False))
@click.option("--timeout", type=float, default=DEFAULT_TIMEOUT, show_default=True)
@seed_option
@json_option
def serve(mode, lam, reps, wipok_reps, split_frames, instance_path, n, listen, sessions,
          transcript_dir, timeout, seed, as_json):
    """Verifier server; each connection runs in its own thread."""
    cfg = _config(mode, lam, reps, wipok_reps, split_frames)
    x, _ = _instance(instance_path, n, seed)
    host, port = _addr(listen)
    root = DeterministicRng(seed)
    lock = threading.Lock()
    state = {"started": 0, "done": 0, "rejected": 0}
    finished = threading.Event()
    if transcript_dir:
        Path(transcript_dir).mkdir(parents=True, exist_ok=True)

    class Handler(socketserver.BaseRequestHandler):
        def handle(self):
            with lock:
                idx = state["started"]
                state["started"] += 1
            session = VerifierSession(x, cfg, root.fork(f"session-{idx}"))
            log, error = [], None
            try:
                log = run_over_socket(session, self.request, timeout)
            except (OSError, SessionError, DecodeError) as exc:
                error = str(exc)
            verdict = session.verdict or Verdict.REJECT
            if transcript_dir:
                Transcript(cfg, x, log, verdict).save(Path(transcript_dir) / f"session-{idx}.ezkt")
            line = {"session": idx, "verdict": verdict.name, "messages": len(log)}
            if error:
                line["error"] = error
            with lock:
                _emit(line, as_json, f"session {idx}: {verdict.name}")
                state["done"] += 1
                state["rejected"] += verdict is not Verdict.ACCEPT
                if sessions and state["done"] >= sessions:
                    finished.set()

    class Server(socketserver.ThreadingTCPServer):
        allow_reuse_address = True
        daemon_threads = True

    with Server((host, port), Handler) as srv:
        bound = srv.server_address[1]
        _emit({"listening": f"{host}:{bound}"}, as_json, f"listening on {host}:{bound}")
        sys.stdout.flush()
        t = threading.Thread(target=srv.serve_forever, daemon=True)
        t.start()
        try:
            while not finished.wait(0.2):
                pass
        except KeyboardInterrupt:
            pass
        srv.shutdown()
    sys.exit(EXIT_OK if state["rejected"] == 0 else EXIT_REJECT)


# --- quantum experiments -------------------------------------------------------------------------

@main.group()
def qsim():
    """Exact small-dimension quantum experiments."""


def _report_exit(report: dict, as_json: bool) -> None:
    m = report["measured"]
    human = (f"{report['fixture_id']}: "
             + ", ".join(f"{k}={v!r}" for k, v in m.items() if v is not None)
             + f" -> {'pass' if report['pass'] else 'FAIL'}")
    _emit(report, as_json, human)
    sys.exit(EXIT_OK if report["pass"] else EXIT_REJECT)


def _guard(fn, *args, **kw):
    try:
        return fn(*args, **kw)
    except (InvalidArgument, Unsupported, DecodeError) as exc:
        _fail_usage(str(exc))


@qsim.command("amp")
@click.option("--t", "t", type=float, required=True, help="Overlap threshold in (0, 1].")
@click.option("--T", "T", type=int, required=True, help="Amplification rounds.")
@click.option("--dim", type=int, default=8, show_default=True)
@click.option("--configs", type=int, default=1, show_default=True)
@seed_option
@json_option
def qsim_amp(t, T, dim, configs, seed, as_json):
    """Worst exact amplification success versus the closed-form bound."""
    from .qsim.reports import amp_report
    _report_exit(_guard(amp_report, t, T, dim, seed, configs), as_json)


@qsim.command("extract")
@click.option("--delta", type=float, default=0.3, show_default=True)
@click.option("--fixture", type=click.Path(exists=True, dir_okay=False))
@click.option("--family", type=click.Choice(["threshold", "haar", "superposition"]),
              default="threshold", show_default=True)
@click.option("--variant", type=click.Choice(["stat-binding", "strong-cb"]),
              default="stat-binding", show_default=True)
@seed_option
@json_option
def qsim_extract(delta, fixture, family, variant, seed, as_json):
    """Real versus extraction experiment, exact trace distance."""
    from .qsim.fixtures import load_fixture
    from .qsim.reports import extract_report
    adv = _guard(load_fixture, fixture) if fixture else None
    _report_exit(_guard(extract_report, delta, seed, adv, family, variant), as_json)


@qsim.command("rewind")
@click.option("--delta", "gamma", type=float, default=1e-6, show_default=True,
              help="Input-dependence gamma of the success probability (0: exact 1/2).")
@click.option("--T", "T", type=int, default=None)
@click.option("--fixture", type=click.Path(exists=True, dir_okay=False))
@seed_option
@json_option
def qsim_rewind(gamma, T, fixture, seed, as_json):
    """Rewinding output versus the conditional target, with the premise-gated bound."""
    from .qsim.fixtures import load_fixture
    from .qsim.reports import rewind_report
    proc = _guard(load_fixture, fixture) if fixture else None
    _report_exit(_guard(rewind_report, gamma, seed, proc, T=T), as_json)


@qsim.command("simulate")
@click.option("--epsilon", type=float, default=0.2, show_default=True)
@click.option("--lambda", "lam", type=int, default=256, show_default=True)
@click.option("--fixture", default="superposition-abort", show_default=True,
              help="Fixture file or built-in name.")
@click.option("--challenge-bits", type=int, default=1, show_default=True)
@seed_option
@json_option
def qsim_simulate(epsilon, lam, fixture, challenge_bits, seed, as_json):
    """Black-box simulator versus the real interaction for one verifier."""
    from .qsim import minigk
    from .qsim.fixtures import load_fixture
    from .qsim.reports import simulate_report
    builtins = {
        "always-abort": lambda: minigk.always_abort_verifier(challenge_bits, seed=seed),
        "honest-opening": lambda: minigk.honest_verifier(challenge_bits),
        "superposition-abort": lambda: minigk.superposition_abort_verifier(challenge_bits),
        "a-dependent": lambda: minigk.a_dependent_verifier(challenge_bits, seed=seed),
        "random": lambda: minigk.random_verifier(seed, challenge_bits),
    }
    if fixture in builtins:
        v = _guard(builtins[fixture])
    elif Path(fixture).is_file():
        v = _guard(load_fixture, fixture)
    else:
        raise click.BadParameter(f"not a file or one of {sorted(builtins)}", param_hint="--fixture")
    _report_exit(_guard(simulate_report, v, epsilon, lam), as_json)


# --- benchmarks ----------------------------------------------------------------------------------

@main.command()
@protocol_options
@click.option("--n", type=int, default=5, show_default=True)
@click.option("--runs", type=int, default=10, show_default=True)
@seed_option
@json_option
def bench(mode, lam, reps, wipok_reps, split_frames, n, runs, seed, as_json):
    """Message count, bytes and per-phase wall time over repeated honest runs."""
    from .bench import bench_run
    cfg = _config(mode, lam, reps, wipok_reps, split_frames)
    rep = _guard(bench_run, cfg, n, runs, seed).to_json()
    _emit(rep, as_json, f"{mode}: {rep['messages']} messages, {rep['bytes_mean']:.0f} bytes, "
                        f"{rep['seconds_total'] / runs * 1000:.1f} ms/run")
    sys.exit(EXIT_OK if rep["accepted"] == runs else EXIT_REJECT)


if __name__ == "__main__":
    main()
