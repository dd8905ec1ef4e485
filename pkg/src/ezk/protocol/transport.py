"""Moving framed messages between a prover and a verifier session."""

from __future__ import annotations

import socket
import struct
from collections import deque
from typing import Callable

from ..errors import DecodeError, SessionError
from .messages import MAX_MESSAGE, ProtocolMessage

DEFAULT_TIMEOUT = 30.0


def run_local(prover, verifier, tamper: Callable[[int, ProtocolMessage], ProtocolMessage] | None = None,
              max_messages: int = 64) -> list[ProtocolMessage]:
    """Drive two sessions in process and return every message exchanged.

    ``tamper(index, message)`` may rewrite a message in flight; the rewritten
    message is what gets delivered and logged.
    """
    log: list[ProtocolMessage] = []
    queue: deque[tuple[object, ProtocolMessage]] = deque()

    def post(dest, msgs):
        for m in msgs:
            if tamper is not None:
                m = tamper(len(log), m)
            log.append(m)
            queue.append((dest, m))

    post(verifier, prover.start())
    while queue:
        if len(log) > max_messages:
            raise SessionError("message limit exceeded")
        dest, m = queue.popleft()
        if dest.finished:
            continue
        other = prover if dest is verifier else verifier
        post(other, dest.handle(m))
    return log


# --- TCP --------------------------------------------------------------------------------------

def _recv_exact(sock: socket.socket, n: int) -> bytes:
    buf = bytearray()
    while len(buf) < n:
        chunk = sock.recv(n - len(buf))
        if not chunk:
            raise SessionError("connection closed")
        buf.extend(chunk)
    return bytes(buf)


def send_message(sock: socket.socket, m: ProtocolMessage) -> None:
    sock.sendall(m.frame())


def recv_message(sock: socket.socket) -> ProtocolMessage:
    (n,) = struct.unpack(">I", _recv_exact(sock, 4))
    if n > MAX_MESSAGE:
        raise DecodeError("message exceeds the size cap")
    if n < 2:
        raise DecodeError("frame too short")
    return ProtocolMessage.from_body(_recv_exact(sock, n))


def run_over_socket(session, sock: socket.socket, timeout: float = DEFAULT_TIMEOUT) -> list[ProtocolMessage]:
    """Run one side of a session over a connected socket until it finishes.

    The prover side finishes after sending its last message; the verifier
    side finishes when it reaches a verdict.
    """
    sock.settimeout(timeout)
    log = []
    for m in session.start():
        send_message(sock, m)
        log.append(m)
    while not session.finished:
        m = recv_message(sock)
        log.append(m)
        for out in session.handle(m):
            send_message(sock, out)
            log.append(out)
    return log


def connect(host: str, port: int, timeout: float = DEFAULT_TIMEOUT) -> socket.socket:
    return socket.create_connection((host, port), timeout=timeout)


def serve_once(make_session, host: str = "127.0.0.1", port: int = 0,
               timeout: float = DEFAULT_TIMEOUT, ready: Callable[[int], None] | None = None):
    """Accept one connection, run ``make_session()`` on it, return ``(session, log)``."""
    with socket.create_server((host, port)) as srv:
        srv.settimeout(timeout)
        if ready is not None:
            ready(srv.getsockname()[1])
        conn, _ = srv.accept()
        with conn:
            session = make_session()
            log = run_over_socket(session, conn, timeout)
    return session, log
