"""Exhaustive soundness analysis over toy commitment schemes.

A position's commitment matters to a cheating prover only through the set of
bits it can later be opened to.  Enumerating those classes, permutations and
Hamiltonian cycles of the complete graph covers every first message up to
that equivalence, which makes the bounds below exact for small ``n``.
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass
from typing import Sequence

from ..commitments import Commitment, Opening, PublicParam, SchemeId
from ..commitments.toytable import ToyTable
from ..errors import InvalidArgument, Unsupported
from ..primitives.bits import BitVector
from ..sigma import CommitContext, GraphInstance, OpenAll, OpenCycle, encode_message, f_bad, message_len
from ..sigma.hamiltonicity import MODIFIED, PLAIN, verify_rep

MAX_N = 6
MAX_OPENING_BITS = 14


def hamiltonian_cycles(n: int):
    """Every Hamiltonian cycle of K_n as a frozenset of undirected edges."""
    if n < 3:
        return []
    seen = set()
    out = []
    for rest in itertools.permutations(range(1, n)):
        if rest[0] > rest[-1]:
            continue
        order = (0,) + rest
        edges = frozenset((min(order[i], order[(i + 1) % n]), max(order[i], order[(i + 1) % n]))
                          for i in range(n))
        if edges not in seen:
            seen.add(edges)
            out.append(edges)
    return out


def _messages(x: GraphInstance, flavor: str):
    for perm in itertools.permutations(range(x.n)):
        if flavor == PLAIN:
            yield perm, x.permute(perm).matrix_bits()
        else:
            yield perm, encode_message(x.permute(perm), perm)


# --- achievable answer sets --------------------------------------------------------------

def opening_classes(table: ToyTable) -> set[frozenset[int]]:
    """Sets of bits a single commitment value can be opened to, including the empty set."""
    if table.m_bits != 1:
        raise InvalidArgument("Sigma commitments use one-bit tables")
    classes = {frozenset()}
    for c in table.values():
        classes.add(frozenset(table.messages_for(c)))
    return classes


def achievable_answer_sets(x: GraphInstance, flavor: str, table: ToyTable) -> set[frozenset[int]]:
    """Every set of challenge bits one repetition's first message can answer."""
    if x.n > MAX_N:
        raise Unsupported(f"exhaustive analysis limited to n <= {MAX_N}")
    classes = opening_classes(table)

    def feasible(req: set[int]) -> bool:
        return any(req <= c for c in classes)

    can0 = any(all(feasible({b}) for b in m) for _, m in _messages(x, flavor))
    can1 = feasible({1})
    both = False
    if can0 and can1:
        n = x.n
        for _, m in _messages(x, flavor):
            for cyc in hamiltonian_cycles(n):
                # each cycle edge needs one orientation opening to 1 as well as to its message bit
                ok = all(feasible({m[pos]}) for pos in range(len(m)))
                for u, v in cyc:
                    if not ok:
                        break
                    ok = feasible({m[u * n + v], 1}) or feasible({m[v * n + u], 1})
                if ok:
                    both = True
                    break
            if both:
                break
    out = {frozenset()}
    if can0:
        out.add(frozenset({0}))
    if can1:
        out.add(frozenset({1}))
    if both:
        out.add(frozenset({0, 1}))
    return out


def _maximal(sets: set[frozenset[int]]) -> list[frozenset[int]]:
    return [s for s in sets if not any(s < t for t in sets)]


def exhaustive_soundness_bound(x: GraphInstance, k: int, sigma_table: ToyTable, *,
                               flavor: str = PLAIN, challenge_table: ToyTable | None = None) -> float:
    """Best acceptance probability of any cheating prover on ``k`` parallel repetitions.

    Without ``challenge_table`` the challenge is uniform and unseen.  With one,
    the prover sees the table value of the committed challenge and picks its
    first message knowing the posterior.
    """
    if k < 1:
        raise InvalidArgument("k must be positive")
    per_rep = _maximal(achievable_answer_sets(x, flavor, sigma_table))
    if challenge_table is None:
        best = max(len(s) for s in per_rep)
        return (best / 2) ** k
    if challenge_table.m_bits != k:
        raise InvalidArgument("challenge table must commit k-bit challenges")
    joint: dict[int, list[float]] = {}
    w = 1.0 / ((1 << k) * challenge_table.n_rand)
    for e in range(1 << k):
        for r in range(challenge_table.n_rand):
            c = challenge_table.lookup(e, r)
            joint.setdefault(c, [0.0] * (1 << k))[e] += w
    total = 0.0
    products = list(itertools.product(per_rep, repeat=k))
    for probs in joint.values():
        best = 0.0
        for sets in products:
            mass = sum(p for e, p in enumerate(probs)
                       if all((e >> i) & 1 in sets[i] for i in range(k)))
            best = max(best, mass)
        total += best
    return total


def brute_force_soundness(x: GraphInstance, k: int, sigma_table: ToyTable, flavor: str = PLAIN) -> float:
    """Reference for tiny instances: try every assignment of commitment values per position."""
    best = max(len(s) for s in _brute_answer_sets(x, flavor, sigma_table))
    return (best / 2) ** k


@functools.lru_cache(maxsize=16)
def _brute_answer_sets(x: GraphInstance, flavor: str, sigma_table: ToyTable) -> frozenset:
    values = sorted(set(sigma_table.values()) | {max(sigma_table.values(), default=0) + 1})
    length = message_len(x.n, flavor)
    if len(values) ** length > 1 << 18:
        raise Unsupported("too many first messages to enumerate")
    ctx = _ToyOracle(sigma_table)
    return frozenset(frozenset(b for b in (0, 1) if _answerable(x, flavor, assign, b, ctx))
                     for assign in itertools.product(values, repeat=length))


class _ToyOracle:
    def __init__(self, table: ToyTable):
        self._open = {c: frozenset(table.messages_for(c)) for c in table.values()}

    def openable(self, value: int) -> frozenset[int]:
        return self._open.get(value, frozenset())


def _answerable(x, flavor, assign, b, oracle) -> bool:
    n = x.n
    if b == 0:
        return any(all(m[p] in oracle.openable(assign[p]) for p in range(len(m)))
                   for _, m in _messages(x, flavor))
    for cyc in hamiltonian_cycles(n):
        if all(1 in oracle.openable(assign[u * n + v]) or 1 in oracle.openable(assign[v * n + u])
               for u, v in cyc):
            return True
    return False


# --- accepting-response counting ----------------------------------------------------------

def opening_space(pp: PublicParam) -> list[Opening]:
    """Every syntactically valid opening of a one-bit commitment under ``pp``."""
    p = pp.params
    if pp.scheme is SchemeId.TOY:
        bits = p.r_bits
    elif pp.scheme is SchemeId.NAOR:
        bits = p.lam
    else:
        raise Unsupported("opening enumeration covers ToyTable and Naor parameters")
    if bits > MAX_OPENING_BITS:
        raise Unsupported(f"opening space limited to 2^{MAX_OPENING_BITS}")
    return [Opening(BitVector(r, bits).to_bytes()) for r in range(1 << bits)]


def opening_counts(ctx: CommitContext, coms: Sequence[Commitment]) -> list[tuple[int, int]]:
    """``(#openings to 0, #openings to 1)`` for each commitment."""
    space = opening_space(ctx.pp)
    cache: dict[Commitment, tuple[int, int]] = {}
    out = []
    for c in coms:
        if c not in cache:
            cache[c] = (sum(ctx.verify_bit(c, 0, o) for o in space),
                        sum(ctx.verify_bit(c, 1, o) for o in space))
        out.append(cache[c])
    return out


def _first_valid(ctx, com, bit, space):
    return next(o for o in space if ctx.verify_bit(com, bit, o))


def count_accepting_responses(x: GraphInstance, flavor: str, coms: Sequence[Commitment], bit: int,
                              ctx: CommitContext) -> int:
    """Exact number of responses the verifier accepts for one repetition and challenge bit.

    Each nonzero count is confirmed by running the real verifier on one
    representative response.
    """
    n = x.n
    if len(coms) != message_len(n, flavor):
        return 0
    counts = opening_counts(ctx, coms)
    space = opening_space(ctx.pp)
    total = 0
    if bit == 0:
        for perm, m in _messages(x, flavor):
            ways = math.prod(counts[p][m[p]] for p in range(len(m)))
            if ways:
                ops = tuple(_first_valid(ctx, coms[p], m[p], space) for p in range(len(m)))
                rep = OpenAll(ops, perm=perm) if flavor == PLAIN else OpenAll(ops, bits=m)
                if not verify_rep(x, flavor, coms, 0, rep, ctx):
                    raise AssertionError("representative response rejected")
                total += ways
        return total
    for cyc in hamiltonian_cycles(n):
        ways = math.prod(counts[u * n + v][1] + counts[v * n + u][1] for u, v in cyc)
        if ways:
            positions = tuple((u, v) if counts[u * n + v][1] else (v, u) for u, v in cyc)
            ops = tuple(_first_valid(ctx, coms[u * n + v], 1, space) for u, v in positions)
            if not verify_rep(x, flavor, coms, 1, OpenCycle(positions, ops), ctx):
                raise AssertionError("representative response rejected")
            # any listing order of the n edges is accepted
            total += ways * math.factorial(n)
    return total


@dataclass
class BadChallengeReport:
    f_bad: BitVector
    counts: list[tuple[int, int]]           # accepting responses per repetition, per bit

    @property
    def violations(self) -> int:
        """Accepting responses for challenge bits other than the bad challenge's."""
        return sum(c[1 - self.f_bad[i]] for i, c in enumerate(self.counts))


def bad_challenge_report(x: GraphInstance, messages: Sequence[BitVector], ctx: CommitContext,
                         rng) -> BadChallengeReport:
    """Commit ``messages`` (modified flavor) and count accepting responses per challenge bit."""
    fb = f_bad(messages, x)
    counts = []
    for m in messages:
        coms, _ = ctx.commit_bits(m, rng)
        counts.append((count_accepting_responses(x, MODIFIED, coms, 0, ctx),
                       count_accepting_responses(x, MODIFIED, coms, 1, ctx)))
    return BadChallengeReport(fb, counts)
