"""Round-based federated feature selection protocol.

A server holds a global Bernoulli probability vector over features. Each
synchronous round it broadcasts the vector to every client; each non-faulty
client runs one local cross-entropy round on its private partition and sends
back its updated vector as a sparse message. The server aggregates the
replies weighted by local dataset size and stops when successive global
vectors pass a two-sample Kolmogorov-Smirnov stability check.
"""

from __future__ import annotations

import math
import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .ce import (
    DEFAULT_CLAMP,
    DEFAULT_THRESHOLD,
    CEParams,
    ce_round,
    clamp_probs,
    select_features,
    uniform_probs,
)
from .info import DiscreteDataset

DEFAULT_TAU1 = 0.995
DEFAULT_TAU2 = 1e-6
DEFAULT_MAX_ROUNDS = 200

_HEADER = struct.Struct("<IQI")  # client_id, local sample count, nonzero count


class ProtocolError(ValueError):
    """Raised on malformed messages or mismatched feature counts."""


def derive_seed(*parts: int) -> int:
    """Stable 64-bit seed derived from a tuple of integers.

    Used to give every (client, round) pair its own reproducible stream, so
    results do not depend on the order in which client rounds execute.
    """
    return int(np.random.SeedSequence([int(p) & 0xFFFFFFFF for p in parts]).generate_state(2).view(np.uint64)[0])


@dataclass
class ClientState:
    """One simulated client: a private data partition plus its local vector."""

    client_id: int
    dataset: DiscreteDataset
    rng_seed: int = 0
    draw_size: Optional[int] = None
    local_p: Optional[np.ndarray] = None

    def __post_init__(self) -> None:
        if self.dataset.n < 1:
            raise ValueError("client partition must be non-empty")
        if self.draw_size is not None and self.draw_size < 1:
            raise ValueError("draw_size must be positive")
        if self.local_p is None:
            self.local_p = uniform_probs(self.dataset.m)


@dataclass(frozen=True)
class UpdateMessage:
    """Sparse client-to-server payload: nonzero probabilities plus a position bitmap."""

    client_id: int
    sample_count: int
    nonzero_probs: tuple[float, ...]
    bitmap: bytes

    def __post_init__(self) -> None:
        if _popcount(self.bitmap) != len(self.nonzero_probs):
            raise ProtocolError("bitmap popcount must equal nonzero probability count")

    @property
    def nonzero_count(self) -> int:
        return len(self.nonzero_probs)

    def to_bytes(self) -> bytes:
        """Wire layout: header, bitmap, then nonzero values as little-endian float32."""
        payload = struct.pack(f"<{len(self.nonzero_probs)}f", *self.nonzero_probs)
        return _HEADER.pack(self.client_id, self.sample_count, len(self.nonzero_probs)) + self.bitmap + payload

    @classmethod
    def from_bytes(cls, raw: bytes, m: int) -> "UpdateMessage":
        bitmap_len = (m + 7) // 8
        if len(raw) < _HEADER.size + bitmap_len:
            raise ProtocolError("message shorter than header plus bitmap")
        client_id, sample_count, z = _HEADER.unpack_from(raw, 0)
        bitmap = raw[_HEADER.size : _HEADER.size + bitmap_len]
        payload = raw[_HEADER.size + bitmap_len :]
        if len(payload) != 4 * z:
            raise ProtocolError(f"expected {z} float32 values, got {len(payload)} bytes")
        probs = struct.unpack(f"<{z}f", payload)
        return cls(client_id, sample_count, tuple(probs), bitmap)


def _popcount(bitmap: bytes) -> int:
    return sum(byte.bit_count() for byte in bitmap)


def encode_message(
    client_id: int,
    p: np.ndarray,
    sample_count: int,
    eps: float = DEFAULT_CLAMP,
) -> UpdateMessage:
    """Encode a probability vector, omitting entries at or below the clamp floor.

    Bit i of the bitmap (LSB-first within each byte) marks that entry i was
    transmitted; omitted entries decode as zero.
    """
    p = np.asarray(p, dtype=np.float64)
    m = p.shape[0]
    keep = p > eps
    bitmap = bytearray((m + 7) // 8)
    for i in np.flatnonzero(keep):
        bitmap[i // 8] |= 1 << (i % 8)
    return UpdateMessage(client_id, sample_count, tuple(float(v) for v in p[keep]), bytes(bitmap))


def decode_message(message: UpdateMessage, m: int) -> np.ndarray:
    """Reconstruct the length-m vector; omitted positions are restored as 0."""
    if len(message.bitmap) != (m + 7) // 8:
        raise ProtocolError(f"bitmap has {len(message.bitmap)} bytes, expected {(m + 7) // 8}")
    p = np.zeros(m, dtype=np.float64)
    values = iter(message.nonzero_probs)
    for i in range(m):
        if message.bitmap[i // 8] >> (i % 8) & 1:
            p[i] = next(values)
    return p


def message_overhead_units(message: UpdateMessage, m: int, unit_bytes: int = 4) -> int:
    """Scalar-slot traffic cost of one exchange involving this message.

    Counts the nonzero values plus one weight slot plus the bitmap expressed
    in unit-sized words, doubled for the downlink/uplink pair.
    """
    bitmap_units = math.ceil((m + 7) // 8 / unit_bytes)
    return 2 * (message.nonzero_count + 1 + bitmap_units)


def client_round(
    client: ClientState,
    p_global: np.ndarray,
    params: CEParams,
    round_index: int,
) -> UpdateMessage:
    """One local round: adopt the global vector, optimize on local data, reply.

    If ``draw_size`` is set, the client draws that many rows with replacement
    from its partition and optimizes on the draw; the reported sample count
    is always the full partition size.
    """
    p_global = np.asarray(p_global, dtype=np.float64)
    if p_global.shape[0] != client.dataset.m:
        raise ProtocolError("global vector length does not match client feature count")
    data = client.dataset
    if client.draw_size is not None:
        rng = np.random.default_rng([client.rng_seed & 0xFFFFFFFF, round_index, 1])
        rows = rng.integers(0, data.n, size=client.draw_size)
        data = DiscreteDataset(data.features[rows], data.labels[rows], data.feature_names)
    local_params = replace(params, rng_seed=derive_seed(params.rng_seed, client.rng_seed))
    client.local_p = ce_round(data, p_global, local_params, round_index)
    return encode_message(client.client_id, client.local_p, client.dataset.n, params.clamp_eps)


def aggregate(messages: Sequence[UpdateMessage], m: int) -> np.ndarray:
    """Average the decoded client vectors, weighted by local dataset size."""
    if not messages:
        raise ProtocolError("cannot aggregate an empty message list")
    counts = np.array([msg.sample_count for msg in messages], dtype=np.float64)
    weights = counts / counts.sum()
    vectors = np.stack([decode_message(msg, m) for msg in messages])
    return weights @ vectors


def ks_two_sample(a: Sequence[float], b: Sequence[float]) -> float:
    """Asymptotic two-sample Kolmogorov-Smirnov p-value.

    D is the sup-difference of the two empirical CDFs over the merged
    support; the p-value is the alternating exponential series evaluated at
    lambda = (sqrt(ne) + 0.12 + 0.11/sqrt(ne)) * D with effective size
    ne = na*nb/(na+nb), truncated once terms drop below 1e-12.
    """
    a = np.sort(np.asarray(a, dtype=np.float64))
    b = np.sort(np.asarray(b, dtype=np.float64))
    if a.size == 0 or b.size == 0:
        raise ValueError("both samples must be non-empty")
    support = np.concatenate([a, b])
    cdf_a = np.searchsorted(a, support, side="right") / a.size
    cdf_b = np.searchsorted(b, support, side="right") / b.size
    d = float(np.max(np.abs(cdf_a - cdf_b)))
    if d == 0.0:
        return 1.0
    ne = a.size * b.size / (a.size + b.size)
    lam = (math.sqrt(ne) + 0.12 + 0.11 / math.sqrt(ne)) * d
    if lam < 1e-3:
        return 1.0
    total = 0.0
    sign = 1.0
    for k in range(1, 100001):
        term = math.exp(-2.0 * k * k * lam * lam)
        total += sign * term
        sign = -sign
        if term < 1e-12:
            break
    return min(max(2.0 * total, 0.0), 1.0)


def check_convergence(v: float, v_old: float, tau1: float = DEFAULT_TAU1, tau2: float = DEFAULT_TAU2) -> bool:
    """Stable when the p-value is high and barely moved since the last round."""
    return v >= tau1 and abs(v - v_old) <= tau2


@dataclass(frozen=True)
class FaultModel:
    """Per-round, per-client Bernoulli fault draws with rate rho."""

    rho: float = 0.0
    rng_seed: int = 0

    def __post_init__(self) -> None:
        if not 0.0 <= self.rho < 1.0:
            raise ValueError("rho must be in [0, 1)")

    def is_faulty(self, client_id: int, round_index: int) -> bool:
        if self.rho == 0.0:
            return False
        rng = np.random.default_rng([self.rng_seed & 0xFFFFFFFF, client_id, round_index])
        return bool(rng.random() < self.rho)


@dataclass
class RoundRecord:
    round_index: int
    participants: list[int]
    p_global: np.ndarray
    p_value: float
    bytes_sent: int
    overhead_units: int
    draw_sizes: dict[int, int] = field(default_factory=dict)


@dataclass
class FederationReport:
    rounds: list[RoundRecord]
    converged: bool
    final_p: np.ndarray
    selected: list[int]

    @property
    def total_rounds(self) -> int:
        return len(self.rounds)

    @property
    def total_overhead_units(self) -> int:
        return sum(r.overhead_units for r in self.rounds)

    @property
    def total_bytes(self) -> int:
        return sum(r.bytes_sent for r in self.rounds)


def run_federation(
    clients: Sequence[ClientState],
    params: CEParams,
    fault: Optional[FaultModel] = None,
    tau1: float = DEFAULT_TAU1,
    tau2: float = DEFAULT_TAU2,
    max_rounds: int = DEFAULT_MAX_ROUNDS,
    threshold: float = DEFAULT_THRESHOLD,
    max_workers: int = 1,
) -> FederationReport:
    """Drive the full server loop until KS convergence or the round budget.

    Every round the global vector is broadcast to all clients, faulty or
    not; only non-faulty clients contribute messages. A round with no
    messages carries the global vector over unchanged but still counts.
    """
    if not clients:
        raise ValueError("need at least one client")
    if max_rounds < 1:
        raise ValueError("max_rounds must be at least 1")
    m = clients[0].dataset.m
    for client in clients:
        if client.dataset.m != m:
            raise ProtocolError("all client partitions must share the feature count")

    p_global = uniform_probs(m)
    v = 0.0
    v_old = 0.0
    rounds: list[RoundRecord] = []
    converged = False

    for r in range(1, max_rounds + 1):
        for client in clients:
            client.local_p = p_global.copy()
        participants = [
            c for c in clients if fault is None or not fault.is_faulty(c.client_id, r)
        ]
        if max_workers > 1 and len(participants) > 1:
            with ThreadPoolExecutor(max_workers=max_workers) as pool:
                messages = list(
                    pool.map(lambda c: client_round(c, p_global, params, r), participants)
                )
        else:
            messages = [client_round(c, p_global, params, r) for c in participants]

        p_old = p_global
        if messages:
            p_global = clamp_probs(aggregate(messages, m), params.clamp_eps)
        v_old = v
        v = ks_two_sample(p_old, p_global)
        rounds.append(
            RoundRecord(
                round_index=r,
                participants=[c.client_id for c in participants],
                p_global=p_global.copy(),
                p_value=v,
                bytes_sent=sum(len(msg.to_bytes()) for msg in messages),
                overhead_units=sum(message_overhead_units(msg, m) for msg in messages),
                draw_sizes={
                    c.client_id: (c.draw_size if c.draw_size is not None else c.dataset.n)
                    for c in participants
                },
            )
        )
        if check_convergence(v, v_old, tau1, tau2):
            converged = True
            break

    return FederationReport(
        rounds=rounds,
        converged=converged,
        final_p=p_global,
        selected=select_features(p_global, threshold),
    )
