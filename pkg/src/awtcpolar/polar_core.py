"""Exact polarization arithmetic for erasure channel blocks.

Erasure probabilities are kept as (log eps, log(1-eps)) pairs so that
polarized values far below 1e-300 and thresholds like 2^(-N^beta) stay
representable.  Boolean adversary realizations are propagated exactly with
OR/AND logic instead of floats.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

NEG_INF = float("-inf")
_LN2 = math.log(2.0)


def log1m_from_log(x: float) -> float:
    """Return log(1 - exp(x)) for x <= 0, exact at the 0 / -inf extremes."""
    if x == NEG_INF:
        return 0.0
    if x >= 0.0:
        if x == 0.0:
            return NEG_INF
        raise ValueError(f"log-probability must be <= 0, got {x}")
    if x > -_LN2:
        return math.log(-math.expm1(x))
    return math.log1p(-math.exp(x))


def _log1m_from_log_arr(x: np.ndarray) -> np.ndarray:
    # both branches are safe for x <= 0 once divide-by-zero warnings are off
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(x > -_LN2, np.log(-np.expm1(x)), np.log1p(-np.exp(x)))
    # exp(-inf) = 0 -> log1p(0) = 0 exactly; exp(0) = 1 -> log(0) = -inf exactly
    return out


@dataclass(frozen=True)
class LogProb:
    """An erasure probability eps stored as the pair (log eps, log(1-eps)).

    The extremes are exact: eps=0 has log_eps=-inf, eps=1 has
    log_one_minus_eps=-inf.  Outside roughly exp(-30) one leg is the
    authoritative representation and the other only informative.
    """

    log_eps: float
    log_one_minus_eps: float

    def __post_init__(self):
        if math.isnan(self.log_eps) or math.isnan(self.log_one_minus_eps):
            raise ValueError("LogProb legs must not be NaN")
        if self.log_eps > 0.0 or self.log_one_minus_eps > 0.0:
            raise ValueError(
                f"LogProb legs must be <= 0, got ({self.log_eps}, {self.log_one_minus_eps})"
            )

    @classmethod
    def from_linear(cls, eps: float) -> "LogProb":
        if not 0.0 <= eps <= 1.0:
            raise ValueError(f"erasure probability must be in [0, 1], got {eps}")
        if eps == 0.0:
            return cls(NEG_INF, 0.0)
        if eps == 1.0:
            return cls(0.0, NEG_INF)
        return cls(math.log(eps), math.log1p(-eps))

    @property
    def eps(self) -> float:
        return math.exp(self.log_eps)

    @property
    def one_minus_eps(self) -> float:
        return math.exp(self.log_one_minus_eps)


def kernel(e1: LogProb, e2: LogProb) -> tuple[LogProb, LogProb]:
    """One polarization step on two erasure probabilities.

    Returns (minus, plus) with minus = e1 + e2 - e1*e2 and plus = e1*e2,
    evaluated entirely in the log domain.
    """
    plus_log_eps = e1.log_eps + e2.log_eps
    minus_log_1m = e1.log_one_minus_eps + e2.log_one_minus_eps
    minus = LogProb(log1m_from_log(minus_log_1m), minus_log_1m)
    plus = LogProb(plus_log_eps, log1m_from_log(plus_log_eps))
    return minus, plus


@dataclass(frozen=True, eq=False)
class PolarizationProfile:
    """Per-index erasure/full-noise probabilities of a polarized length-N block.

    Entry i-1 (0-based storage) belongs to the generated channel whose
    reliability governs the successive-cancellation decoder's i-th decision.
    """

    n: int
    rho: float
    log_eps: np.ndarray = field(repr=False)
    log_one_minus_eps: np.ndarray = field(repr=False)

    def __post_init__(self):
        N = 1 << self.n
        if len(self.log_eps) != N or len(self.log_one_minus_eps) != N:
            raise ValueError(f"profile length must be {N}")
        mean = float(np.exp(self.log_eps).mean())
        if abs(mean - self.rho) > 1e-9:
            raise ValueError(
                f"profile mean {mean} drifted from rho={self.rho}; kernel bug?"
            )

    def __len__(self) -> int:
        return 1 << self.n

    def __getitem__(self, i: int) -> LogProb:
        return LogProb(float(self.log_eps[i]), float(self.log_one_minus_eps[i]))

    @property
    def values(self) -> list[LogProb]:
        return [self[i] for i in range(len(self))]

    def linear(self) -> np.ndarray:
        """Profile as plain linear-domain probabilities (may underflow to 0)."""
        return np.exp(self.log_eps)


def _next_level(log_eps: np.ndarray, log_1m: np.ndarray):
    """Double a stationary profile level: entry i spawns (minus, plus) at 2i, 2i+1."""
    plus_le = log_eps + log_eps
    minus_l1m = log_1m + log_1m
    out_le = np.empty(2 * len(log_eps))
    out_l1m = np.empty_like(out_le)
    out_le[0::2] = _log1m_from_log_arr(minus_l1m)
    out_le[1::2] = plus_le
    out_l1m[0::2] = minus_l1m
    out_l1m[1::2] = _log1m_from_log_arr(plus_le)
    return out_le, out_l1m


def bec_profile_stages(rho: float, n: int):
    """Yield the polarization profile after each stage q = 0..n.

    Stage q is a PolarizationProfile of length 2^q; the last yield is the
    full bec_profile(rho, n).
    """
    if not 0.0 <= rho <= 1.0:
        raise ValueError(f"rho must be in [0, 1], got {rho}")
    if n < 0:
        raise ValueError(f"stage count must be >= 0, got {n}")
    start = LogProb.from_linear(rho)
    log_eps = np.array([start.log_eps])
    log_1m = np.array([start.log_one_minus_eps])
    yield PolarizationProfile(0, rho, log_eps, log_1m)
    for q in range(1, n + 1):
        log_eps, log_1m = _next_level(log_eps, log_1m)
        yield PolarizationProfile(q, rho, log_eps, log_1m)


def bec_profile(rho: float, n: int) -> PolarizationProfile:
    """Polarize a stationary erasure block of parameter rho through n stages.

    Parameters
    ----------
    rho : float
        Initial erasure probability in [0, 1] (equivalently, the full-noise
        fraction of an adversarial block under independent sampling).
    n : int
        Number of stages; the result has length N = 2^n.

    Returns
    -------
    PolarizationProfile
        Exact log-domain profile, index-aligned with the decoder schedule.
    """
    profile = None
    for profile in bec_profile_stages(rho, n):
        pass
    return profile


@dataclass(frozen=True, eq=False)
class RealizationMask:
    """One adversary outcome: bits[i] is True iff channel i+1 is full noise."""

    bits: np.ndarray

    def __post_init__(self):
        bits = np.asarray(self.bits, dtype=bool)
        object.__setattr__(self, "bits", bits)
        N = len(bits)
        if N == 0 or (N & (N - 1)) != 0:
            raise ValueError(f"mask length must be a power of two, got {N}")

    def __len__(self) -> int:
        return len(self.bits)

    @property
    def popcount(self) -> int:
        return int(self.bits.sum())


def realize_profile(mask) -> np.ndarray:
    """Exact per-index noise indicators of the generated channels for one mask.

    Applies the non-stationary pairing in place: at stage q (Q = 2^q) the
    block entries (i, i+Q) map to (i OR i+Q, i AND i+Q) interleaved, so output
    position i is the i-th decoder decision's channel.  Returns a boolean
    vector the same length as the mask.
    """
    bits = mask.bits if isinstance(mask, RealizationMask) else np.asarray(mask, dtype=bool)
    N = len(bits)
    if N == 0 or (N & (N - 1)) != 0:
        raise ValueError(f"mask length must be a power of two, got {N}")
    z = bits.copy()
    n = N.bit_length() - 1
    for q in range(n):
        Q = 1 << q
        blk = z.reshape(-1, 2 * Q)
        a = blk[:, :Q]
        b = blk[:, Q:]
        out = np.empty_like(blk)
        out[:, 0::2] = a | b
        out[:, 1::2] = a & b
        z = out.reshape(-1)
    return z


def delta_threshold(N: int, beta: float) -> LogProb:
    """Polarization threshold 2^(-N^beta) as a LogProb, never materialized linearly."""
    if N <= 0 or (N & (N - 1)) != 0:
        raise ValueError(f"block length must be a power of two, got {N}")
    if not 0.0 < beta < 0.5:
        raise ValueError(f"beta must lie in (0, 0.5), got {beta}")
    n = N.bit_length() - 1
    log_eps = -math.pow(2.0, n * beta) * _LN2
    return LogProb(log_eps, log1m_from_log(log_eps))


def profile_to_csv(profile: PolarizationProfile, file) -> None:
    """Write `index,log2_eps,log2_one_minus_eps` rows (index 1-based)."""
    writer = csv.writer(file)
    writer.writerow(["index", "log2_eps", "log2_one_minus_eps"])
    le = profile.log_eps / _LN2
    l1m = profile.log_one_minus_eps / _LN2
    for i in range(len(profile)):
        writer.writerow([i + 1, repr(float(le[i])), repr(float(l1m[i]))])


def profile_from_csv(file) -> tuple[np.ndarray, np.ndarray]:
    """Read a profile CSV back into (log_eps, log_one_minus_eps) natural-log arrays."""
    reader = csv.reader(file)
    header = next(reader)
    if header != ["index", "log2_eps", "log2_one_minus_eps"]:
        raise ValueError(f"unexpected profile CSV header: {header}")
    le, l1m = [], []
    for row in reader:
        le.append(float(row[1]) * _LN2)
        l1m.append(float(row[2]) * _LN2)
    return np.array(le), np.array(l1m)
