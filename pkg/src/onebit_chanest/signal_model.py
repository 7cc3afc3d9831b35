"""Pilot sequences, observation synthesis and 1-bit quantization.

The transmit side is a balanced binary pilot: a vector of +/-1 symbols with
equal counts of each sign. The receive side is either the ideal real-valued
observation y = zeta*x + noise (unit-variance white Gaussian) or its 1-bit
quantization r = sign(y - alpha). Under a balanced pilot the binary
log-likelihood depends on r only through two counts, so observations are
reduced to a ``CountStatistic`` before estimation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .kernels import log_qfunc

PILOT_LAYOUTS = ("alternating", "block", "shuffled")


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class PilotSequence:
    """Balanced +/-1 pilot vector of even length."""

    symbols: np.ndarray

    def __post_init__(self):
        sym = np.asarray(self.symbols, dtype=np.int8)
        if sym.ndim != 1:
            raise ValueError("pilot symbols must be a 1-D vector")
        n = sym.size
        if n < 2 or n % 2:
            raise ValueError(f"pilot length must be even and >= 2, got {n}")
        if not np.all(np.abs(sym) == 1):
            raise ValueError("pilot symbols must all be +1 or -1")
        if int(sym.sum()) != 0:
            raise ValueError("pilot must be balanced (symbols must sum to zero)")
        object.__setattr__(self, "symbols", _freeze(sym))

    def __len__(self) -> int:
        return self.symbols.size

    @property
    def half_n(self) -> int:
        return self.symbols.size // 2


@dataclass(frozen=True)
class IdealObservation:
    """Unquantized receive samples y = zeta*x + noise."""

    samples: np.ndarray

    def __post_init__(self):
        y = np.asarray(self.samples, dtype=np.float64)
        if y.ndim != 1:
            raise ValueError("observation samples must be a 1-D vector")
        object.__setattr__(self, "samples", _freeze(y))

    def __len__(self) -> int:
        return self.samples.size


@dataclass(frozen=True)
class BinaryObservation:
    """Hard-limited receive signs, each entry +1 or -1."""

    signs: np.ndarray

    def __post_init__(self):
        r = np.asarray(self.signs, dtype=np.int8)
        if r.ndim != 1:
            raise ValueError("observation signs must be a 1-D vector")
        if not np.all(np.abs(r) == 1):
            raise ValueError("observation signs must all be +1 or -1")
        object.__setattr__(self, "signs", _freeze(r))

    def __len__(self) -> int:
        return self.signs.size


@dataclass(frozen=True)
class CountStatistic:
    """Sufficient statistic of the binary likelihood under a balanced pilot.

    ``k_plus`` counts samples with pilot symbol +1 and observed sign +1,
    ``k_minus`` the same for pilot symbol -1, and ``half_n`` is N/2, the
    number of samples carrying each symbol.
    """

    k_plus: int
    k_minus: int
    half_n: int

    def __post_init__(self):
        if self.half_n < 1:
            raise ValueError(f"half_n must be >= 1, got {self.half_n}")
        for name in ("k_plus", "k_minus"):
            k = getattr(self, name)
            if not 0 <= k <= self.half_n:
                raise ValueError(f"{name}={k} outside [0, {self.half_n}]")


def make_pilot(n: int, layout: str = "alternating", seed: int | None = None) -> PilotSequence:
    """Build a balanced pilot of length ``n`` in one of the standard layouts.

    ``alternating`` is +1,-1,+1,-1,...; ``block`` is n/2 ones followed by n/2
    minus-ones; ``shuffled`` is a seeded permutation of ``block``. All layouts
    satisfy the same balance constraint, and every derived quantity in this
    package depends on the pilot only through it.
    """
    if n < 2 or n % 2:
        raise ValueError(f"pilot length must be even and >= 2, got {n}")
    if layout == "alternating":
        sym = np.tile(np.array([1, -1], dtype=np.int8), n // 2)
    elif layout == "block":
        sym = np.concatenate([np.ones(n // 2, np.int8), -np.ones(n // 2, np.int8)])
    elif layout == "shuffled":
        if seed is None:
            raise ValueError("shuffled pilot layout requires a seed")
        block = np.concatenate([np.ones(n // 2, np.int8), -np.ones(n // 2, np.int8)])
        sym = np.random.default_rng(seed).permutation(block)
    else:
        raise ValueError(f"unknown pilot layout {layout!r}; expected one of {PILOT_LAYOUTS}")
    return PilotSequence(sym)


def synth_ideal(pilot: PilotSequence, zeta: float, seed) -> IdealObservation:
    """Draw y = zeta*x + noise with i.i.d. standard normal noise.

    ``seed`` may be an int, a ``numpy.random.SeedSequence`` or an existing
    ``Generator``; identical (seed, pilot, zeta) give bit-identical output,
    which the Monte Carlo harness relies on for reproducibility across
    worker counts.
    """
    if not math.isfinite(zeta):
        raise ValueError(f"synth_ideal: zeta must be finite, got {zeta!r}")
    rng = np.random.default_rng(seed)
    noise = rng.standard_normal(len(pilot))
    return IdealObservation(zeta * pilot.symbols + noise)


def quantize(y: IdealObservation, alpha: float) -> BinaryObservation:
    """Hard-limit an observation at threshold ``alpha``.

    Samples exactly on the threshold map to +1, matching the sign convention
    sign(0) = +1 of the quantizer model; the event has probability zero but
    the choice keeps tests deterministic.
    """
    return BinaryObservation(np.where(y.samples >= alpha, 1, -1).astype(np.int8))


def count_stats(r: BinaryObservation, pilot: PilotSequence) -> CountStatistic:
    """Reduce a binary observation to its two sufficient counts."""
    if len(r) != len(pilot):
        raise ValueError(
            f"length mismatch: observation has {len(r)} samples, pilot has {len(pilot)}"
        )
    plus = pilot.symbols > 0
    fired = r.signs > 0
    return CountStatistic(
        k_plus=int(np.count_nonzero(plus & fired)),
        k_minus=int(np.count_nonzero(~plus & fired)),
        half_n=len(pilot) // 2,
    )


def count_loglike(counts: CountStatistic, zeta: float, alpha: float) -> float:
    """Binary log-likelihood evaluated from the sufficient counts.

    With u = alpha - zeta and v = alpha + zeta this is

        k+ log Q(u) + (M - k+) log Q(-u) + k- log Q(v) + (M - k-) log Q(-v),

    identical to the sample-by-sample product likelihood for any observation
    reducing to ``counts``.
    """
    u = alpha - zeta
    v = alpha + zeta
    m = counts.half_n
    return (
        counts.k_plus * log_qfunc(u)
        + (m - counts.k_plus) * log_qfunc(-u)
        + counts.k_minus * log_qfunc(v)
        + (m - counts.k_minus) * log_qfunc(-v)
    )


def sample_loglike(
    r: BinaryObservation, pilot: PilotSequence, zeta: float, alpha: float
) -> float:
    """Per-sample binary log-likelihood sum(log Q(r_n * (alpha - zeta*x_n))).

    Reference form used to cross-check ``count_loglike``; O(N) scalar loop,
    not meant for hot paths.
    """
    if len(r) != len(pilot):
        raise ValueError(
            f"length mismatch: observation has {len(r)} samples, pilot has {len(pilot)}"
        )
    total = 0.0
    for rn, xn in zip(r.signs, pilot.symbols):
        total += log_qfunc(float(rn) * (alpha - zeta * float(xn)))
    return total
