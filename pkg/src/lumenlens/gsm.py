"""Generalized spatial modulation: signal set, AWGN transmission and ML detection.

Bit labelling
-------------
A label is ``floor(log2 C(n_t, n_a))`` pattern bits followed by ``log2 M`` symbol
bits per active LED, all big-endian. Activation patterns are the sorted index
tuples in lexicographic order, truncated to a power of two; symbol bits are
assigned to active LEDs in ascending LED index, so the lowest bits belong to
the last active LED. Vector ``k`` of a :class:`SignalSet` carries label ``k``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "GsmConfig",
    "SignalSet",
    "intensity_levels",
    "bpcu",
    "build_signal_set",
    "transmit",
    "ml_detect",
]


@dataclass(frozen=True)
class GsmConfig:
    n_t: int
    n_a: int
    M: int = 2
    mean_power: float = 1.0
    eo_efficiency: float = 1.0
    responsivity: float = 0.75
    noise_std: float = 1e-6

    def __post_init__(self):
        if not 1 <= self.n_a <= self.n_t:
            raise ValueError(f"need 1 <= n_a <= n_t, got n_a={self.n_a}, n_t={self.n_t}")
        if self.M < 2 or self.M & (self.M - 1):
            raise ValueError(f"M must be a power of two >= 2, got {self.M}")
        if self.mean_power <= 0 or self.noise_std <= 0:
            raise ValueError("mean_power and noise_std must be positive")

    @property
    def gain(self) -> float:
        """Electrical gain ``alpha * r`` applied to ``H x``."""
        return self.eo_efficiency * self.responsivity


def intensity_levels(M: int, mean_power: float) -> np.ndarray:
    """``I_m = 2 I_P m / (M + 1)`` for ``m = 1..M``; the levels average to ``I_P``."""
    if M < 1:
        raise ValueError(f"M must be >= 1, got {M}")
    m = np.arange(1, M + 1)
    return 2.0 * mean_power * m / (M + 1)


def bpcu(config: GsmConfig) -> int:
    """Bits per channel use."""
    n_patterns = math.comb(config.n_t, config.n_a)
    return int(math.floor(math.log2(n_patterns))) + config.n_a * int(math.floor(math.log2(config.M)))


@dataclass(frozen=True)
class SignalSet:
    """All legal transmit vectors, indexed by their integer label."""

    vectors: np.ndarray  # (L, n_t)
    bits: np.ndarray  # (L, eta) uint8
    patterns: tuple  # retained activation patterns
    eta: int

    def __len__(self) -> int:
        return self.vectors.shape[0]

    def encode(self, bits) -> int:
        """Label index for a bit sequence (big-endian)."""
        bits = np.asarray(bits, dtype=int).ravel()
        if bits.size != self.eta or np.any((bits != 0) & (bits != 1)):
            raise ValueError(f"expected {self.eta} bits")
        return int(bits @ (1 << np.arange(self.eta - 1, -1, -1)))

    def decode(self, index: int) -> np.ndarray:
        return self.bits[index].copy()

    @property
    def hamming(self) -> np.ndarray:
        """(L, L) Hamming distances between labels."""
        b = self.bits.astype(np.int16)
        return (b[:, None, :] != b[None, :, :]).sum(axis=2)


def build_signal_set(config: GsmConfig) -> SignalSet:
    n_bits_pattern = int(math.floor(math.log2(math.comb(config.n_t, config.n_a))))
    b_sym = int(math.log2(config.M))
    eta = n_bits_pattern + config.n_a * b_sym
    patterns = tuple(itertools.islice(
        itertools.combinations(range(config.n_t), config.n_a), 2**n_bits_pattern))
    levels = intensity_levels(config.M, config.mean_power)

    L = 2**eta
    vectors = np.zeros((L, config.n_t))
    labels = np.arange(L)
    bits = ((labels[:, None] >> np.arange(eta - 1, -1, -1)) & 1).astype(np.uint8)
    sym_mask = (1 << b_sym) - 1
    for k in range(L):
        pattern = patterns[k >> (config.n_a * b_sym)]
        for a, led in enumerate(pattern):
            shift = b_sym * (config.n_a - 1 - a)
            vectors[k, led] = levels[(k >> shift) & sym_mask]
    return SignalSet(vectors=vectors, bits=bits, patterns=patterns, eta=eta)


def transmit(H, x, config: GsmConfig, rng: np.random.Generator) -> np.ndarray:
    """Received electrical signal ``alpha r H x + n``.

    ``x`` may be a single vector (n_t,) or a batch (n, n_t); noise is iid
    Gaussian with std ``config.noise_std`` per PD.
    """
    H = np.asarray(H, dtype=float)
    x = np.asarray(x, dtype=float)
    if H.ndim != 2 or x.shape[-1] != H.shape[1]:
        raise ValueError(f"shape mismatch: H {H.shape}, x {x.shape}")
    clean = config.gain * (x @ H.T)
    return clean + config.noise_std * rng.standard_normal(clean.shape)


def ml_detect(y, H, signal_set: SignalSet, config: GsmConfig):
    """Minimum-distance detection over the signal set.

    Ties go to the lowest label. Accepts a single observation (n_r,) or a batch
    (n, n_r); returns ``(vectors, labels)`` with matching leading shape.
    """
    y = np.asarray(y, dtype=float)
    single = y.ndim == 1
    Y = np.atleast_2d(y)
    cand = config.gain * (signal_set.vectors @ np.asarray(H, dtype=float).T)  # (L, n_r)
    labels = np.empty(Y.shape[0], dtype=np.int64)
    chunk = max(1, 2**20 // max(1, cand.size))
    for s in range(0, Y.shape[0], chunk):
        diff = Y[s:s + chunk, None, :] - cand[None, :, :]
        labels[s:s + chunk] = np.argmin((diff * diff).sum(axis=2), axis=1)
    if single:
        return signal_set.vectors[labels[0]], int(labels[0])
    return signal_set.vectors[labels], labels
