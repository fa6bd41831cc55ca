"""Union-bound and Monte Carlo BER for ML-detected GSM."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import pdist
from scipy.special import erfc

from .gsm import GsmConfig, SignalSet, ml_detect, transmit

__all__ = ["BerEstimate", "q_function", "pair_distances", "bound_from_distances", "bounds_from_distances",
           "ber_upper_bound", "ber_monte_carlo"]


def q_function(x):
    """Gaussian tail probability ``Q(x) = 0.5 erfc(x / sqrt 2)``."""
    return 0.5 * erfc(np.asarray(x, dtype=float) / np.sqrt(2.0))


_Q_ZERO = 40.0  # Q underflows to exactly 0 well before this


def _q_sparse(x: np.ndarray) -> np.ndarray:
    # same values as q_function, skipping the erfc calls that return 0
    q = np.zeros_like(x)
    live = x < _Q_ZERO
    q[live] = q_function(x[live])
    return q


def pair_distances(H, signal_set: SignalSet) -> np.ndarray:
    """Condensed ``||H (x_m - x_n)||`` over pairs ``m < n`` (scipy ``pdist`` order)."""
    rx = signal_set.vectors @ np.asarray(H, dtype=float).T
    return pdist(rx)


def _pair_hamming(signal_set: SignalSet) -> np.ndarray:
    return np.rint(pdist(signal_set.bits, "hamming") * signal_set.eta)


def bound_from_distances(dist, hamming, config: GsmConfig, eta: int) -> float:
    return float(bounds_from_distances(np.asarray(dist)[None], hamming, config, eta)[0])


def bounds_from_distances(dist, hamming, config: GsmConfig, eta: int) -> np.ndarray:
    """Union bound for each row of a (k, n_pairs) distance array."""
    L = 2**eta
    q = _q_sparse(config.gain * np.asarray(dist, dtype=float) / (2.0 * config.noise_std))
    return 2.0 * (q @ hamming) / (eta * L)


def ber_upper_bound(H, signal_set: SignalSet, config: GsmConfig) -> float:
    """Pairwise-error union bound on the BER of ML detection.

    The Q argument is ``alpha r ||H (x_m - x_n)|| / (2 sigma)``. Each unordered
    pair is evaluated once and doubled.
    """
    return bound_from_distances(pair_distances(H, signal_set), _pair_hamming(signal_set),
                                config, signal_set.eta)


@dataclass(frozen=True)
class BerEstimate:
    value: float
    trials: int
    std_error: float
    errors: int = 0
    bits: int = 0


def ber_monte_carlo(H, signal_set: SignalSet, config: GsmConfig, trials: int,
                    rng: np.random.Generator, *, max_errors: int | None = 100,
                    chunk: int = 1000) -> BerEstimate:
    """Simulate uniform labels through ``H`` with ML detection and count bit errors.

    Runs in chunks of ``chunk`` channel uses and stops after the first chunk that
    brings the error count to ``max_errors`` (``None`` runs all ``trials``).
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    hamming = signal_set.hamming
    L = len(signal_set)
    errors = 0
    done = 0
    while done < trials:
        n = min(chunk, trials - done)
        sent = rng.integers(0, L, size=n)
        y = transmit(H, signal_set.vectors[sent], config, rng)
        _, got = ml_detect(y, H, signal_set, config)
        errors += int(hamming[sent, got].sum())
        done += n
        if max_errors is not None and errors >= max_errors:
            break
    bits = done * signal_set.eta
    p = errors / bits
    return BerEstimate(value=p, trials=done, std_error=float(np.sqrt(p * (1 - p) / bits)),
                       errors=errors, bits=bits)
