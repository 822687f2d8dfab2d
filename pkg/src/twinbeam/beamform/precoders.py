from typing import Optional

import numpy as np

from twinbeam.errors import RankDeficientError

_ZERO_NORM = 1e-300


def default_regularization(gram: np.ndarray) -> float:
    return 1e-6 * float(np.trace(gram).real) / gram.shape[0]


def zf_precode(channels, delta: Optional[float] = None) -> np.ndarray:
    """Zero-forcing beams for the channel vectors in the rows of ``channels``.

    Computes W = H^H (H H^H + delta I)^-1 with H the matrix whose row j is
    h_j^H, and returns the unit-norm columns of W as rows: row k satisfies
    h_j^H w_k = 0 for j != k when delta is 0.

    Raises:
        ValueError: If there are more users than antennas.
        RankDeficientError: If delta is 0 and the channels are linearly
            dependent, or a beam vanishes.
    """
    h = np.atleast_2d(np.asarray(channels, dtype=complex))
    users, elements = h.shape
    if users > elements:
        raise ValueError(f"ZF needs K <= M, got K={users}, M={elements}")

    gram = h.conj() @ h.T
    if delta is None:
        delta = default_regularization(gram)
    if delta < 0:
        raise ValueError("delta must be >= 0")
    if delta == 0 and np.linalg.matrix_rank(h) < users:
        raise RankDeficientError(f"Channel matrix has rank below {users}; set delta > 0")

    weights = np.linalg.solve((gram + delta * np.eye(users)).T, h)
    norms = np.linalg.norm(weights, axis=1)
    if np.any(norms < _ZERO_NORM):
        raise RankDeficientError("ZF produced a zero beam")
    return weights / norms[:, None]


def nf_focus(h) -> np.ndarray:
    """Conjugate beam focusing on a spherical-wave channel: w = h / ||h||."""
    vector = np.asarray(h, dtype=complex).reshape(-1)
    norm = np.linalg.norm(vector)
    if norm == 0.0:
        raise ValueError("Cannot focus on a zero channel")
    return vector / norm


def dominant_direction(channels) -> np.ndarray:
    """Unit beam maximizing sum_n |h_n^H w|^2 over the rows of ``channels``."""
    stacked = np.atleast_2d(np.asarray(channels, dtype=complex))
    _, _, vh = np.linalg.svd(stacked.conj(), full_matrices=False)
    return nf_focus(vh[0].conj())
