from typing import Tuple

import numpy as np


def prediction_rmse(predicted, realized) -> Tuple[np.ndarray, float]:
    """RMSE of predicted against realized interference.

    Both arrays are (steps, T); for multi-sample bundles pass the sample
    mean per step. Returns the RMSE per horizon tau and over all entries.
    """
    predicted = np.asarray(predicted, dtype=float)
    realized = np.asarray(realized, dtype=float)
    if predicted.shape != realized.shape:
        raise ValueError(f"Shape mismatch: predicted {predicted.shape}, realized {realized.shape}")
    if predicted.size == 0:
        raise ValueError("No predictions to score")
    if predicted.ndim == 1:
        predicted = predicted[:, None]
        realized = realized[:, None]
    squared = (predicted - realized) ** 2
    return np.sqrt(squared.mean(axis=0)), float(np.sqrt(squared.mean()))
