"""Proactive interference-aware beam optimization over sampled futures."""
import logging
from typing import List, Optional

import numpy as np
from scipy.linalg import orth

from twinbeam.beamform.interference import aggregate_interference
from twinbeam.beamform.models import BeamformerSet, OptimizationResult, OptimizerConfig
from twinbeam.beamform.precoders import dominant_direction, nf_focus
from twinbeam.beamform.reactive import interferer_beam
from twinbeam.scene.models import Regime

logger = logging.getLogger(__name__)

_NULL_NORM = 1e-9
_REWEIGHT_ROUNDS = 3


def expected_interference(bundle, beams: BeamformerSet) -> float:
    """(1/M) sum_m sum_tau of the predicted aggregate interference."""
    return float(aggregate_interference(bundle.channels, beams).sum(axis=1).mean())


def _sample_sinr(serving: np.ndarray, w0: np.ndarray, p0: float, interference: np.ndarray, noise: float) -> np.ndarray:
    gains = p0 * np.abs(serving.conj() @ w0) ** 2
    return gains / (interference + noise)


def _serving_update(
    serving: np.ndarray, w0: np.ndarray, p0: float, interference: np.ndarray, noise: float
) -> np.ndarray:
    """Beam of the serving AP maximizing the worst-sample predicted SINR.

    ``serving`` stacks the predicted serving channels of every (m, tau).
    The SINR carries the noise power, so the chosen direction is unchanged
    when channels scale by c and noise by c**2, not when channels scale
    alone. Each candidate costs one pass over the M*T samples.
    """
    start = _sample_sinr(serving, w0, p0, interference, noise)
    candidates = [w0, dominant_direction(serving), nf_focus(serving[int(np.argmin(start))])]

    def worst(w):
        return float(np.min(_sample_sinr(serving, w, p0, interference, noise)))

    best = max(candidates, key=worst)
    best_value = worst(best)

    # Pull toward the worst samples
    for _ in range(_REWEIGHT_ROUNDS):
        values = _sample_sinr(serving, best, p0, interference, noise)
        weights = 1.0 / np.maximum(values, 1e-300)
        weights = weights / weights.sum()
        candidate = dominant_direction(np.sqrt(weights)[:, None] * serving)
        value = worst(candidate)
        if value <= best_value:
            break
        best, best_value = candidate, value
    return best


def _null_space_beam(predicted: np.ndarray, own: np.ndarray, previous: np.ndarray) -> np.ndarray:
    """Own-user direction with every predicted tagged-UE channel removed."""
    direction = nf_focus(own)
    basis = orth(predicted.T)
    projected = direction - basis @ (basis.conj().T @ direction)
    norm = np.linalg.norm(projected)
    if norm < _NULL_NORM:
        return previous
    return projected / norm


def _scale_to_budget(weights: np.ndarray, powers: np.ndarray, budget: float) -> np.ndarray:
    radiated = float(np.sum(powers * np.linalg.norm(weights, axis=1) ** 2))
    if radiated <= budget:
        return weights
    return weights * np.sqrt(budget / radiated)


def initial_beams(bundle, regimes, own_channels, powers, zf_delta: Optional[float] = None) -> BeamformerSet:
    """FF links start from ZF, NF links from focusing on their own user."""
    first = bundle.channels[0, 0]
    weights = [nf_focus(first[0])]
    for k in range(1, bundle.num_links):
        weights.append(interferer_beam(own_channels[k], first[k], Regime(int(regimes[k])), zf_delta))
    return BeamformerSet(weights=np.stack(weights), powers=np.asarray(powers, dtype=float))


def proactive_optimize(
    bundle,
    regimes,
    config: OptimizerConfig,
    own_channels,
    powers,
    initial: Optional[BeamformerSet] = None,
) -> OptimizationResult:
    """Minimizes the expected cumulative predicted interference at the tagged
    UE subject to the per-sample SINR constraint.

    An iterate that would raise the objective is rejected and ends the
    search, so the logged objective never increases.

    Args:
        bundle: Predicted futures (TrajectoryBundle).
        regimes: Regime of each link toward the tagged UE at decision time.
        config: Optimizer settings.
        own_channels: (K+1, M) current channels of each interferer toward
            its own served user.
        powers: Nominal transmit powers.
        initial: Starting beams; None derives them from the regimes.
    """
    own_channels = np.asarray(own_channels, dtype=complex)
    powers = np.asarray(powers, dtype=float)
    budget = float(np.sum(powers)) if config.power_budget is None else config.power_budget
    noise = config.noise_power

    beams = initial if initial is not None else initial_beams(bundle, regimes, own_channels, powers, config.zf_delta)
    weights = _scale_to_budget(beams.weights.copy(), powers, budget)

    serving = bundle.channels[:, :, 0, :].reshape(-1, bundle.channels.shape[-1])
    predicted = [bundle.channels[:, :, k, :].reshape(-1, bundle.channels.shape[-1]) for k in range(bundle.num_links)]

    objective = expected_interference(bundle, BeamformerSet(weights=weights, powers=powers))
    trace: List[dict] = [{"iteration": 0, "objective": objective, "accepted": True}]
    iterations = 0

    for iteration in range(1, config.max_iters + 1):
        iterations = iteration
        candidate = weights.copy()

        interference = aggregate_interference(bundle.channels, BeamformerSet(weights=candidate, powers=powers)).reshape(-1)
        candidate[0] = _serving_update(serving, candidate[0], powers[0], interference, noise)

        for k in range(1, bundle.num_links):
            candidate[k] = _null_space_beam(predicted[k], own_channels[k], candidate[k])

        candidate = _scale_to_budget(candidate, powers, budget)
        updated = expected_interference(bundle, BeamformerSet(weights=candidate, powers=powers))

        if updated > objective:
            trace.append({"iteration": iteration, "objective": objective, "accepted": False})
            logger.debug("Iteration %d rejected (%.6e > %.6e)", iteration, updated, objective)
            break

        weights = candidate
        previous, objective = objective, updated
        trace.append({"iteration": iteration, "objective": objective, "accepted": True})
        if config.verbose:
            logger.info("Iteration %d objective %.6e", iteration, objective)

        if previous == 0.0 or abs(previous - objective) <= config.tol * previous:
            break

    beams = BeamformerSet(weights=weights, powers=powers)
    interference = aggregate_interference(bundle.channels, beams)
    serving_gain = np.abs(np.einsum("stm,m->st", bundle.channels[:, :, 0, :].conj(), weights[0])) ** 2
    sinr = powers[0] * serving_gain / (interference + noise)

    if np.any(sinr < config.gamma_min):
        beams, sinr = _boost_serving_power(beams, serving_gain, interference, noise, config.gamma_min, budget)

    feasibility = sinr >= config.gamma_min
    return OptimizationResult(
        beams=beams,
        objective=objective,
        feasible=bool(np.all(feasibility)),
        feasibility=feasibility,
        min_sinr=float(np.min(sinr)),
        iterations=iterations,
        trace=trace,
    )


def _boost_serving_power(beams, serving_gain, interference, noise, gamma_min, budget):
    """Raises P_0 toward the level every sample needs, within the budget slack."""
    slack = budget - beams.radiated_power()
    norm0 = float(np.linalg.norm(beams.weights[0]) ** 2)
    if slack <= 0 or np.any(serving_gain <= 0):
        return beams, beams.powers[0] * serving_gain / (interference + noise)

    needed = float(np.max(gamma_min * (interference + noise) / serving_gain))
    p0 = min(max(needed, beams.powers[0]), beams.powers[0] + slack / norm0)
    boosted = beams.with_power(0, p0)
    return boosted, p0 * serving_gain / (interference + noise)
