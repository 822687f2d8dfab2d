"""Adversarial training of the trajectory generator with a consistency loss."""
import logging
import math
from typing import List, Optional, Sequence, Tuple

import numpy as np
import torch
import torch.nn.functional as F

from twinbeam.dynamics.models import DtSample
from twinbeam.errors import TrainingDivergedError
from twinbeam.predictor.features import FeatureLayout, stack_samples
from twinbeam.predictor.models import NormalizationStats, TrainingConfig, TrainingLog
from twinbeam.predictor.network import GenerativeModel

logger = logging.getLogger(__name__)

_LOG_EPS = 1e-12

LOG_COLUMNS = ("epoch", "loss_d", "loss_adv", "loss_pred", "val_loss_pred", "grad_norm_pred")


def prediction_loss(emitted: torch.Tensor, target: torch.Tensor, layout: FeatureLayout, mu: float) -> torch.Tensor:
    """Batch mean of the per-sample consistency loss.

    Per tau: squared residuals of the UE offset, every link's log Lambda and
    blockage probability, plus mu times the squared residual of the log
    interference. Averaged over the target columns so the scale does not
    grow with K or the horizon.
    """
    residual = (emitted - target) ** 2
    weights = torch.ones(layout.target_dim, dtype=residual.dtype)
    weights[torch.as_tensor(layout.interference_columns())] = mu
    return (residual * weights).mean()


def adversarial_value(d_real: torch.Tensor, d_fake: torch.Tensor) -> torch.Tensor:
    """E[log D(real)] + E[log(1 - D(fake))]."""
    return torch.mean(torch.log(d_real) + torch.log(1.0 - d_fake))


def target_normalization(targets: np.ndarray, layout: FeatureLayout) -> NormalizationStats:
    stats = NormalizationStats.fit(targets)
    mask = layout.blockage_mask()
    # Blockage probabilities stay on [0, 1]
    return NormalizationStats(mean=np.where(mask, 0.0, stats.mean), std=np.where(mask, 1.0, stats.std))


def split_by_time(
    samples: Sequence[DtSample], fraction: float
) -> Tuple[List[DtSample], List[DtSample]]:
    """Training and validation split without shared time steps.

    With several seeds the last seeds are held out whole. With one seed the
    last block of decision steps is held out, and training steps whose
    targets or history could overlap it are purged.
    """
    if fraction == 0.0:
        return list(samples), []

    seeds = sorted({s.features.seed for s in samples})
    if len(seeds) > 1:
        held = set(seeds[-max(1, int(round(fraction * len(seeds)))) :])
        if len(held) == len(seeds):
            held = {seeds[-1]}
        train = [s for s in samples if s.features.seed not in held]
        validation = [s for s in samples if s.features.seed in held]
        return train, validation

    ordered = sorted(samples, key=lambda s: s.features.t)
    count = max(1, int(math.floor(fraction * len(ordered))))
    validation = ordered[-count:]
    first = validation[0]
    gap = first.features.history_length - 1 + first.targets.horizon
    train = [s for s in ordered if s.features.t < first.features.t - gap]
    if not train:
        raise ValueError(
            f"{len(ordered)} samples leave no training data after a purge gap of {gap} steps; "
            "add seeds, lengthen the run or lower validation_fraction"
        )
    return train, validation


def _diverged(epoch: int, rows: List[dict], event_log, detail: str) -> None:
    message = f"Training diverged at epoch {epoch}: {detail}"
    if event_log is not None:
        event_log.error("trainer", "train", message, metadata={"last_rows": rows[-3:]}, module="predictor")
    raise TrainingDivergedError(message)


def _validation_loss(model: GenerativeModel, cond: torch.Tensor, target: torch.Tensor) -> float:
    if cond.shape[0] == 0:
        return float("nan")
    with torch.no_grad():
        z = torch.zeros(cond.shape[0], model.latent_dim, dtype=torch.float64)
        emitted = model.generator.emit(cond, z)
        return float(prediction_loss(emitted, target, model.layout, model.config.mu))


def _optimizer(params, config: TrainingConfig) -> torch.optim.Optimizer:
    if config.optimizer == "sgd":
        return torch.optim.SGD(params, lr=config.learning_rate, momentum=config.momentum)
    return torch.optim.Adam(params, lr=config.learning_rate, betas=(config.beta1, 0.999))


def _step(optimizer: torch.optim.Optimizer, loss: torch.Tensor, params, clip: float) -> None:
    optimizer.zero_grad()
    loss.backward()
    if clip > 0:
        torch.nn.utils.clip_grad_norm_(params, clip)
    optimizer.step()


def train_generative(
    samples: Sequence[DtSample],
    config: TrainingConfig,
    resume: Optional[GenerativeModel] = None,
    event_log=None,
) -> GenerativeModel:
    """Trains (or continues training) the conditional generator.

    Args:
        samples: DT samples of one scene configuration.
        config: Hyperparameters; ``config.epochs`` more epochs are run.
        resume: Model to continue from. Its layout and normalization are
            kept and the epoch counter and loss series continue.
        event_log: Optional EventLog receiving divergence diagnostics.

    Raises:
        ValueError: If there are no samples or they do not fit the model.
        TrainingDivergedError: If a loss becomes NaN or infinite.
    """
    if not samples:
        raise ValueError("Cannot train on an empty dataset")

    train, validation = split_by_time(samples, config.validation_fraction)
    if resume is not None:
        model = resume
        layout = model.layout
    else:
        layout = FeatureLayout.from_sample(train[0], config.history_elements)

    train_cond, train_target = stack_samples(train, layout)
    if resume is None:
        model = GenerativeModel.create(
            layout,
            config,
            NormalizationStats.fit(train_cond),
            target_normalization(train_target, layout),
        )
    else:
        model.config = config

    cond = model.normalize_conditions(train_cond)
    target = model.normalize_targets(train_target)
    if validation:
        val_cond_raw, val_target_raw = stack_samples(validation, layout)
        val_cond = model.normalize_conditions(val_cond_raw)
        val_target = model.normalize_targets(val_target_raw)
    else:
        val_cond = torch.zeros(0, layout.cond_dim, dtype=torch.float64)
        val_target = torch.zeros(0, layout.target_dim, dtype=torch.float64)

    start_epoch = model.log.epochs
    rng = torch.Generator().manual_seed(config.seed + start_epoch)
    generator_params = list(model.generator.parameters())
    discriminator_params = list(model.discriminator.parameters())
    gen_opt = _optimizer(generator_params, config)
    disc_opt = _optimizer(discriminator_params, config)

    count = cond.shape[0]
    rows = list(model.log.rows)
    initial = model.log.initial_val_loss_pred
    if resume is None:
        initial = _validation_loss(model, val_cond, val_target)
    logger.info(
        "Training on %d samples (%d validation), epochs %d..%d",
        count,
        len(validation),
        start_epoch + 1,
        start_epoch + config.epochs,
    )

    for epoch in range(start_epoch + 1, start_epoch + config.epochs + 1):
        order = torch.randperm(count, generator=rng)
        totals = {"loss_d": 0.0, "loss_adv": 0.0, "loss_pred": 0.0}
        grad_norm = 0.0
        batches = 0

        for start in range(0, count, config.batch_size):
            index = order[start : start + config.batch_size]
            c, y = cond[index], target[index]
            size = c.shape[0]

            z = torch.randn(size, model.latent_dim, generator=rng, dtype=torch.float64)
            fake = model.generator.emit(c, z).detach()
            d_real = model.discriminator(c, y)
            d_fake = model.discriminator(c, fake)
            if not (torch.isfinite(d_real).all() and torch.isfinite(d_fake).all()):
                _diverged(epoch, rows, event_log, "discriminator output is not finite")
            loss_d = F.binary_cross_entropy(d_real, torch.full_like(d_real, config.label_smoothing)) + \
                F.binary_cross_entropy(d_fake, torch.zeros_like(d_fake))
            _step(disc_opt, loss_d, discriminator_params, config.grad_clip)

            z = torch.randn(size, model.latent_dim, generator=rng, dtype=torch.float64)
            emitted = model.generator.emit(c, z)
            loss_adv = -torch.log(model.discriminator(c, emitted) + _LOG_EPS).mean()
            loss_pred = prediction_loss(emitted, y, layout, config.mu)
            weighted_pred = config.lambda_pred * loss_pred

            if batches == 0 and config.lambda_pred > 0:
                grads = torch.autograd.grad(weighted_pred, generator_params, retain_graph=True)
                grad_norm = float(torch.sqrt(sum((g ** 2).sum() for g in grads)))

            _step(gen_opt, loss_adv + weighted_pred, generator_params, config.grad_clip)

            totals["loss_d"] += float(loss_d)
            totals["loss_adv"] += float(loss_adv)
            totals["loss_pred"] += float(loss_pred)
            batches += 1

        row = {"epoch": epoch}
        row.update({name: value / batches for name, value in totals.items()})
        row["val_loss_pred"] = _validation_loss(model, val_cond, val_target)
        row["grad_norm_pred"] = grad_norm
        bad = {name: row[name] for name in ("loss_d", "loss_adv", "loss_pred") if not math.isfinite(row[name])}
        if bad:
            _diverged(epoch, rows, event_log, f"non-finite losses {bad}")
        rows.append(row)
        logger.debug("Epoch %d: %s", epoch, row)

    model.log = TrainingLog(rows=rows, initial_val_loss_pred=initial)
    model.trained = True
    last = rows[-1]
    logger.info(
        "Training finished: loss_pred %.4g, val_loss_pred %.4g (initial %.4g)",
        last["loss_pred"],
        last["val_loss_pred"],
        float("nan") if initial is None else initial,
    )
    return model


def validation_loss(samples: Sequence[DtSample], model: GenerativeModel) -> float:
    """Validation consistency loss of ``model`` on ``samples`` with z = 0."""
    cond_raw, target_raw = stack_samples(samples, model.layout)
    return _validation_loss(model, model.normalize_conditions(cond_raw), model.normalize_targets(target_raw))
