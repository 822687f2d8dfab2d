"""Trace reduction into metric reports and figure-ready CSVs."""
import glob
import logging
import os
from collections import defaultdict
from typing import Dict, List, Optional, Tuple

import numpy as np

from twinbeam.errors import ConfigHashMismatchError
from twinbeam.harness.models import SchemeId
from twinbeam.harness.outputs import TraceFile, fmt, read_trace, write_csv
from twinbeam.harness.registry import figure_schemes
from twinbeam.metrics.reductions import DEFAULT_THRESHOLDS_DB, interference_reduction_gain, sinr_cdf, to_db
from twinbeam.metrics.report import REPORT_COLUMNS, build_report, report_row

logger = logging.getLogger(__name__)

FIGURES = (
    "interference_vs_time",
    "interference_vs_k",
    "sinr_cdf",
    "outage_vs_threshold",
    "rmse_vs_horizon",
    "minrate_vs_scheme",
)


def list_traces(directory: str) -> List[str]:
    paths = sorted(glob.glob(os.path.join(directory, "*.csv")))
    return [p for p in paths if not p.endswith(".optimizer.csv")]


def load_traces(directory: str, expected_hash: Optional[str] = None) -> List[TraceFile]:
    """Reads every trace in ``directory``.

    Raises:
        FileNotFoundError: If there are no traces.
        ConfigHashMismatchError: If the traces were produced by different
            configurations, or not by ``expected_hash``.
    """
    paths = list_traces(directory)
    if not paths:
        raise FileNotFoundError(f"No traces found in {directory}")
    traces = [read_trace(p) for p in paths]
    hashes = sorted({t.config_hash for t in traces})
    if len(hashes) > 1:
        raise ConfigHashMismatchError(f"Traces in {directory} come from {len(hashes)} configurations: {hashes}")
    if expected_hash is not None and hashes[0] != expected_hash:
        raise ConfigHashMismatchError(
            f"Traces were produced by config {hashes[0][:12]}, evaluation uses {expected_hash[:12]}"
        )
    return traces


def _stderr(values: np.ndarray, axis: int = 0) -> np.ndarray:
    count = values.shape[axis]
    if count < 2:
        return np.zeros(np.delete(values.shape, axis))
    return values.std(axis=axis, ddof=1) / np.sqrt(count)


def _report(scheme: str, k: int, traces: List[TraceFile], bandwidth: float, thresholds_db):
    return build_report(
        scheme,
        k,
        [t.seed for t in traces],
        np.concatenate([t.column("interference") for t in traces]),
        np.concatenate([t.column("sinr") for t in traces]),
        np.concatenate([t.column("min_rate") for t in traces]),
        np.concatenate([t.matrix("interference_pred_") for t in traces]),
        np.concatenate([t.matrix("interference_held_") for t in traces]),
        bandwidth,
        thresholds_db,
    )


def evaluate_traces(
    trace_dir: str,
    output_dir: str,
    bandwidth: float,
    expected_hash: Optional[str] = None,
    include_oracle: bool = False,
    thresholds_db=None,
) -> Dict[str, str]:
    """Writes per-cell and aggregate reports plus one CSV per figure.

    Returns a mapping from output name to path.
    """
    thresholds_db = DEFAULT_THRESHOLDS_DB if thresholds_db is None else np.asarray(thresholds_db, dtype=float)
    traces = load_traces(trace_dir, expected_hash)
    config_hash = traces[0].config_hash

    groups: Dict[Tuple[str, int], List[TraceFile]] = defaultdict(list)
    for trace in traces:
        groups[(trace.scheme, trace.k)].append(trace)
    for members in groups.values():
        members.sort(key=lambda t: t.seed)

    reports_dir = os.path.join(output_dir, "reports")
    figures_dir = os.path.join(output_dir, "figures")
    outputs: Dict[str, str] = {}

    aggregates = {}
    for (scheme, k), members in sorted(groups.items()):
        for trace in members:
            report = _report(scheme, k, [trace], bandwidth, thresholds_db)
            path = os.path.join(reports_dir, f"{scheme}_K{k}_seed{trace.seed}.csv")
            write_csv(path, REPORT_COLUMNS, [report_row(report)], comment=f"# config_hash={config_hash} seed={trace.seed}")
        aggregates[(scheme, k)] = _report(scheme, k, members, bandwidth, thresholds_db)

    all_seeds = sorted({t.seed for t in traces})
    comment = f"# config_hash={config_hash} seeds={';'.join(str(s) for s in all_seeds)}"
    outputs["aggregate"] = os.path.join(reports_dir, "aggregate.csv")
    write_csv(outputs["aggregate"], REPORT_COLUMNS, [report_row(r) for r in aggregates.values()], comment=comment)

    shown = {s.value for s in figure_schemes(sorted({t.scheme for t in traces}), include_oracle)}
    keys = [key for key in sorted(groups) if key[0] in shown]

    time_rows, k_rows, cdf_rows, outage_rows, rmse_rows, rate_rows = [], [], [], [], [], []
    for scheme, k in keys:
        members = groups[(scheme, k)]
        report = aggregates[(scheme, k)]
        base = {"scheme": scheme, "K": str(k)}

        length = min(len(t.rows) for t in members)
        series = np.stack([t.column("interference")[:length] for t in members])
        steps = members[0].column("t")[:length]
        means, errors = series.mean(axis=0), _stderr(series)
        for index in range(length):
            time_rows.append(dict(base, t=fmt(int(steps[index])), interference_w=fmt(means[index]),
                                  stderr_w=fmt(errors[index])))

        per_seed = series.mean(axis=1)
        reference = aggregates.get((SchemeId.REACTIVE_ZF.value, k))
        gain = ""
        if reference is not None and report.avg_interference > 0 and reference.avg_interference > 0:
            gain = fmt(interference_reduction_gain(reference.avg_interference, report.avg_interference))
        k_rows.append(dict(base, interference_w=fmt(report.avg_interference),
                           interference_dbm=fmt(float(to_db(report.avg_interference) + 30.0)) if report.avg_interference > 0 else "-inf",
                           stderr_w=fmt(float(_stderr(per_seed))), reduction_gain_db=gain))

        points, probabilities = sinr_cdf(report.sinr_samples)
        with np.errstate(divide="ignore"):
            points_db = to_db(points)
        for point, probability in zip(points_db, probabilities):
            cdf_rows.append(dict(base, sinr_db=fmt(point), cdf=fmt(probability)))

        for threshold, probability in zip(report.thresholds_db, report.outage):
            outage_rows.append(dict(base, threshold_db=fmt(threshold), outage=fmt(probability)))

        for tau, value in enumerate(report.rmse_per_horizon, start=1):
            rmse_rows.append(dict(base, tau=str(tau), rmse_w=fmt(value)))

        rates = np.array([t.column("min_rate").mean() for t in members])
        rate_rows.append(dict(base, min_rate_bps_hz=fmt(report.min_rate), stderr=fmt(float(_stderr(rates))),
                              throughput_bps=fmt(report.throughput)))

    figures = {
        "interference_vs_time": (["scheme", "K", "t", "interference_w", "stderr_w"], time_rows),
        "interference_vs_k": (["scheme", "K", "interference_w", "interference_dbm", "stderr_w", "reduction_gain_db"], k_rows),
        "sinr_cdf": (["scheme", "K", "sinr_db", "cdf"], cdf_rows),
        "outage_vs_threshold": (["scheme", "K", "threshold_db", "outage"], outage_rows),
        "rmse_vs_horizon": (["scheme", "K", "tau", "rmse_w"], rmse_rows),
        "minrate_vs_scheme": (["scheme", "K", "min_rate_bps_hz", "stderr", "throughput_bps"], rate_rows),
    }
    for name in FIGURES:
        columns, rows = figures[name]
        outputs[name] = os.path.join(figures_dir, f"{name}.csv")
        write_csv(outputs[name], columns, rows, comment=comment)

    logger.info("Evaluated %d traces into %s", len(traces), output_dir)
    return outputs
