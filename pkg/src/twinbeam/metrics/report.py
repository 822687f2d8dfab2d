from typing import Dict, Optional, Sequence

import numpy as np

from twinbeam.metrics.models import MetricsReport
from twinbeam.metrics.reductions import DEFAULT_THRESHOLDS_DB, avg_interference, from_db, outage
from twinbeam.predictor.evaluation import prediction_rmse

REPORT_COLUMNS = (
    "scheme",
    "K",
    "seeds",
    "avg_interference_w",
    "avg_interference_dbm",
    "sinr_samples",
    "thresholds_db",
    "outage",
    "rmse_per_horizon_w",
    "rmse_w",
    "min_rate_bps_hz",
    "throughput_bps",
)


def build_report(
    scheme: str,
    k: int,
    seeds: Sequence[int],
    interference,
    sinr_samples,
    min_rates,
    predicted,
    realized,
    bandwidth: float,
    thresholds_db: Optional[np.ndarray] = None,
    metadata: Optional[dict] = None,
) -> MetricsReport:
    """Reduces pooled per-step series to one report.

    ``min_rates`` holds the worst user rate of every step; the report keeps
    their mean.
    """
    thresholds_db = DEFAULT_THRESHOLDS_DB if thresholds_db is None else np.asarray(thresholds_db, dtype=float)
    per_horizon, overall = prediction_rmse(predicted, realized)
    worst = float(np.mean(min_rates))
    return MetricsReport(
        scheme=scheme,
        k=k,
        seeds=sorted(int(s) for s in seeds),
        avg_interference=avg_interference(interference),
        sinr_samples=np.asarray(sinr_samples, dtype=float),
        thresholds_db=thresholds_db,
        outage=outage(sinr_samples, from_db(thresholds_db)),
        rmse_per_horizon=per_horizon,
        rmse=overall,
        min_rate=worst,
        throughput=bandwidth * worst,
        metadata=dict(metadata or {}),
    )


def _join(values) -> str:
    return ";".join(repr(float(v)) for v in values)


def report_row(report: MetricsReport) -> Dict[str, str]:
    return {
        "scheme": report.scheme,
        "K": str(report.k),
        "seeds": ";".join(str(s) for s in report.seeds),
        "avg_interference_w": repr(report.avg_interference),
        "avg_interference_dbm": repr(float(10.0 * np.log10(report.avg_interference) + 30.0))
        if report.avg_interference > 0
        else "-inf",
        "sinr_samples": _join(report.sinr_samples),
        "thresholds_db": _join(report.thresholds_db),
        "outage": _join(report.outage),
        "rmse_per_horizon_w": _join(report.rmse_per_horizon),
        "rmse_w": repr(report.rmse),
        "min_rate_bps_hz": repr(report.min_rate),
        "throughput_bps": repr(report.throughput),
    }
