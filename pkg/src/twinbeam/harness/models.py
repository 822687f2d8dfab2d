from datetime import datetime
from enum import Enum
from typing import List, Optional

from twinbeam.pydantic_compat import BaseModel


class SchemeId(str, Enum):
    REACTIVE_ZF = "reactive_zf"
    REACTIVE_HYBRID = "reactive_hybrid"
    DT_DETERMINISTIC = "dt_deterministic"
    GENAI_REGIME_UNAWARE = "genai_regime_unaware"
    PROPOSED = "genai_regime_aware_proposed"
    ORACLE = "oracle"


# Default sweep; oracle is an upper bound only
COMPARISON_SCHEMES = (
    SchemeId.REACTIVE_ZF,
    SchemeId.REACTIVE_HYBRID,
    SchemeId.DT_DETERMINISTIC,
    SchemeId.GENAI_REGIME_UNAWARE,
    SchemeId.PROPOSED,
)


class PredictorKind(str, Enum):
    HOLD = "hold"
    DETERMINISTIC = "deterministic"
    GENERATIVE = "generative"
    ORACLE = "oracle"


class SchemeSpec(BaseModel):
    id: SchemeId
    title: str
    predictor: PredictorKind
    regime_aware: bool
    proactive: bool
    in_comparison: bool = True


class JobStatus(str, Enum):
    PENDING = "pending"
    RUNNING = "running"
    COMPLETED = "completed"
    FAILED = "failed"


class CellJob(BaseModel):
    """One (scheme, K, seed) simulation cell of a sweep."""

    scheme: SchemeId
    k: int
    seed: int
    status: JobStatus = JobStatus.PENDING
    trace_path: Optional[str] = None
    error: Optional[str] = None
    started_at: Optional[datetime] = None
    finished_at: Optional[datetime] = None

    @property
    def key(self) -> str:
        return f"{self.scheme.value}_K{self.k}_seed{self.seed}"


class SweepSummary(BaseModel):
    jobs: List[CellJob] = []

    def count(self, status: JobStatus) -> int:
        return sum(1 for job in self.jobs if job.status == status)
