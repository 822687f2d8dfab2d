from .blockage import blockage_process
from .hotspots import hotspot_activate
from .mobility import mobility_step
from .models import (
    DtFeatures,
    DtSample,
    DtTargets,
    EnvironmentSnapshot,
    Hotspot,
    MobilityState,
    SimulationConfig,
)
