from .geometry import (
    classify_regime,
    distance_to_ue,
    element_distances,
    far_field_distances,
    link_regime,
    los_blocked,
    plane_wave_steering,
    rayleigh_distance,
)
from .models import Box, Regime, Scene, Transmitter, UpaGeometry
