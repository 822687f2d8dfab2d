from .interference import aggregate_interference, predicted_sinr, sinr, user_sinrs
from .models import BeamformerSet, OptimizationResult, OptimizerConfig
from .precoders import nf_focus, zf_precode
