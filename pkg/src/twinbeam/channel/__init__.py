from .models import LinkChannel, NlosPath, PathLossModel
from .synthesis import (
    doppler_and_coherence,
    hybrid_channel,
    link_channel,
    los_channel,
    los_gain,
    nlos_path_loss,
    nlos_paths,
    path_loss,
)
