"""Reactive benchmarks: beams from the instantaneous channels only."""
import logging
from typing import Dict, Optional

import numpy as np

from twinbeam.beamform.models import BeamformerSet
from twinbeam.beamform.precoders import nf_focus, zf_precode
from twinbeam.scene.models import Regime

logger = logging.getLogger(__name__)

REACTIVE_ZF = "reactive_zf"
REACTIVE_HYBRID = "reactive_hybrid"


def interferer_beam(own, tagged, regime: Regime, zf_delta: Optional[float] = None) -> np.ndarray:
    """Beam of one interferer: ZF toward its own user nulling the tagged UE in
    the far field, focusing on its own user in the near field."""
    if regime == Regime.NF:
        return nf_focus(own)
    try:
        return zf_precode(np.stack([own, tagged]), delta=zf_delta)[0]
    except ValueError as exc:
        logger.debug("ZF fell back to focusing: %s", exc)
        return nf_focus(own)


def reactive_beams(
    tagged,
    own,
    regimes,
    powers,
    regime_aware: bool = True,
    zf_delta: Optional[float] = None,
) -> BeamformerSet:
    """Beams for every transmitter from the current channels.

    Args:
        tagged: (K+1, M) effective channels toward the tagged UE.
        own: (K+1, M) effective channel of transmitter k toward its served
            user; row 0 is unused.
        regimes: Regime of each link toward the tagged UE.
        powers: Nominal transmit powers.
        regime_aware: False applies ZF on every interferer.
    """
    tagged = np.asarray(tagged, dtype=complex)
    own = np.asarray(own, dtype=complex)
    weights = [nf_focus(tagged[0])]
    for k in range(1, tagged.shape[0]):
        regime = Regime(int(regimes[k])) if regime_aware else Regime.FF
        weights.append(interferer_beam(own[k], tagged[k], regime, zf_delta))
    return BeamformerSet(weights=np.stack(weights), powers=np.asarray(powers, dtype=float))


def reactive_schemes(snapshot, ff_snapshot, powers, zf_delta: Optional[float] = None) -> Dict[str, BeamformerSet]:
    """Both reactive benchmarks for one step.

    ``reactive_zf`` ignores regimes and designs all-ZF beams on the
    far-field view of the channels; ``reactive_hybrid`` dispatches on the
    regime of each link toward the tagged UE.
    """
    return {
        REACTIVE_ZF: reactive_beams(
            ff_snapshot.tagged_matrix(),
            ff_snapshot.own_matrix(),
            ff_snapshot.regimes,
            powers,
            regime_aware=False,
            zf_delta=zf_delta,
        ),
        REACTIVE_HYBRID: reactive_beams(
            snapshot.tagged_matrix(),
            snapshot.own_matrix(),
            snapshot.regimes,
            powers,
            regime_aware=True,
            zf_delta=zf_delta,
        ),
    }
