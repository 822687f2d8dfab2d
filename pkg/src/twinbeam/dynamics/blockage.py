from twinbeam.scene.geometry import los_blocked
from twinbeam.scene.models import Scene


def blockage_process(scene: Scene, k: int, u) -> float:
    """xi of link k toward u: eta when the LoS segment crosses an obstacle."""
    if los_blocked(scene, scene.transmitter(k).center, u):
        return scene.blockage_factor
    return 1.0
