import numpy as np

from twinbeam.scene.models import Box, Regime, Scene


def _as_point(u) -> np.ndarray:
    point = np.asarray(u, dtype=float).reshape(3)
    if not np.all(np.isfinite(point)):
        raise ValueError(f"Point {point} is not finite")
    return point


def distance_to_ue(scene: Scene, k: int, u) -> float:
    return float(np.linalg.norm(_as_point(u) - scene.transmitter(k).center))


def rayleigh_distance(aperture: float, wavelength: float) -> float:
    if aperture <= 0 or wavelength <= 0:
        raise ValueError("aperture and wavelength must be positive")
    return 2.0 * aperture ** 2 / wavelength


def classify_regime(distance: float, rayleigh: float) -> Regime:
    # The boundary belongs to the near field
    return Regime.NF if distance <= rayleigh else Regime.FF


def link_regime(scene: Scene, k: int, u) -> Regime:
    tx = scene.transmitter(k)
    rayleigh = rayleigh_distance(tx.array.aperture, scene.wavelength) if tx.array.num_elements > 1 else 0.0
    return classify_regime(distance_to_ue(scene, k, u), rayleigh)


def segment_hits_box(a: np.ndarray, b: np.ndarray, box: Box) -> bool:
    """Slab test restricted to the open segment (a, b).

    Only a crossing of positive length through the box interior counts, so
    touching a face, edge or corner is not an intersection.
    """
    direction = b - a
    t_enter, t_exit = 0.0, 1.0
    for axis in range(3):
        if direction[axis] == 0.0:
            if not box.lower[axis] < a[axis] < box.upper[axis]:
                return False
            continue
        t1 = (box.lower[axis] - a[axis]) / direction[axis]
        t2 = (box.upper[axis] - a[axis]) / direction[axis]
        if t1 > t2:
            t1, t2 = t2, t1
        t_enter = max(t_enter, t1)
        t_exit = min(t_exit, t2)
        if t_enter >= t_exit:
            return False
    return True


def los_blocked(scene: Scene, a, b) -> bool:
    start = _as_point(a)
    end = _as_point(b)
    return any(segment_hits_box(start, end, box) for box in scene.obstacles)


def element_distances(scene: Scene, k: int, u) -> np.ndarray:
    positions = scene.transmitter(k).array.element_positions
    return np.linalg.norm(_as_point(u) - positions, axis=1)


def planar_offsets(scene: Scene, k: int, direction: np.ndarray) -> np.ndarray:
    """Projection of each element offset onto a unit direction."""
    tx = scene.transmitter(k)
    return (tx.array.element_positions - tx.center) @ direction


def far_field_distances(scene: Scene, k: int, u) -> np.ndarray:
    """Per-element LoS distances under the scene's far-field model."""
    tx = scene.transmitter(k)
    point = _as_point(u)
    d = float(np.linalg.norm(point - tx.center))
    if scene.far_field_model == "common" or d == 0.0:
        return np.full(tx.array.num_elements, d)
    return d - planar_offsets(scene, k, (point - tx.center) / d)


def plane_wave_steering(scene: Scene, k: int, u) -> np.ndarray:
    """Unit-magnitude planar steering vector from transmitter k toward u."""
    tx = scene.transmitter(k)
    point = _as_point(u)
    d = float(np.linalg.norm(point - tx.center))
    if d == 0.0:
        raise ValueError("Steering direction undefined at the array center")
    distances = d - planar_offsets(scene, k, (point - tx.center) / d)
    return np.exp(-2j * np.pi / scene.wavelength * distances)
