import numpy as np
import pytest

from floquet_dtc import DriveParams, InitialStateSpec, SpinChain


@pytest.fixture
def baseline_params() -> DriveParams:
    """The reference coupling set at half period T = 1."""
    return DriveParams(j_z=0.399, j_x=0.011, b_z=-0.016, b_x=-0.3, half_period=1.0)


@pytest.fixture
def hot_state_spec() -> InitialStateSpec:
    return InitialStateSpec(mean_polar_angle=np.pi, width=0.1)


def random_unit_vectors(n: int, seed: int) -> np.ndarray:
    """Uniform points on the sphere, independent of the library's samplers."""
    rng = np.random.default_rng(seed)
    v = rng.normal(size=(n, 3))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def random_chain(n: int, seed: int) -> SpinChain:
    return SpinChain(random_unit_vectors(n, seed))
