"""Spin-chain state: classical unit vectors on a ring of sites.

A chain is an immutable array of N three-component unit vectors with
periodic neighbor indexing.  Random initial states draw the polar angle
from a Gaussian folded into [0, pi] and the azimuth uniformly; shadow
copies for decorrelator runs shift both angles by small Gaussian amounts.

All randomness goes through the counter-based Philox generator so that a
given seed produces the same chain on every platform.  Sampling draw
order is part of the contract: polar angles first, then azimuths.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# |x^2 + y^2 + z^2 - 1| allowed at construction and after rotations
UNIT_NORM_TOL = 1e-12

TWO_PI = 2.0 * np.pi

# rotation about axis a maps plane (j, k): j' = c*j - s*k, k' = s*j + c*k
AXIS_PLANES = {"x": (0, 1, 2), "y": (1, 2, 0), "z": (2, 0, 1)}


class ChainError(ValueError):
    """Invalid spin-chain construction or operation."""


def philox_rng(seed) -> np.random.Generator:
    """Generator from an int seed, a SeedSequence, or an existing Generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, np.random.SeedSequence):
        return np.random.Generator(np.random.Philox(seed))
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed))))


def _norm_sq_error(vectors: np.ndarray) -> float:
    n2 = np.einsum("...i,...i->...", vectors, vectors)
    return float(np.abs(n2 - 1.0).max()) if n2.size else 0.0


def spin_vector(x: float, y: float, z: float) -> np.ndarray:
    """A single validated unit spin vector."""
    v = np.array([x, y, z], dtype=float)
    err = _norm_sq_error(v[None, :])
    if not np.isfinite(v).all() or err > UNIT_NORM_TOL:
        raise ChainError(f"spin vector is not unit length: |S|^2 - 1 = {err:.3e}")
    return v


def rotate_about_axis(s: np.ndarray, axis: str, angle: float) -> np.ndarray:
    """Rotate vector(s) about a coordinate axis; norm-preserving by construction.

    Accepts a single (3,) vector or any (..., 3) stack and broadcasts.
    """
    if axis not in AXIS_PLANES:
        raise ChainError(f"axis must be one of x, y, z, got {axis!r}")
    a, j, k = AXIS_PLANES[axis]
    v = np.asarray(s, dtype=float)
    out = v.copy()
    c, sn = np.cos(angle), np.sin(angle)
    out[..., j] = c * v[..., j] - sn * v[..., k]
    out[..., k] = sn * v[..., j] + c * v[..., k]
    return out


class SpinChain:
    """N >= 2 unit spins with periodic boundaries, immutable after construction."""

    __slots__ = ("_vectors",)

    def __init__(self, vectors, *, copy: bool = True, validate: bool = True):
        v = np.array(vectors, dtype=float, copy=copy)
        if v.ndim != 2 or v.shape[1] != 3:
            raise ChainError(f"expected shape (n_sites, 3), got {v.shape}")
        if v.shape[0] < 2:
            raise ChainError(f"need at least 2 sites, got {v.shape[0]}")
        if validate:
            if not np.isfinite(v).all():
                raise ChainError("non-finite spin components")
            err = _norm_sq_error(v)
            if err > UNIT_NORM_TOL:
                raise ChainError(f"non-unit spin in chain: max |S|^2 - 1 = {err:.3e}")
        v.setflags(write=False)
        self._vectors = v

    @property
    def n_sites(self) -> int:
        return self._vectors.shape[0]

    def __len__(self) -> int:
        return self.n_sites

    def __getitem__(self, i: int) -> np.ndarray:
        """Spin vector at site i (read-only view); index wraps modulo N."""
        return self._vectors[i % self.n_sites]

    @property
    def vectors(self) -> np.ndarray:
        """Read-only (N, 3) array of all spins."""
        return self._vectors

    def components(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Contiguous copies of the x, y, z component arrays."""
        v = self._vectors
        return (np.ascontiguousarray(v[:, 0]),
                np.ascontiguousarray(v[:, 1]),
                np.ascontiguousarray(v[:, 2]))

    def max_norm_error(self) -> float:
        """max over sites of | |S_i|^2 - 1 |, the drift diagnostic."""
        return _norm_sq_error(self._vectors)

    def __repr__(self) -> str:
        return f"SpinChain(n_sites={self.n_sites})"


@dataclass(frozen=True)
class InitialStateSpec:
    """Random initial state: polar angle ~ Gaussian(mean, 2*pi*width), azimuth uniform."""

    mean_polar_angle: float
    width: float

    def __post_init__(self):
        if not np.isfinite(self.mean_polar_angle):
            raise ChainError("mean_polar_angle must be finite")
        if not (np.isfinite(self.width) and self.width >= 0.0):
            raise ChainError(f"width must be >= 0, got {self.width}")

    @property
    def polar_sd(self) -> float:
        return TWO_PI * self.width


@dataclass(frozen=True)
class PerturbationSpec:
    """Per-site shift of 2*pi*scale*delta_i in polar and azimuth angles.

    The deviates delta_i are standard normal, drawn independently per site
    and per angle (polar first, then azimuth).
    """

    scale: float

    def __post_init__(self):
        if not (np.isfinite(self.scale) and self.scale >= 0.0):
            raise ChainError(f"perturbation scale must be >= 0, got {self.scale}")


def fold_polar(theta: np.ndarray) -> np.ndarray:
    """Reflect angles at 0 and pi until they land in [0, pi].

    Triangle-wave folding keeps cos(theta) unchanged, so the distribution
    on the sphere matches plugging raw draws into the trig construction
    with a uniform azimuth.
    """
    t = np.mod(np.asarray(theta, dtype=float), TWO_PI)
    return np.where(t > np.pi, TWO_PI - t, t)


def _vectors_from_angles(polar: np.ndarray, azimuth: np.ndarray) -> np.ndarray:
    st = np.sin(polar)
    return np.stack([st * np.cos(azimuth), st * np.sin(azimuth), np.cos(polar)], axis=-1)


def sample_initial_chain(spec: InitialStateSpec, n_sites: int, seed) -> SpinChain:
    """Draw a random chain; deterministic for a fixed (spec, n_sites, seed)."""
    if n_sites < 2:
        raise ChainError(f"need at least 2 sites, got {n_sites}")
    rng = philox_rng(seed)
    polar = fold_polar(rng.normal(spec.mean_polar_angle, spec.polar_sd, size=n_sites))
    azimuth = rng.uniform(0.0, TWO_PI, size=n_sites)
    return SpinChain(_vectors_from_angles(polar, azimuth), copy=False, validate=False)


def perturbation_angle_shifts(spec: PerturbationSpec, n_sites: int, seed):
    """The (polar, azimuth) shift arrays a given seed produces."""
    rng = philox_rng(seed)
    dpolar = TWO_PI * spec.scale * rng.normal(size=n_sites)
    dazimuth = TWO_PI * spec.scale * rng.normal(size=n_sites)
    return dpolar, dazimuth


def apply_angle_shifts(chain: SpinChain, dpolar: np.ndarray, dazimuth: np.ndarray) -> SpinChain:
    v = chain.vectors
    polar = np.arccos(np.clip(v[:, 2], -1.0, 1.0))
    azimuth = np.arctan2(v[:, 1], v[:, 0])
    polar = fold_polar(polar + dpolar)
    return SpinChain(_vectors_from_angles(polar, azimuth + dazimuth), copy=False, validate=False)


def perturb_chain(chain: SpinChain, spec: PerturbationSpec, seed) -> SpinChain:
    """Shadow copy of a chain with small Gaussian angle shifts; unit norms preserved."""
    dpolar, dazimuth = perturbation_angle_shifts(spec, chain.n_sites, seed)
    return apply_angle_shifts(chain, dpolar, dazimuth)
