"""Low-level update kernels shared by the stroboscopic and effective propagators.

Everything here operates on component arrays of shape (..., n_sites) and
broadcasts over leading batch dimensions, so a single realization and a
batched ensemble run through the identical arithmetic.

The workhorse is the exact flow of a one-axis generator

    G = sum_i ( pair * S_i^a S_{i+1}^a + field * S_i^a )

under which every spin precesses about axis a by an angle
(pair * (S_{i-1}^a + S_{i+1}^a) + field) * duration while all a-components
stay constant.  Because the angles depend only on those conserved
components, site updates are order-independent and the map is exact.
"""

from __future__ import annotations

import numpy as np

# rotation about axis index a maps plane (j, k): j' = c*j - s*k, k' = s*j + c*k
PLANES = {"x": (0, 1, 2), "y": (1, 2, 0), "z": (2, 0, 1)}

Components = tuple[np.ndarray, np.ndarray, np.ndarray]


def neighbor_sum(comp: np.ndarray) -> np.ndarray:
    """comp[i-1] + comp[i+1] along the last axis with periodic wrapping."""
    out = np.empty_like(comp)
    out[..., 0] = comp[..., -1]
    out[..., 1:] = comp[..., :-1]
    out[..., :-1] += comp[..., 1:]
    out[..., -1] += comp[..., 0]
    return out


def next_site(comp: np.ndarray) -> np.ndarray:
    """comp[i+1] along the last axis with periodic wrapping."""
    out = np.empty_like(comp)
    out[..., :-1] = comp[..., 1:]
    out[..., -1] = comp[..., 0]
    return out


def rotate_plane(sj: np.ndarray, sk: np.ndarray, cos_t, sin_t):
    return cos_t * sj - sin_t * sk, sin_t * sj + cos_t * sk


def coupled_axis_step(comps: Components, axis: str, pair: float, field: float,
                      duration: float) -> Components:
    """Exact one-axis flow; neighbor a-components are read before any write."""
    a, j, k = PLANES[axis]
    comps = list(comps)
    theta = neighbor_sum(comps[a])
    theta *= pair * duration
    theta += field * duration
    c = np.cos(theta)
    s = np.sin(theta)
    comps[j], comps[k] = rotate_plane(comps[j], comps[k], c, s)
    return tuple(comps)


def uniform_axis_step(comps: Components, axis: str, angle: float) -> Components:
    """Rotate every spin about a coordinate axis by the same angle."""
    a, j, k = PLANES[axis]
    comps = list(comps)
    c, s = np.cos(angle), np.sin(angle)
    comps[j], comps[k] = rotate_plane(comps[j], comps[k], c, s)
    return tuple(comps)


def components_from_vectors(vectors: np.ndarray) -> Components:
    """(..., n, 3) vector stack to three contiguous (..., n) component arrays."""
    v = np.asarray(vectors, dtype=float)
    return (np.ascontiguousarray(v[..., 0]),
            np.ascontiguousarray(v[..., 1]),
            np.ascontiguousarray(v[..., 2]))


def vectors_from_components(comps: Components) -> np.ndarray:
    return np.stack(comps, axis=-1)


def max_norm_sq_error(comps: Components) -> float:
    sx, sy, sz = comps
    n2 = sx * sx + sy * sy + sz * sz
    return float(np.abs(n2 - 1.0).max())
