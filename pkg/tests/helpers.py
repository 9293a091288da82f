"""Independent reference implementations used as test oracles.

Nothing here may import the update kernels under test; rotations are built
from explicit matrices and sums are written as plain loops.
"""

import numpy as np


def axis_rotation_matrix(axis: str, angle: float) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    if axis == "x":
        return np.array([[1, 0, 0], [0, c, -s], [0, s, c]], dtype=float)
    if axis == "y":
        return np.array([[c, 0, s], [0, 1, 0], [-s, 0, c]], dtype=float)
    if axis == "z":
        return np.array([[c, -s, 0], [s, c, 0], [0, 0, 1]], dtype=float)
    raise ValueError(axis)


def rodrigues(v: np.ndarray, axis_unit: np.ndarray, angle: float) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    return (v * c + np.cross(axis_unit, v) * s
            + axis_unit * np.dot(axis_unit, v) * (1.0 - c))


def brute_force_energy_density(vectors: np.ndarray, j_z, j_x, b_z, b_x) -> float:
    n = len(vectors)
    total = 0.0
    for i in range(n):
        nxt = (i + 1) % n
        total += 2.0 * j_z * vectors[i][2] * vectors[nxt][2]
        total += 2.0 * j_x * vectors[i][0] * vectors[nxt][0]
        total += b_z * vectors[i][2]
        total += b_x * vectors[i][0]
    return total / n


def mann_kendall_z(series) -> float:
    """Mann-Kendall trend statistic, normal approximation (no tie correction)."""
    x = np.asarray(series, dtype=float)
    n = x.size
    s = 0
    for i in range(n - 1):
        s += np.sign(x[i + 1:] - x[i]).sum()
    var = n * (n - 1) * (2 * n + 5) / 18.0
    if s > 0:
        return float((s - 1) / np.sqrt(var))
    if s < 0:
        return float((s + 1) / np.sqrt(var))
    return 0.0


def ols_slope_t_statistic(x, y) -> float:
    """t statistic of the slope in a one-variable least-squares fit."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n = x.size
    xc = x - x.mean()
    slope = float((xc * (y - y.mean())).sum() / (xc ** 2).sum())
    resid = y - (y.mean() + slope * xc)
    dof = n - 2
    se = np.sqrt((resid ** 2).sum() / dof / (xc ** 2).sum())
    return slope / se if se > 0 else 0.0
