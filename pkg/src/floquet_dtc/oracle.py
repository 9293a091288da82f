"""Brute-force validation path: adaptive ODE integration of the spin bracket.

The bracket {S_i^a, S_j^b} = delta_ij eps_abc S_i^c turns any of the model
generators into site-local precession,

    dS_i/dt = (a_z * (Sz_{i-1} + Sz_{i+1}) + c_z) (z x S_i)
            + (a_x * (Sx_{i-1} + Sx_{i+1}) + c_x) (x x S_i),

which this module integrates with a generic high-order adaptive method.
It deliberately shares no update code with the exact rotation maps so the
two routes stay independent checks of each other.  Spin norms are never
re-normalized; the drift is reported.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .chain import SpinChain
from .drive import DriveParams

GENERATORS = ("Hz", "Hx", "D0", "Dx")

DEFAULT_MAX_SITES = 8


class OracleError(RuntimeError):
    """Adaptive integration failed (for example step-size underflow)."""


@dataclass(frozen=True)
class OracleResult:
    chain: SpinChain
    norm_drift: float


def generator_coefficients(generator: str, params: DriveParams,
                           rescale_ratio: float = 1.0) -> tuple[float, float, float, float]:
    """(a_z, c_z, a_x, c_x) for G = sum_i a_z Sz_i Sz_{i+1} + c_z Sz_i + a_x Sx_i Sx_{i+1} + c_x Sx_i."""
    r = rescale_ratio
    if generator == "Hz":
        return 4.0 * params.j_z, 2.0 * params.b_z, 0.0, 0.0
    if generator == "Hx":
        return 0.0, 0.0, 4.0 * params.j_x, 2.0 * params.b_x
    if generator == "D0":
        return 2.0 * params.j_z, params.b_z * r, 2.0 * params.j_x * r, params.b_x
    if generator == "Dx":
        return 2.0 * params.j_z, 0.0, 2.0 * params.j_x * r, params.b_x
    raise ValueError(f"generator must be one of {GENERATORS}, got {generator!r}")


def generator_energy(chain: SpinChain, generator: str, params: DriveParams,
                     rescale_ratio: float = 1.0) -> float:
    """Value of the generating Hamiltonian on a chain (total, not per site)."""
    az, cz, ax, cx = generator_coefficients(generator, params, rescale_ratio)
    v = chain.vectors
    sz, sx = v[:, 2], v[:, 0]
    return float(np.sum(az * sz * np.roll(sz, -1) + cz * sz
                        + ax * sx * np.roll(sx, -1) + cx * sx))


def _rhs(coeffs):
    az, cz, ax, cx = coeffs

    def rhs(t, y):
        s = y.reshape(-1, 3)
        rate_z = az * (np.roll(s[:, 2], 1) + np.roll(s[:, 2], -1)) + cz
        rate_x = ax * (np.roll(s[:, 0], 1) + np.roll(s[:, 0], -1)) + cx
        out = np.empty_like(s)
        # z x S = (-Sy, Sx, 0); x x S = (0, -Sz, Sy)
        out[:, 0] = -rate_z * s[:, 1]
        out[:, 1] = rate_z * s[:, 0] - rate_x * s[:, 2]
        out[:, 2] = rate_x * s[:, 1]
        return out.ravel()

    return rhs


def ode_oracle(chain: SpinChain, generator: str, total_time: float, tol: float = 1e-11,
               *, params: DriveParams, rescale_ratio: float = 1.0,
               max_sites: int = DEFAULT_MAX_SITES) -> OracleResult:
    """Integrate the bracket equations of motion with DOP853.

    Restricted to small chains: this is a reference implementation, not a
    production propagator.
    """
    if chain.n_sites > max_sites:
        raise ValueError(
            f"oracle limited to {max_sites} sites, got {chain.n_sites}")
    if tol <= 0.0:
        raise ValueError(f"tol must be > 0, got {tol}")
    if total_time < 0.0:
        raise ValueError(f"total_time must be >= 0, got {total_time}")
    coeffs = generator_coefficients(generator, params, rescale_ratio)
    if total_time == 0.0:
        return OracleResult(chain, 0.0)
    sol = solve_ivp(_rhs(coeffs), (0.0, total_time), chain.vectors.ravel(),
                    method="DOP853", rtol=tol, atol=tol * 1e-2)
    if not sol.success:
        raise OracleError(f"adaptive integration failed: {sol.message}")
    v = sol.y[:, -1].reshape(-1, 3)
    drift = float(np.abs(np.einsum("ij,ij->i", v, v) - 1.0).max())
    return OracleResult(SpinChain(v, copy=False, validate=False), drift)


def flip_matrix(flip_error: float = 0.0) -> np.ndarray:
    """Rotation matrix about x by pi + flip_error (independent construction)."""
    a = np.pi + flip_error
    c, s = np.cos(a), np.sin(a)
    return np.array([[1.0, 0.0, 0.0],
                     [0.0, c, -s],
                     [0.0, s, c]])


def oracle_one_period(chain: SpinChain, params: DriveParams, tol: float = 1e-11,
                      max_sites: int = DEFAULT_MAX_SITES) -> OracleResult:
    """One full drive period via the oracle: exact matrix flip, then Hz and Hx halves."""
    flipped = SpinChain(chain.vectors @ flip_matrix(params.flip_error).T,
                        copy=False, validate=False)
    mid = ode_oracle(flipped, "Hz", params.half_period, tol,
                     params=params, max_sites=max_sites)
    end = ode_oracle(mid.chain, "Hx", params.half_period, tol,
                     params=params, max_sites=max_sites)
    return OracleResult(end.chain, max(mid.norm_drift, end.norm_drift))
