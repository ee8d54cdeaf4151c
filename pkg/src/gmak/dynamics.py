"""Species formation rate, its Jacobian, and an adaptive Dormand-Prince integrator."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .equilibria import resolve_rates
from .netmodel import GeneralizedNetwork, kinetic_matrix


class IntegrationError(RuntimeError):
    pass


@dataclass(frozen=True)
class _RateData:
    N: np.ndarray  # n x r reaction vectors y' - y
    E: np.ndarray  # r x n kinetic exponents of the source complexes
    k: np.ndarray  # r rate constants


def _rate_data(net: GeneralizedNetwork, rates) -> _RateData:
    ks = np.array([float(k) for k in resolve_rates(net, rates)])
    N = np.array([[float(x) for x in net.reaction_vector(j)] for j in range(net.r)]).T.reshape(net.n, net.r)
    Yt = kinetic_matrix(net).to_numpy()
    E = np.array([Yt[:, rx.source] for rx in net.reactions]).reshape(net.r, net.n)
    return _RateData(N, E, ks)


def _flux(data: _RateData, c: np.ndarray) -> np.ndarray:
    return data.k * np.prod(c[None, :] ** data.E, axis=1)


def formation_rate(net: GeneralizedNetwork, rates, c) -> np.ndarray:
    """sum over reactions of k c^{y~} (y' - y)."""
    c = np.asarray(c, dtype=float)
    if np.any(c < 0):
        raise ValueError("negative concentration")
    data = _rate_data(net, rates)
    return data.N @ _flux(data, c)


def rate_jacobian(net: GeneralizedNetwork, rates, c) -> np.ndarray:
    c = np.asarray(c, dtype=float)
    if np.any(c < 0):
        raise ValueError("negative concentration")
    data = _rate_data(net, rates)
    zero = c == 0
    if np.any(zero[None, :] & (data.E > 0)):
        raise ValueError("zero concentration with positive kinetic exponent: Jacobian undefined")
    flux = _flux(data, c)
    safe = np.where(zero, 1.0, c)
    dflux = flux[:, None] * data.E / safe[None, :]
    return data.N @ dflux


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    rejected_steps: int = 0

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]

    def to_csv(self, species: Sequence[str]) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", *species])
        for t, row in zip(self.times, self.states):
            w.writerow([format(t, ".17g"), *(format(x, ".17g") for x in row)])
        return buf.getvalue()


# Dormand-Prince 5(4) tableau
_C = np.array([0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1, 1])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B5 = np.array([35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0])
_B4 = np.array([5179 / 57600, 0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])
_E = _B5 - _B4


def dopri_step(f, t: float, y: np.ndarray, h: float, k1: np.ndarray):
    """One Dormand-Prince step. Returns (y5, error estimate, f(t+h, y5))."""
    ks = [k1]
    for i in range(1, 7):
        yi = y + h * sum(a * kj for a, kj in zip(_A[i], ks))
        ks.append(f(t + _C[i] * h, yi))
    K = np.array(ks)
    y5 = y + h * (_B5 @ K)
    err = h * (_E @ K)
    return y5, err, ks[6]


def integrate(
    net: GeneralizedNetwork,
    rates,
    c0,
    t_end: float,
    rtol: float = 1e-6,
    atol: float = 1e-9,
    max_steps: int = 1_000_000,
) -> Trajectory:
    """Solve dc/dt = r~(c) on [0, t_end] with PI step control.

    A step that would make any concentration negative is rejected and
    retried at half the size; below 1e-14 * t_end the run aborts.
    """
    c0 = np.asarray(c0, dtype=float)
    if c0.shape != (net.n,) or np.any(c0 <= 0):
        raise ValueError("initial concentrations must be positive")
    if not t_end > 0:
        raise ValueError("t_end must be positive")
    data = _rate_data(net, rates)

    def f(_t, c):
        return data.N @ _flux(data, np.maximum(c, 0.0))

    h_min = 1e-14 * t_end
    safety, beta = 0.9, 0.04
    alpha = 0.2 - 0.75 * beta
    t, y = 0.0, c0.copy()
    k1 = f(t, y)
    h = _initial_step(f, t, y, k1, rtol, atol, t_end)
    times, states = [t], [y.copy()]
    rejected = 0
    err_prev = 1e-4
    for _ in range(max_steps):
        if t >= t_end:
            break
        h = min(h, t_end - t)
        if h < h_min and t_end - t > h_min:
            raise IntegrationError(f"step size {h:.3g} fell below the minimum at t={t:.6g}")
        y_new, err, k_new = dopri_step(f, t, y, h, k1)
        if not np.all(np.isfinite(y_new)):
            raise IntegrationError(f"non-finite state at t={t:.6g}")
        if np.any(y_new < 0):
            rejected += 1
            h /= 2
            continue
        scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
        en = math.sqrt(float(np.mean((err / scale) ** 2))) if len(y) else 0.0
        if en <= 1.0:
            t = t_end if t_end - (t + h) <= h_min else t + h
            y, k1 = y_new, k_new
            times.append(t)
            states.append(y.copy())
            en = max(en, 1e-10)
            fac = safety * en ** (-alpha) * err_prev**beta
            h *= min(10.0, max(0.2, fac))
            err_prev = en
        else:
            rejected += 1
            h *= max(0.2, safety * en ** (-alpha))
    else:
        raise IntegrationError(f"exceeded {max_steps} steps")
    return Trajectory(np.array(times), np.array(states), rejected)


def _initial_step(f, t, y, f0, rtol, atol, t_end) -> float:
    scale = atol + rtol * np.abs(y)
    d0 = np.sqrt(np.mean((y / scale) ** 2))
    d1 = np.sqrt(np.mean((f0 / scale) ** 2))
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    h0 = min(h0, t_end)
    f1 = f(t + h0, y + h0 * f0)
    d2 = np.sqrt(np.mean(((f1 - f0) / scale) ** 2)) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** (1 / 5)
    return min(100 * h0, h1, t_end)


def conservation_residuals(traj: Trajectory, Sperp_basis) -> np.ndarray:
    """Per conservation vector v: max over time of |<c(t) - c(0), v>|."""
    V = Sperp_basis.to_numpy() if hasattr(Sperp_basis, "to_numpy") else np.asarray(Sperp_basis, dtype=float)
    if len(traj.states) == 0:
        raise ValueError("empty trajectory")
    drift = (traj.states - traj.states[0]) @ V
    return np.max(np.abs(drift), axis=0) if V.shape[1] else np.zeros(0)
