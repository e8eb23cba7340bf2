"""Discretized reference solver for the tendon-finger moment law.

Works on uniform stations with composite-trapezoid quadrature and closes the
tendon loop ``tau = k_t * stretch`` numerically.  The solve shares no formulas
with :mod:`softgrip.mechanics.core` and is used to cross-check it; only the
convergence study borrows the closed form as its reference value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    BeamSpec,
    LoadCase,
    TendonRouting,
    TendonSolution,
    convergent_solve,
    is_rigid,
)


class ConvergenceError(RuntimeError):
    def __init__(self, message: str, residual: float, iterations: int):
        super().__init__(f"{message} (residual={residual:.3e}, iterations={iterations})")
        self.residual = residual
        self.iterations = iterations


@dataclass(frozen=True)
class DiscretizedBeam:
    beam: BeamSpec
    routing: TendonRouting
    load: LoadCase
    station_count: int = 4097
    tolerance: float = 1e-12
    max_iterations: int = 10_000

    def __post_init__(self):
        if self.station_count < 8:
            raise ValueError("station_count must be >= 8")
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")
        self.routing.validate_for(self.beam)


def _cumtrapz(y: np.ndarray, h: float) -> np.ndarray:
    out = np.empty_like(y)
    out[0] = 0.0
    np.cumsum(0.5 * h * (y[1:] + y[:-1]), out=out[1:])
    return out


def _trapz(y: np.ndarray, h: float) -> float:
    return float(h * (y.sum() - 0.5 * (y[0] + y[-1])))


class _Discretization:
    def __init__(self, d: DiscretizedBeam):
        L = d.beam.length
        self.s = np.linspace(0.0, L, d.station_count)
        self.h = L / (d.station_count - 1)
        self.r = d.routing.offset(self.s)
        self.EI = d.beam.EI
        self.p = d.routing.termination
        self.load_moment = d.load.tip_force * np.minimum(self.s - self.p, 0.0)

    def curvature(self, tau: float) -> np.ndarray:
        return -(self.load_moment + self.r * tau) / self.EI

    def stretch(self, tau: float) -> float:
        return _trapz(self.r * self.curvature(tau), self.h)


def discretized_solve(d: DiscretizedBeam) -> TendonSolution:
    """Integrate the moment law numerically and solve for the tendon tension.

    The residual ``tau - k_t * stretch(tau)`` (or ``stretch(tau)`` for a
    RIGID tendon) is driven to zero with secant updates; plain substitution
    diverges once ``k_t * int r^2 / EI >= 1``.
    """
    disc = _Discretization(d)
    k_t = d.routing.tendon_stiffness
    rigid = is_rigid(k_t)

    if rigid:
        def residual(tau):
            return disc.stretch(tau)
    else:
        def residual(tau):
            return tau - k_t * disc.stretch(tau)

    F, L, b = d.load.tip_force, d.beam.length, d.routing.root_offset
    scale = abs(F) * L / b or 1.0
    tau_prev, res_prev = 0.0, residual(0.0)
    tau, res = scale, None
    converged = False
    iterations = 0
    # zero residual at tau = 0 covers k_t = 0 and F = 0
    if res_prev == 0.0:
        tau, res, converged = 0.0, 0.0, True
    else:
        res = residual(tau)
        res_scale = abs(res_prev) + abs(res - res_prev)
        for iterations in range(1, d.max_iterations + 1):
            if abs(res) <= d.tolerance * res_scale:
                converged = True
                break
            denom = res - res_prev
            if denom == 0.0:
                break
            tau_next = tau - res * (tau - tau_prev) / denom
            tau_prev, res_prev = tau, res
            tau, res = tau_next, residual(tau_next)
        else:
            converged = abs(res) <= d.tolerance * res_scale
        if not converged:
            raise ConvergenceError("tendon tension did not converge", abs(res) / res_scale, iterations)

    kappa = disc.curvature(tau)
    theta = _cumtrapz(kappa, disc.h)
    delta = _cumtrapz(theta, disc.h)
    stretch = 0.0 if rigid else _trapz(disc.r * kappa, disc.h)
    tension = tau if rigid else float(k_t * stretch)
    return TendonSolution(
        stations=disc.s,
        slope_profile=theta,
        deflection_profile=delta,
        tip_angle=float(theta[-1]),
        tip_deflection=float(np.interp(disc.p, disc.s, delta)),
        free_end_deflection=float(delta[-1]),
        tendon_stretch=float(stretch),
        tendon_tension=float(tension),
        tendon_stiffness=k_t,
    )


@dataclass(frozen=True)
class ConvergenceRow:
    station_count: int
    spacing: float
    tip_deflection: float
    error: float
    ratio: float | None
    order: float | None


def convergence_study(d: DiscretizedBeam, levels: int = 3) -> list[ConvergenceRow]:
    """Tip-deflection error against the closed form while halving the spacing.

    ``d.station_count`` is the coarsest grid; each level doubles the number
    of intervals.
    """
    if levels < 3:
        raise ValueError("levels must be >= 3")
    exact = convergent_solve(d.beam, d.routing, d.load, n=2).tip_deflection
    rows: list[ConvergenceRow] = []
    intervals = d.station_count - 1
    prev_err = None
    for _ in range(levels):
        n = intervals + 1
        level = DiscretizedBeam(d.beam, d.routing, d.load, n, d.tolerance, d.max_iterations)
        sol = discretized_solve(level)
        err = abs(sol.tip_deflection - exact)
        ratio = order = None
        if prev_err is not None and err > 0:
            ratio = prev_err / err
            order = math.log2(ratio)
        rows.append(ConvergenceRow(n, d.beam.length / intervals, sol.tip_deflection, err, ratio, order))
        prev_err = err
        intervals *= 2
    return rows
