"""Small-deflection closed forms for a tendon-routed cantilever finger.

The finger backbone is a clamped Euler-Bernoulli beam of length ``L``.  A
point force ``F`` acts at arc position ``p``; a tendon running along the whole
backbone at offset ``r(s) = a*s + b`` from the neutral axis carries the
reaction tension ``tau = k_t * stretch`` and adds the moment ``r(s)*tau`` to
every section.  The internal moment is therefore

    m(s) = F*(s - p)*[s < p] + r(s)*tau,       m(s) = -EI * dtheta/ds

and the tendon stretch is ``stretch = integral_0^L r(s) * dtheta/ds ds``.

Deflections are positive toward the load.  ``tip_deflection`` in a
:class:`TendonSolution` is the deflection under the load point ``s = p``; for
the tip-anchored tendon (``p = L``) it is the fingertip deflection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "RIGID",
    "BeamSpec",
    "TendonRouting",
    "LoadCase",
    "TendonSolution",
    "StiffnessChain",
    "pure_tip_deflection",
    "parallel_solve",
    "rigid_parallel_tip_deflection",
    "convergent_solve",
    "rigid_convergent_tip_deflection",
    "end_angle",
    "total_stiffness",
    "is_rigid",
]

DEFAULT_STATIONS = 201


class _Rigid:
    """Sentinel for an infinitely stiff (inextensible) element."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "RIGID"

    def __reduce__(self):
        return (_Rigid, ())


RIGID = _Rigid()


def is_rigid(k) -> bool:
    return k is RIGID


def _check_stiffness(name: str, k, allow_zero: bool) -> None:
    if is_rigid(k):
        return
    if not isinstance(k, (int, float, np.floating, np.integer)) or not math.isfinite(k):
        raise ValueError(f"{name} must be a finite number or RIGID, got {k!r}")
    if k < 0 or (k == 0 and not allow_zero):
        raise ValueError(f"{name} must be {'>= 0' if allow_zero else '> 0'}, got {k}")


@dataclass(frozen=True)
class BeamSpec:
    elastic_modulus: float
    second_moment: float
    length: float

    def __post_init__(self):
        for name in ("elastic_modulus", "second_moment", "length"):
            v = getattr(self, name)
            if not math.isfinite(v) or v <= 0:
                raise ValueError(f"{name} must be positive and finite, got {v}")

    @property
    def EI(self) -> float:
        return self.elastic_modulus * self.second_moment

    @classmethod
    def unit(cls) -> "BeamSpec":
        return cls(1.0, 1.0, 1.0)


@dataclass(frozen=True)
class TendonRouting:
    """Tendon offset law ``r(s) = slope*s + root_offset``.

    ``termination`` is the arc position ``p`` at which the tip force acts.
    ``tendon_stiffness`` may be :data:`RIGID`.
    """

    slope: float
    root_offset: float
    termination: float
    tendon_stiffness: object = 0.0

    def __post_init__(self):
        if not math.isfinite(self.slope):
            raise ValueError("slope must be finite")
        if not math.isfinite(self.root_offset) or self.root_offset <= 0:
            raise ValueError(f"root offset r(0) must be > 0, got {self.root_offset}")
        if not math.isfinite(self.termination) or self.termination <= 0:
            raise ValueError(f"termination p must be > 0, got {self.termination}")
        _check_stiffness("tendon_stiffness", self.tendon_stiffness, allow_zero=True)

    @classmethod
    def parallel(cls, r: float, p: float, k_t=0.0) -> "TendonRouting":
        return cls(0.0, r, p, k_t)

    @property
    def is_parallel(self) -> bool:
        return self.slope == 0.0

    def offset(self, s):
        return self.slope * np.asarray(s, dtype=float) + self.root_offset

    def validate_for(self, beam: BeamSpec) -> None:
        L = beam.length
        if self.termination > L * (1 + 1e-12):
            raise ValueError(f"termination p={self.termination} exceeds beam length {L}")
        if self.slope * L + self.root_offset < -1e-12 * self.root_offset:
            raise ValueError(
                f"offset r(s) = {self.slope}*s + {self.root_offset} goes negative on [0, {L}]"
            )


@dataclass(frozen=True)
class LoadCase:
    tip_force: float

    def __post_init__(self):
        if not math.isfinite(self.tip_force):
            raise ValueError("tip force must be finite")


@dataclass(frozen=True)
class TendonSolution:
    stations: np.ndarray = field(repr=False)
    slope_profile: np.ndarray = field(repr=False)
    deflection_profile: np.ndarray = field(repr=False)
    tip_angle: float
    tip_deflection: float
    free_end_deflection: float
    tendon_stretch: float
    tendon_tension: float
    tendon_stiffness: object = 0.0

    def summary(self) -> dict:
        return {
            "tip_deflection": self.tip_deflection,
            "free_end_deflection": self.free_end_deflection,
            "tip_angle": self.tip_angle,
            "tendon_tension": self.tendon_tension,
            "tendon_stretch": self.tendon_stretch,
        }


@dataclass(frozen=True)
class StiffnessChain:
    """Spring, tendon and soft-material stiffnesses acting in series."""

    spring: object
    tendon: object
    material: object

    def __post_init__(self):
        for name in ("spring", "tendon", "material"):
            _check_stiffness(name, getattr(self, name), allow_zero=False)


def pure_tip_deflection(beam: BeamSpec, F: float) -> float:
    return F * beam.length ** 3 / (3.0 * beam.EI)


def rigid_parallel_tip_deflection(beam: BeamSpec, p: float, F: float) -> float:
    L = beam.length
    if not 0 < p <= L:
        raise ValueError(f"p must lie in (0, L], got {p}")
    EI = beam.EI
    return F * p ** 3 / (3 * EI) - (p / L) * F * p ** 3 / (4 * EI)


def rigid_convergent_tip_deflection(beam: BeamSpec, a: float, b: float, F: float) -> float:
    L = beam.length
    if a == 0 and b == 0:
        raise ValueError("degenerate routing a = b = 0")
    if b < 0 or a * L + b < 0:
        raise ValueError("offset r(s) must be non-negative on [0, L]")
    EI = beam.EI
    f = (a * L + 3 * b) ** 2 / (3 * (a * a * L * L + 3 * a * b * L + 3 * b * b))
    return F * L ** 3 / (3 * EI) - f * F * L ** 3 / (4 * EI)


def end_angle(beam: BeamSpec, r: float, k_eff, F: float) -> float:
    """Tip rotation of a tip-loaded finger with a tendon of effective stiffness ``k_eff``."""
    if r < 0:
        raise ValueError("offset r must be >= 0")
    _check_stiffness("k_eff", k_eff, allow_zero=True)
    L = beam.length
    if is_rigid(k_eff):
        return F * L ** 2 / (2 * beam.EI) if r == 0 else 0.0
    return F * L ** 2 / (2 * (beam.EI + r * r * L * k_eff))


def total_stiffness(chain: StiffnessChain):
    """Series combination ``k_s k_t k_m / (k_t k_m + k_s k_m + k_s k_t)``.

    RIGID members drop out; if all three are RIGID the result is RIGID.
    """
    finite = [k for k in (chain.spring, chain.tendon, chain.material) if not is_rigid(k)]
    if not finite:
        return RIGID
    if len(finite) == 1:
        return float(finite[0])
    if len(finite) == 2:
        k1, k2 = finite
        return k1 * k2 / (k1 + k2)
    ks, kt, km = finite
    return ks * kt * km / (kt * km + ks * km + ks * kt)


def _stations(L: float, n: int) -> np.ndarray:
    if n < 2:
        raise ValueError("need at least 2 profile stations")
    return np.linspace(0.0, L, n)


def _load_terms(s: np.ndarray, p: float):
    """Integrated load part of EI*theta and EI*delta for unit force at p."""
    before = s < p
    g = np.where(before, p * s - 0.5 * s * s, 0.5 * p * p)
    h = np.where(before, 0.5 * p * s * s - s ** 3 / 6.0, p ** 3 / 3.0 + 0.5 * p * p * (s - p))
    return g, h


def _solution(beam, routing, F, tau, stretch, n, delta_p=None):
    L, EI, p = beam.length, beam.EI, routing.termination
    a, b = routing.slope, routing.root_offset
    s = _stations(L, n)
    g, h = _load_terms(s, p)
    theta = (F * g - tau * (0.5 * a * s * s + b * s)) / EI
    delta = (F * h - tau * (a * s ** 3 / 6.0 + 0.5 * b * s * s)) / EI
    theta_L = (F * 0.5 * p * p - tau * (0.5 * a * L * L + b * L)) / EI
    if delta_p is None:
        delta_p = (F * p ** 3 / 3.0 - tau * (a * p ** 3 / 6.0 + 0.5 * b * p * p)) / EI
    delta_L = (F * (0.5 * p * p * L - p ** 3 / 6.0) - tau * (a * L ** 3 / 6.0 + 0.5 * b * L * L)) / EI
    return TendonSolution(
        stations=s,
        slope_profile=theta,
        deflection_profile=delta,
        tip_angle=float(theta_L),
        tip_deflection=float(delta_p),
        free_end_deflection=float(delta_L),
        tendon_stretch=float(stretch),
        tendon_tension=float(tau),
        tendon_stiffness=routing.tendon_stiffness,
    )


def parallel_solve(beam: BeamSpec, routing: TendonRouting, load: LoadCase,
                   n: int = DEFAULT_STATIONS) -> TendonSolution:
    if not routing.is_parallel:
        raise ValueError("parallel_solve requires slope a = 0")
    routing.validate_for(beam)
    L, EI, p, r = beam.length, beam.EI, routing.termination, routing.root_offset
    F, k_t = load.tip_force, routing.tendon_stiffness
    if is_rigid(k_t):
        tau = F * p * p / (2 * r * L)
        return _solution(beam, routing, F, tau, 0.0, n, rigid_parallel_tip_deflection(beam, p, F))
    theta_L = F * p * p / (2 * (EI + r * r * k_t * L))
    stretch = r * theta_L
    return _solution(beam, routing, F, k_t * stretch, stretch, n)


def convergent_solve(beam: BeamSpec, routing: TendonRouting, load: LoadCase,
                     n: int = DEFAULT_STATIONS) -> TendonSolution:
    """Closed form for the linearly converging tendon.

    At ``p = L`` the tension is
    ``k_t F (aL^3 + 3bL^2) / (6EI + k_t L (2a^2L^2 + 6abL + 6b^2))``; other
    termination points use the same balance with the load integral taken
    over ``[0, p]``.
    """
    if routing.is_parallel:
        return parallel_solve(beam, routing, load, n)
    routing.validate_for(beam)
    L, EI, p = beam.length, beam.EI, routing.termination
    a, b = routing.slope, routing.root_offset
    F, k_t = load.tip_force, routing.tendon_stiffness
    # stretch = (F*coupling - tau*self_term) / EI
    coupling = a * p ** 3 / 6.0 + 0.5 * b * p * p
    self_term = a * a * L ** 3 / 3.0 + a * b * L * L + b * b * L
    if is_rigid(k_t):
        tau = F * coupling / self_term
        # same value, but the factored form is exact at the zero-deflection optimum
        exact = rigid_convergent_tip_deflection(beam, a, b, F) if p == L else None
        return _solution(beam, routing, F, tau, 0.0, n, exact)
    stretch = F * coupling / (EI + k_t * self_term)
    return _solution(beam, routing, F, k_t * stretch, stretch, n)
