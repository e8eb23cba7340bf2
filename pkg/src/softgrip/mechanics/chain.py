"""Quasi-static segment-chain model of a tendon-curled finger.

The finger is split into ``n_seg`` rigid links joined by torsional springs of
stiffness ``EI / ds``.  The tendon, held at offset ``r(s_i)`` at each joint,
applies ``(tension + preload) * r(s_i)`` to joint ``i``.  The base sits at the
origin with the unbent finger along ``+y``; positive joint angles curl the
finger toward ``+x`` (the tendon side).  Lengths are in mm, forces in N.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import optimize


class EquilibriumError(RuntimeError):
    def __init__(self, step: int, message: str):
        super().__init__(f"equilibrium failed at tension step {step}: {message}")
        self.step = step


@dataclass(frozen=True)
class SegmentChain:
    length: float = 110.0
    n_seg: int = 100
    # N*mm^2; puts the largest tip drop over the default ramp at about 62 mm
    flexural_rigidity: float = 3260.0
    root_offset: float = 6.0
    offset_slope: float = 0.0
    tensions: tuple[float, ...] = tuple(np.linspace(0.0, 10.0, 21))
    preload: float = 0.0
    gravity: bool = False
    segment_mass: float = 0.0  # kg per link
    g: float = 9.81  # N per kg; with mm lever arms torques come out in N*mm
    base_angle: float = 0.0  # rad, rotation of the base frame from +y toward +x

    def __post_init__(self):
        if self.n_seg < 10:
            raise ValueError("n_seg must be >= 10")
        if self.length <= 0 or self.flexural_rigidity <= 0:
            raise ValueError("length and flexural rigidity must be positive")
        if self.preload < 0:
            raise ValueError("preload must be >= 0")
        if len(self.tensions) == 0:
            raise ValueError("tension schedule is empty")
        object.__setattr__(self, "tensions", tuple(float(t) for t in self.tensions))

    @property
    def segment_length(self) -> float:
        return self.length / self.n_seg

    @property
    def joint_stiffness(self) -> float:
        return self.flexural_rigidity / self.segment_length

    @property
    def joint_positions(self) -> np.ndarray:
        return np.arange(self.n_seg) * self.segment_length

    @property
    def joint_offsets(self) -> np.ndarray:
        return self.offset_slope * self.joint_positions + self.root_offset

    def with_(self, **changes) -> "SegmentChain":
        return replace(self, **changes)


@dataclass(frozen=True)
class BendTrajectory:
    tensions: np.ndarray
    tip_x: np.ndarray
    tip_y: np.ndarray
    bend_angle: np.ndarray  # rad, tip tangent relative to the base
    joint_angles: np.ndarray = field(repr=False)

    def max_vertical_drop(self, length: float) -> float:
        return float(np.max(length - self.tip_y))

    def rows(self):
        for t, x, y, a in zip(self.tensions, self.tip_x, self.tip_y, self.bend_angle):
            yield float(t), float(x), float(y), float(math.degrees(a))


def _link_points(chain: SegmentChain, phi: np.ndarray):
    psi = chain.base_angle + np.cumsum(phi)
    ds = chain.segment_length
    steps = np.stack([np.sin(psi), np.cos(psi)], axis=1) * ds
    nodes = np.vstack([np.zeros((1, 2)), np.cumsum(steps, axis=0)])
    return nodes, psi


def _gravity_torque(chain: SegmentChain, phi: np.ndarray) -> np.ndarray:
    nodes, _ = _link_points(chain, phi)
    com_x = 0.5 * (nodes[:-1, 0] + nodes[1:, 0])
    weight = chain.segment_mass * chain.g
    # bending torque at joint i from links j >= i: weight * (x_com_j - x_joint_i)
    distal_x = np.cumsum((weight * com_x)[::-1])[::-1]
    distal_w = weight * np.arange(chain.n_seg, 0, -1)
    return distal_x - distal_w * nodes[:-1, 0]


def _equilibrium(chain: SegmentChain, tension: float, guess: np.ndarray, step: int) -> np.ndarray:
    k = chain.joint_stiffness
    tendon = (tension + chain.preload) * chain.joint_offsets
    if not chain.gravity or chain.segment_mass == 0.0:
        return tendon / k

    def residual(phi):
        return k * phi - tendon - _gravity_torque(chain, phi)

    sol = optimize.root(residual, guess, method="hybr", options={"xtol": 1e-13})
    if not sol.success or not np.all(np.isfinite(sol.x)):
        raise EquilibriumError(step, sol.message)
    scale = max(1.0, np.max(np.abs(tendon)), np.max(np.abs(k * sol.x)))
    if np.max(np.abs(residual(sol.x))) > 1e-8 * scale:
        raise EquilibriumError(step, "residual above tolerance")
    return sol.x


def simulate_bend(chain: SegmentChain) -> BendTrajectory:
    phi = np.zeros(chain.n_seg)
    xs, ys, angles, joints = [], [], [], []
    for step, tension in enumerate(chain.tensions):
        phi = _equilibrium(chain, tension, phi, step)
        nodes, _ = _link_points(chain, phi)
        xs.append(nodes[-1, 0])
        ys.append(nodes[-1, 1])
        angles.append(phi.sum())
        joints.append(phi.copy())
    return BendTrajectory(
        tensions=np.asarray(chain.tensions),
        tip_x=np.asarray(xs),
        tip_y=np.asarray(ys),
        bend_angle=np.asarray(angles),
        joint_angles=np.asarray(joints),
    )


def linear_tip_compliance(chain: SegmentChain) -> float:
    """Continuum small-tension prediction of tip x-deflection per unit tension.

    ``integral_0^L r(s) (L - s) ds / EI`` for a tendon moment ``tension * r(s)``.
    """
    L, a, b = chain.length, chain.offset_slope, chain.root_offset
    return (b * L * L / 2 + a * L ** 3 / 6) / chain.flexural_rigidity


def calibrate_rigidity(chain: SegmentChain, target_drop: float) -> SegmentChain:
    """Return ``chain`` with the flexural rigidity that puts the largest tip drop at ``target_drop``."""
    if not 0 < target_drop < chain.length:
        raise ValueError("target drop must lie in (0, length)")

    def miss(log_ei):
        traj = simulate_bend(chain.with_(flexural_rigidity=math.exp(log_ei)))
        return traj.max_vertical_drop(chain.length) - target_drop

    lo, hi = math.log(chain.flexural_rigidity) - 8, math.log(chain.flexural_rigidity) + 8
    root = optimize.brentq(miss, lo, hi, xtol=1e-10)
    return chain.with_(flexural_rigidity=math.exp(root))
