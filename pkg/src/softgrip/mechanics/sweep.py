"""Normalized tip-deflection sweep over the load/termination position."""

from __future__ import annotations

import numpy as np

from .core import (
    RIGID,
    BeamSpec,
    LoadCase,
    TendonRouting,
    convergent_solve,
    parallel_solve,
    rigid_parallel_tip_deflection,
)

SWEEP_COLUMNS = ("p_over_L", "pure", "parallel", "convergent")


def termination_sweep(points: int = 101, slope: float = -1.0, k_t=RIGID) -> list[tuple[float, ...]]:
    """Rows of (p/L, pure, parallel, convergent) with E = I = L = F = b = 1.

    The grid is ``linspace(0, 1, points)``; the ``p/L = 0`` row holds the
    limiting value 0 for every column.
    """
    if points < 2:
        raise ValueError("sweep grid needs at least 2 points")
    beam = BeamSpec.unit()
    load = LoadCase(1.0)
    rows = []
    for p in np.linspace(0.0, 1.0, points):
        p = float(p)
        if p == 0.0:
            rows.append((0.0, 0.0, 0.0, 0.0))
            continue
        pure = p ** 3 / 3.0
        if k_t is RIGID:
            par = rigid_parallel_tip_deflection(beam, p, 1.0)
        else:
            par = parallel_solve(beam, TendonRouting.parallel(1.0, p, k_t), load, n=2).tip_deflection
        conv = convergent_solve(beam, TendonRouting(slope, 1.0, p, k_t), load, n=2).tip_deflection
        rows.append((p, pure, par, conv))
    return rows


def format_value(v: float, digits: int = 12) -> str:
    if abs(v) < 0.5 * 10.0 ** -digits:
        v = 0.0
    return f"{v:.{digits}f}"


def to_csv(columns, rows, digits: int = 12) -> str:
    lines = [",".join(columns)]
    lines += [",".join(format_value(v, digits) for v in row) for row in rows]
    return "\n".join(lines) + "\n"
