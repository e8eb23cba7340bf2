from .core import (
    RIGID,
    BeamSpec,
    LoadCase,
    StiffnessChain,
    TendonRouting,
    TendonSolution,
    convergent_solve,
    end_angle,
    is_rigid,
    parallel_solve,
    pure_tip_deflection,
    rigid_convergent_tip_deflection,
    rigid_parallel_tip_deflection,
    total_stiffness,
)
