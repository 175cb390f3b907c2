"""quadfts: finite-time sliding-mode quaternion tracking control workbench
for quadrotor UAVs.

Simulation, controller and verification library with a compiled closed-loop
kernel (falls back to a pure-Python loop when the extension is not built).
"""

__version__ = "0.1.0"

from .controller import ControlOutput, Gains, control_step, default_robust_gain
from .dynamics import (
    Command,
    DisturbanceModel,
    RigidBodyParams,
    VehicleState,
    disturbance_force,
    state_derivative,
)
from .engine import (
    HAVE_COMPILED,
    Metrics,
    Scenario,
    SimTrace,
    active_backend,
    compute_metrics,
    lyapunov_value,
    rk4_step,
    run,
)
from .errors import (
    AttitudeSingularity,
    ConfigError,
    ControlError,
    DegenerateThrust,
    InfeasibleTrajectory,
    NonFiniteState,
    SimulationAbort,
)
from .trajectory import RefPoint, TrajectorySpec, check_feasible, eval_trajectory

__all__ = [
    "AttitudeSingularity",
    "Command",
    "ConfigError",
    "ControlError",
    "ControlOutput",
    "DegenerateThrust",
    "DisturbanceModel",
    "Gains",
    "HAVE_COMPILED",
    "InfeasibleTrajectory",
    "Metrics",
    "NonFiniteState",
    "RefPoint",
    "RigidBodyParams",
    "Scenario",
    "SimTrace",
    "SimulationAbort",
    "TrajectorySpec",
    "VehicleState",
    "active_backend",
    "check_feasible",
    "compute_metrics",
    "control_step",
    "default_robust_gain",
    "disturbance_force",
    "eval_trajectory",
    "lyapunov_value",
    "rk4_step",
    "run",
    "state_derivative",
    "__version__",
]
