"""Typed errors raised by the controller, configuration layer and simulator."""

from __future__ import annotations


class ControlError(RuntimeError):
    """Base class for controller singularities."""


class DegenerateThrust(ControlError):
    """Commanded acceleration coincides with the gravity vector: the thrust
    direction, and hence the desired attitude, is undefined."""

    def __init__(self, accel_norm: float):
        super().__init__(
            f"degenerate thrust: ||g z - F|| = {accel_norm:.3e} below tolerance"
        )
        self.accel_norm = accel_norm


class AttitudeSingularity(ControlError):
    """Desired thrust direction is at (or numerically near) the inverted
    orientation where the attitude extraction loses rank."""

    def __init__(self, q_d0_sq: float):
        super().__init__(
            f"attitude extraction singular: q_d0^2 = {q_d0_sq:.3e} at tolerance"
        )
        self.q_d0_sq = q_d0_sq


class SimulationAbort(RuntimeError):
    """A run stopped before t_end; carries the failing timestamp and cause."""

    def __init__(self, t: float, cause: str):
        super().__init__(f"simulation aborted at t={t:.6f} s: {cause}")
        self.t = t
        self.cause = cause


class NonFiniteState(SimulationAbort):
    def __init__(self, t: float):
        super().__init__(t, "non-finite state")


class ConfigError(ValueError):
    """Invalid or unparseable scenario configuration."""


class InfeasibleTrajectory(ValueError):
    """Reference acceleration enters the singular set; carries first bad time."""

    def __init__(self, t: float, accel):
        super().__init__(
            f"reference acceleration enters the singular set at t={t:.4f} s "
            f"(A_d={accel})"
        )
        self.t = t
        self.accel = accel
