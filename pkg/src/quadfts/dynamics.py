"""Quadrotor rigid-body plant and wind-disturbance models.

Frame note: gravity acts along +z of the inertial frame exactly as the
equations of motion are written (thrust enters with a minus sign), so at hover
with identity attitude the thrust term -(T/m) R^T z cancels +g z. Plots and
traces inherit this axis convention.

Disturbances are stored as forces (N) and divided by the vehicle mass inside
the dynamics; with m = 1 kg the numbers coincide with accelerations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .attitude import quat_normalize, rotation_of, skew, xi_matrix

Z_I = np.array([0.0, 0.0, 1.0])


@dataclass(frozen=True)
class RigidBodyParams:
    """Mass, inertia and gravity of the vehicle."""

    m: float
    J: np.ndarray
    g: float = 9.81

    def __post_init__(self):
        if not self.m > 0.0:
            raise ValueError(f"mass must be positive, got {self.m}")
        J = np.asarray(self.J, dtype=float)
        if J.shape == (3,):
            J = np.diag(J)
        if J.shape != (3, 3):
            raise ValueError(f"inertia must be 3x3 or a 3-vector diagonal, got {J.shape}")
        if not np.allclose(J, J.T, atol=1e-12):
            raise ValueError("inertia matrix must be symmetric")
        if np.any(np.linalg.eigvalsh(J) <= 0.0):
            raise ValueError("inertia matrix must be positive definite")
        object.__setattr__(self, "J", J)
        object.__setattr__(self, "J_inv", np.linalg.inv(J))

    J_inv: np.ndarray = field(init=False, repr=False)


@dataclass
class VehicleState:
    """Position/velocity in the inertial frame, attitude, body rates."""

    P: np.ndarray
    V: np.ndarray
    Q: np.ndarray
    Omega: np.ndarray

    def __post_init__(self):
        self.P = np.asarray(self.P, dtype=float)
        self.V = np.asarray(self.V, dtype=float)
        self.Q = quat_normalize(np.asarray(self.Q, dtype=float))
        self.Omega = np.asarray(self.Omega, dtype=float)
        vec = self.as_vector()
        if not np.all(np.isfinite(vec)):
            raise ValueError("state contains non-finite values")

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.P, self.V, self.Q, self.Omega])

    @classmethod
    def from_vector(cls, x: np.ndarray) -> "VehicleState":
        return cls(P=x[0:3].copy(), V=x[3:6].copy(), Q=x[6:10].copy(), Omega=x[10:13].copy())


@dataclass
class Command:
    """Total thrust (N) along the body z axis and body torque (N m)."""

    T: float
    Gamma: np.ndarray

    def __post_init__(self):
        if self.T < 0.0:
            raise ValueError(f"thrust must be non-negative, got {self.T}")
        self.Gamma = np.asarray(self.Gamma, dtype=float)


DISTURBANCE_KINDS = ("none", "sinusoid", "constant", "custom-table")


@dataclass
class DisturbanceModel:
    """Wind force model: none, per-axis sinusoid, constant, or a lookup table.

    ``bound`` is the declared per-axis magnitude bound; when given, the model
    amplitude (or table) is validated against it at construction.
    """

    kind: str = "none"
    amplitude: np.ndarray = None
    frequency: float = 0.0
    phase: float = 0.0
    table_t: np.ndarray = None
    table_f: np.ndarray = None
    bound: np.ndarray = None

    def __post_init__(self):
        if self.kind not in DISTURBANCE_KINDS:
            raise ValueError(f"unknown disturbance kind {self.kind!r}")
        if self.amplitude is None:
            self.amplitude = np.zeros(3)
        self.amplitude = np.asarray(self.amplitude, dtype=float)
        if self.bound is not None:
            self.bound = np.asarray(self.bound, dtype=float)
        if self.kind == "custom-table":
            if self.table_t is None or self.table_f is None:
                raise ValueError("custom-table disturbance needs table_t and table_f")
            self.table_t = np.asarray(self.table_t, dtype=float)
            self.table_f = np.asarray(self.table_f, dtype=float)
            if self.table_f.shape != (len(self.table_t), 3):
                raise ValueError("table_f must be (len(table_t), 3)")
            if np.any(np.diff(self.table_t) <= 0):
                raise ValueError("table_t must be strictly increasing")
        if self.bound is not None:
            peak = self._peak()
            if np.any(peak > self.bound + 1e-15):
                raise ValueError(
                    f"disturbance amplitude {peak} exceeds declared bound {self.bound}"
                )

    def _peak(self) -> np.ndarray:
        if self.kind == "custom-table":
            return np.abs(self.table_f).max(axis=0)
        if self.kind == "none":
            return np.zeros(3)
        return np.abs(self.amplitude)


def disturbance_force(model: DisturbanceModel, t: float) -> np.ndarray:
    """Disturbance force (N) at time t."""
    if model.kind == "none":
        return np.zeros(3)
    if model.kind == "constant":
        return model.amplitude.copy()
    if model.kind == "sinusoid":
        return model.amplitude * math.cos(model.frequency * t + model.phase)
    # custom-table: linear interpolation, end values held
    return np.array(
        [np.interp(t, model.table_t, model.table_f[:, i]) for i in range(3)]
    )


@dataclass
class StateDerivative:
    """Time derivative of a VehicleState; Q_dot is tangent to the unit sphere."""

    P_dot: np.ndarray
    V_dot: np.ndarray
    Q_dot: np.ndarray
    Omega_dot: np.ndarray

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.P_dot, self.V_dot, self.Q_dot, self.Omega_dot])


def state_derivative(
    s: VehicleState, u: Command, F_d: np.ndarray, p: RigidBodyParams
) -> StateDerivative:
    """Rigid-body equations of motion under thrust, torque and wind force."""
    R = rotation_of(s.Q)
    V_dot = -(u.T / p.m) * (R.T @ Z_I) + p.g * Z_I + F_d / p.m
    Q_dot = 0.5 * xi_matrix(s.Q) @ s.Omega
    Omega_dot = p.J_inv @ (-skew(s.Omega) @ (p.J @ s.Omega) + u.Gamma)
    return StateDerivative(P_dot=s.V.copy(), V_dot=V_dot, Q_dot=Q_dot, Omega_dot=Omega_dot)
