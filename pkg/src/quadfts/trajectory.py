"""Analytic reference trajectories with exact derivatives up to fourth order.

Derivatives are hand-derived closed forms per trajectory kind (no numeric
differencing inside the generator); a finite-difference property test guards
the derivations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InfeasibleTrajectory

TRAJECTORY_KINDS = ("paper-v", "hover", "circle", "polynomial")


@dataclass
class RefPoint:
    """Desired position and its first four time derivatives."""

    P_d: np.ndarray
    V_d: np.ndarray
    A_d: np.ndarray
    J_d: np.ndarray
    S_d: np.ndarray

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.P_d, self.V_d, self.A_d, self.J_d, self.S_d])


@dataclass
class TrajectorySpec:
    """Declarative trajectory description.

    kinds:
      paper-v     -- [2 sin(0.3 t), 4 sin(0.15 t), 2 + 0.1 t] (bundled scenario;
                     the x component 4 sin(0.15t)cos(0.15t) simplified to
                     2 sin(0.3t) before differentiating)
      hover       -- constant position ``offset``
      circle      -- radius/omega circle around ``center`` with linear climb
      polynomial  -- per-axis coefficient lists, lowest order first
    """

    kind: str = "hover"
    offset: np.ndarray = None
    radius: float = 1.0
    omega: float = 0.5
    center: np.ndarray = None
    climb_rate: float = 0.0
    coeffs: list = field(default_factory=list)

    def __post_init__(self):
        if self.kind not in TRAJECTORY_KINDS:
            raise ValueError(f"unknown trajectory kind {self.kind!r}")
        self.offset = np.zeros(3) if self.offset is None else np.asarray(self.offset, float)
        self.center = np.zeros(3) if self.center is None else np.asarray(self.center, float)
        if self.kind == "polynomial":
            if len(self.coeffs) != 3:
                raise ValueError("polynomial trajectory needs 3 coefficient lists")
            self.coeffs = [np.asarray(c, dtype=float) for c in self.coeffs]

    def eval(self, t: float) -> RefPoint:
        return eval_trajectory(self, t)


def eval_trajectory(spec: TrajectorySpec, t: float) -> RefPoint:
    """Reference point with exact analytic derivatives at time t."""
    if spec.kind == "hover":
        z = np.zeros(3)
        return RefPoint(spec.offset.copy(), z, z.copy(), z.copy(), z.copy())

    if spec.kind == "paper-v":
        s3, c3 = math.sin(0.3 * t), math.cos(0.3 * t)
        s15, c15 = math.sin(0.15 * t), math.cos(0.15 * t)
        P = np.array([2.0 * s3, 4.0 * s15, 2.0 + 0.1 * t])
        V = np.array([0.6 * c3, 0.6 * c15, 0.1])
        A = np.array([-0.18 * s3, -0.09 * s15, 0.0])
        J = np.array([-0.054 * c3, -0.0135 * c15, 0.0])
        S = np.array([0.0162 * s3, 0.002025 * s15, 0.0])
        return RefPoint(P, V, A, J, S)

    if spec.kind == "circle":
        r, w = spec.radius, spec.omega
        cw, sw = math.cos(w * t), math.sin(w * t)
        P = spec.center + np.array([r * cw, r * sw, spec.climb_rate * t])
        V = np.array([-r * w * sw, r * w * cw, spec.climb_rate])
        A = np.array([-r * w**2 * cw, -r * w**2 * sw, 0.0])
        J = np.array([r * w**3 * sw, -r * w**3 * cw, 0.0])
        S = np.array([r * w**4 * cw, r * w**4 * sw, 0.0])
        return RefPoint(P, V, A, J, S)

    # polynomial
    out = np.zeros((5, 3))
    for ax, c in enumerate(spec.coeffs):
        c = c.copy()
        for order in range(5):
            out[order, ax] = _horner(c, t)
            c = _poly_deriv(c)
    return RefPoint(out[0], out[1], out[2], out[3], out[4])


def _horner(c: np.ndarray, t: float) -> float:
    acc = 0.0
    for coef in c[::-1]:
        acc = acc * t + coef
    return acc


def _poly_deriv(c: np.ndarray) -> np.ndarray:
    if len(c) <= 1:
        return np.zeros(1)
    return c[1:] * np.arange(1, len(c))


def singular_set_distance(A_d: np.ndarray, g: float) -> float:
    """Distance of a desired acceleration to the set {[0,0,a] : a >= g}."""
    lateral = math.hypot(A_d[0], A_d[1])
    if A_d[2] >= g:
        return lateral
    return math.sqrt(lateral * lateral + (g - A_d[2]) ** 2)


def check_feasible(
    spec: TrajectorySpec,
    t_end: float,
    g: float = 9.81,
    samples_per_second: float = 1000.0,
    margin_tol: float = 1e-9,
):
    """Sample A_d over [0, t_end] and verify it stays clear of the singular set.

    Returns the minimum distance (margin) over the samples. Raises
    InfeasibleTrajectory at the first violating time.
    """
    n = max(2, int(round(t_end * samples_per_second)) + 1)
    margin = math.inf
    for k in range(n):
        t = k * (t_end / (n - 1))
        A_d = eval_trajectory(spec, t).A_d
        d = singular_set_distance(A_d, g)
        if d <= margin_tol:
            raise InfeasibleTrajectory(t, A_d)
        margin = min(margin, d)
    return margin
