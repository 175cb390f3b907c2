"""Unified finite-time sliding-mode tracking controller.

The control law couples the translational and attitude loops without
time-scale separation: a fractional-power sliding variable on position error
shapes a virtual acceleration, thrust magnitude and desired attitude are
extracted from it, and the torque law tracks the desired attitude while a
coupling term (psi) feeds the translational sliding state forward into the
attitude loop.

Every analytically computed derivative here (s_dot, s_ddot, F_dot, F_ddot,
Omega_d_dot, psi_dot) is validated elsewhere against central finite
differences of its logged parent signal; see quadfts.checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .attitude import qbar, quat_error, rotation_of, sgn, skew
from .dynamics import RigidBodyParams, VehicleState, Z_I
from .errors import AttitudeSingularity, DegenerateThrust
from .trajectory import RefPoint


@dataclass(frozen=True)
class Gains:
    """Controller gains and tolerances.

    ``beta`` is the robust gain dominating the disturbance-bound estimate
    ``delta_hat`` with margin ``beta0``; ``beta_t`` is the fractional sliding
    exponent in (0, 1); ``eps`` is the boundary-layer half-width inside which
    the exponent switches to 1.
    """

    k_st: float = 5.0
    beta_t: float = 0.99
    k_t: np.ndarray = (2.0, 2.0, 2.0)
    beta: float = 20.11
    beta0: float = 0.1
    delta_hat: float = 20.01
    k_eta: float = 15.0
    k_theta: float = 15.0
    k_q: float = 15.0
    eps: float = 1e-3
    thrust_tol: float = 1e-6
    q0_tol: float = 1e-4
    unwind: bool = False

    def __post_init__(self):
        object.__setattr__(self, "k_t", np.asarray(self.k_t, dtype=float))
        if self.k_t.shape != (3,):
            raise ValueError("k_t must be a 3-vector")
        for name in ("k_st", "beta0", "k_eta", "k_theta", "k_q", "eps"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be positive")
        if not 0.0 < self.beta_t < 1.0:
            raise ValueError(f"beta_t must lie in (0, 1), got {self.beta_t}")
        if np.any(self.k_t <= 0.0):
            raise ValueError("k_t entries must be positive")
        if self.beta < self.delta_hat + self.beta0 - 1e-12:
            raise ValueError(
                f"robust gain beta={self.beta} below delta_hat + beta0 = "
                f"{self.delta_hat + self.beta0}"
            )


def default_robust_gain(
    delta_f: float, m: float, k_st: float, margin: float = 4.0, beta0: float = 0.1
) -> tuple[float, float]:
    """Default (beta, delta_hat) with delta_hat = delta_f/m + k_st*margin."""
    delta_hat = delta_f / m + k_st * margin
    return delta_hat + beta0, delta_hat


@dataclass
class ErrorSignals:
    """Tracking errors the control law consumes.

    ``Omega_err`` is the desired rate mapped into the true body frame,
    ``Omega - R(Q_err) @ Omega_d``; with that definition the error-quaternion
    kinematics ``Q_err_dot = 0.5 Xi(Q_err) Omega_err`` are exact. It is filled
    once the desired rate is known.
    """

    P_err: np.ndarray
    V_err: np.ndarray
    Q_err: np.ndarray
    q_bar: np.ndarray
    Omega_err: np.ndarray | None = None


@dataclass
class SlidingState:
    """Sliding variable and its first two analytic time derivatives."""

    s: np.ndarray
    s_dot: np.ndarray
    s_ddot: np.ndarray


@dataclass
class ControlOutput:
    """Thrust/torque command plus every intermediate the trace logs."""

    T: float
    Gamma: np.ndarray
    s: np.ndarray
    s_dot: np.ndarray
    s_ddot: np.ndarray
    F: np.ndarray
    F_dot: np.ndarray
    F_ddot: np.ndarray
    T_dot: float
    Q_d: np.ndarray
    Omega_d: np.ndarray
    Omega_d_dot: np.ndarray
    Q_err: np.ndarray
    Omega_err: np.ndarray
    theta: np.ndarray
    psi: np.ndarray
    psi_dot: np.ndarray
    exponents: np.ndarray


def effective_exponent(p_err_i: float, g: Gains) -> float:
    """Sliding exponent for one axis: 1 inside the boundary layer, beta_t
    outside. |p| == eps counts as outside (measure-zero tie)."""
    return 1.0 if abs(p_err_i) < g.eps else g.beta_t


def sliding_variable(P_err: np.ndarray, V_err: np.ndarray, g: Gains) -> np.ndarray:
    """Per-axis s_i = k_st |p_i|^exp sgn(p_i) + v_i with the effective exponent."""
    s = np.empty(3)
    for i in range(3):
        ex = effective_exponent(P_err[i], g)
        s[i] = g.k_st * abs(P_err[i]) ** ex * sgn(P_err[i]) + V_err[i]
    return s


def smooth_sat(s: np.ndarray) -> np.ndarray:
    """Elementwise tanh saturation (smooth chattering suppression)."""
    return np.tanh(s)


def virtual_accel(s: np.ndarray, A_d: np.ndarray, g: Gains) -> np.ndarray:
    """Virtual translational control F = A_d - (k_t + beta) (.) tanh(s).

    The robust term -beta*tanh(s) is folded into the same saturation.
    """
    return A_d - (g.k_t + g.beta) * smooth_sat(s)


def thrust_magnitude(F: np.ndarray, p: RigidBodyParams, thrust_tol: float = 1e-6) -> float:
    """Total thrust T = m ||g z - F||; raises when the norm degenerates."""
    a1 = float(np.linalg.norm(p.g * Z_I - F))
    if a1 <= thrust_tol:
        raise DegenerateThrust(a1)
    return p.m * a1


def attitude_from_accel(
    F: np.ndarray, T: float, p: RigidBodyParams, q0_tol: float = 1e-4
) -> np.ndarray:
    """Desired attitude realizing the virtual acceleration, with zero yaw
    component of the vector part. Lands on the unit sphere exactly.
    """
    q0_sq = p.m / (2.0 * T) * (p.g - F[2]) + 0.5
    if q0_sq <= q0_tol * q0_tol:
        raise AttitudeSingularity(q0_sq)
    q0 = math.sqrt(q0_sq)
    den = 2.0 * T * q0
    return np.array([p.m * F[1] / den, -p.m * F[0] / den, 0.0, q0])


def rate_extraction_matrix(F: np.ndarray, g: float = 9.81) -> np.ndarray:
    """Matrix Phi(F) mapping F_dot to the desired body rate Omega_d."""
    fx, fy, fz = F
    a1 = math.sqrt(fx * fx + fy * fy + (g - fz) ** 2)
    a2 = a1 + g - fz
    if a1 <= 0.0 or a2 <= 0.0:
        raise AttitudeSingularity(0.0 if a1 <= 0.0 else a2 / (2.0 * a1))
    return (1.0 / (a1 * a1 * a2)) * np.array(
        [
            [-fx * fy, -fy * fy + a1 * a2, fy * a2],
            [fx * fx - a1 * a2, fx * fy, -fx * a2],
            [fy * a1, -fx * a1, 0.0],
        ]
    )


def _phi_directional(F: np.ndarray, F_dot: np.ndarray, g: float, step: float) -> np.ndarray:
    """Directional derivative of F -> Phi(F) F_dot along F_dot, by central
    differencing with a relative step (avoids transcribing the long analytic
    Phi derivative; the FD oracle on Omega_d_dot guards it)."""
    h = step * (1.0 + float(np.linalg.norm(F))) / (1.0 + float(np.linalg.norm(F_dot)))
    return (
        (rate_extraction_matrix(F + h * F_dot, g) - rate_extraction_matrix(F - h * F_dot, g))
        @ F_dot
    ) / (2.0 * h)


def desired_rates(
    F: np.ndarray,
    F_dot: np.ndarray,
    F_ddot: np.ndarray,
    g: float = 9.81,
    fd_step: float = 1e-6,
) -> tuple[np.ndarray, np.ndarray]:
    """Desired body rate Omega_d = Phi(F) F_dot and its time derivative
    Omega_d_dot = Phi_dot F_dot + Phi(F) F_ddot."""
    phi = rate_extraction_matrix(F, g)
    return phi @ F_dot, _phi_directional(F, F_dot, g, fd_step) + phi @ F_ddot


def accel_error_nominal(
    e: ErrorSignals,
    Q: np.ndarray,
    T: float,
    F: np.ndarray,
    A_d: np.ndarray,
    p: RigidBodyParams,
) -> np.ndarray:
    """Disturbance-free model of the velocity-error rate:
    -(2T/m) R(Q)^T [q_bar]x q_err + F - A_d. The wind force is unknown to the
    controller; the robust term exists to dominate exactly this mismatch."""
    R = rotation_of(Q)
    return -(2.0 * T / p.m) * (R.T @ np.cross(e.q_bar, e.Q_err[:3])) + F - A_d


def _surface_rate(p_i: float, v_i: float, g: Gains) -> float:
    if effective_exponent(p_i, g) == 1.0:
        return g.k_st * v_i
    return g.beta_t * g.k_st * abs(p_i) ** (g.beta_t - 1.0) * v_i


def _surface_accel(p_i: float, v_i: float, vdot_i: float, g: Gains) -> float:
    if effective_exponent(p_i, g) == 1.0:
        return g.k_st * vdot_i
    a, bt = abs(p_i), g.beta_t
    return g.k_st * bt * (
        (bt - 1.0) * a ** (bt - 2.0) * sgn(p_i) * v_i * v_i + a ** (bt - 1.0) * vdot_i
    )


def sliding_rates(
    e: ErrorSignals,
    v_err_dot_nom: np.ndarray,
    v_err_ddot_nom: np.ndarray,
    g: Gains,
) -> SlidingState:
    """Sliding variable with its first and second analytic derivatives.

    Inside the boundary layer the fractional terms reduce to linear ones,
    which removes the |p|^(beta_t - 1) singularity at p = 0.
    """
    s = sliding_variable(e.P_err, e.V_err, g)
    s_dot = np.array(
        [
            _surface_rate(e.P_err[i], e.V_err[i], g) + v_err_dot_nom[i]
            for i in range(3)
        ]
    )
    s_ddot = np.array(
        [
            _surface_accel(e.P_err[i], e.V_err[i], v_err_dot_nom[i], g)
            + v_err_ddot_nom[i]
            for i in range(3)
        ]
    )
    return SlidingState(s=s, s_dot=s_dot, s_ddot=s_ddot)


def virtual_accel_rates(
    g: Gains, sl: SlidingState, J_d: np.ndarray, S_d: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """First and second derivatives of the virtual control, with the robust
    term's derivatives folded in (same tanh saturation)."""
    th = np.tanh(sl.s)
    D = 1.0 - th * th
    D_dot = -2.0 * th * D * sl.s_dot
    kb = g.k_t + g.beta
    F_dot = J_d - kb * D * sl.s_dot
    F_ddot = S_d - kb * (D_dot * sl.s_dot + D * sl.s_ddot)
    return F_dot, F_ddot


def coupling_psi(
    e: ErrorSignals, s: np.ndarray, Q: np.ndarray, T: float, p: RigidBodyParams, g: Gains
) -> np.ndarray:
    """Rate target coupling attitude to the translational sliding state:
    psi = -k_eta q_err + (2T/m) [q_bar]x^T R(Q) s."""
    R = rotation_of(Q)
    return -g.k_eta * e.Q_err[:3] + (2.0 * T / p.m) * (skew(e.q_bar).T @ (R @ s))


def auxiliary_theta(Omega_err: np.ndarray, psi: np.ndarray) -> np.ndarray:
    """theta = Omega_err - psi; driving theta to zero couples the loops."""
    return Omega_err - psi


def error_quat_rate(Q_err: np.ndarray, Omega_err: np.ndarray) -> np.ndarray:
    """Exact error-quaternion rate 0.5 Xi(Q_err) Omega_err as a 4-vector."""
    qe, qe0 = Q_err[:3], Q_err[3]
    vec = 0.5 * (qe0 * Omega_err + np.cross(qe, Omega_err))
    return np.array([vec[0], vec[1], vec[2], -0.5 * float(qe @ Omega_err)])


def coupling_psi_rate(
    e: ErrorSignals,
    Q: np.ndarray,
    Omega: np.ndarray,
    s: np.ndarray,
    s_dot: np.ndarray,
    T: float,
    u_dot_F: float,
    a1: float,
    p: RigidBodyParams,
    g: Gains,
) -> tuple[np.ndarray, np.ndarray, float]:
    """Exact chain-rule time derivative of the coupling term.

    T_dot = -m (g z - F)^T F_dot / ||g z - F|| and R_dot = -[Omega]x R are
    substituted; returns (psi_dot, q_err_rate, T_dot).
    """
    R = rotation_of(Q)
    qe_rate = error_quat_rate(e.Q_err, e.Omega_err)
    qb_dot = np.array([qe_rate[1], -qe_rate[0], -qe_rate[3]])
    T_dot = -p.m * u_dot_F / a1
    Rs = R @ s
    psi_dot = (
        -g.k_eta * qe_rate[:3]
        + (2.0 * T_dot / p.m) * (skew(e.q_bar).T @ Rs)
        + (2.0 * T / p.m)
        * (
            skew(qb_dot).T @ Rs
            - skew(e.q_bar).T @ np.cross(Omega, Rs)
            + skew(e.q_bar).T @ (R @ s_dot)
        )
    )
    return psi_dot, qe_rate, T_dot


def accel_error_rate_nominal(
    e: ErrorSignals,
    Q: np.ndarray,
    Omega: np.ndarray,
    qe_rate: np.ndarray,
    T: float,
    F_dot: np.ndarray,
    J_d: np.ndarray,
    u_dot_F: float,
    a1: float,
    p: RigidBodyParams,
) -> np.ndarray:
    """Exact derivative of the nominal velocity-error rate (chain rule over
    the attitude-coupling term, with R_dot = -[Omega]x R)."""
    R = rotation_of(Q)
    qe = e.Q_err[:3]
    qb_dot = np.array([qe_rate[1], -qe_rate[0], -qe_rate[3]])
    cross_qb_qe = np.cross(e.q_bar, qe)
    return (
        F_dot
        - J_d
        + (2.0 * u_dot_F / a1) * (R.T @ cross_qb_qe)
        - (2.0 * T / p.m)
        * (
            R.T @ np.cross(Omega, cross_qb_qe)
            + R.T @ np.cross(qb_dot, qe)
            + R.T @ np.cross(e.q_bar, qe_rate[:3])
        )
    )


def torque_command(
    e: ErrorSignals,
    Omega: np.ndarray,
    Omega_d: np.ndarray,
    Omega_d_dot: np.ndarray,
    theta: np.ndarray,
    psi_dot: np.ndarray,
    p: RigidBodyParams,
    g: Gains,
) -> np.ndarray:
    """Unified attitude torque; by construction it cancels the error dynamics
    so that J theta_dot = -k_theta theta - k_q q_err exactly."""
    J = p.J
    R_err = rotation_of(e.Q_err)
    return (
        np.cross(Omega, J @ Omega)
        - J @ np.cross(e.Omega_err, R_err @ Omega_d)
        + J @ (R_err @ Omega_d_dot)
        - g.k_theta * theta
        - g.k_q * e.Q_err[:3]
        + J @ psi_dot
    )


def control_step(
    state: VehicleState, ref: RefPoint, g: Gains, p: RigidBodyParams
) -> ControlOutput:
    """One full evaluation of the control law in dependency order:
    errors -> s -> F -> T -> Q_d -> v_err_dot -> s_dot -> F_dot -> Omega_d ->
    v_err_ddot -> s_ddot -> F_ddot -> Omega_d_dot -> psi -> theta -> psi_dot
    -> Gamma.
    """
    P_err = state.P - ref.P_d
    V_err = state.V - ref.V_d
    exponents = np.array([effective_exponent(x, g) for x in P_err])
    s = sliding_variable(P_err, V_err, g)
    F = virtual_accel(s, ref.A_d, g)
    T = thrust_magnitude(F, p, g.thrust_tol)
    a1 = T / p.m
    Q_d = attitude_from_accel(F, T, p, g.q0_tol)
    Q_err = quat_error(Q_d, state.Q)
    if g.unwind and Q_err[3] < 0.0:
        Q_err = -Q_err
    e = ErrorSignals(P_err=P_err, V_err=V_err, Q_err=Q_err, q_bar=qbar(Q_err))

    v_err_dot = accel_error_nominal(e, state.Q, T, F, ref.A_d, p)
    s_dot = np.array(
        [_surface_rate(P_err[i], V_err[i], g) + v_err_dot[i] for i in range(3)]
    )
    th = np.tanh(s)
    D = 1.0 - th * th
    kb = g.k_t + g.beta
    F_dot = ref.J_d - kb * D * s_dot
    phi = rate_extraction_matrix(F, p.g)
    Omega_d = phi @ F_dot
    e.Omega_err = state.Omega - rotation_of(Q_err) @ Omega_d

    qe_rate = error_quat_rate(Q_err, e.Omega_err)
    u_dot_F = float((p.g * Z_I - F) @ F_dot)
    v_err_ddot = accel_error_rate_nominal(
        e, state.Q, state.Omega, qe_rate, T, F_dot, ref.J_d, u_dot_F, a1, p
    )
    s_ddot = np.array(
        [
            _surface_accel(P_err[i], V_err[i], v_err_dot[i], g) + v_err_ddot[i]
            for i in range(3)
        ]
    )
    D_dot = -2.0 * th * D * s_dot
    F_ddot = ref.S_d - kb * (D_dot * s_dot + D * s_ddot)
    Omega_d_dot = _phi_directional(F, F_dot, p.g, 1e-6) + phi @ F_ddot

    sl = SlidingState(s=s, s_dot=s_dot, s_ddot=s_ddot)
    psi = coupling_psi(e, s, state.Q, T, p, g)
    theta = auxiliary_theta(e.Omega_err, psi)
    psi_dot, _, T_dot = coupling_psi_rate(
        e, state.Q, state.Omega, s, s_dot, T, u_dot_F, a1, p, g
    )
    Gamma = torque_command(e, state.Omega, Omega_d, Omega_d_dot, theta, psi_dot, p, g)

    out = ControlOutput(
        T=T,
        Gamma=Gamma,
        s=sl.s,
        s_dot=sl.s_dot,
        s_ddot=sl.s_ddot,
        F=F,
        F_dot=F_dot,
        F_ddot=F_ddot,
        T_dot=T_dot,
        Q_d=Q_d,
        Omega_d=Omega_d,
        Omega_d_dot=Omega_d_dot,
        Q_err=Q_err,
        Omega_err=e.Omega_err,
        theta=theta,
        psi=psi,
        psi_dot=psi_dot,
        exponents=exponents,
    )
    for name in ("Gamma", "s_ddot", "F_ddot", "Omega_d_dot", "psi_dot"):
        if not np.all(np.isfinite(getattr(out, name))):
            raise FloatingPointError(f"non-finite controller output in {name}")
    return out
