"""Deterministic fixed-step closed-loop simulation, trace container, metrics.

The closed loop advances with classical RK4 at a fixed step; the command is
recomputed once per control period and held constant across the RK4 stages
(zero-order hold). ``Scenario.substeps`` refines the physics integration
within one held-command period, which is what the step-halving convergence
check varies.

Backend selection: the compiled kernel (quadfts._fastloop) is used when
importable, the pure-Python loop otherwise. Override with the environment
variable QUADFTS_BACKEND=python|compiled.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from . import _pyloop
from .controller import Gains
from .dynamics import DisturbanceModel, RigidBodyParams, VehicleState
from .errors import NonFiniteState, SimulationAbort
from .trace_layout import NCOLS, col
from .trajectory import TrajectorySpec, check_feasible, eval_trajectory

try:
    from . import _fastloop

    HAVE_COMPILED = True
except ImportError:
    _fastloop = None
    HAVE_COMPILED = False


def active_backend() -> str:
    env = os.environ.get("QUADFTS_BACKEND", "").strip().lower()
    if env == "python":
        return "python"
    if env == "compiled":
        if not HAVE_COMPILED:
            raise RuntimeError("QUADFTS_BACKEND=compiled but the extension is not built")
        return "compiled"
    return "compiled" if HAVE_COMPILED else "python"


@dataclass
class Scenario:
    """Everything one closed-loop run needs."""

    trajectory: TrajectorySpec
    disturbance: DisturbanceModel
    params: RigidBodyParams
    gains: Gains
    initial: VehicleState
    t_end: float = 30.0
    dt: float = 1e-3
    substeps: int = 1

    def __post_init__(self):
        if not self.dt > 0.0:
            raise ValueError("dt must be positive")
        if self.t_end < self.dt:
            raise ValueError("t_end must be at least dt")
        if self.substeps < 1:
            raise ValueError("substeps must be >= 1")

    @property
    def n_steps(self) -> int:
        return int(round(self.t_end / self.dt))


class SimTrace:
    """Uniformly sampled trace of one run; thin view over a (n+1, NCOLS) array.

    Named signals are accessed as attributes (t, P, V, Q, Omega, P_d, ...,
    lyap); see quadfts.trace_layout.FIELDS for the full list.
    """

    def __init__(self, data: np.ndarray, scenario: Scenario, backend: str):
        self.data = data
        self.scenario = scenario
        self.backend = backend

    def __getattr__(self, name):
        try:
            sl = col(name)
        except KeyError:
            raise AttributeError(name) from None
        out = self.data[:, sl]
        return out[:, 0] if out.shape[1] == 1 else out

    def __len__(self) -> int:
        return self.data.shape[0]

    @property
    def P_err(self) -> np.ndarray:
        return self.P - self.P_d

    @property
    def V_err(self) -> np.ndarray:
        return self.V - self.V_d


@dataclass
class Metrics:
    """Quantitative summary of a trace. Times are None when never reached."""

    t_reach: float | None
    t_settle_axes: tuple
    t_settle: float | None
    t_settle_bound: float
    max_pos_err: float
    final_pos_err: float
    final_att_err: float
    max_s_after_reach: float | None
    lyap_violations: int
    lyap_switches: int
    reach_threshold: float = 1e-3
    settle_threshold: float = 5e-3


def rk4_step(state: VehicleState, t: float, dt: float, deriv) -> VehicleState:
    """One classical RK4 update of the 13-dim state; quaternion renormalized
    after the update. ``deriv(state, t) -> StateDerivative``."""
    x = state.as_vector()

    def f(xv, tv):
        return deriv(VehicleState.from_vector(xv), tv).as_vector()

    k1 = f(x, t)
    k2 = f(x + 0.5 * dt * k1, t + 0.5 * dt)
    k3 = f(x + 0.5 * dt * k2, t + 0.5 * dt)
    k4 = f(x + dt * k3, t + dt)
    xn = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    if not np.all(np.isfinite(xn)):
        raise NonFiniteState(t + dt)
    return VehicleState.from_vector(xn)


def lyapunov_value(
    q_err0: float, theta: np.ndarray, s: np.ndarray, J: np.ndarray, k_q: float
) -> float:
    """Composite energy k_q (1 - qe0) + 0.5 theta' J theta + 0.5 s's."""
    return float(k_q * (1.0 - q_err0) + 0.5 * theta @ (J @ theta) + 0.5 * s @ s)


def _ref_table(sc: Scenario) -> np.ndarray:
    n = sc.n_steps
    table = np.empty((n + 1, 15))
    for k in range(n + 1):
        table[k] = eval_trajectory(sc.trajectory, k * sc.dt).as_vector()
    return table


def _gains_tuple(g: Gains) -> tuple:
    return (
        g.k_st, g.beta_t, g.k_t[0], g.k_t[1], g.k_t[2], g.beta,
        g.k_eta, g.k_theta, g.k_q, g.eps, g.thrust_tol, g.q0_tol,
        1 if g.unwind else 0, 1e-6,
    )


def _params_tuple(p: RigidBodyParams) -> tuple:
    return (p.m, p.g, tuple(p.J.ravel()), tuple(p.J_inv.ravel()))


def _dist_tuple(d: DisturbanceModel) -> tuple:
    kind = {"none": 0, "sinusoid": 1, "constant": 2, "custom-table": 3}[d.kind]
    tt = d.table_t if d.table_t is not None else np.zeros(1)
    tf = d.table_f if d.table_f is not None else np.zeros((1, 3))
    a = d.amplitude
    return (kind, a[0], a[1], a[2], d.frequency, d.phase, np.asarray(tt, float), np.asarray(tf, float))


def run(sc: Scenario, backend: str | None = None, check_trajectory: bool = True) -> SimTrace:
    """Integrate the closed loop and return the full trace.

    Aborts with typed SimulationAbort subclasses on controller singularities
    or a non-finite state, carrying the failing timestamp.
    """
    if check_trajectory:
        check_feasible(sc.trajectory, sc.t_end, g=sc.params.g)
    backend = backend or active_backend()
    n = sc.n_steps
    out = np.empty((n + 1, NCOLS))
    ref_table = _ref_table(sc)
    x0 = sc.initial.as_vector()
    gains = _gains_tuple(sc.gains)
    par = _params_tuple(sc.params)
    dist = _dist_tuple(sc.disturbance)

    if backend == "compiled":
        status, fail_row = _fastloop.run_loop(
            x0, ref_table, gains, par, dist, sc.dt, sc.substeps, out
        )
    else:
        status, fail_row = _pyloop.run_loop(
            x0, ref_table, gains, par, dist, sc.dt, sc.substeps, out
        )

    if status != _pyloop.STATUS_OK:
        t_fail = fail_row * sc.dt
        if status == _pyloop.STATUS_NONFINITE:
            raise NonFiniteState(t_fail)
        cause = (
            "degenerate thrust"
            if status == _pyloop.STATUS_DEGENERATE_THRUST
            else "attitude extraction singular"
        )
        raise SimulationAbort(t_fail, cause)

    return SimTrace(out, sc, backend)


def compute_metrics(trace: SimTrace, sc: Scenario) -> Metrics:
    """Reaching / settling times, error norms and the Lyapunov monitor summary.

    The theoretical settling bound max_i |p0_i|^(1-bt) / (k_st (1-bt)) is the
    time for the on-manifold fractional dynamics to reach zero from the
    initial error.
    """
    g = sc.gains
    t = trace.t
    p_err = trace.P_err
    s_norm = np.linalg.norm(trace.s, axis=1)

    reach_idx = np.nonzero(s_norm < 1e-3)[0]
    t_reach = float(t[reach_idx[0]]) if reach_idx.size else None
    max_s_after = float(s_norm[reach_idx[0] :].max()) if reach_idx.size else None

    t_settle_axes = []
    for ax in range(3):
        below = np.abs(p_err[:, ax]) < 5e-3
        # last index where the error is NOT below the threshold
        above = np.nonzero(~below)[0]
        if above.size == 0:
            t_settle_axes.append(float(t[0]))
        elif above[-1] + 1 < len(t):
            t_settle_axes.append(float(t[above[-1] + 1]))
        else:
            t_settle_axes.append(None)
    t_settle = None if any(v is None for v in t_settle_axes) else max(t_settle_axes)

    p0 = np.abs(trace.P[0] - trace.P_d[0])
    bound = float(np.max(p0 ** (1.0 - g.beta_t)) / (g.k_st * (1.0 - g.beta_t)))

    violations, switches = lyapunov_monitor(trace)

    pn = np.linalg.norm(p_err, axis=1)
    q_err = trace.Q_err
    return Metrics(
        t_reach=t_reach,
        t_settle_axes=tuple(t_settle_axes),
        t_settle=t_settle,
        t_settle_bound=bound,
        max_pos_err=float(pn.max()),
        final_pos_err=float(pn[-1]),
        final_att_err=float(np.linalg.norm(q_err[-1, :3])),
        max_s_after_reach=max_s_after,
        lyap_violations=violations,
        lyap_switches=switches,
    )


def lyapunov_monitor(trace: SimTrace, slack: float = 1e-9) -> tuple[int, int]:
    """Count decrease violations of the sampled Lyapunov value after the first
    sample, with per-step slack ``slack * max(1, L)``.

    Sample pairs spanning a boundary-layer exponent switch are counted
    separately as regime switches, not violations: the sliding variable (and
    with it L) is redefined there and jumps by construction.
    """
    L = trace.lyap
    ex = trace.exponents
    switch = np.any(ex[1:] != ex[:-1], axis=1)
    violations = 0
    switches = int(switch.sum())
    for i in range(1, len(L) - 1):
        if L[i + 1] > L[i] + slack * max(1.0, L[i]):
            if not switch[i]:
                violations += 1
    return violations, switches
