"""Quaternion and rotation algebra.

Conventions used throughout the package:

- Quaternions are stored vector-first: ``Q = [q1, q2, q3, q0]`` with vector
  part ``q`` and scalar part ``q0``, unit norm.
- ``rotation_of(Q)`` returns the inertial-to-body direction cosine matrix,
  i.e. for a body rotated by angle ``a`` about unit axis ``n`` (right-handed),
  ``Q = [sin(a/2) n, cos(a/2)]`` and ``R(Q) v`` expresses the inertial vector
  ``v`` in body axes. Consequently ``R(Q)^T z`` is the body thrust axis in
  inertial coordinates, and the kinematics are ``Qdot = 0.5 Xi(Q) Omega`` with
  body rates ``Omega``, equivalent to ``Rdot = -[Omega]x R``.
- Composition: ``rotation_of(quat_mul(Q1, Q2)) = rotation_of(Q2) @ rotation_of(Q1)``.

All functions are pure and operate on float64 numpy arrays.
"""

from __future__ import annotations

import math

import numpy as np

Array = np.ndarray

#: Identity quaternion (zero rotation).
QUAT_IDENTITY = np.array([0.0, 0.0, 0.0, 1.0])


def skew(x: Array) -> Array:
    """Skew-symmetric matrix [x]x with [x]x @ y == cross(x, y)."""
    return np.array(
        [
            [0.0, -x[2], x[1]],
            [x[2], 0.0, -x[0]],
            [-x[1], x[0], 0.0],
        ]
    )


def quat_normalize(Q: Array) -> Array:
    """Rescale onto the unit sphere. Never flips sign."""
    n = math.sqrt(float(Q @ Q))
    if n == 0.0:
        raise ValueError("cannot normalize a zero quaternion")
    return Q / n


def quat_mul(Q1: Array, Q2: Array) -> Array:
    """Quaternion product (Hamilton, vector-first storage), renormalized."""
    q1, w1 = Q1[:3], Q1[3]
    q2, w2 = Q2[:3], Q2[3]
    v = w1 * q2 + w2 * q1 + np.cross(q1, q2)
    return quat_normalize(np.array([v[0], v[1], v[2], w1 * w2 - float(q1 @ q2)]))


def quat_inverse(Q: Array) -> Array:
    """Inverse of a unit quaternion: negated vector part."""
    return np.array([-Q[0], -Q[1], -Q[2], Q[3]])


def rotation_of(Q: Array) -> Array:
    """Inertial-to-body rotation matrix of a unit quaternion."""
    q, w = Q[:3], Q[3]
    return (w * w - float(q @ q)) * np.eye(3) + 2.0 * np.outer(q, q) - 2.0 * w * skew(q)


def xi_matrix(Q: Array) -> Array:
    """4x3 kinematics map: ``Qdot = 0.5 xi_matrix(Q) @ Omega``.

    Columns are orthogonal to Q; ``xi_matrix(Q).T @ xi_matrix(Q) = I`` for
    unit Q. Defined without an internal 1/2 so the kinematics carry exactly
    one factor of 1/2.
    """
    q, w = Q[:3], Q[3]
    out = np.empty((4, 3))
    out[:3, :] = w * np.eye(3) + skew(q)
    out[3, :] = -q
    return out


def quat_error(Q_d: Array, Q: Array) -> Array:
    """Attitude error ``Q_d^-1 * Q`` between desired and true attitude."""
    return quat_mul(quat_inverse(Q_d), Q)


def qbar(Q_err: Array) -> Array:
    """Companion vector [qe2, -qe1, -qe0] of an error quaternion.

    Satisfies the thrust-axis identity
    ``(R(Q)^T - R(Q_d)^T) z = 2 R(Q)^T [qbar]x qe`` for ``Q_err = quat_error(Q_d, Q)``.
    """
    return np.array([Q_err[1], -Q_err[0], -Q_err[3]])


def sgn(x: float) -> float:
    """Three-way sign: -1, 0, or +1."""
    if x > 0.0:
        return 1.0
    if x < 0.0:
        return -1.0
    return 0.0
