"""Pure-Python closed-loop kernel (fallback backend).

Scalar-float mirror of the compiled kernel in _fastloop.pyx: same equations,
same evaluation order, same trace layout. Used when the extension is not
built; also the parity reference in tests. Deliberately numpy-free in the hot
path.

Status codes: 0 ok, 1 degenerate thrust, 2 attitude singularity,
3 non-finite state.
"""

from __future__ import annotations

import math

import numpy as np

STATUS_OK = 0
STATUS_DEGENERATE_THRUST = 1
STATUS_ATTITUDE_SINGULARITY = 2
STATUS_NONFINITE = 3

# disturbance kind codes shared with the compiled kernel
DIST_NONE = 0
DIST_SINUSOID = 1
DIST_CONSTANT = 2
DIST_TABLE = 3


def _phi(fx, fy, fz, g):
    """Rate-extraction matrix entries (row-major) or None when singular."""
    gz = g - fz
    a1 = math.sqrt(fx * fx + fy * fy + gz * gz)
    a2 = a1 + gz
    if a1 <= 0.0 or a2 <= 0.0:
        return None
    c = 1.0 / (a1 * a1 * a2)
    return (
        -fx * fy * c,
        (-fy * fy + a1 * a2) * c,
        fy * a2 * c,
        (fx * fx - a1 * a2) * c,
        fx * fy * c,
        -fx * a2 * c,
        fy * a1 * c,
        -fx * a1 * c,
        0.0,
    )


def _dist(dist, t):
    kind, ax, ay, az, w, ph, tt, tf = dist
    if kind == DIST_NONE:
        return 0.0, 0.0, 0.0
    if kind == DIST_CONSTANT:
        return ax, ay, az
    if kind == DIST_SINUSOID:
        c = math.cos(w * t + ph)
        return ax * c, ay * c, az * c
    # table: linear interpolation with held ends
    n = len(tt)
    if t <= tt[0]:
        return tf[0, 0], tf[0, 1], tf[0, 2]
    if t >= tt[n - 1]:
        return tf[n - 1, 0], tf[n - 1, 1], tf[n - 1, 2]
    j = int(np.searchsorted(tt, t, side="right")) - 1
    a = (t - tt[j]) / (tt[j + 1] - tt[j])
    return (
        tf[j, 0] + a * (tf[j + 1, 0] - tf[j, 0]),
        tf[j, 1] + a * (tf[j + 1, 1] - tf[j, 1]),
        tf[j, 2] + a * (tf[j + 1, 2] - tf[j, 2]),
    )


def _rot(q1, q2, q3, q0):
    """Inertial-to-body DCM entries, row-major."""
    return (
        q0 * q0 + q1 * q1 - q2 * q2 - q3 * q3,
        2.0 * (q1 * q2 + q0 * q3),
        2.0 * (q1 * q3 - q0 * q2),
        2.0 * (q1 * q2 - q0 * q3),
        q0 * q0 - q1 * q1 + q2 * q2 - q3 * q3,
        2.0 * (q2 * q3 + q0 * q1),
        2.0 * (q1 * q3 + q0 * q2),
        2.0 * (q2 * q3 - q0 * q1),
        q0 * q0 - q1 * q1 - q2 * q2 + q3 * q3,
    )


def _control(t, x, ref, gains, par):
    """Full control-law evaluation; returns (status, big tuple of outputs)."""
    (k_st, beta_t, ktx, kty, ktz, beta, k_eta, k_theta, k_q, eps,
     thrust_tol, q0_tol, unwind, phi_step) = gains
    m, grav, J, Jinv = par
    (pdx, pdy, pdz, vdx, vdy, vdz, adx, ady, adz,
     jdx, jdy, jdz, sdx, sdy, sdz) = ref
    px, py, pz, vx, vy, vz, q1, q2, q3, q0, wx, wy, wz = x

    pex, pey, pez = px - pdx, py - pdy, pz - pdz
    vex, vey, vez = vx - vdx, vy - vdy, vz - vdz

    # sliding variable with per-axis effective exponent
    s = [0.0, 0.0, 0.0]
    ex = [1.0, 1.0, 1.0]
    pe = (pex, pey, pez)
    ve = (vex, vey, vez)
    for i in range(3):
        ap = abs(pe[i])
        if ap < eps:
            s[i] = k_st * pe[i] + ve[i]
        else:
            ex[i] = beta_t
            s[i] = k_st * ap**beta_t * (1.0 if pe[i] > 0.0 else -1.0) + ve[i]
    s1, s2, s3 = s

    th1, th2, th3 = math.tanh(s1), math.tanh(s2), math.tanh(s3)
    kb1, kb2, kb3 = ktx + beta, kty + beta, ktz + beta
    fx = adx - kb1 * th1
    fy = ady - kb2 * th2
    fz = adz - kb3 * th3

    ux, uy, uz = -fx, -fy, grav - fz  # g z - F
    a1 = math.sqrt(ux * ux + uy * uy + uz * uz)
    if a1 <= thrust_tol:
        return STATUS_DEGENERATE_THRUST, None
    T = m * a1
    qd0_sq = m / (2.0 * T) * (grav - fz) + 0.5
    if qd0_sq <= q0_tol * q0_tol:
        return STATUS_ATTITUDE_SINGULARITY, None
    qd0 = math.sqrt(qd0_sq)
    den = 2.0 * T * qd0
    qd1 = m * fy / den
    qd2 = -m * fx / den
    qd3 = 0.0

    # error quaternion Qd^-1 * Q (vector-first product)
    qe1 = qd0 * q1 - q0 * qd1 - (qd2 * q3 - qd3 * q2)
    qe2 = qd0 * q2 - q0 * qd2 - (qd3 * q1 - qd1 * q3)
    qe3 = qd0 * q3 - q0 * qd3 - (qd1 * q2 - qd2 * q1)
    qe0 = qd0 * q0 + qd1 * q1 + qd2 * q2 + qd3 * q3
    qn = 1.0 / math.sqrt(qe1 * qe1 + qe2 * qe2 + qe3 * qe3 + qe0 * qe0)
    qe1, qe2, qe3, qe0 = qe1 * qn, qe2 * qn, qe3 * qn, qe0 * qn
    if unwind and qe0 < 0.0:
        qe1, qe2, qe3, qe0 = -qe1, -qe2, -qe3, -qe0
    qb1, qb2, qb3 = qe2, -qe1, -qe0

    R = _rot(q1, q2, q3, q0)
    (r11, r12, r13, r21, r22, r23, r31, r32, r33) = R

    # nominal velocity-error rate: -(2T/m) R^T (qb x qe) + F - A_d
    cx = qb2 * qe3 - qb3 * qe2
    cy = qb3 * qe1 - qb1 * qe3
    cz = qb1 * qe2 - qb2 * qe1
    c2Tm = 2.0 * T / m
    vdnx = -c2Tm * (r11 * cx + r21 * cy + r31 * cz) + fx - adx
    vdny = -c2Tm * (r12 * cx + r22 * cy + r32 * cz) + fy - ady
    vdnz = -c2Tm * (r13 * cx + r23 * cy + r33 * cz) + fz - adz

    # s_dot
    sd = [0.0, 0.0, 0.0]
    vdn = (vdnx, vdny, vdnz)
    for i in range(3):
        if ex[i] == 1.0:
            sd[i] = k_st * ve[i] + vdn[i]
        else:
            sd[i] = beta_t * k_st * abs(pe[i]) ** (beta_t - 1.0) * ve[i] + vdn[i]
    sd1, sd2, sd3 = sd

    D1 = 1.0 - th1 * th1
    D2 = 1.0 - th2 * th2
    D3 = 1.0 - th3 * th3
    fdx = jdx - kb1 * D1 * sd1
    fdy = jdy - kb2 * D2 * sd2
    fdz = jdz - kb3 * D3 * sd3

    phi = _phi(fx, fy, fz, grav)
    if phi is None:
        return STATUS_ATTITUDE_SINGULARITY, None
    omd1 = phi[0] * fdx + phi[1] * fdy + phi[2] * fdz
    omd2 = phi[3] * fdx + phi[4] * fdy + phi[5] * fdz
    omd3 = phi[6] * fdx + phi[7] * fdy + phi[8] * fdz

    # Omega_err = Omega - R(Q_err) Omega_d
    Re = _rot(qe1, qe2, qe3, qe0)
    rod1 = Re[0] * omd1 + Re[1] * omd2 + Re[2] * omd3
    rod2 = Re[3] * omd1 + Re[4] * omd2 + Re[5] * omd3
    rod3 = Re[6] * omd1 + Re[7] * omd2 + Re[8] * omd3
    oex, oey, oez = wx - rod1, wy - rod2, wz - rod3

    # error-quaternion rate 0.5 Xi(Q_err) Omega_err
    qer1 = 0.5 * (qe0 * oex + qe2 * oez - qe3 * oey)
    qer2 = 0.5 * (qe0 * oey + qe3 * oex - qe1 * oez)
    qer3 = 0.5 * (qe0 * oez + qe1 * oey - qe2 * oex)
    qer0 = -0.5 * (qe1 * oex + qe2 * oey + qe3 * oez)
    qbd1, qbd2, qbd3 = qer2, -qer1, -qer0

    u_dot_F = ux * fdx + uy * fdy + uz * fdz
    T_dot = -m * u_dot_F / a1

    # exact derivative of the nominal velocity-error rate
    ocx = wy * cz - wz * cy
    ocy = wz * cx - wx * cz
    ocz = wx * cy - wy * cx
    c1x = qbd2 * qe3 - qbd3 * qe2 + qb2 * qer3 - qb3 * qer2
    c1y = qbd3 * qe1 - qbd1 * qe3 + qb3 * qer1 - qb1 * qer3
    c1z = qbd1 * qe2 - qbd2 * qe1 + qb1 * qer2 - qb2 * qer1
    coef = 2.0 * u_dot_F / a1
    tx = ocx + c1x
    ty = ocy + c1y
    tz = ocz + c1z
    vddnx = fdx - jdx + coef * (r11 * cx + r21 * cy + r31 * cz) - c2Tm * (
        r11 * tx + r21 * ty + r31 * tz
    )
    vddny = fdy - jdy + coef * (r12 * cx + r22 * cy + r32 * cz) - c2Tm * (
        r12 * tx + r22 * ty + r32 * tz
    )
    vddnz = fdz - jdz + coef * (r13 * cx + r23 * cy + r33 * cz) - c2Tm * (
        r13 * tx + r23 * ty + r33 * tz
    )

    # s_ddot
    sdd = [0.0, 0.0, 0.0]
    vddn = (vddnx, vddny, vddnz)
    for i in range(3):
        if ex[i] == 1.0:
            sdd[i] = k_st * vdn[i] + vddn[i]
        else:
            ap = abs(pe[i])
            sg = 1.0 if pe[i] > 0.0 else -1.0
            sdd[i] = (
                k_st
                * beta_t
                * (
                    (beta_t - 1.0) * ap ** (beta_t - 2.0) * sg * ve[i] * ve[i]
                    + ap ** (beta_t - 1.0) * vdn[i]
                )
                + vddn[i]
            )
    sdd1, sdd2, sdd3 = sdd

    Dd1 = -2.0 * th1 * D1 * sd1
    Dd2 = -2.0 * th2 * D2 * sd2
    Dd3 = -2.0 * th3 * D3 * sd3
    fddx = sdx - kb1 * (Dd1 * sd1 + D1 * sdd1)
    fddy = sdy - kb2 * (Dd2 * sd2 + D2 * sdd2)
    fddz = sdz - kb3 * (Dd3 * sd3 + D3 * sdd3)

    # Omega_d_dot = (directional derivative of Phi along F_dot) F_dot + Phi F_ddot
    fn = math.sqrt(fx * fx + fy * fy + fz * fz)
    fdn = math.sqrt(fdx * fdx + fdy * fdy + fdz * fdz)
    h = phi_step * (1.0 + fn) / (1.0 + fdn)
    php = _phi(fx + h * fdx, fy + h * fdy, fz + h * fdz, grav)
    phm = _phi(fx - h * fdx, fy - h * fdy, fz - h * fdz, grav)
    if php is None or phm is None:
        return STATUS_ATTITUDE_SINGULARITY, None
    inv2h = 1.0 / (2.0 * h)
    omdd1 = omdd2 = omdd3 = 0.0
    fd3 = (fdx, fdy, fdz)
    fdd3 = (fddx, fddy, fddz)
    for j in range(3):
        omdd1 += (php[j] - phm[j]) * inv2h * fd3[j] + phi[j] * fdd3[j]
        omdd2 += (php[3 + j] - phm[3 + j]) * inv2h * fd3[j] + phi[3 + j] * fdd3[j]
        omdd3 += (php[6 + j] - phm[6 + j]) * inv2h * fd3[j] + phi[6 + j] * fdd3[j]

    # psi = -k_eta qe + (2T/m) [qb]x^T R s ; [qb]x^T v = v x qb
    Rs1 = r11 * s1 + r12 * s2 + r13 * s3
    Rs2 = r21 * s1 + r22 * s2 + r23 * s3
    Rs3 = r31 * s1 + r32 * s2 + r33 * s3
    psix = -k_eta * qe1 + c2Tm * (Rs2 * qb3 - Rs3 * qb2)
    psiy = -k_eta * qe2 + c2Tm * (Rs3 * qb1 - Rs1 * qb3)
    psiz = -k_eta * qe3 + c2Tm * (Rs1 * qb2 - Rs2 * qb1)
    thx, thy, thz = oex - psix, oey - psiy, oez - psiz

    # psi_dot: exact chain rule (R_dot = -[Omega]x R)
    oRs1 = wy * Rs3 - wz * Rs2
    oRs2 = wz * Rs1 - wx * Rs3
    oRs3 = wx * Rs2 - wy * Rs1
    Rsd1 = r11 * sd1 + r12 * sd2 + r13 * sd3
    Rsd2 = r21 * sd1 + r22 * sd2 + r23 * sd3
    Rsd3 = r31 * sd1 + r32 * sd2 + r33 * sd3
    m2Td = 2.0 * T_dot / m
    psidx = (
        -k_eta * qer1
        + m2Td * (Rs2 * qb3 - Rs3 * qb2)
        + c2Tm * ((Rs2 * qbd3 - Rs3 * qbd2) - (oRs2 * qb3 - oRs3 * qb2) + (Rsd2 * qb3 - Rsd3 * qb2))
    )
    psidy = (
        -k_eta * qer2
        + m2Td * (Rs3 * qb1 - Rs1 * qb3)
        + c2Tm * ((Rs3 * qbd1 - Rs1 * qbd3) - (oRs3 * qb1 - oRs1 * qb3) + (Rsd3 * qb1 - Rsd1 * qb3))
    )
    psidz = (
        -k_eta * qer3
        + m2Td * (Rs1 * qb2 - Rs2 * qb1)
        + c2Tm * ((Rs1 * qbd2 - Rs2 * qbd1) - (oRs1 * qb2 - oRs2 * qb1) + (Rsd1 * qb2 - Rsd2 * qb1))
    )

    # torque
    Jw1 = J[0] * wx + J[1] * wy + J[2] * wz
    Jw2 = J[3] * wx + J[4] * wy + J[5] * wz
    Jw3 = J[6] * wx + J[7] * wy + J[8] * wz
    wJw1 = wy * Jw3 - wz * Jw2
    wJw2 = wz * Jw1 - wx * Jw3
    wJw3 = wx * Jw2 - wy * Jw1
    oxr1 = oey * rod3 - oez * rod2
    oxr2 = oez * rod1 - oex * rod3
    oxr3 = oex * rod2 - oey * rod1
    Redd1 = Re[0] * omdd1 + Re[1] * omdd2 + Re[2] * omdd3
    Redd2 = Re[3] * omdd1 + Re[4] * omdd2 + Re[5] * omdd3
    Redd3 = Re[6] * omdd1 + Re[7] * omdd2 + Re[8] * omdd3
    b1 = -oxr1 + Redd1 + psidx
    b2 = -oxr2 + Redd2 + psidy
    b3 = -oxr3 + Redd3 + psidz
    g1 = wJw1 + J[0] * b1 + J[1] * b2 + J[2] * b3 - k_theta * thx - k_q * qe1
    g2 = wJw2 + J[3] * b1 + J[4] * b2 + J[5] * b3 - k_theta * thy - k_q * qe2
    g3 = wJw3 + J[6] * b1 + J[7] * b2 + J[8] * b3 - k_theta * thz - k_q * qe3

    lyap = k_q * (1.0 - qe0) + 0.5 * (
        thx * (J[0] * thx + J[1] * thy + J[2] * thz)
        + thy * (J[3] * thx + J[4] * thy + J[5] * thz)
        + thz * (J[6] * thx + J[7] * thy + J[8] * thz)
    ) + 0.5 * (s1 * s1 + s2 * s2 + s3 * s3)

    return STATUS_OK, (
        T, g1, g2, g3,
        s1, s2, s3, fx, fy, fz,
        qd1, qd2, qd3, qd0,
        omd1, omd2, omd3,
        thx, thy, thz,
        psix, psiy, psiz,
        qe1, qe2, qe3, qe0,
        oex, oey, oez,
        sd1, sd2, sd3,
        sdd1, sdd2, sdd3,
        fdx, fdy, fdz,
        fddx, fddy, fddz,
        omdd1, omdd2, omdd3,
        psidx, psidy, psidz,
        ex[0], ex[1], ex[2],
        T_dot, lyap,
    )


def _deriv(x, T, g1, g2, g3, t, par, dist):
    m, grav, J, Jinv = par
    px, py, pz, vx, vy, vz, q1, q2, q3, q0, wx, wy, wz = x
    fdx, fdy, fdz = _dist(dist, t)
    R = _rot(q1, q2, q3, q0)
    Tm = T / m
    dvx = -Tm * R[6] + fdx / m
    dvy = -Tm * R[7] + fdy / m
    dvz = -Tm * R[8] + grav + fdz / m
    dq1 = 0.5 * (q0 * wx + q2 * wz - q3 * wy)
    dq2 = 0.5 * (q0 * wy + q3 * wx - q1 * wz)
    dq3 = 0.5 * (q0 * wz + q1 * wy - q2 * wx)
    dq0 = -0.5 * (q1 * wx + q2 * wy + q3 * wz)
    Jw1 = J[0] * wx + J[1] * wy + J[2] * wz
    Jw2 = J[3] * wx + J[4] * wy + J[5] * wz
    Jw3 = J[6] * wx + J[7] * wy + J[8] * wz
    m1 = g1 - (wy * Jw3 - wz * Jw2)
    m2 = g2 - (wz * Jw1 - wx * Jw3)
    m3 = g3 - (wx * Jw2 - wy * Jw1)
    dwx = Jinv[0] * m1 + Jinv[1] * m2 + Jinv[2] * m3
    dwy = Jinv[3] * m1 + Jinv[4] * m2 + Jinv[5] * m3
    dwz = Jinv[6] * m1 + Jinv[7] * m2 + Jinv[8] * m3
    return (vx, vy, vz, dvx, dvy, dvz, dq1, dq2, dq3, dq0, dwx, dwy, dwz)


def _rk4(x, T, g1, g2, g3, t, h, par, dist):
    k1 = _deriv(x, T, g1, g2, g3, t, par, dist)
    x2 = tuple(x[i] + 0.5 * h * k1[i] for i in range(13))
    k2 = _deriv(x2, T, g1, g2, g3, t + 0.5 * h, par, dist)
    x3 = tuple(x[i] + 0.5 * h * k2[i] for i in range(13))
    k3 = _deriv(x3, T, g1, g2, g3, t + 0.5 * h, par, dist)
    x4 = tuple(x[i] + h * k3[i] for i in range(13))
    k4 = _deriv(x4, T, g1, g2, g3, t + h, par, dist)
    c = h / 6.0
    xn = [x[i] + c * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) for i in range(13)]
    qn = 1.0 / math.sqrt(xn[6] ** 2 + xn[7] ** 2 + xn[8] ** 2 + xn[9] ** 2)
    xn[6] *= qn
    xn[7] *= qn
    xn[8] *= qn
    xn[9] *= qn
    return tuple(xn)


def run_loop(x0, ref_table, gains, par, dist, dt, substeps, out):
    """Fill the (n+1, NCOLS) trace array; returns (status, fail_row)."""
    n = out.shape[0] - 1
    x = tuple(float(v) for v in x0)
    isfinite = math.isfinite
    for k in range(n + 1):
        t = k * dt
        ref = ref_table[k]
        status, c = _control(t, x, ref, gains, par)
        if status != STATUS_OK:
            return status, k
        fdx, fdy, fdz = _dist(dist, t)
        row = out[k]
        row[0] = t
        row[1:14] = x
        row[14:29] = ref
        row[29] = fdx
        row[30] = fdy
        row[31] = fdz
        row[32:85] = c
        if k == n:
            break
        h = dt / substeps
        for j in range(substeps):
            x = _rk4(x, c[0], c[1], c[2], c[3], t + j * h, h, par, dist)
        for v in x:
            if not isfinite(v):
                return STATUS_NONFINITE, k + 1
    return STATUS_OK, n
