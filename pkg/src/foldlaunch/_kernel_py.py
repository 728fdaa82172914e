"""Pure-Python rigid-body kernel (fallback for the compiled ``_kernel``).

State layout (13): px py pz vx vy vz qw qx qy qz wx wy wz, world frame z-up,
body rates in the forward-left-up body frame.

Parameter layout: see ``foldlaunch.kernels.PARAM_NAMES``. Both backends
evaluate the same expressions in the same order.
"""
from math import sqrt

NPARAM = 27


def _deriv(y, p):
    (px, py, pz, vx, vy, vz, qw, qx, qy, qz, wx, wy, wz) = y
    m = p[0]
    ixx = p[1]
    izz = p[2]
    g = p[3]
    rho = p[4]

    r00 = 1.0 - 2.0 * (qy * qy + qz * qz)
    r01 = 2.0 * (qx * qy - qw * qz)
    r02 = 2.0 * (qx * qz + qw * qy)
    r10 = 2.0 * (qx * qy + qw * qz)
    r11 = 1.0 - 2.0 * (qx * qx + qz * qz)
    r12 = 2.0 * (qy * qz - qw * qx)
    r20 = 2.0 * (qx * qz - qw * qy)
    r21 = 2.0 * (qy * qz + qw * qx)
    r22 = 1.0 - 2.0 * (qx * qx + qy * qy)

    fx = p[21]
    fy = p[22]
    fz = p[23]
    tx = p[24]
    ty = p[25]
    tz = p[26]

    if p[8] != 0.0:
        ux = vx - p[5]
        uy = vy - p[6]
        uz = vz - p[7]
        bx = r00 * ux + r10 * uy + r20 * uz
        by = r01 * ux + r11 * uy + r21 * uz
        bz = r02 * ux + r12 * uy + r22 * uz
        length = p[9]
        diam = p[10]
        vol = p[11]
        a_front = p[12]
        a_side = p[13]
        a_fin = p[14]
        cd_front = p[15]
        cla = p[16]
        cd_side = p[17]
        cd_axial = p[18]
        shift = p[19]
        cm = p[20]
        va = bz
        ava = abs(va)
        arm_tail = length - shift - cm
        arm_mid = 0.5 * length - shift - cm
        fz -= 0.5 * rho * va * ava * a_front * cd_axial
        vn = sqrt(bx * bx + by * by)
        if vn > 0.0:
            nx = bx / vn
            ny = by / vn
            f_base = rho * ava * vn * a_front * cd_front
            f_fin = 0.5 * rho * ava * vn * a_fin * cla
            f_side = 0.5 * rho * vn * vn * a_side * cd_side
            normal = f_base + f_fin + f_side
            fx -= normal * nx
            fy -= normal * ny
            munk = rho * ava * vn * vol * (1.0 - diam / length)
            pitch = munk - (f_base + f_fin) * arm_tail - f_side * arm_mid
            tx += pitch * ny
            ty -= pitch * nx
        cq = 0.5 * rho * ava * a_fin * cla * arm_tail * arm_tail
        tx -= cq * wx
        ty -= cq * wy

    ax = (r00 * fx + r01 * fy + r02 * fz) / m
    ay = (r10 * fx + r11 * fy + r12 * fz) / m
    az = (r20 * fx + r21 * fy + r22 * fz) / m - g

    dqw = 0.5 * (-qx * wx - qy * wy - qz * wz)
    dqx = 0.5 * (qw * wx + qy * wz - qz * wy)
    dqy = 0.5 * (qw * wy - qx * wz + qz * wx)
    dqz = 0.5 * (qw * wz + qx * wy - qy * wx)

    dwx = (tx - (izz - ixx) * wy * wz) / ixx
    dwy = (ty - (ixx - izz) * wz * wx) / ixx
    dwz = tz / izz

    return (vx, vy, vz, ax, ay, az, dqw, dqx, dqy, dqz, dwx, dwy, dwz), (fx / m, fy / m, fz / m)


def derivative(y, p):
    return list(_deriv(y, p)[0])


def specific_force(y, p):
    """Non-gravitational acceleration in body axes (what an IMU senses)."""
    return list(_deriv(y, p)[1])


def rk4_step(y, p, dt):
    y = [float(v) for v in y]
    k1 = _deriv(y, p)[0]
    y2 = [y[i] + 0.5 * dt * k1[i] for i in range(13)]
    k2 = _deriv(y2, p)[0]
    y3 = [y[i] + 0.5 * dt * k2[i] for i in range(13)]
    k3 = _deriv(y3, p)[0]
    y4 = [y[i] + dt * k3[i] for i in range(13)]
    k4 = _deriv(y4, p)[0]
    out = [y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) for i in range(13)]
    n = sqrt(out[6] * out[6] + out[7] * out[7] + out[8] * out[8] + out[9] * out[9])
    for i in range(6, 10):
        out[i] = out[i] / n
    return out


def rk4_run(y, p, dt, n):
    """``n`` consecutive fixed steps with constant parameters."""
    for _ in range(n):
        y = rk4_step(y, p, dt)
    return y
