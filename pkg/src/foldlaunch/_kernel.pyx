# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled rigid-body kernel. Mirrors ``_kernel_py`` expression for expression."""
from libc.math cimport sqrt, fabs

cdef enum:
    NSTATE = 13
    NPARAM = 27


cdef void _deriv(const double* y, const double* p, double* dy, double* sf) noexcept nogil:
    cdef double qw = y[6], qx = y[7], qy = y[8], qz = y[9]
    cdef double wx = y[10], wy = y[11], wz = y[12]
    cdef double m = p[0], ixx = p[1], izz = p[2], g = p[3], rho = p[4]
    cdef double r00, r01, r02, r10, r11, r12, r20, r21, r22
    cdef double fx, fy, fz, tx, ty, tz
    cdef double ux, uy, uz, bx, by, bz
    cdef double length, diam, vol, a_front, a_side, a_fin, cd_front, cla, cd_side, cd_axial
    cdef double shift, cm, va, ava, arm_tail, arm_mid, vn, nx, ny
    cdef double f_base, f_fin, f_side, normal, munk, pitch, cq

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
        ux = y[3] - p[5]
        uy = y[4] - p[6]
        uz = y[5] - p[7]
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
        ava = fabs(va)
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

    dy[0] = y[3]
    dy[1] = y[4]
    dy[2] = y[5]
    dy[3] = (r00 * fx + r01 * fy + r02 * fz) / m
    dy[4] = (r10 * fx + r11 * fy + r12 * fz) / m
    dy[5] = (r20 * fx + r21 * fy + r22 * fz) / m - g
    dy[6] = 0.5 * (-qx * wx - qy * wy - qz * wz)
    dy[7] = 0.5 * (qw * wx + qy * wz - qz * wy)
    dy[8] = 0.5 * (qw * wy - qx * wz + qz * wx)
    dy[9] = 0.5 * (qw * wz + qx * wy - qy * wx)
    dy[10] = (tx - (izz - ixx) * wy * wz) / ixx
    dy[11] = (ty - (ixx - izz) * wz * wx) / ixx
    dy[12] = tz / izz
    sf[0] = fx / m
    sf[1] = fy / m
    sf[2] = fz / m


cdef void _rk4(double* y, const double* p, double dt) noexcept nogil:
    cdef double k1[NSTATE]
    cdef double k2[NSTATE]
    cdef double k3[NSTATE]
    cdef double k4[NSTATE]
    cdef double tmp[NSTATE]
    cdef double sf[3]
    cdef int i
    cdef double n
    _deriv(y, p, k1, sf)
    for i in range(NSTATE):
        tmp[i] = y[i] + 0.5 * dt * k1[i]
    _deriv(tmp, p, k2, sf)
    for i in range(NSTATE):
        tmp[i] = y[i] + 0.5 * dt * k2[i]
    _deriv(tmp, p, k3, sf)
    for i in range(NSTATE):
        tmp[i] = y[i] + dt * k3[i]
    _deriv(tmp, p, k4, sf)
    for i in range(NSTATE):
        y[i] = y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
    n = sqrt(y[6] * y[6] + y[7] * y[7] + y[8] * y[8] + y[9] * y[9])
    for i in range(6, 10):
        y[i] = y[i] / n


cdef inline void _load(object seq, double* out, int n) except *:
    cdef int i
    if len(seq) != n:
        raise ValueError(f"expected {n} values, got {len(seq)}")
    for i in range(n):
        out[i] = seq[i]


def derivative(y, p):
    cdef double ys[NSTATE]
    cdef double ps[NPARAM]
    cdef double dy[NSTATE]
    cdef double sf[3]
    _load(y, ys, NSTATE)
    _load(p, ps, NPARAM)
    _deriv(ys, ps, dy, sf)
    return [dy[i] for i in range(NSTATE)]


def specific_force(y, p):
    cdef double ys[NSTATE]
    cdef double ps[NPARAM]
    cdef double dy[NSTATE]
    cdef double sf[3]
    _load(y, ys, NSTATE)
    _load(p, ps, NPARAM)
    _deriv(ys, ps, dy, sf)
    return [sf[0], sf[1], sf[2]]


def rk4_step(y, p, double dt):
    cdef double ys[NSTATE]
    cdef double ps[NPARAM]
    _load(y, ys, NSTATE)
    _load(p, ps, NPARAM)
    _rk4(ys, ps, dt)
    return [ys[i] for i in range(NSTATE)]


def rk4_run(y, p, double dt, long n):
    cdef double ys[NSTATE]
    cdef double ps[NPARAM]
    cdef long k
    _load(y, ys, NSTATE)
    _load(p, ps, NPARAM)
    with nogil:
        for k in range(n):
            _rk4(ys, ps, dt)
    return [ys[i] for i in range(NSTATE)]
