# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels. Same call signatures as ``_pykernels``."""

import numpy as np
from libc.math cimport sqrt, fabs, M_PI

cdef double GL_X[5]
cdef double GL_W[5]
_gx, _gw = np.polynomial.legendre.leggauss(5)
for _i in range(5):
    GL_X[_i] = 0.5 * (_gx[_i] + 1.0)
    GL_W[_i] = 0.5 * _gw[_i]


cdef inline void _velocity(const double[:, ::1] r, double sx, double sy, double sz,
                           double nu, double[:, ::1] out) noexcept nogil:
    cdef Py_ssize_t n = r.shape[0], j, jp, jm
    cdef double ax, ay, az, bx, by, bz, hp, hm, den
    cdef double d1x, d1y, d1z, d2x, d2y, d2z
    cdef double ox, oy, oz
    for j in range(n):
        jp = j + 1
        jm = j - 1
        ox = 0.0; oy = 0.0; oz = 0.0
        if jp == n:
            jp = 0
            ox = sx; oy = sy; oz = sz
        ax = r[jp, 0] + ox - r[j, 0]
        ay = r[jp, 1] + oy - r[j, 1]
        az = r[jp, 2] + oz - r[j, 2]
        ox = 0.0; oy = 0.0; oz = 0.0
        if jm < 0:
            jm = n - 1
            ox = sx; oy = sy; oz = sz
        bx = r[j, 0] - r[jm, 0] + ox
        by = r[j, 1] - r[jm, 1] + oy
        bz = r[j, 2] - r[jm, 2] + oz
        hp = sqrt(ax * ax + ay * ay + az * az)
        hm = sqrt(bx * bx + by * by + bz * bz)
        den = hp * hm * (hp + hm)
        d1x = (hm * hm * ax + hp * hp * bx) / den
        d1y = (hm * hm * ay + hp * hp * by) / den
        d1z = (hm * hm * az + hp * hp * bz) / den
        d2x = 2.0 * (hm * ax - hp * bx) / den
        d2y = 2.0 * (hm * ay - hp * by) / den
        d2z = 2.0 * (hm * az - hp * bz) / den
        out[j, 0] = nu * (d1y * d2z - d1z * d2y)
        out[j, 1] = nu * (d1z * d2x - d1x * d2z)
        out[j, 2] = nu * (d1x * d2y - d1y * d2x)


def lia_velocity(r, shift, double nu):
    cdef double[:, ::1] rv = np.ascontiguousarray(r, dtype=np.float64)
    out = np.empty((rv.shape[0], 3))
    cdef double[:, ::1] ov = out
    _velocity(rv, shift[0], shift[1], shift[2], nu, ov)
    return out


def lia_rk4(r, shift, double nu, double dt):
    cdef double[:, ::1] r0 = np.ascontiguousarray(r, dtype=np.float64)
    cdef Py_ssize_t n = r0.shape[0], j, c
    cdef double sx = shift[0], sy = shift[1], sz = shift[2]
    k = np.empty((4, n, 3))
    tmp = np.empty((n, 3))
    out = np.empty((n, 3))
    cdef double[:, :, ::1] kv = k
    cdef double[:, ::1] tv = tmp
    cdef double[:, ::1] ov = out
    with nogil:
        _velocity(r0, sx, sy, sz, nu, kv[0])
        for j in range(n):
            for c in range(3):
                tv[j, c] = r0[j, c] + 0.5 * dt * kv[0, j, c]
        _velocity(tv, sx, sy, sz, nu, kv[1])
        for j in range(n):
            for c in range(3):
                tv[j, c] = r0[j, c] + 0.5 * dt * kv[1, j, c]
        _velocity(tv, sx, sy, sz, nu, kv[2])
        for j in range(n):
            for c in range(3):
                tv[j, c] = r0[j, c] + dt * kv[2, j, c]
        _velocity(tv, sx, sy, sz, nu, kv[3])
        for j in range(n):
            for c in range(3):
                ov[j, c] = r0[j, c] + (dt / 6.0) * (
                    kv[0, j, c] + 2.0 * kv[1, j, c] + 2.0 * kv[2, j, c] + kv[3, j, c])
    return out


cdef void _cyclic_real(double[::1] a, double[::1] b, double[::1] c,
                       double alpha, double beta, double[:, ::1] rhs,
                       double[:, ::1] x):
    # a: sub, b: diag, c: super; alpha = A[n-1, 0], beta = A[0, n-1]
    # rhs/x have shape (n, m); solves all columns at once
    cdef Py_ssize_t n = b.shape[0], m = rhs.shape[1], i, col
    cdef double gamma = -b[0]
    cdef double bet, fact
    cdef double[::1] gam = np.empty(n)
    cdef double[::1] z = np.empty(n)
    cdef double[::1] u = np.zeros(n)
    cdef double[::1] bb = np.empty(n)
    for i in range(n):
        bb[i] = b[i]
    bb[0] = b[0] - gamma
    bb[n - 1] = b[n - 1] - alpha * beta / gamma
    u[0] = gamma
    u[n - 1] = alpha
    # factor once: gam holds the Thomas multipliers
    bet = bb[0]
    z[0] = u[0] / bet
    for col in range(m):
        x[0, col] = rhs[0, col] / bet
    for i in range(1, n):
        gam[i] = c[i - 1] / bet
        bet = bb[i] - a[i] * gam[i]
        z[i] = (u[i] - a[i] * z[i - 1]) / bet
        for col in range(m):
            x[i, col] = (rhs[i, col] - a[i] * x[i - 1, col]) / bet
    for i in range(n - 2, -1, -1):
        z[i] -= gam[i + 1] * z[i + 1]
        for col in range(m):
            x[i, col] -= gam[i + 1] * x[i + 1, col]
    for col in range(m):
        fact = (x[0, col] + beta * x[n - 1, col] / gamma) / (1.0 + z[0] + beta * z[n - 1] / gamma)
        for i in range(n):
            x[i, col] -= fact * z[i]


def cyclic_tridiag_solve(sub, diag, sup, rhs):
    """Constant-coefficient cyclic tridiagonal solve (real or complex)."""
    if np.iscomplexobj(rhs) or np.iscomplexobj(np.asarray([sub, diag, sup])):
        return _cyclic_const_complex(complex(sub), complex(diag), complex(sup),
                                     np.ascontiguousarray(rhs, dtype=np.complex128))
    n = rhs.shape[0]
    r2 = np.ascontiguousarray(np.asarray(rhs, dtype=np.float64).reshape(n, -1))
    x = np.empty_like(r2)
    _cyclic_real(np.full(n, float(sub)), np.full(n, float(diag)), np.full(n, float(sup)),
                 float(sup), float(sub), r2, x)
    return x.reshape(rhs.shape)


cdef object _cyclic_const_complex(double complex sub, double complex diag,
                                  double complex sup, double complex[::1] rhs):
    cdef Py_ssize_t n = rhs.shape[0], i
    cdef double complex gamma = -diag, bet, fact
    out = np.empty(n, dtype=np.complex128)
    cdef double complex[::1] x = out
    cdef double complex[::1] z = np.empty(n, dtype=np.complex128)
    cdef double complex[::1] gam = np.empty(n, dtype=np.complex128)
    cdef double complex[::1] bb = np.empty(n, dtype=np.complex128)
    cdef double complex[::1] u = np.zeros(n, dtype=np.complex128)
    with nogil:
        for i in range(n):
            bb[i] = diag
        bb[0] = diag - gamma
        bb[n - 1] = diag - sup * sub / gamma
        u[0] = gamma
        u[n - 1] = sup
        bet = bb[0]
        x[0] = rhs[0] / bet
        z[0] = u[0] / bet
        for i in range(1, n):
            gam[i] = sup / bet
            bet = bb[i] - sub * gam[i]
            x[i] = (rhs[i] - sub * x[i - 1]) / bet
            z[i] = (u[i] - sub * z[i - 1]) / bet
        for i in range(n - 2, -1, -1):
            x[i] -= gam[i + 1] * x[i + 1]
            z[i] -= gam[i + 1] * z[i + 1]
        fact = (x[0] + sub * x[n - 1] / gamma) / (1.0 + z[0] + sub * z[n - 1] / gamma)
        for i in range(n):
            x[i] -= fact * z[i]
    return out


def cn_schrodinger_step(phi, double alpha):
    cdef double complex[::1] p = np.ascontiguousarray(phi, dtype=np.complex128)
    cdef Py_ssize_t n = p.shape[0], j
    rhs = np.empty(n, dtype=np.complex128)
    cdef double complex[::1] rv = rhs
    cdef double complex ia = 1j * alpha
    for j in range(n):
        rv[j] = p[j] + ia * (p[(j + 1) % n] - 2.0 * p[j] + p[(j + n - 1) % n])
    return _cyclic_const_complex(-ia, 1.0 + 2.0 * ia, -ia, rv)


def leapfrog_step(cur, prev, double courant2, double mass2):
    cdef double complex[::1] c = np.ascontiguousarray(cur, dtype=np.complex128)
    cdef double complex[::1] p = np.ascontiguousarray(prev, dtype=np.complex128)
    cdef Py_ssize_t n = c.shape[0], j
    out = np.empty(n, dtype=np.complex128)
    cdef double complex[::1] o = out
    with nogil:
        for j in range(n):
            o[j] = (2.0 * c[j] - p[j]
                    + courant2 * (c[(j + 1) % n] - 2.0 * c[j] + c[(j + n - 1) % n])
                    - mass2 * c[j])
    return out


cdef class _Spline:
    # periodic cubic spline of q(u) = r(u) - shift * u / U, plus the linear drift;
    # on interval j: r(u_j + t) = c0 + c1 t + c2 t^2 + c3 t^3
    cdef double[::1] u
    cdef double[:, ::1] c0, c1, c2, c3
    cdef Py_ssize_t n

    def __init__(self, r, shift):
        cdef double[:, ::1] rv = np.ascontiguousarray(r, dtype=np.float64)
        cdef Py_ssize_t n = rv.shape[0], j, jp, c
        cdef double sv[3]
        cdef double drift[3]
        cdef double e[3]
        cdef double period, hm, hp, h, slope
        sv[0] = shift[0]; sv[1] = shift[1]; sv[2] = shift[2]
        self.n = n
        self.u = np.empty(n + 1)
        q_arr = np.empty((n + 1, 3))
        cdef double[:, ::1] q = q_arr
        self.u[0] = 0.0
        for j in range(n):
            jp = j + 1
            for c in range(3):
                if jp == n:
                    e[c] = rv[0, c] + sv[c] - rv[j, c]
                else:
                    e[c] = rv[jp, c] - rv[j, c]
            self.u[jp] = self.u[j] + sqrt(e[0] * e[0] + e[1] * e[1] + e[2] * e[2])
        period = self.u[n]
        for c in range(3):
            drift[c] = sv[c] / period
        for j in range(n):
            for c in range(3):
                q[j, c] = rv[j, c] - drift[c] * self.u[j]
        for c in range(3):
            q[n, c] = q[0, c]
        # h_{j-1} M_{j-1} + 2 (h_{j-1} + h_j) M_j + h_j M_{j+1} = 6 (slope_j - slope_{j-1})
        a_arr = np.empty(n)
        b_arr = np.empty(n)
        c_arr = np.empty(n)
        rhs = np.empty((n, 3))
        cdef double[::1] av = a_arr, bv = b_arr, cv = c_arr
        cdef double[:, ::1] rh = rhs
        for j in range(n):
            hp = self.u[j + 1] - self.u[j]
            if j == 0:
                hm = self.u[n] - self.u[n - 1]
            else:
                hm = self.u[j] - self.u[j - 1]
            av[j] = hm
            bv[j] = 2.0 * (hm + hp)
            cv[j] = hp
            for c in range(3):
                if j == 0:
                    rh[j, c] = 6.0 * ((q[1, c] - q[0, c]) / hp - (q[n, c] - q[n - 1, c]) / hm)
                else:
                    rh[j, c] = 6.0 * ((q[j + 1, c] - q[j, c]) / hp - (q[j, c] - q[j - 1, c]) / hm)
        m_arr = np.empty((n, 3))
        cdef double[:, ::1] m = m_arr
        _cyclic_real(av, bv, cv, cv[n - 1], av[0], rh, m)
        self.c0 = np.empty((n, 3))
        self.c1 = np.empty((n, 3))
        self.c2 = np.empty((n, 3))
        self.c3 = np.empty((n, 3))
        for j in range(n):
            jp = j + 1 if j + 1 < n else 0
            h = self.u[j + 1] - self.u[j]
            for c in range(3):
                slope = (q[j + 1, c] - q[j, c]) / h
                self.c0[j, c] = q[j, c] + drift[c] * self.u[j]
                self.c1[j, c] = slope - h * (2.0 * m[j, c] + m[jp, c]) / 6.0 + drift[c]
                self.c2[j, c] = 0.5 * m[j, c]
                self.c3[j, c] = (m[jp, c] - m[j, c]) / (6.0 * h)

    cdef inline double speed(self, Py_ssize_t j, double t) noexcept nogil:
        cdef double d0 = self.c1[j, 0] + t * (2.0 * self.c2[j, 0] + 3.0 * self.c3[j, 0] * t)
        cdef double d1 = self.c1[j, 1] + t * (2.0 * self.c2[j, 1] + 3.0 * self.c3[j, 1] * t)
        cdef double d2 = self.c1[j, 2] + t * (2.0 * self.c2[j, 2] + 3.0 * self.c3[j, 2] * t)
        return sqrt(d0 * d0 + d1 * d1 + d2 * d2)

    cdef inline double partial_length(self, Py_ssize_t j, double t) noexcept nogil:
        cdef double acc = 0.0
        cdef int g
        for g in range(5):
            acc += GL_W[g] * self.speed(j, GL_X[g] * t)
        return acc * t

    cdef void arclength(self, double[::1] s) noexcept nogil:
        cdef Py_ssize_t j
        s[0] = 0.0
        for j in range(self.n):
            s[j + 1] = s[j] + self.partial_length(j, self.u[j + 1] - self.u[j])


def spline_arclength(r, shift):
    cdef _Spline sp = _Spline(r, shift)
    s = np.empty(sp.n + 1)
    sp.arclength(s)
    return s


def resample(r, shift, double tol=1e-15, int maxiter=50):
    cdef _Spline sp = _Spline(r, shift)
    cdef Py_ssize_t n = sp.n, i, j, it, c
    s_arr = np.empty(n + 1)
    cdef double[::1] s = s_arr
    sp.arclength(s)
    cdef double total = s[n], target, rem, t, t_new, h, f
    out = np.empty((n, 3))
    cdef double[:, ::1] ov = out
    cdef double[:, ::1] rv = np.ascontiguousarray(r, dtype=np.float64)
    with nogil:
        j = 0
        for i in range(n):
            target = total * i / n
            while j < n - 1 and s[j + 1] <= target:
                j += 1
            rem = target - s[j]
            h = sp.u[j + 1] - sp.u[j]
            t = rem / (s[j + 1] - s[j]) * h
            for it in range(maxiter):
                f = sp.partial_length(j, t) - rem
                t_new = t - f / sp.speed(j, t)
                if t_new < 0.0:
                    t_new = 0.0
                elif t_new > h:
                    t_new = h
                if fabs(t_new - t) <= tol * total:
                    t = t_new
                    break
                t = t_new
            for c in range(3):
                ov[i, c] = sp.c0[j, c] + t * (sp.c1[j, c] + t * (sp.c2[j, c] + t * sp.c3[j, c]))
        for c in range(3):
            ov[0, c] = rv[0, c]
    return out, total


def biot_savart(points, mids, dvecs, shift, int n_images, double gamma):
    cdef double[:, ::1] p = np.ascontiguousarray(np.atleast_2d(points), dtype=np.float64)
    cdef double[:, ::1] mv = np.ascontiguousarray(mids, dtype=np.float64)
    cdef double[:, ::1] dv = np.ascontiguousarray(dvecs, dtype=np.float64)
    cdef double sx = shift[0], sy = shift[1], sz = shift[2]
    cdef Py_ssize_t npts = p.shape[0], nseg = mv.shape[0], i, j
    cdef int k
    cdef double ux, uy, uz, ix, iy, iz, ex, ey, ez, r2, inv3, pref
    out = np.empty((npts, 3))
    cdef double[:, ::1] ov = out
    pref = gamma / (4.0 * M_PI)
    with nogil:
        for i in range(npts):
            ux = 0.0; uy = 0.0; uz = 0.0
            for k in range(-n_images, n_images + 1):
                ix = 0.0; iy = 0.0; iz = 0.0
                for j in range(nseg):
                    ex = p[i, 0] - mv[j, 0] - k * sx
                    ey = p[i, 1] - mv[j, 1] - k * sy
                    ez = p[i, 2] - mv[j, 2] - k * sz
                    r2 = ex * ex + ey * ey + ez * ez
                    inv3 = 1.0 / (r2 * sqrt(r2))
                    ix += (dv[j, 1] * ez - dv[j, 2] * ey) * inv3
                    iy += (dv[j, 2] * ex - dv[j, 0] * ez) * inv3
                    iz += (dv[j, 0] * ey - dv[j, 1] * ex) * inv3
                ux += ix; uy += iy; uz += iz
            ov[i, 0] = pref * ux
            ov[i, 1] = pref * uy
            ov[i, 2] = pref * uz
    return out
