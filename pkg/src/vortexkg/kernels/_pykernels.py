"""NumPy/SciPy implementations of the hot kernels.

These are the fallback used when the compiled extension is unavailable, and
the reference the compiled kernels are tested against.
"""

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.linalg import solve_banded

# 5-point Gauss-Legendre rule on [0, 1]
_GL_X, _GL_W = np.polynomial.legendre.leggauss(5)
_GL_X = 0.5 * (_GL_X + 1.0)
_GL_W = 0.5 * _GL_W


def _neighbours(r, shift):
    rp = np.roll(r, -1, axis=0)
    rm = np.roll(r, 1, axis=0)
    rp[-1] += shift
    rm[0] -= shift
    return rp, rm


def curve_derivatives(r, shift):
    """Non-uniform three-point first and second derivatives in chord length."""
    rp, rm = _neighbours(r, shift)
    a = rp - r
    b = r - rm
    hp = np.linalg.norm(a, axis=1)[:, None]
    hm = np.linalg.norm(b, axis=1)[:, None]
    den = hp * hm * (hp + hm)
    d1 = (hm**2 * a + hp**2 * b) / den
    d2 = 2.0 * (hm * a - hp * b) / den
    return d1, d2, hp[:, 0], hm[:, 0]


def lia_velocity(r, shift, nu):
    d1, d2, _, _ = curve_derivatives(r, shift)
    return nu * np.cross(d1, d2)


def lia_rk4(r, shift, nu, dt):
    k1 = lia_velocity(r, shift, nu)
    k2 = lia_velocity(r + 0.5 * dt * k1, shift, nu)
    k3 = lia_velocity(r + 0.5 * dt * k2, shift, nu)
    k4 = lia_velocity(r + dt * k3, shift, nu)
    return r + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _spline(r, shift):
    n = r.shape[0]
    closed = np.vstack([r, r[:1] + shift])
    u = np.concatenate([[0.0], np.cumsum(np.linalg.norm(np.diff(closed, axis=0), axis=1))])
    period = u[-1]
    q = closed - np.outer(u / period, shift)
    q[-1] = q[0]
    spl = CubicSpline(u, q, bc_type="periodic")
    drift = shift / period
    return spl, drift, u, n


def _speed(spl, drift, u):
    return np.linalg.norm(spl(u, 1) + drift, axis=-1)


def spline_arclength(r, shift):
    """Cumulative arclength of the periodic interpolating spline at the nodes."""
    spl, drift, u, n = _spline(r, shift)
    h = np.diff(u)
    pts = u[:-1, None] + h[:, None] * _GL_X[None, :]
    seg = h * (_speed(spl, drift, pts) @ _GL_W)
    return np.concatenate([[0.0], np.cumsum(seg)])


def resample(r, shift, tol=1e-15, maxiter=50):
    """Redistribute nodes at equal spline arclength, keeping node 0 fixed."""
    spl, drift, u, n = _spline(r, shift)
    h = np.diff(u)
    pts = u[:-1, None] + h[:, None] * _GL_X[None, :]
    seg = h * (_speed(spl, drift, pts) @ _GL_W)
    s = np.concatenate([[0.0], np.cumsum(seg)])
    total = s[-1]
    target = total * np.arange(n) / n
    idx = np.clip(np.searchsorted(s, target, side="right") - 1, 0, n - 1)
    rem = target - s[idx]
    t = rem / seg[idx] * h[idx]
    for _ in range(maxiter):
        part = t[:, None] * _GL_X[None, :] + u[idx][:, None]
        f = t * (_speed(spl, drift, part) @ _GL_W) - rem
        t_new = np.clip(t - f / _speed(spl, drift, u[idx] + t), 0.0, h[idx])
        done = np.max(np.abs(t_new - t)) <= tol * total
        t = t_new
        if done:
            break
    uu = u[idx] + t
    out = spl(uu) + np.outer(uu, drift)
    out[0] = r[0]
    return out, total


def cyclic_tridiag_solve(sub, diag, sup, rhs):
    """Solve a cyclic tridiagonal system with constant coefficients.

    Row j reads sub*x[j-1] + diag*x[j] + sup*x[j+1] = rhs[j] with periodic
    indices. ``rhs`` has shape (n,) or (n, m). Uses Sherman-Morrison on top of
    a banded solve.
    """
    n = rhs.shape[0]
    dtype = np.result_type(sub, diag, sup, rhs)
    gamma = -diag
    bb = np.full(n, diag, dtype=dtype)
    bb[0] = diag - gamma
    bb[-1] = diag - sup * sub / gamma
    ab = np.zeros((3, n), dtype=dtype)
    ab[0, 1:] = sup
    ab[1] = bb
    ab[2, :-1] = sub
    u = np.zeros(n, dtype=dtype)
    u[0] = gamma
    u[-1] = sup
    x = solve_banded((1, 1), ab, rhs.astype(dtype))
    z = solve_banded((1, 1), ab, u)
    fact = (x[0] + sub * x[-1] / gamma) / (1.0 + z[0] + sub * z[-1] / gamma)
    # rhs may carry several columns, shape (n, m)
    return x - np.multiply.outer(z, fact)


def cn_schrodinger_step(phi, alpha):
    """One Crank-Nicolson step of phi_t = i nu phi_xx, alpha = nu dt / (2 dx^2)."""
    lap = np.roll(phi, -1) - 2.0 * phi + np.roll(phi, 1)
    rhs = phi + 1j * alpha * lap
    return cyclic_tridiag_solve(-1j * alpha, 1.0 + 2j * alpha, -1j * alpha, rhs)


def leapfrog_step(cur, prev, courant2, mass2):
    """phi^{n+1} = 2 phi^n - phi^{n-1} + (c dt/dx)^2 D2 phi^n - (mu dt)^2 phi^n."""
    lap = np.roll(cur, -1) - 2.0 * cur + np.roll(cur, 1)
    return 2.0 * cur - prev + courant2 * lap - mass2 * cur


def biot_savart(points, mids, dvecs, shift, n_images, gamma):
    """(gamma/4pi) sum over segments and image copies of dr x s / |s|^3."""
    points = np.atleast_2d(points)
    out = np.zeros_like(points, dtype=float)
    offsets = np.arange(-n_images, n_images + 1)[:, None] * shift[None, :]
    for p_i, p in enumerate(points):
        acc = np.zeros(3)
        # chunk images to bound memory
        for start in range(0, offsets.shape[0], 256):
            off = offsets[start:start + 256]
            s = p[None, None, :] - (mids[None, :, :] + off[:, None, :])
            s3 = np.sum(s * s, axis=-1) ** 1.5
            cr = np.cross(np.broadcast_to(dvecs, s.shape), s)
            acc += np.sum(cr / s3[..., None], axis=(0, 1))
        out[p_i] = acc
    return gamma / (4.0 * np.pi) * out
