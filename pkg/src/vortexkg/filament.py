"""Discrete 3D vortex filaments under the local induction approximation.

A filament is an ordered array of nodes. The default topology is x-periodic:
node ``n`` is node ``0`` shifted by ``(period, 0, 0)``, which represents the
infinite filament running along i1. A closed loop (zero shift) is available as
a test fixture and an open polyline for induction sums only.

The self-induced motion is dr/dt = nu * r_l x r_ll, with l the arclength.
"""

from dataclasses import dataclass
import math

import numpy as np

from . import kernels
from .fields import Clock
from .model import HelixSpec, check_commensurate

TOPOLOGIES = ("periodic", "closed", "open")


class Curve3D:
    """Ordered filament nodes with topology metadata and a time stamp."""

    __slots__ = ("nodes", "period", "topology", "clock")

    def __init__(self, nodes, period=0.0, topology="periodic", t=0.0, clock=None):
        nodes = np.array(nodes, dtype=np.float64)
        if nodes.ndim != 2 or nodes.shape[1] != 3:
            raise ValueError(f"nodes must have shape (n, 3), got {nodes.shape}")
        if topology not in TOPOLOGIES:
            raise ValueError(f"unknown topology {topology!r}")
        min_nodes = 2 if topology == "open" else 8
        if nodes.shape[0] < min_nodes:
            raise ValueError(f"a {topology} curve needs at least {min_nodes} nodes")
        if not np.all(np.isfinite(nodes)):
            raise ValueError("node positions must be finite")
        if topology == "periodic" and not period > 0:
            raise ValueError("an x-periodic curve needs a positive wrap length")
        self.nodes = nodes
        self.period = float(period) if topology == "periodic" else 0.0
        self.topology = topology
        self.clock = clock if clock is not None else Clock(float(t))
        if np.any(self.segment_lengths() == 0.0):
            raise ValueError("consecutive nodes must be distinct")

    @property
    def n(self):
        return self.nodes.shape[0]

    @property
    def t(self):
        return self.clock.t

    @property
    def shift(self):
        return np.array([self.period, 0.0, 0.0])

    def segments(self):
        """Segment vectors, including the wrap segment unless the curve is open."""
        if self.topology == "open":
            return np.diff(self.nodes, axis=0)
        nxt = np.roll(self.nodes, -1, axis=0)
        nxt[-1] += self.shift
        return nxt - self.nodes

    def segment_lengths(self):
        return np.linalg.norm(self.segments(), axis=1)

    def length(self):
        """Polygon length (sum of chords)."""
        return float(np.sum(self.segment_lengths()))

    def with_nodes(self, nodes, clock=None):
        return Curve3D(nodes, self.period, self.topology, clock=self.clock if clock is None else clock)

    def __repr__(self):
        return f"Curve3D(n={self.n}, topology={self.topology}, period={self.period:g}, t={self.t:g})"


@dataclass(frozen=True)
class CurveGeometry:
    tangent: np.ndarray
    curvature: np.ndarray
    torsion: np.ndarray
    arclength: np.ndarray


def _closed_only(curve):
    if curve.topology == "open":
        raise ValueError("this operation needs a periodic or closed curve")


def make_helix_curve(spec: HelixSpec, L, n):
    """Helix r_j = (x_j, a cos(tau x_j + phase0), a sin(tau x_j + phase0))."""
    turns = check_commensurate(spec.tau, L)
    if n < 16 * max(1, abs(turns)):
        raise ValueError(f"need at least 16 nodes per helix turn ({abs(turns)} turns), got n={n}")
    x = np.arange(n) * (L / n)
    theta = spec.tau * x + spec.phase0
    nodes = np.column_stack([x, spec.a * np.cos(theta), spec.a * np.sin(theta)])
    return Curve3D(nodes, period=L)


def make_line(L, n, jitter=0.0, seed=0):
    """Straight filament along i1, optionally with jittered node spacing."""
    x = np.arange(n) * (L / n)
    if jitter:
        rng = np.random.default_rng(seed)
        x = x + rng.uniform(-jitter, jitter, n) * (L / n)
        x[0] = 0.0
    return Curve3D(np.column_stack([x, np.zeros(n), np.zeros(n)]), period=L)


def make_circle(R, n):
    """Closed ring of radius R in the (i2, i3) plane (test fixture)."""
    th = 2.0 * np.pi * np.arange(n) / n
    return Curve3D(np.column_stack([np.zeros(n), R * np.cos(th), R * np.sin(th)]),
                   topology="closed")


def hasimoto_soliton_position(s, t, eta, tau0, nu=1.0):
    """Closed-form soliton of the local induction equation.

    Arclength-parameterized, curvature 2 eta sech(eta (s - 2 nu tau0 t)),
    constant torsion tau0; the asymptotes lie on the x axis.
    """
    s = np.asarray(s, dtype=float)
    amp = 2.0 * eta / (eta**2 + tau0**2)
    xi = eta * (s - 2.0 * nu * tau0 * t)
    theta = tau0 * s + nu * (eta**2 - tau0**2) * t
    sech = 1.0 / np.cosh(xi)
    return np.stack([s - amp * np.tanh(xi), amp * sech * np.cos(theta),
                     amp * sech * np.sin(theta)], axis=-1)


def _frenet_rhs(state, kappa, tau):
    t, nrm, b = state[1], state[2], state[3]
    return np.array([t, kappa * nrm, -kappa * t + tau * b, -tau * nrm])


def integrate_frenet(kappa_fn, tau, s0, ds, n, substeps=1):
    """RK4 integration of the Frenet-Serret system from a straight frame at s0.

    Returns n + 1 positions r(s0 + j ds), j = 0..n; each interval is split
    into ``substeps`` RK4 steps.
    """
    state = np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    out = np.empty((n + 1, 3))
    out[0] = state[0]
    h = ds / substeps
    for j in range(n):
        for m in range(substeps):
            s = s0 + j * ds + m * h
            k_a, k_m, k_b = kappa_fn(s), kappa_fn(s + 0.5 * h), kappa_fn(s + h)
            f1 = _frenet_rhs(state, k_a, tau)
            f2 = _frenet_rhs(state + 0.5 * h * f1, k_m, tau)
            f3 = _frenet_rhs(state + 0.5 * h * f2, k_m, tau)
            f4 = _frenet_rhs(state + h * f3, k_b, tau)
            state = state + (h / 6.0) * (f1 + 2.0 * f2 + 2.0 * f3 + f4)
        out[j + 1] = state[0]
    return out


def make_hasimoto_soliton_curve(eta, tau0, L, n):
    """Soliton curve built from its curvature 2 eta sech(eta s) and torsion tau0.

    ``L`` is the total arclength of one period and ``n`` the node count. The
    curvature peak sits at node n // 2, centered in the box. The integration
    leaves a transverse end offset of order 1e-9; a linear ramp removes it so
    the periodic seam closes exactly.
    """
    if not eta > 0:
        raise ValueError("eta must be positive")
    if eta * L < 20:
        raise ValueError(f"soliton not contained: eta*L = {eta * L:g} < 20")
    if n < 32 * eta * L:
        raise ValueError(f"core under-resolved: need n >= 32 eta L = {32 * eta * L:g}, got {n}")
    ds = L / n
    pts = integrate_frenet(lambda s: 2.0 * eta / math.cosh(eta * s), tau0, -0.5 * L, ds, n,
                           substeps=4)
    pts[:, 1:] -= np.outer(np.arange(n + 1) / n, pts[n, 1:] - pts[0, 1:])
    period = pts[n, 0] - pts[0, 0]
    nodes = pts[:n].copy()
    nodes[:, 0] += 0.5 * period - nodes[n // 2, 0]
    return Curve3D(nodes, period=period)


def field_to_curve(field):
    """Render a transverse field phi = y + i z as the filament (x, y, z)."""
    x = field.grid.x
    nodes = np.column_stack([x, field.values.real, field.values.imag])
    return Curve3D(nodes, period=field.grid.length, clock=field.clock)


def _check_resamplable(curve):
    seg = curve.segments()
    h = np.linalg.norm(seg, axis=1)
    if np.min(h) < 1e-9 * np.mean(h):
        raise ValueError("degenerate curve: coincident consecutive nodes")
    cosang = np.sum(seg * np.roll(seg, 1, axis=0), axis=1) / (h * np.roll(h, 1))
    if np.min(cosang) < 0.0:
        raise ValueError("degenerate curve: the polyline folds back within one node spacing")


def resample_arclength(curve):
    """Redistribute nodes at equal arclength of the periodic cubic interpolant.

    Node 0 stays in place. The interpolant's total length is preserved up to
    the interpolation error of the new spline (about 1e-10 relative for a
    smooth curve with 100+ nodes).
    """
    _closed_only(curve)
    _check_resamplable(curve)
    nodes, _ = kernels.resample(curve.nodes, curve.shift)
    return curve.with_nodes(nodes)


def spline_length(curve):
    """Arclength of the periodic cubic interpolant through the nodes."""
    _closed_only(curve)
    return float(kernels.spline_arclength(curve.nodes, curve.shift)[-1])


def _derivatives(curve):
    return kernels.python.curve_derivatives(curve.nodes, curve.shift)


def discrete_geometry(curve, eps=1e-12):
    """Tangent, curvature, torsion and arclength of a resampled curve.

    Three-point differences in chord length give r_l and r_ll; curvature is
    |r_ll|. Torsion is the rotation angle of the discrete binormal between the
    two neighbours, measured about the tangent, per unit arclength. Where the
    curvature vanishes the binormal is undefined and the torsion is reported
    as 0.
    """
    _closed_only(curve)
    d1, d2, hp, hm = _derivatives(curve)
    tangent = d1 / np.linalg.norm(d1, axis=1)[:, None]
    curvature = np.linalg.norm(d2, axis=1)
    bvec = np.cross(d1, d2)
    bnorm = np.linalg.norm(bvec, axis=1)
    scale = 1.0 / np.mean(hp)
    defined = bnorm > eps * scale
    binormal = np.zeros_like(bvec)
    binormal[defined] = bvec[defined] / bnorm[defined, None]
    b_prev = np.roll(binormal, 1, axis=0)
    b_next = np.roll(binormal, -1, axis=0)
    cr = np.cross(b_prev, b_next)
    sin = np.linalg.norm(cr, axis=1) * np.sign(np.sum(cr * tangent, axis=1))
    cos = np.sum(b_prev * b_next, axis=1)
    torsion = np.arctan2(sin, cos) / (hp + hm)
    ok = defined & np.roll(defined, 1) & np.roll(defined, -1)
    torsion = np.where(ok, torsion, 0.0)
    arclength = np.concatenate([[0.0], np.cumsum(hp[:-1])])
    return CurveGeometry(tangent, curvature, torsion, arclength)


def lia_velocity(curve, nu):
    """nu * r_l x r_ll at every node; orthogonal to the discrete tangent."""
    _closed_only(curve)
    return kernels.lia_velocity(curve.nodes, curve.shift, nu)


class StepSizeError(ValueError):
    pass


def lia_stability_number(curve, nu, dt):
    """nu dt / dl^2 with dl the smallest node spacing."""
    dl = float(np.min(curve.segment_lengths()))
    return nu * dt / dl**2


def step_lia_rk4(curve, dt, nu, resample=True, max_stability=0.2):
    """Classical RK4 step of the local induction equation, then resampling.

    ``resample=False`` skips the arclength redistribution, which isolates the
    time integrator for order checks.
    """
    _closed_only(curve)
    if dt <= 0:
        raise ValueError("dt must be positive")
    number = lia_stability_number(curve, nu, dt)
    if number > max_stability * (1.0 + 1e-9):
        raise StepSizeError(
            f"nu*dt/dl^2 = {number:.4g} exceeds the stability budget {max_stability}")
    nodes = kernels.lia_rk4(curve.nodes, curve.shift, nu, dt)
    if resample:
        nodes, _ = kernels.resample(nodes, curve.shift)
    return curve.with_nodes(nodes, curve.clock.advance(dt))


def evolve_lia(curve, dt, steps, nu, cadence=1, resample=True):
    """Integrate ``steps`` RK4 steps; history sampled every ``cadence`` steps."""
    history = [curve]
    for i in range(1, steps + 1):
        curve = step_lia_rk4(curve, dt, nu, resample=resample)
        if i % cadence == 0 or i == steps:
            history.append(curve)
    return history


def rigid_shape_deviation(curve, reference):
    """Distance between two curves after removing a rigid screw motion about i1.

    Fits the rotation angle about the x axis and the axial translation that
    best map ``reference`` onto ``curve`` (node by node) and returns the
    maximum remaining node distance.
    """
    a = reference.nodes
    b = curve.nodes
    za = a[:, 1] + 1j * a[:, 2]
    zb = b[:, 1] + 1j * b[:, 2]
    rot = np.vdot(za, zb)
    rot = rot / abs(rot) if abs(rot) > 0 else 1.0
    dx = np.mean(b[:, 0] - a[:, 0])
    moved = np.column_stack([a[:, 0] + dx, (za * rot).real, (za * rot).imag])
    return float(np.max(np.linalg.norm(b - moved, axis=1)))
