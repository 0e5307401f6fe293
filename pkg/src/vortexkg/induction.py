"""Biot-Savart velocity induced by a discretized filament.

The quadrature is the segment-midpoint rule

    u(p) = Gamma/(4 pi) * sum_j  dr_j x s_j / |s_j|^3,   s_j = p - m_j,

with m_j the midpoint of segment j. x-periodic curves are extended by image
copies shifted by multiples of the period.
"""

from dataclasses import dataclass
import csv
import math

import numpy as np

from . import kernels
from .filament import make_helix_curve, make_line
from .model import HelixSpec

TAIL_TOL = 1e-8


@dataclass(frozen=True)
class FieldPoint:
    """Evaluation point; ``h`` is its distance from the filament axis (i1)."""

    position: tuple
    h: float = None

    def __post_init__(self):
        pos = np.asarray(self.position, dtype=float)
        if pos.shape != (3,) or not np.all(np.isfinite(pos)):
            raise ValueError(f"field point must be a finite 3-vector, got {self.position!r}")
        object.__setattr__(self, "position", tuple(float(v) for v in pos))
        if self.h is None:
            object.__setattr__(self, "h", float(math.hypot(pos[1], pos[2])))

    @property
    def r(self):
        return np.array(self.position)

    @classmethod
    def at(cls, x, h, angle=0.0):
        """Point at axial station x, distance h from the axis, azimuth ``angle``."""
        return cls((x, h * math.cos(angle), h * math.sin(angle)))


@dataclass(frozen=True)
class InducedVelocity:
    u: np.ndarray

    def __post_init__(self):
        u = np.asarray(self.u, dtype=float)
        if u.shape != (3,) or not np.all(np.isfinite(u)):
            raise ValueError("induced velocity must be a finite 3-vector")
        object.__setattr__(self, "u", u)

    @property
    def transverse(self):
        """Complex reading u_y + i u_z."""
        return complex(self.u[1], self.u[2])

    @property
    def magnitude(self):
        return float(np.linalg.norm(self.u))

    def __sub__(self, other):
        return InducedVelocity(self.u - other.u)


def _as_point(point):
    return point if isinstance(point, FieldPoint) else FieldPoint(point)


def _midpoints(curve):
    d = curve.segments()
    nodes = curve.nodes if curve.topology != "open" else curve.nodes[:-1]
    return nodes + 0.5 * d, d


def image_count(curve, points, tol=TAIL_TOL):
    """Number of image copies on each side so the neglected tail is below ``tol``.

    A straight filament seen from transverse distance h loses a fraction
    h^2 / (2 X^2) of its induced velocity when truncated at axial distance X.
    """
    if curve.topology != "periodic":
        return 0
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    yz = curve.nodes[:, 1:]
    h_max = max(float(np.max(np.linalg.norm(p[1:] - yz, axis=1))) for p in pts)
    x_span = float(np.ptp(curve.nodes[:, 0])) + max(
        float(np.max(np.abs(p[0] - curve.nodes[:, 0]))) for p in pts)
    reach = max(h_max, 1e-300) / math.sqrt(2.0 * tol) + x_span
    return int(math.ceil(reach / curve.period)) + 1


def _distance_to_nodes(curve, p):
    rel = curve.nodes - p
    if curve.topology == "periodic":
        rel[:, 0] = np.mod(rel[:, 0] + 0.5 * curve.period, curve.period) - 0.5 * curve.period
    return float(np.min(np.linalg.norm(rel, axis=1)))


def default_cutoff(curve):
    return float(np.mean(curve.segment_lengths()))


def biot_savart_segment_sum(curve, point, gamma=1.0, cutoff=None, n_images=None):
    """Velocity induced at ``point`` by ``curve`` carrying circulation ``gamma``.

    Points closer than ``cutoff`` (default: mean node spacing) to any node are
    rejected: the midpoint rule is not desingularized.
    """
    point = _as_point(point)
    p = point.r
    cutoff = default_cutoff(curve) if cutoff is None else cutoff
    dist = _distance_to_nodes(curve, p)
    if dist < cutoff:
        raise ValueError(
            f"field point lies within the cutoff of the curve (distance {dist:.3g} < {cutoff:.3g})")
    if n_images is None:
        n_images = image_count(curve, p)
    mids, d = _midpoints(curve)
    u = kernels.biot_savart(p[None, :], mids, d, curve.shift, int(n_images), float(gamma))
    return InducedVelocity(u[0])


def _check_pair(helix, baseline):
    if helix.topology != baseline.topology or helix.n != baseline.n:
        raise ValueError("helix and baseline must share topology and node count")
    if helix.period != baseline.period:
        raise ValueError("helix and baseline must share the same period")
    if not np.allclose(helix.nodes[:, 0], baseline.nodes[:, 0], rtol=0, atol=1e-12):
        raise ValueError("helix and baseline must share the same x-nodes")
    yz = baseline.nodes[:, 1:]
    if np.max(np.abs(yz - yz[0])) > 1e-12:
        raise ValueError("baseline must be a straight line parallel to i1")


def perturbation_velocity(helix, baseline, point, gamma=1.0, cutoff=None):
    """delta u = BS(helix) - BS(baseline) with identical nodes in x and images."""
    _check_pair(helix, baseline)
    point = _as_point(point)
    cutoff = default_cutoff(baseline) if cutoff is None else cutoff
    m = max(image_count(helix, point.r), image_count(baseline, point.r))
    u1 = biot_savart_segment_sum(helix, point, gamma, cutoff, n_images=m)
    u0 = biot_savart_segment_sum(baseline, point, gamma, cutoff, n_images=m)
    return u1 - u0


def small_amplitude_estimate(phi_at_x, k, h, gamma=1.0):
    """Order-of-magnitude estimate i Gamma k / (4 pi h) phi for ka << 1.

    Reported next to the quadrature, never used as a reference: it has no decay
    in kh and the proportionality constant is unspecified.
    """
    return 1j * gamma * k / (4.0 * math.pi * h) * complex(phi_at_x)


def straight_segment_velocity(h, cos1, cos2, gamma=1.0):
    """Closed-form speed induced by a finite straight segment."""
    return gamma / (4.0 * math.pi * h) * (cos1 - cos2)


def infinite_line_velocity(h, gamma=1.0):
    return gamma / (2.0 * math.pi * h)


def velocity_samples(curve, points, gamma=1.0, cutoff=None, baseline=None):
    """Rows (x, y, z, u_x, u_y, u_z); with ``baseline`` the rows hold delta u."""
    rows = []
    for p in points:
        fp = _as_point(p)
        if baseline is None:
            u = biot_savart_segment_sum(curve, fp, gamma, cutoff)
        else:
            u = perturbation_velocity(curve, baseline, fp, gamma, cutoff)
        rows.append((*fp.position, *u.u))
    return rows


def write_velocity_samples(rows, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x", "y", "z", "u_x", "u_y", "u_z"])
        for row in rows:
            w.writerow([f"{v:.17g}" for v in row])
    return path


def helix_perturbation(a, tau, L, n, phase0=0.0):
    """(helix, baseline) pair on shared x-nodes for delta u evaluations."""
    return make_helix_curve(HelixSpec(a, tau, phase0), L, n), make_line(L, n)


def amplitude_response(amplitudes, tau=1.0, h=2.0, L=2 * math.pi, n=64, x=0.0, gamma=1.0):
    """Least-squares slope of delta u (complex transverse) against a, through the origin.

    The residual is the RMS misfit relative to the RMS response.
    """
    a = np.asarray(amplitudes, dtype=float)
    point = FieldPoint.at(x, h)
    v = np.array([perturbation_velocity(*helix_perturbation(ai, tau, L, n), point, gamma).transverse
                  for ai in a])
    slope = np.vdot(a, v) / np.vdot(a, a)
    residual = float(np.sqrt(np.mean(np.abs(v - slope * a) ** 2) / np.mean(np.abs(v) ** 2)))
    return complex(slope), residual, v


def estimate_comparison(a=0.01, tau=1.0, h=2.0, L=2 * math.pi, n=64, x=0.0, gamma=1.0):
    """Quadrature delta u against the small-amplitude estimate at the same point.

    The filament point nearest to (x, h, 0) sits at the same x, where phi = a e^{i tau x}.
    """
    helix, base = helix_perturbation(a, tau, L, n)
    du = perturbation_velocity(helix, base, FieldPoint.at(x, h), gamma)
    est = small_amplitude_estimate(a * np.exp(1j * tau * x), tau, h, gamma)
    return {"a": a, "tau": tau, "h": h, "gamma": gamma,
            "du_quadrature": [du.transverse.real, du.transverse.imag],
            "du_estimate": [est.real, est.imag],
            "ratio": abs(du.transverse) / abs(est)}
