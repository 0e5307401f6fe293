import cmath
import math

import numpy as np
import pytest

from vortexkg import induction as ind
from vortexkg.filament import Curve3D, make_helix_curve, make_line
from vortexkg.model import HelixSpec

L = 2 * math.pi


def segment_curve(a, b, pieces):
    a, b = np.asarray(a, float), np.asarray(b, float)
    return Curve3D(a + np.linspace(0, 1, pieces + 1)[:, None] * (b - a), topology="open")


def segment_oracle(h, x1, x2):
    # foot of the perpendicular at x=0; cos of the angles seen from the point
    return ind.straight_segment_velocity(h, -x1 / math.hypot(x1, h), -x2 / math.hypot(x2, h))


def test_finite_segment_converges_at_order_two():
    h = 0.5
    exact = segment_oracle(h, -1.0, 2.0)
    errs = []
    for pieces in (16, 32, 64, 128):
        u = ind.biot_savart_segment_sum(segment_curve([-1, 0, 0], [2, 0, 0], pieces),
                                        (0.0, h, 0.0), cutoff=0.1)
        assert u.u[0] == 0 and u.u[1] == 0 and u.u[2] > 0
        errs.append(abs(u.magnitude - exact) / exact)
    assert errs[-1] < 1e-4
    orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all((orders > 1.9) & (orders < 2.1)), orders


def test_segment_oracle_textbook_form():
    # both ends on the same side of the foot
    h = 1.0
    exact = segment_oracle(h, 0.5, 3.0)
    u = ind.biot_savart_segment_sum(segment_curve([0.5, 0, 0], [3, 0, 0], 256), (0, 0, h))
    assert abs(u.magnitude - exact) / exact < 1e-4


@pytest.mark.parametrize("h", [0.5, 1.0, 3.0])
def test_infinite_line_limit(h):
    line = make_line(L, 64)
    p = ind.FieldPoint.at(0.4, h, 0.7)
    u = ind.biot_savart_segment_sum(line, p, gamma=2.0)
    assert abs(u.magnitude - ind.infinite_line_velocity(h, 2.0)) / ind.infinite_line_velocity(h, 2.0) < 1e-4
    azimuth = np.array([0.0, -math.sin(0.7), math.cos(0.7)])
    assert np.allclose(u.u / u.magnitude, azimuth, atol=1e-12)


def test_far_field_decay():
    c = segment_curve([-1, 0, 0], [1, 0, 0], 32)
    mags = [ind.biot_savart_segment_sum(c, (0, h, 0)).magnitude for h in (10.0, 20.0, 40.0, 80.0)]
    assert all(m2 <= 0.5 * m1 for m1, m2 in zip(mags, mags[1:]))


def test_cutoff_error():
    line = make_line(L, 64)
    with pytest.raises(ValueError, match="cutoff"):
        ind.biot_savart_segment_sum(line, (0.05, 0.01, 0.0))
    with pytest.raises(ValueError, match="cutoff"):
        # the nearest image of node 0 is across the periodic seam
        ind.biot_savart_segment_sum(line, (L - 0.01, 0.02, 0.0))


def test_zero_amplitude_gives_zero():
    helix, base = ind.helix_perturbation(0.0, 1.0, L, 64)
    du = ind.perturbation_velocity(helix, base, ind.FieldPoint.at(0.3, 2.0))
    assert np.all(du.u == 0.0)


def test_doubling_amplitude_doubles_response():
    p = ind.FieldPoint.at(0.0, 2.0)
    u1 = ind.perturbation_velocity(*ind.helix_perturbation(1e-3, 1.0, L, 64), p)
    u2 = ind.perturbation_velocity(*ind.helix_perturbation(2e-3, 1.0, L, 64), p)
    assert abs(u2.magnitude / u1.magnitude - 2.0) < 2e-3


def test_linear_response_fit():
    slope, resid, v = ind.amplitude_response([0.00125, 0.0025, 0.005, 0.01], h=2.0)
    assert resid <= 1e-3
    assert abs(slope) > 0


def test_phase_locked_along_corotating_line():
    a, tau, h = 0.01, 1.0, 2.0
    helix, base = ind.helix_perturbation(a, tau, L, 64)
    xs = np.linspace(0, L, 12, endpoint=False)
    vals = []
    for x in xs:
        p = (x, h * math.cos(tau * x), h * math.sin(tau * x))
        vals.append(ind.perturbation_velocity(helix, base, p).transverse)
    rel = np.angle(np.array(vals) * np.exp(-1j * tau * xs))
    # only the discrete node positions break the screw symmetry
    assert np.ptp(np.unwrap(rel)) < 1e-6
    slope = np.polyfit(xs, np.unwrap(np.angle(vals)), 1)[0]
    assert slope == pytest.approx(tau, abs=1e-6)


@pytest.mark.parametrize("delta", [0.0, 0.5 * math.pi, 2.0, 4.0])
def test_phase_equivariance(delta):
    a, h = 0.01, 2.0
    base = make_line(L, 64)
    ref = ind.perturbation_velocity(make_helix_curve(HelixSpec(a, 1.0), L, 64), base,
                                    ind.FieldPoint.at(0.0, h)).transverse
    rot = ind.perturbation_velocity(make_helix_curve(HelixSpec(a, 1.0, delta), L, 64), base,
                                    ind.FieldPoint.at(0.0, h, delta)).transverse
    # delta u is a difference of O(1/h) sums, so round-off sits near 1e-13 relative
    assert abs(rot - ref * cmath.exp(1j * delta)) < 1e-9 * abs(ref)


@pytest.mark.parametrize("delta", [0.3, 1.0, 2.5, 5.0])
def test_phase_equivariance_on_axis(delta):
    # on the axis the rotated point is the point itself; the full velocity must rotate
    a = 0.5
    p = ind.FieldPoint((0.0, 0.0, 0.0))
    ref = ind.biot_savart_segment_sum(make_helix_curve(HelixSpec(a, 1.0), L, 64), p).transverse
    rot = ind.biot_savart_segment_sum(make_helix_curve(HelixSpec(a, 1.0, delta), L, 64), p).transverse
    assert abs(ref) > 0
    assert abs(rot - ref * cmath.exp(1j * delta)) < 1e-12 * abs(ref)


def test_mismatched_discretizations_rejected():
    h64 = make_helix_curve(HelixSpec(0.01, 1.0), L, 64)
    with pytest.raises(ValueError):
        ind.perturbation_velocity(h64, make_line(L, 32), (0, 2, 0))
    with pytest.raises(ValueError):
        ind.perturbation_velocity(h64, make_line(L, 64, jitter=0.2, seed=1), (0, 2, 0))
    with pytest.raises(ValueError):
        ind.perturbation_velocity(h64, h64, (0, 2, 0))


def test_small_amplitude_estimate_examples():
    assert ind.small_amplitude_estimate(0.0, 1.0, 1.0, 1.0) == 0
    assert ind.small_amplitude_estimate(1.0, 1.0, 1.0, 4 * math.pi) == pytest.approx(1j, abs=1e-15)


def test_estimate_comparison_reports_ratio():
    rep = ind.estimate_comparison(a=0.01, tau=1.0, h=2.0)
    assert math.isfinite(rep["ratio"]) and rep["ratio"] > 0
    # the ratio converges at second order in the node spacing
    r = [ind.estimate_comparison(a=0.01, tau=1.0, h=2.0, n=n)["ratio"] for n in (64, 128, 256)]
    assert (r[1] - r[0]) / (r[2] - r[1]) == pytest.approx(4.0, rel=0.05)


def test_field_point_and_samples(tmp_path):
    p = ind.FieldPoint.at(1.0, 2.0, 0.3)
    assert p.h == pytest.approx(2.0)
    with pytest.raises(ValueError):
        ind.FieldPoint((0.0, 1.0))
    with pytest.raises(ValueError):
        ind.InducedVelocity([np.nan, 0, 0])
    helix, base = ind.helix_perturbation(0.01, 1.0, L, 64)
    rows = ind.velocity_samples(helix, [(0, 2, 0), (1, 0, 2)], baseline=base)
    path = ind.write_velocity_samples(rows, tmp_path / "v.csv")
    lines = open(path).read().splitlines()
    assert lines[0] == "x,y,z,u_x,u_y,u_z" and len(lines) == 3
    assert [float(v) for v in lines[1].split(",")] == list(rows[0])


def test_image_count_tail_bound():
    line = make_line(L, 64)
    m = ind.image_count(line, [0.0, 1.0, 0.0])
    assert (m - 1) * L >= 1.0 / math.sqrt(2e-8)
    assert ind.image_count(segment_curve([0, 0, 0], [1, 0, 0], 4), [0, 1, 0]) == 0
