import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, strategies as st

from vortexkg.fields import make_grid
from vortexkg.model import (Closure, HelixSpec, PhysicalParams, check_commensurate, derive_params,
                            helix_field_snapshot, mass_coefficient_ledger)

pos = st.floats(min_value=1e-3, max_value=1e3, allow_nan=False, allow_infinity=False)


@pytest.mark.parametrize("c,nu,zeta,m,expect", [
    (1.0, 0.5, 1.0, 1, dict(a0=1.0, m0=1.0, hbar=1.0, mu=1.0, m_eps=1.0)),
    (2.0, 0.5, 3.0, 1, dict(a0=0.5, m0=1.5, hbar=1.5, mu=4.0)),
    (1.0, 0.5, 1.0, 5, dict(m_eps=5.0)),
])
def test_derive_params_examples(c, nu, zeta, m, expect):
    d = derive_params(PhysicalParams(c=c, nu=nu, zeta=zeta), m_count=m)
    for key, val in expect.items():
        assert getattr(d, key) == pytest.approx(val, rel=1e-15)


@given(c=pos, nu=pos, zeta=pos, m=st.integers(1, 1000))
def test_derived_identities_hold(c, nu, zeta, m):
    p = PhysicalParams(c=c, nu=nu, zeta=zeta)
    d = derive_params(p, m)
    assert d.a0 == 2 * nu / c
    assert d.m0 == zeta * d.a0
    assert d.hbar == 2 * nu * zeta * d.a0
    assert d.mu == d.m0 * c**2 / d.hbar
    assert d.m_eps == m * zeta * d.a0
    assert d.mu == pytest.approx(c**2 / (2 * nu), rel=1e-14)


@pytest.mark.parametrize("kw", [dict(c=0.0), dict(nu=-1.0), dict(zeta=0.0), dict(gamma=0.0),
                                dict(c=float("nan"))])
def test_invalid_params_rejected(kw):
    with pytest.raises(ValueError):
        PhysicalParams(**kw)


@pytest.mark.parametrize("m", [0, -2, 1.5, True])
def test_bad_m_count(m):
    with pytest.raises(ValueError):
        derive_params(PhysicalParams(), m)


def test_ledger_examples():
    g = mass_coefficient_ledger(PhysicalParams(c=1.0, nu=0.5), Closure.GROUP_VELOCITY)
    assert (g.tau, g.lhs_coefficient, g.rhs_coefficient, g.ratio) == (1.0, 0.25, 1.0, 0.25)
    f = mass_coefficient_ledger(PhysicalParams(c=1.0, nu=0.5), "Frequency")
    assert f.tau == pytest.approx(math.sqrt(2), rel=1e-15)
    assert f.lhs_coefficient == pytest.approx(1.0, rel=1e-15)
    assert f.ratio == pytest.approx(1.0, rel=1e-15)
    g2 = mass_coefficient_ledger(PhysicalParams(c=2.0, nu=1.0))
    assert g2.tau == 1.0 and g2.ratio == pytest.approx(0.25, abs=1e-15)
    assert g.as_dict()["closure"] == "GroupVelocity"


def test_ledger_ratio_symbolically():
    c, nu, zeta = sp.symbols("c nu zeta", positive=True)
    a0 = 2 * nu / c
    m0 = zeta * a0
    hbar = 2 * nu * zeta * a0
    rhs = (m0 * c**2 / hbar) ** 2
    tau_g = c / (2 * nu)
    tau_f = c / (sp.sqrt(2) * nu)
    assert sp.simplify((nu * tau_g**2) ** 2 / rhs) == sp.Rational(1, 4)
    assert sp.simplify((nu * tau_f**2) ** 2 / rhs) == 1


@given(c=pos, nu=pos, zeta=pos)
def test_ledger_ratio_is_parameter_independent(c, nu, zeta):
    p = PhysicalParams(c=c, nu=nu, zeta=zeta)
    assert abs(mass_coefficient_ledger(p, Closure.GROUP_VELOCITY).ratio - 0.25) <= 1e-15
    assert abs(mass_coefficient_ledger(p, Closure.FREQUENCY).ratio - 1.0) <= 1e-15


def test_helix_spec_geometry():
    h = HelixSpec(0.1, 1.0)
    assert h.curvature == pytest.approx(0.1 / 1.01)
    assert h.torsion == pytest.approx(1 / 1.01)
    with pytest.raises(ValueError):
        HelixSpec(-0.1, 1.0)
    with pytest.raises(ValueError):
        HelixSpec(0.1, 0.0)


def test_snapshot_examples(two_pi):
    g = make_grid(64, two_pi)
    assert np.all(helix_field_snapshot(HelixSpec(0.0, 3.0), 1.7, g, 5.0).values == 0)
    f0 = helix_field_snapshot(HelixSpec(1.0, 1.0), 0.5, g, 0.0)
    assert f0.values[0] == 1 + 0j
    fpi = helix_field_snapshot(HelixSpec(1.0, 1.0), 0.5, g, math.pi)
    assert abs(fpi.values[0] - (-1j)) < 1e-15
    assert fpi.t == math.pi


def test_snapshot_rejects_incommensurate(two_pi):
    with pytest.raises(ValueError, match="not an integer"):
        helix_field_snapshot(HelixSpec(1.0, 1.5), 1.0, make_grid(16, two_pi), 0.0)
    assert check_commensurate(3.0, two_pi) == 3


@given(a=st.floats(0, 10), tau=st.integers(-5, 5).filter(bool), omega=st.floats(-10, 10),
       t1=st.floats(-50, 50), t2=st.floats(-50, 50), ph=st.floats(-4, 4))
def test_snapshot_modulus_and_phase(a, tau, omega, t1, t2, ph):
    g = make_grid(32, 2 * math.pi)
    spec = HelixSpec(a, float(tau), ph)
    f1 = helix_field_snapshot(spec, omega, g, t1)
    f2 = helix_field_snapshot(spec, omega, g, t2)
    assert np.allclose(np.abs(f1.values), a, rtol=1e-14, atol=0)
    assert np.allclose(f2.values, f1.values * np.exp(-1j * omega * (t2 - t1)),
                       rtol=0, atol=1e-12 * max(a, 1e-300) * (1 + abs(omega * (t2 - t1))))
