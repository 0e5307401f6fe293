"""Physical constants, derived parameters and the closed-form helix field.

Units are chosen by the caller. The default configuration used throughout the
package nondimensionalizes ``c = 1`` and ``zeta = 1``.

The frame (i1, i2, i3) is right-handed and the transverse displacement is read
as the complex number ``phi = y + i z``.
"""

from dataclasses import dataclass
from enum import Enum
import math

import numpy as np


@dataclass(frozen=True)
class PhysicalParams:
    """Model constants.

    c : elastic wave speed along the filament
    nu : self-induction coefficient of the local induction law
    zeta : linear fluid density along the filament
    gamma : circulation around the filament
    """

    c: float = 1.0
    nu: float = 0.5
    zeta: float = 1.0
    gamma: float = 1.0

    def __post_init__(self):
        for name in ("c", "nu", "zeta"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be positive and finite, got {value!r}")
        if not math.isfinite(self.gamma) or self.gamma == 0:
            raise ValueError(f"gamma must be finite and non-zero, got {self.gamma!r}")


@dataclass(frozen=True)
class DerivedParams:
    a0: float
    m0: float
    hbar: float
    mu: float
    m_count: int
    m_eps: float


def derive_params(p: PhysicalParams, m_count: int = 1) -> DerivedParams:
    """Minimal amplitude, elementary mass, Planck constant and mass frequency.

    a0 = 2 nu / c, m0 = zeta a0, hbar = 2 nu zeta a0, mu = m0 c^2 / hbar and
    m_eps = m_count zeta a0 for a particle made of ``m_count`` elementary helices.
    """
    if isinstance(m_count, bool) or int(m_count) != m_count or m_count < 1:
        raise ValueError(f"m_count must be a positive integer, got {m_count!r}")
    m_count = int(m_count)
    a0 = 2.0 * p.nu / p.c
    m0 = p.zeta * a0
    hbar = 2.0 * p.nu * p.zeta * a0
    mu = m0 * p.c**2 / hbar
    m_eps = m_count * p.zeta * a0
    return DerivedParams(a0=a0, m0=m0, hbar=hbar, mu=mu, m_count=m_count, m_eps=m_eps)


class Closure(str, Enum):
    """How the helix torsion entering the mass term is fixed.

    GROUP_VELOCITY sets the soliton speed 2 nu tau equal to c.
    FREQUENCY sets the self-induction rotation rate nu tau^2 equal to mu.
    """

    GROUP_VELOCITY = "GroupVelocity"
    FREQUENCY = "Frequency"


@dataclass(frozen=True)
class LedgerReport:
    closure: Closure
    tau: float
    lhs_coefficient: float  # nu^2 tau^4
    rhs_coefficient: float  # m0^2 c^4 / hbar^2
    ratio: float

    def as_dict(self):
        return {
            "closure": self.closure.value,
            "tau": self.tau,
            "nu2_tau4": self.lhs_coefficient,
            "m0sq_c4_over_hbarsq": self.rhs_coefficient,
            "ratio": self.ratio,
        }


def mass_coefficient_ledger(p: PhysicalParams, closure=Closure.GROUP_VELOCITY) -> LedgerReport:
    """Compare the self-induction mass term with the standard Klein-Gordon one.

    The ratio nu^2 tau^4 / (m0^2 c^4 / hbar^2) is reported as computed; it is
    1/4 under the group-velocity closure and 1 under the frequency closure.
    """
    closure = Closure(closure)
    d = derive_params(p)
    if closure is Closure.GROUP_VELOCITY:
        tau = p.c / (2.0 * p.nu)
    else:
        # nu tau^2 = mu, i.e. tau = c / (sqrt(2) nu); solving from mu keeps rounding to a few ulp
        tau = math.sqrt(d.mu / p.nu)
    lhs = (p.nu * tau**2) ** 2
    rhs = (d.m0 * p.c**2 / d.hbar) ** 2
    return LedgerReport(closure=closure, tau=tau, lhs_coefficient=lhs,
                        rhs_coefficient=rhs, ratio=lhs / rhs)


@dataclass(frozen=True)
class HelixSpec:
    """Circularly polarized helix a exp[i(tau x + phase0)]."""

    a: float
    tau: float
    phase0: float = 0.0

    def __post_init__(self):
        if not self.a >= 0:
            raise ValueError(f"helix amplitude must be >= 0, got {self.a!r}")
        if self.tau == 0 or not math.isfinite(self.tau):
            raise ValueError("helix torsion tau must be finite and non-zero")

    @property
    def curvature(self):
        """Exact curvature of the helix, a tau^2 / (1 + a^2 tau^2)."""
        return self.a * self.tau**2 / (1.0 + (self.a * self.tau) ** 2)

    @property
    def torsion(self):
        """Exact torsion of the helix, tau / (1 + a^2 tau^2)."""
        return self.tau / (1.0 + (self.a * self.tau) ** 2)


def check_commensurate(tau, length, tol=1e-9):
    """Return the number of helix turns in ``length``; raise if not an integer."""
    turns = tau * length / (2.0 * math.pi)
    if abs(turns - round(turns)) > tol * max(1.0, abs(turns)):
        raise ValueError(
            f"tau*L/2pi = {turns:.12g} is not an integer; the helix is not periodic on this box")
    return int(round(turns))


def helix_field_snapshot(spec: HelixSpec, omega, grid, t):
    """phi_j = a exp[i(tau x_j - omega t + phase0)] on a periodic grid."""
    from .fields import ComplexField

    check_commensurate(spec.tau, grid.length)
    values = spec.a * np.exp(1j * (spec.tau * grid.x - omega * t + spec.phase0))
    return ComplexField(grid, values, t=t)
