"""Periodic 1D complex fields and their linear evolution.

Three equations act on the transverse displacement phi = y + i z:

* ``Wave``         phi_tt = c^2 phi_xx
* ``Schrodinger``  phi_t  = i nu phi_xx
* ``KleinGordon``  phi_tt = c^2 phi_xx - mu^2 phi

Two backends are provided. ``evolve_spectral`` advances each discrete Fourier
mode in closed form. ``step_fd`` uses second differences: Crank-Nicolson for
the Schrodinger equation and the three-level leapfrog for the others.
"""

from dataclasses import dataclass
import math

import numpy as np

from . import kernels


@dataclass(frozen=True)
class Grid1D:
    n: int
    length: float

    def __post_init__(self):
        if isinstance(self.n, bool) or int(self.n) != self.n:
            raise ValueError(f"grid size must be an integer, got {self.n!r}")
        if self.n < 8 or self.n % 2:
            raise ValueError(f"grid size must be even and >= 8, got {self.n}")
        if not (math.isfinite(self.length) and self.length > 0):
            raise ValueError(f"grid length must be positive, got {self.length!r}")

    @property
    def dx(self):
        return self.length / self.n

    @property
    def x(self):
        return np.arange(self.n) * self.dx

    @property
    def k(self):
        """Signed angular wavenumbers in FFT order."""
        return 2.0 * np.pi * np.fft.fftfreq(self.n, d=self.dx)

    def mode_index(self, k):
        """FFT index of wavenumber ``k``; raises if k is not on the grid."""
        j = k * self.length / (2.0 * np.pi)
        if abs(j - round(j)) > 1e-9 * max(1.0, abs(j)):
            raise ValueError(f"k={k} is not a grid wavenumber for L={self.length}")
        return int(round(j)) % self.n


def make_grid(n, L):
    return Grid1D(int(n) if isinstance(n, (int, np.integer)) else n, float(L))


@dataclass(frozen=True)
class Clock:
    """Time stamp kept as t0 + steps * dt so long runs do not accumulate drift."""

    t0: float = 0.0
    dt: float = 0.0
    steps: int = 0

    @property
    def t(self):
        return self.t0 + self.steps * self.dt

    def advance(self, dt):
        if self.steps == 0 or dt == self.dt:
            return Clock(self.t0, dt, self.steps + 1)
        return Clock(self.t, dt, 1)


class ComplexField:
    """Complex displacement sampled on a periodic grid."""

    __slots__ = ("grid", "values", "clock")

    def __init__(self, grid, values, t=0.0, clock=None):
        values = np.asarray(values, dtype=np.complex128)
        if values.shape != (grid.n,):
            raise ValueError(f"expected {grid.n} values, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise ValueError("field values must be finite")
        self.grid = grid
        self.values = values
        self.clock = clock if clock is not None else Clock(float(t))

    @property
    def t(self):
        return self.clock.t

    def spectrum(self):
        return np.fft.fft(self.values)

    def interpolate(self, x):
        """Trigonometric interpolation at arbitrary positions (Nyquist mode dropped)."""
        coef = self.spectrum() / self.grid.n
        k = self.grid.k.copy()
        keep = np.ones(self.grid.n, dtype=bool)
        keep[self.grid.n // 2] = False
        x = np.asarray(x, dtype=float)
        return np.exp(1j * np.multiply.outer(x, k[keep])) @ coef[keep]

    def with_values(self, values, clock=None):
        return ComplexField(self.grid, values, clock=self.clock if clock is None else clock)

    def __repr__(self):
        return f"ComplexField(n={self.grid.n}, L={self.grid.length:g}, t={self.t:g})"


@dataclass(frozen=True)
class FieldState:
    """(phi, phi_t) for the second-order equations.

    ``prev`` holds the previous time level of an FD run (the leapfrog needs it);
    it is not part of the physical state.
    """

    phi: ComplexField
    phi_t: ComplexField
    backend: str = "spectral"
    prev: np.ndarray = None
    prev_dt: float = None

    def __post_init__(self):
        if self.phi.grid != self.phi_t.grid:
            raise ValueError("phi and phi_t live on different grids")
        if self.phi.t != self.phi_t.t:
            raise ValueError("phi and phi_t carry different time stamps")

    @property
    def grid(self):
        return self.phi.grid

    @property
    def t(self):
        return self.phi.t

    @classmethod
    def at_rest(cls, phi):
        return cls(phi, phi.with_values(np.zeros_like(phi.values)))


@dataclass(frozen=True)
class Wave:
    c: float = 1.0

    def __post_init__(self):
        if not self.c > 0:
            raise ValueError("wave speed c must be positive")

    mass = 0.0

    def omega(self, k):
        return self.c * np.abs(k)


@dataclass(frozen=True)
class Schrodinger:
    nu: float = 0.5

    def __post_init__(self):
        if not self.nu > 0:
            raise ValueError("self-induction coefficient nu must be positive")

    def omega(self, k):
        return self.nu * np.asarray(k) ** 2


@dataclass(frozen=True)
class KleinGordon:
    c: float = 1.0
    mu: float = 1.0

    def __post_init__(self):
        if not self.c > 0:
            raise ValueError("wave speed c must be positive")
        if not self.mu >= 0:
            raise ValueError("mass frequency mu must be non-negative")

    @property
    def mass(self):
        return self.mu

    def omega(self, k):
        return np.sqrt(self.c**2 * np.asarray(k) ** 2 + self.mu**2)


EquationKind = (Wave, Schrodinger, KleinGordon)


def zero_nyquist(field):
    """Remove the (direction-ambiguous) Nyquist mode."""
    spec = field.spectrum()
    spec[field.grid.n // 2] = 0.0
    return field.with_values(np.fft.ifft(spec))


def _require_first_order(kind, state):
    if isinstance(kind, Schrodinger):
        if not isinstance(state, ComplexField):
            raise TypeError("the Schrodinger equation is first order; pass a ComplexField")
        return True
    if not isinstance(kind, (Wave, KleinGordon)):
        raise TypeError(f"unknown equation kind {kind!r}")
    if not isinstance(state, FieldState):
        raise TypeError(f"{type(kind).__name__} is second order; pass a FieldState")
    return False


def _advance_modes(kind, grid, phi, phi_t, dt):
    omega = kind.omega(grid.k)
    a = np.fft.fft(phi)
    b = np.fft.fft(phi_t)
    cos = np.cos(omega * dt)
    # sin(w dt)/w with the w -> 0 limit
    sinc = dt * np.sinc(omega * dt / np.pi)
    a_new = a * cos + b * sinc
    b_new = -a * omega * np.sin(omega * dt) + b * cos
    return np.fft.ifft(a_new), np.fft.ifft(b_new)


def evolve_spectral(kind, state, dt):
    """Advance ``state`` by ``dt`` exactly (per discrete Fourier mode)."""
    if _require_first_order(kind, state):
        spec = state.spectrum() * np.exp(-1j * kind.nu * state.grid.k**2 * dt)
        return state.with_values(np.fft.ifft(spec), state.clock.advance(dt))
    phi, phi_t = _advance_modes(kind, state.grid, state.phi.values, state.phi_t.values, dt)
    clock = state.phi.clock.advance(dt)
    return FieldState(state.phi.with_values(phi, clock), state.phi_t.with_values(phi_t, clock))


class StabilityError(ValueError):
    pass


def check_leapfrog_stability(kind, grid, dt):
    """Leapfrog stability: (c dt/dx)^2 + (mu dt / 2)^2 <= 1.

    For mu = 0 this is the usual CFL condition c dt / dx <= 1.
    """
    courant = kind.c * dt / grid.dx
    bound = courant**2 + (kind.mass * dt / 2.0) ** 2
    if bound > 1.0 + 1e-12:
        raise StabilityError(
            f"leapfrog unstable: (c dt/dx)^2 + (mu dt/2)^2 = {bound:.6g} > 1 "
            f"(c dt/dx = {courant:.6g}, dx = {grid.dx:.6g}, dt = {dt:.6g})")
    return courant


def _previous_level(kind, state, dt):
    if state.prev is not None and state.prev_dt == dt:
        return state.prev
    back, _ = _advance_modes(kind, state.grid, state.phi.values, state.phi_t.values, -dt)
    return back


def step_fd(kind, state, dt):
    """One finite-difference step.

    Schrodinger: Crank-Nicolson with the periodic second difference (unitary,
    unconditionally stable). Wave/KleinGordon: three-level leapfrog; the level
    before the first step is taken from the exact mode evolution.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    grid = state.grid
    if _require_first_order(kind, state):
        alpha = kind.nu * dt / (2.0 * grid.dx**2)
        return state.with_values(kernels.cn_schrodinger_step(state.values, alpha),
                                 state.clock.advance(dt))
    courant = check_leapfrog_stability(kind, grid, dt)
    cur = state.phi.values
    prev = _previous_level(kind, state, dt)
    new = kernels.leapfrog_step(cur, prev, courant**2, (kind.mass * dt) ** 2)
    phi_t = (3.0 * new - 4.0 * cur + prev) / (2.0 * dt)
    clock = state.phi.clock.advance(dt)
    return FieldState(state.phi.with_values(new, clock), state.phi_t.with_values(phi_t, clock),
                      backend="fd", prev=cur, prev_dt=dt)


def _spectral_energy(kind, state):
    grid = state.grid
    n = grid.n
    a = np.fft.fft(state.phi.values)
    b = np.fft.fft(state.phi_t.values)
    # Parseval: sum_j |f_j|^2 = sum_k |F_k|^2 / n
    dens = np.abs(b) ** 2 + (kind.c**2 * grid.k**2 + kind.mass**2) * np.abs(a) ** 2
    return float(np.sum(dens) * grid.dx / n)


def _leapfrog_energy(kind, grid, cur, prev, dt):
    # exactly conserved staggered energy of the leapfrog scheme
    vel = (cur - prev) / dt
    dcur = (np.roll(cur, -1) - cur) / grid.dx
    dprev = (np.roll(prev, -1) - prev) / grid.dx
    dens = (np.abs(vel) ** 2 + kind.c**2 * np.real(dcur * np.conj(dprev))
            + kind.mass**2 * np.real(cur * np.conj(prev)))
    return float(np.sum(dens) * grid.dx)


def conserved_quantity(kind, state, backend=None, dt=None):
    """Norm (Schrodinger) or energy (Wave, KleinGordon) of ``state``.

    Each backend conserves its own functional: the spectral energy uses the
    exact derivative; FD states use the staggered leapfrog energy built from
    the current and previous levels with the one-cell difference
    (phi_{j+1} - phi_j)/dx, centered at x_{j+1/2}.
    """
    if _require_first_order(kind, state):
        return float(np.sum(np.abs(state.values) ** 2) * state.grid.dx)
    backend = backend or state.backend
    if backend == "spectral":
        return _spectral_energy(kind, state)
    if backend != "fd":
        raise ValueError(f"unknown backend {backend!r}")
    if state.prev is not None:
        return _leapfrog_energy(kind, state.grid, state.phi.values, state.prev, state.prev_dt)
    if dt is None:
        raise ValueError("an FD energy of a fresh state needs the step size dt")
    prev = _previous_level(kind, state, dt)
    return _leapfrog_energy(kind, state.grid, state.phi.values, prev, dt)


def evolve(kind, state, dt, steps, backend="spectral", cadence=1):
    """Run ``steps`` steps and return the history sampled every ``cadence`` steps.

    Spectral runs start from the initial state with its Nyquist mode removed.
    """
    stepper = evolve_spectral if backend == "spectral" else step_fd
    if backend not in ("spectral", "fd"):
        raise ValueError(f"unknown backend {backend!r}")
    if backend == "spectral":
        # the Nyquist mode has no defined direction of travel
        if isinstance(state, ComplexField):
            state = zero_nyquist(state)
        else:
            state = FieldState(zero_nyquist(state.phi), zero_nyquist(state.phi_t))
    history = [state]
    for i in range(1, steps + 1):
        state = stepper(kind, state, dt)
        if i % cadence == 0 or i == steps:
            history.append(state)
    return history


__all__ = [
    "Grid1D", "make_grid", "Clock", "ComplexField", "FieldState", "Wave", "Schrodinger",
    "KleinGordon", "EquationKind", "zero_nyquist", "evolve_spectral", "step_fd",
    "conserved_quantity", "StabilityError", "check_leapfrog_stability", "evolve",
]

