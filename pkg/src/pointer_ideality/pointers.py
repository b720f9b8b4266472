"""Pointer-state families: Gaussian, squeezed, faithful and linear-phase.

Gaussian and squeezed pointers are the free-particle packets displaced by
the impulsive coupling ``g x sigma_x``.  Each branch is a Gaussian in x with
a complex width parameter ``w`` (so that ``|psi|^2`` has variance
``|w|^2 / Re(w)``), centred at ``+-g t / 2`` and carrying a momentum kick
``+-g``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .grid import (
    Grid,
    GridError,
    Wavefunction,
    apply_linear_phase,
    check_window,
    normalize,
)

__all__ = [
    "FaithfulParams",
    "GaussianParams",
    "SqueezedParams",
    "branch_amplitude",
    "faithful_from_seed",
    "faithful_post_states",
    "faithful_sequence_step",
    "faithful_u",
    "gaussian_envelope",
    "gaussian_initial",
    "gaussian_post",
    "linear_phase_pointer",
    "squeezed_initial",
    "squeezed_post",
    "triangular_envelope",
]


@dataclass(frozen=True)
class GaussianParams:
    sigma0: float
    g: float
    t: float

    def __post_init__(self):
        if not self.sigma0 > 0:
            raise ValueError(f"sigma0 must be positive, got {self.sigma0}")
        if not self.t >= 0:
            raise ValueError(f"interaction time must be >= 0, got {self.t}")

    @property
    def s_t(self) -> complex:
        return self.sigma0 * (1 + 1j * self.t / (2 * self.sigma0**2))

    @property
    def sigma_t(self) -> float:
        """Standard deviation of |psi_+-|^2 at time t."""
        return self.sigma0 * math.sqrt(1 + self.t**2 / (4 * self.sigma0**4))

    @property
    def sigma_t_literal(self) -> float:
        """Spread with the printed t**4 in place of t**2 (kept for comparison)."""
        return self.sigma0 * math.sqrt(1 + self.t**4 / (4 * self.sigma0**4))

    @property
    def k_x(self) -> float:
        return self.g

    @property
    def center(self) -> float:
        return self.g * self.t / 2

    @property
    def effective_wavenumber(self) -> float:
        # highest spatial frequency of conj(psi_+) * psi_-
        tau = self.t / (2 * self.sigma0**2)
        return 2 * abs(self.g) + abs(self.center * tau) / self.sigma_t**2


@dataclass(frozen=True)
class SqueezedParams:
    """Chirped ("squeezed") pointer with complex initial width sigma0 (1 + iC)."""

    sigma0: float
    g: float
    t: float
    C: float

    def __post_init__(self):
        if not self.sigma0 > 0:
            raise ValueError(f"sigma0 must be positive, got {self.sigma0}")
        if not self.t >= 0:
            raise ValueError(f"interaction time must be >= 0, got {self.t}")

    @property
    def s_t(self) -> complex:
        # free evolution of exp(-x^2 / (4 sigma0^2 (1 + iC))) adds i t / 2 to sigma0 * s_t
        return self.sigma0 * (1 + 1j * self.C) + 1j * self.t / (2 * self.sigma0)

    @property
    def chirp(self) -> float:
        return self.C + self.t / (2 * self.sigma0**2)

    @property
    def sigma_t(self) -> float:
        return self.sigma0 * math.sqrt(1 + self.chirp**2)

    @property
    def initial_width(self) -> float:
        return self.sigma0 * math.sqrt(1 + self.C**2)

    @property
    def center(self) -> float:
        return self.g * self.t / 2

    @property
    def effective_wavenumber(self) -> float:
        return 2 * abs(self.g) + abs(self.center * self.chirp) / self.sigma_t**2


@dataclass(frozen=True)
class FaithfulParams:
    """Parameters of the variational faithful family.

    ``gamma1`` absorbs the Lagrange multiplier; ``gamma2`` is its conjugate.
    """

    gamma1: complex
    theta: float
    s: float
    m: int = 0

    def __post_init__(self):
        if not self.s > 0:
            raise ValueError(f"shift s must be positive, got {self.s}")
        if int(self.m) != self.m:
            raise ValueError(f"sequence index m must be an integer, got {self.m}")

    @classmethod
    def from_tilt(cls, tilt: float, theta: float, s: float, m: int = 0) -> FaithfulParams:
        """Real gamma1 whose ``Re acosh(-1/(gamma1 + gamma2))`` equals ``tilt``."""
        return cls(complex(-0.5 / math.cosh(tilt)), theta, s, m)

    @property
    def gamma2(self) -> complex:
        return complex(self.gamma1).conjugate()

    @property
    def gamma_sum(self) -> float:
        return 2.0 * complex(self.gamma1).real

    @property
    def acosh_argument(self) -> float:
        if self.gamma_sum == 0:
            raise ZeroDivisionError("Re(gamma1) = 0 makes -1/(gamma1 + gamma2) singular")
        return -1.0 / self.gamma_sum

    @property
    def tilt(self) -> float:
        """u' = Re acosh(-1/(gamma1 + gamma2)), the exponential tilt rate."""
        return cmath.acosh(self.acosh_argument).real


def branch_amplitude(x, sigma0, s_t, center, kick, lib=np):
    """Displaced, kicked Gaussian branch evaluated with ``lib`` (numpy or mpmath).

    (2 pi s_t^2)^(-1/4) exp[-(x - center)^2 / (4 sigma0 s_t) + i kick x]
    """
    return (2 * lib.pi * s_t**2) ** -0.25 * lib.exp(
        -((x - center) ** 2) / (4 * sigma0 * s_t) + 1j * kick * x
    )


def _branch_pair(grid: Grid, sigma0, s_t, center, kick, strict: bool):
    plus = Wavefunction(grid, branch_amplitude(grid.x, sigma0, s_t, center, kick))
    minus = Wavefunction(grid, branch_amplitude(grid.x, sigma0, s_t, -center, -kick))
    if strict:
        check_window(plus)
        check_window(minus)
    return normalize(plus), normalize(minus)


def gaussian_initial(p: GaussianParams, grid: Grid, *, strict: bool = True) -> Wavefunction:
    amp = (2 * math.pi * p.sigma0**2) ** -0.25 * np.exp(-grid.x**2 / (4 * p.sigma0**2))
    psi = Wavefunction(grid, amp)
    if strict:
        check_window(psi)
    return normalize(psi)


def gaussian_post(
    p: GaussianParams, grid: Grid, *, strict: bool = True
) -> tuple[Wavefunction, Wavefunction]:
    """Post-interaction branches (psi_+, psi_-) of a Gaussian pointer."""
    return _branch_pair(grid, p.sigma0, p.s_t, p.center, p.k_x, strict)


def squeezed_initial(p: SqueezedParams, grid: Grid, *, strict: bool = True) -> Wavefunction:
    """Chirped initial pointer, renormalized on the grid.

    The exponent carries a single power of (1 + iC); with (1 + iC)^2 the
    state would not be normalizable for |C| > 1.
    """
    s0 = p.sigma0 * (1 + 1j * p.C)
    amp = (2 * np.pi * s0**2) ** -0.25 * np.exp(-grid.x**2 / (4 * p.sigma0 * s0))
    psi = Wavefunction(grid, amp)
    if strict:
        check_window(psi)
    return normalize(psi)


def squeezed_post(
    p: SqueezedParams, grid: Grid, *, strict: bool = True
) -> tuple[Wavefunction, Wavefunction]:
    return _branch_pair(grid, p.sigma0, p.s_t, p.center, p.g, strict)


def gaussian_envelope(grid: Grid, sigma0: float, center: float = 0.0) -> Wavefunction:
    """Real positive envelope whose density has standard deviation ``sigma0``."""
    return normalize(Wavefunction(grid, np.exp(-((grid.x - center) ** 2) / (4 * sigma0**2))))


def triangular_envelope(grid: Grid, sigma0: float, center: float = 0.0) -> Wavefunction:
    """Tent-shaped amplitude; half-base sqrt(10) sigma0 gives density std sigma0."""
    half_base = math.sqrt(10.0) * sigma0
    amp = np.clip(1.0 - np.abs(grid.x - center) / half_base, 0.0, None)
    return normalize(Wavefunction(grid, amp))


def faithful_u(p: FaithfulParams) -> complex:
    """u = acosh(-1/(gamma1 + gamma2)) / 2 on the principal branch (Re u >= 0)."""
    return 0.5 * cmath.acosh(p.acosh_argument)


def faithful_from_seed(seed: Wavefunction, p: FaithfulParams) -> Wavefunction:
    """Scale the m-th sequence member back to the family's base pointer.

    The scalar exp[-m Re acosh(...) + 2 i m theta] is independent of r, so
    after renormalization only its phase survives.
    """
    scalar = cmath.exp(-p.m * p.tilt + 2j * p.m * p.theta)
    return normalize(seed.with_amplitudes(scalar * seed.amplitudes))


def faithful_post_states(
    psi0: Wavefunction, p: FaithfulParams, *, strict: bool = True
) -> tuple[Wavefunction, Wavefunction]:
    """psi_+-(r) = psi0(r) exp[(r +- s) u' - 2 i (r +- s) theta], each renormalized."""
    u = p.tilt
    r = psi0.x
    out = []
    for sign in (1, -1):
        shifted = r + sign * p.s
        exponent = shifted * u
        if np.max(exponent) > 700:
            raise GridError(f"tilt {u} overflows on a window reaching r = {r[-1]}")
        factor = np.exp(exponent - 2j * shifted * p.theta)
        psi = psi0.with_amplitudes(psi0.amplitudes * factor)
        if strict:
            check_window(psi)
        out.append(normalize(psi))
    return out[0], out[1]


def linear_phase_pointer(envelope: Wavefunction, kappa: float) -> Wavefunction:
    """Real nonnegative envelope times exp(i kappa x), normalized.

    Translating this pointer by +-s leaves conj(psi_+) psi_- with the
    constant phase 2 kappa s, so M = |I| for any shift.
    """
    amp = envelope.amplitudes
    if np.any(amp.imag != 0) or np.any(amp.real < 0):
        raise ValueError("envelope amplitudes must be real and nonnegative")
    return normalize(apply_linear_phase(envelope, kappa))


def faithful_sequence_step(
    psi_m: Wavefunction, psi_m_minus_1: Wavefunction, p: FaithfulParams
) -> Wavefunction:
    """Next member of psi_m = -g1 e^{2i theta} psi_{m+1} - g2 e^{-2i theta} psi_{m-1}."""
    if psi_m.grid != psi_m_minus_1.grid:
        raise GridError("sequence members must share a grid")
    g1 = complex(p.gamma1)
    if g1 == 0:
        raise ZeroDivisionError("gamma1 = 0 leaves psi_{m+1} undetermined")
    up = g1 * cmath.exp(2j * p.theta)
    down = p.gamma2 * cmath.exp(-2j * p.theta)
    return psi_m.with_amplitudes(-(psi_m.amplitudes + down * psi_m_minus_1.amplitudes) / up)
