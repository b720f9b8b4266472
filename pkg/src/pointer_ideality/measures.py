"""Formal vs operational idealness of a pair of post-interaction pointers.

``|I|`` is the modulus of the inner product of the two branches and ``M``
the overlap of their moduli.  ``M >= |I|`` always, with equality exactly
when conj(psi_+) psi_- carries a constant phase on the common support.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np
from scipy.integrate import simpson

from .grid import (
    GUARD_EDGE_FRACTION,
    Grid,
    GridError,
    Wavefunction,
    abs_overlap,
    boundary_mass,
    inner_product,
    integrate,
    translate,
)
from .pointers import FaithfulParams, GaussianParams, SqueezedParams

__all__ = [
    "CertificateError",
    "IdealityReport",
    "LagrangianValue",
    "error_measure",
    "error_measure_pair",
    "extended_precision_overlaps",
    "faithfulness_certificate",
    "formal_overlap",
    "gaussian_closed_forms",
    "ideality_report",
    "lagrangian_objective",
    "operational_overlap",
    "squeezed_closed_forms",
    "stationarity_residual",
]

FAITHFUL_PHASE_TOL = 1e-6
E_SYMMETRY_TOL = 1e-6


class CertificateError(ValueError):
    pass


def formal_overlap(psi_plus: Wavefunction, psi_minus: Wavefunction) -> complex:
    """I = <psi_+|psi_->; its modulus is |I| and its argument theta."""
    return inner_product(psi_plus, psi_minus)


def operational_overlap(psi_plus: Wavefunction, psi_minus: Wavefunction) -> float:
    return abs_overlap(psi_plus, psi_minus)


def error_measure_pair(psi_plus: Wavefunction, psi_minus: Wavefunction) -> tuple[float, float]:
    """Wrong-side probabilities (lower branch at x > 0, upper branch at x < 0)."""
    grid = psi_plus.grid
    if psi_minus.grid != grid:
        raise GridError("error measure needs both branches on one grid")
    i0 = grid.node_index(0.0)
    if i0 is None:
        raise GridError("error measure needs a grid node at x = 0")
    rho_minus = psi_minus.density
    rho_plus = psi_plus.density
    lower_wrong = simpson(rho_minus[i0:], dx=grid.h) / integrate(grid, rho_minus)
    upper_wrong = simpson(rho_plus[: i0 + 1], dx=grid.h) / integrate(grid, rho_plus)
    return float(lower_wrong), float(upper_wrong)


def error_measure(
    psi_plus: Wavefunction, psi_minus: Wavefunction, *, symmetric: bool = True
) -> float:
    """E, the mass of psi_- on x > 0.

    For symmetric configurations the mass of psi_+ on x < 0 must agree to
    1e-6.  With ``symmetric=False`` the check is skipped; use
    :func:`error_measure_pair` to get both values.
    """
    lower_wrong, upper_wrong = error_measure_pair(psi_plus, psi_minus)
    if symmetric and abs(lower_wrong - upper_wrong) > E_SYMMETRY_TOL:
        raise ValueError(
            f"asymmetric pointers: E from psi_- is {lower_wrong:.9g}, "
            f"from psi_+ is {upper_wrong:.9g}"
        )
    return min(max(lower_wrong, 0.0), 0.5 + 1e-9)


def gaussian_closed_forms(p: GaussianParams) -> tuple[float, float, float]:
    """(|I|, M, M with the t**4 spread) for the Gaussian pointer pair."""
    g, t, s0 = p.g, p.t, p.sigma0
    abs_i = math.exp(-(g**2) * t**2 / (8 * s0**2) - 2 * g**2 * s0**2)
    m = math.exp(-(g**2) * t**2 / (8 * p.sigma_t**2))
    m_literal = math.exp(-(g**2) * t**2 / (8 * p.sigma_t_literal**2))
    return abs_i, m, m_literal


def squeezed_closed_forms(p: SqueezedParams) -> tuple[float, float, float]:
    """(|I|, M, |I| as printed) for the squeezed pointer pair.

    The quadrature-consistent |I| has C t / (2 sigma0^2) in the bracket;
    the printed form has C t / sigma0^2.  Both reduce to the Gaussian
    result at C = 0.
    """
    g, t, s0, c = p.g, p.t, p.sigma0, p.C
    base = -(g**2) * t**2 / (8 * s0**2)
    abs_i = math.exp(base - 2 * g**2 * s0**2 * (1 + c**2 + c * t / (2 * s0**2)))
    abs_i_literal = math.exp(base - 2 * g**2 * s0**2 * (1 + c**2 + c * t / s0**2))
    m = math.exp(base / (1 + (c + t / (2 * s0**2)) ** 2))
    return abs_i, m, abs_i_literal


def faithfulness_certificate(
    psi_plus: Wavefunction, psi_minus: Wavefunction, mass_floor: float = 1e-6
) -> tuple[bool, float]:
    """Check that conj(psi_+) psi_- has a constant phase where it matters.

    Nodes whose |psi_+||psi_-| falls below ``mass_floor`` times the peak are
    ignored for the phase test, but their total weight still enters the
    bound ``M - |I| <= M_above (1 - cos dev) + 2 M_below``; a pair is
    certified only when ``dev < 1e-6`` rad and that bound is below 1e-6.

    Returns ``(is_faithful, phase_dev)`` where ``phase_dev`` is the largest
    circular deviation from the overlap-weighted mean phase.
    """
    if not 0.0 < mass_floor < 1.0:
        raise ValueError(f"mass_floor must lie in (0, 1), got {mass_floor}")
    grid = psi_plus.grid
    if psi_minus.grid != grid:
        raise GridError("certificate needs both branches on one grid")
    product = np.conj(psi_plus.amplitudes) * psi_minus.amplitudes
    weight = np.abs(product)
    peak = weight.max()
    if not peak > 0:
        raise CertificateError("branches have no common support")
    above = weight >= mass_floor * peak
    mean_phase = np.angle(np.sum(grid.weights[above] * product[above]))
    deviation = np.angle(product[above] * np.exp(-1j * mean_phase))
    phase_dev = float(np.max(np.abs(deviation)))
    m_above = float(np.sum(grid.weights[above] * weight[above]))
    m_below = float(np.sum(grid.weights[~above] * weight[~above]))
    bound = m_above * (1 - math.cos(phase_dev)) + 2 * m_below
    return bool(phase_dev < FAITHFUL_PHASE_TOL and bound < 1e-6), phase_dev


@dataclass(frozen=True)
class IdealityReport:
    M: float
    absI: float
    E: float
    gap: float
    phase_dev: float
    truncation: float
    I: complex = complex("nan")
    E_upper: float = math.nan
    is_faithful: bool = False


def ideality_report(
    psi_plus: Wavefunction, psi_minus: Wavefunction, *, mass_floor: float = 1e-6
) -> IdealityReport:
    """Bundle every scalar diagnostic for one pointer pair.

    Diagnostics that cannot be formed (no node at x = 0, no common support)
    come back as NaN rather than raising.  ``E`` is the psi_- form and
    ``E_upper`` the psi_+ form; they agree for symmetric pairs.
    """
    i = formal_overlap(psi_plus, psi_minus)
    m = operational_overlap(psi_plus, psi_minus)
    try:
        e_lower, e_upper = error_measure_pair(psi_plus, psi_minus)
        e = min(max(e_lower, 0.0), 0.5 + 1e-9)
    except GridError:
        e = e_upper = math.nan
    try:
        faithful, dev = faithfulness_certificate(psi_plus, psi_minus, mass_floor)
    except CertificateError:
        faithful, dev = False, math.nan
    trunc = max(
        boundary_mass(psi_plus, GUARD_EDGE_FRACTION),
        boundary_mass(psi_minus, GUARD_EDGE_FRACTION),
    )
    return IdealityReport(
        M=m,
        absI=abs(i),
        E=e,
        gap=m - abs(i),
        phase_dev=dev,
        truncation=trunc,
        I=i,
        E_upper=e_upper,
        is_faithful=faithful,
    )


@dataclass(frozen=True)
class LagrangianValue:
    value: float
    I: complex
    M: float
    norm_sq: float


def lagrangian_objective(psi: Wavefunction, p: FaithfulParams, lam: float) -> LagrangianValue:
    """L = |I|^2 - M^2 + lam (||psi||^2 - 1) with branches psi(r + s), psi(r - s).

    Mass pushed off the window by the shift is dropped, not renormalized, so
    I and M are built from the same truncated product and stay comparable.
    """
    up = translate(psi, -p.s, strict=False)
    down = translate(psi, p.s, strict=False)
    i = inner_product(up, down)
    m = abs_overlap(up, down)
    norm_sq = float(integrate(psi.grid, psi.density))
    value = abs(i) ** 2 - m**2 + lam * (norm_sq - 1.0)
    return LagrangianValue(value, i, m, norm_sq)


def stationarity_residual(psi0: Wavefunction, p: FaithfulParams) -> float:
    """L2 norm of psi0(r) + g1 e^{2i theta} psi0(r+2s) + g2 e^{-2i theta} psi0(r-2s).

    Evaluated on the interior nodes where both r +- 2s stay inside the window.
    """
    grid = psi0.grid
    k = round(2 * p.s / grid.h)
    if abs(2 * p.s - k * grid.h) > 1e-12 * grid.h:
        raise GridError(f"2s = {2 * p.s} is not a multiple of the grid spacing {grid.h}")
    if 2 * k >= grid.n - 1:
        raise GridError("window too short for a 2s shift on both sides")
    a = psi0.amplitudes
    centre = a[k:-k]
    ahead = a[2 * k :]
    behind = a[: -2 * k]
    res = (
        centre
        + complex(p.gamma1) * np.exp(2j * p.theta) * ahead
        + p.gamma2 * np.exp(-2j * p.theta) * behind
    )
    return float(math.sqrt(simpson(np.abs(res) ** 2, dx=grid.h)))


def extended_precision_overlaps(
    amplitude_plus, amplitude_minus, grid: Grid, dps: int = 40
) -> tuple[complex, float]:
    """Simpson (I, M) for normalized branches, summed in ``dps``-digit arithmetic.

    ``amplitude_plus`` / ``amplitude_minus`` map an mpmath node to an mpmath
    amplitude.  Needed when |I| sits many orders below M: a double-precision
    sum cannot resolve a cancellation deeper than about 1e-16 M.
    """
    with mpmath.workdps(dps):
        h = (mpmath.mpf(grid.x_max) - mpmath.mpf(grid.x_min)) / (grid.n - 1)
        x0 = mpmath.mpf(grid.x_min)
        norm_p = norm_m = cross = moduli = mpmath.mpf(0)
        for j in range(grid.n):
            w = 1 if j in (0, grid.n - 1) else (4 if j % 2 else 2)
            x = x0 + j * h
            a = amplitude_plus(x)
            b = amplitude_minus(x)
            abs_a, abs_b = abs(a), abs(b)
            norm_p += w * abs_a**2
            norm_m += w * abs_b**2
            cross += w * mpmath.conj(a) * b
            moduli += w * abs_a * abs_b
        scale = mpmath.sqrt(norm_p * norm_m)
        return complex(cross / scale), float(moduli / scale)
