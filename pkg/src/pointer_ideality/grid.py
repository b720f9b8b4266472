"""Uniform 1-D grids and complex wavefunctions sampled on them.

Every integral is a composite Simpson sum over the grid nodes, so grids
always carry an odd node count.  Units are hbar = m = 1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.integrate import simpson

__all__ = [
    "Grid",
    "GridError",
    "GridMismatchError",
    "Wavefunction",
    "WindowError",
    "abs_overlap",
    "apply_linear_phase",
    "auto_grid",
    "boundary_mass",
    "check_window",
    "inner_product",
    "integrate",
    "make_grid",
    "normalize",
    "translate",
]

WINDOW_GUARD = 1e-8
GUARD_EDGE_FRACTION = 0.02
STRICT_SHIFT_LOSS = 1e-6


class GridError(ValueError):
    """Invalid grid construction or an operation the grid cannot support."""


class GridMismatchError(GridError):
    """Two wavefunctions live on different grids."""


class WindowError(GridError):
    """The finite window truncates more probability mass than allowed."""


@dataclass(frozen=True)
class Grid:
    x_min: float
    x_max: float
    n: int

    def __post_init__(self):
        if not (math.isfinite(self.x_min) and math.isfinite(self.x_max)):
            raise GridError("grid bounds must be finite")
        if not self.x_min < self.x_max:
            raise GridError(f"need x_min < x_max, got ({self.x_min}, {self.x_max})")
        if int(self.n) != self.n or self.n < 3 or self.n % 2 == 0:
            raise GridError(f"node count must be odd and >= 3, got {self.n}")

    @property
    def h(self) -> float:
        return (self.x_max - self.x_min) / (self.n - 1)

    @cached_property
    def x(self) -> np.ndarray:
        x = self.x_min + self.h * np.arange(self.n)
        x[-1] = self.x_max
        x.flags.writeable = False
        return x

    @cached_property
    def weights(self) -> np.ndarray:
        """Composite Simpson weights, h/3 * (1, 4, 2, 4, ..., 2, 4, 1)."""
        w = np.full(self.n, 2.0)
        w[1::2] = 4.0
        w[0] = w[-1] = 1.0
        w *= self.h / 3.0
        w.flags.writeable = False
        return w

    def node_index(self, x0: float) -> int | None:
        """Index of the node sitting at ``x0`` (to 1e-9 h), else None."""
        k = round((x0 - self.x_min) / self.h)
        if 0 <= k < self.n and abs(self.x_min + k * self.h - x0) <= 1e-9 * self.h:
            return int(k)
        return None


def make_grid(x_min: float, x_max: float, n: int) -> Grid:
    return Grid(float(x_min), float(x_max), int(n))


def auto_grid(
    center_offset: float,
    width: float,
    *,
    wavenumber: float = 0.0,
    commensurate: float | None = None,
    widths: float = 8.0,
    max_nodes: int = 4_000_001,
) -> Grid:
    """Symmetric grid sized from the physics of a pointer pair.

    The half-width is ``|center_offset| + widths * width``.  The spacing is
    small enough to resolve the envelope and an integrand oscillating at
    ``wavenumber``; when ``commensurate`` is given the spacing divides it
    exactly so node translations by that distance are exact.  The node
    count is 1 mod 4, which puts x = 0 on a node with an even number of
    Simpson intervals on either side.
    """
    if width <= 0 or not math.isfinite(width):
        raise GridError(f"effective width must be positive, got {width}")
    half_width = abs(center_offset) + widths * width
    h = min(width / 8.0, math.pi / (abs(wavenumber) + 10.0 / width))
    if commensurate is not None:
        if commensurate <= 0:
            raise GridError("commensurate distance must be positive")
        h = commensurate / math.ceil(commensurate / h)
    half = math.ceil(half_width / h)
    half += half % 2
    n = 2 * half + 1
    if n > max_nodes:
        raise GridError(f"auto grid needs {n} nodes (cap {max_nodes})")
    return Grid(-half * h, half * h, n)


class Wavefunction:
    """Complex amplitudes on the nodes of a :class:`Grid`.

    Instances are treated as immutable; the amplitude array is read-only.
    """

    __slots__ = ("grid", "amplitudes")

    def __init__(self, grid: Grid, amplitudes):
        amplitudes = np.array(amplitudes, dtype=complex)
        if amplitudes.shape != (grid.n,):
            raise GridError(
                f"expected {grid.n} amplitudes, got shape {amplitudes.shape}"
            )
        amplitudes.flags.writeable = False
        self.grid = grid
        self.amplitudes = amplitudes

    def __repr__(self):
        return f"Wavefunction(grid={self.grid!r}, norm={self.norm():.6g})"

    @property
    def x(self) -> np.ndarray:
        return self.grid.x

    @property
    def density(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def norm(self) -> float:
        return math.sqrt(integrate(self.grid, self.density))

    def with_amplitudes(self, amplitudes) -> Wavefunction:
        return Wavefunction(self.grid, amplitudes)


def integrate(grid: Grid, values, rule: str = "simpson"):
    """Integrate nodal ``values`` over the whole grid.

    ``rule="trapezoid"`` is kept as an independent low-order cross-check.
    """
    values = np.asarray(values)
    if rule == "simpson":
        return np.sum(grid.weights * values)
    if rule == "trapezoid":
        return np.trapezoid(values, dx=grid.h)
    raise ValueError(f"unknown quadrature rule {rule!r}")


def _same_grid(a: Wavefunction, b: Wavefunction) -> Grid:
    if a.grid != b.grid:
        raise GridMismatchError(f"{a.grid} != {b.grid}")
    return a.grid


def inner_product(a: Wavefunction, b: Wavefunction) -> complex:
    """Simpson estimate of the integral of conj(a) * b."""
    grid = _same_grid(a, b)
    return complex(integrate(grid, np.conj(a.amplitudes) * b.amplitudes))


def abs_overlap(a: Wavefunction, b: Wavefunction) -> float:
    """Simpson estimate of the integral of |a| |b|."""
    grid = _same_grid(a, b)
    return float(integrate(grid, np.abs(a.amplitudes) * np.abs(b.amplitudes)))


def normalize(psi: Wavefunction) -> Wavefunction:
    norm = psi.norm()
    if not norm > 0 or not math.isfinite(norm):
        raise GridError("cannot normalize a wavefunction with zero or non-finite norm")
    return psi.with_amplitudes(psi.amplitudes / norm)


def translate(psi: Wavefunction, d: float, *, strict: bool = True) -> Wavefunction:
    """Return x -> psi(x - d), shifting by a whole number of nodes.

    Amplitudes pushed past the window edge are dropped.  In strict mode a
    relative norm loss of 1e-6 or more raises :class:`WindowError`.
    """
    grid = psi.grid
    steps = round(d / grid.h)
    if abs(d - steps * grid.h) > 1e-12 * grid.h:
        raise GridError(f"shift {d} is not a multiple of the grid spacing {grid.h}")
    src = psi.amplitudes
    out = np.zeros_like(src)
    if steps == 0:
        out[:] = src
    elif abs(steps) < grid.n:
        if steps > 0:
            out[steps:] = src[:-steps]
        else:
            out[:steps] = src[-steps:]
    shifted = psi.with_amplitudes(out)
    if strict:
        before = integrate(grid, psi.density)
        after = integrate(grid, shifted.density)
        if before > 0 and (before - after) / before >= STRICT_SHIFT_LOSS:
            raise WindowError(
                f"translation by {d} loses {(before - after) / before:.3g} of the norm"
            )
    return shifted


def apply_linear_phase(psi: Wavefunction, k: float) -> Wavefunction:
    return psi.with_amplitudes(psi.amplitudes * np.exp(1j * k * psi.x))


def boundary_mass(psi: Wavefunction, edge_fraction: float) -> float:
    """Probability in the outer ``edge_fraction`` of the window, both sides summed.

    The edge is rounded to the nearest node (at least one interval).
    """
    if not 0.0 < edge_fraction < 0.5:
        raise GridError(f"edge_fraction must lie in (0, 0.5), got {edge_fraction}")
    grid = psi.grid
    k = max(1, round(edge_fraction * (grid.n - 1)))
    rho = psi.density
    total = integrate(grid, rho)
    if not total > 0:
        raise GridError("boundary mass of a zero wavefunction is undefined")
    left = simpson(rho[: k + 1], dx=grid.h)
    right = simpson(rho[grid.n - 1 - k :], dx=grid.h)
    return float((left + right) / total)


def check_window(psi: Wavefunction, guard: float = WINDOW_GUARD) -> float:
    """Raise :class:`WindowError` unless the edge mass is below ``guard``."""
    mass = boundary_mass(psi, GUARD_EDGE_FRACTION)
    if mass >= guard:
        raise WindowError(
            f"window {psi.grid.x_min:g}..{psi.grid.x_max:g} truncates: "
            f"edge mass {mass:.3g} >= {guard:g}"
        )
    return mass
