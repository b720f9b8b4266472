"""Qubit side of the measurement: composite state, channel probabilities, POVM.

Matrices are written in the sigma_x eigenbasis, ordered (|up>_x, |down>_x),
so the sharp projectors P_{+x}, P_{-x} are diag(1, 0) and diag(0, 1).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .grid import GridError, Wavefunction, integrate

__all__ = [
    "CompositeState",
    "OutcomeCounts",
    "P_MINUS_X",
    "P_PLUS_X",
    "PovmPair",
    "QubitState",
    "channel_probabilities",
    "make_composite",
    "povm_elements",
    "povm_probabilities",
    "sample_outcomes",
]

P_PLUS_X = np.diag([1.0, 0.0]).astype(complex)
P_MINUS_X = np.diag([0.0, 1.0]).astype(complex)
IDENTITY = np.eye(2, dtype=complex)


@dataclass(frozen=True)
class QubitState:
    alpha: complex
    beta: complex

    def __post_init__(self):
        norm = abs(self.alpha) ** 2 + abs(self.beta) ** 2
        if abs(norm - 1.0) > 1e-10:
            raise ValueError(f"|alpha|^2 + |beta|^2 = {norm!r}, expected 1")

    @classmethod
    def from_up_probability(cls, p_up: float, phase: float = 0.0) -> QubitState:
        if not 0.0 <= p_up <= 1.0:
            raise ValueError(f"probability must lie in [0, 1], got {p_up}")
        return cls(complex(math.sqrt(p_up)), math.sqrt(1.0 - p_up) * complex(math.cos(phase), math.sin(phase)))

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.alpha, self.beta], dtype=complex)

    @property
    def density_matrix(self) -> np.ndarray:
        v = self.vector
        return np.outer(v, v.conj())


@dataclass(frozen=True, eq=False)
class CompositeState:
    """alpha psi_+ (x) |up>_x + beta psi_- (x) |down>_x."""

    qubit: QubitState
    psi_plus: Wavefunction
    psi_minus: Wavefunction

    @property
    def grid(self):
        return self.psi_plus.grid

    def marginal_density(self) -> np.ndarray:
        """Position density with the spin traced out."""
        return (
            abs(self.qubit.alpha) ** 2 * self.psi_plus.density
            + abs(self.qubit.beta) ** 2 * self.psi_minus.density
        )


def make_composite(chi: QubitState, psi_plus: Wavefunction, psi_minus: Wavefunction) -> CompositeState:
    if psi_plus.grid != psi_minus.grid:
        raise GridError("branches must share a grid")
    for name, psi in (("psi_plus", psi_plus), ("psi_minus", psi_minus)):
        if abs(psi.norm() - 1.0) > 1e-8:
            raise ValueError(f"{name} has norm {psi.norm():.12g}, expected 1")
    state = CompositeState(chi, psi_plus, psi_minus)
    total = integrate(state.grid, state.marginal_density())
    if abs(total - 1.0) > 1e-8:
        raise ValueError(f"composite state norm {total:.12g} != 1")
    return state


def _check_error_measure(E: float) -> None:
    if not 0.0 <= E <= 0.5:
        raise ValueError(f"error measure must lie in [0, 1/2], got {E}")


def channel_probabilities(chi: QubitState, E: float) -> tuple[float, float]:
    """(p^u_{+x}, p^d_{-x}): right spin found in the right channel.

    These are joint probabilities and do not sum to one unless E = 0.
    """
    _check_error_measure(E)
    return (1 - E) * abs(chi.alpha) ** 2, (1 - E) * abs(chi.beta) ** 2


@dataclass(frozen=True, eq=False)
class PovmPair:
    pi_plus: np.ndarray
    pi_minus: np.ndarray

    def __post_init__(self):
        for name, op in (("pi_plus", self.pi_plus), ("pi_minus", self.pi_minus)):
            if op.shape != (2, 2) or not np.allclose(op, op.conj().T, atol=1e-12):
                raise ValueError(f"{name} must be a Hermitian 2x2 matrix")
            if np.linalg.eigvalsh(op).min() < -1e-12:
                raise ValueError(f"{name} is not positive semidefinite")
        if np.max(np.abs(self.pi_plus + self.pi_minus - IDENTITY)) > 1e-10:
            raise ValueError("POVM elements do not sum to the identity")


def povm_elements(E: float) -> PovmPair:
    """Unsharp sigma_x measurement Pi_{+-} = E 1 + (1 - 2E) P_{+-x}.

    This is the affine pair that yields p_+ = (1 - E)|alpha|^2 + E|beta|^2.
    """
    _check_error_measure(E)
    return PovmPair(E * IDENTITY + (1 - 2 * E) * P_PLUS_X, E * IDENTITY + (1 - 2 * E) * P_MINUS_X)


def povm_probabilities(chi: QubitState, povm: PovmPair) -> tuple[float, float]:
    rho = chi.density_matrix
    return float(np.trace(rho @ povm.pi_plus).real), float(np.trace(rho @ povm.pi_minus).real)


@dataclass(frozen=True)
class OutcomeCounts:
    n_upper: int
    n_lower: int
    n_total: int
    seed: int

    @property
    def upper_fraction(self) -> float:
        return self.n_upper / self.n_total


def sample_outcomes(composite: CompositeState, n: int, seed: int) -> OutcomeCounts:
    """Draw n detector positions from the marginal density and count channels.

    Positions come from inverting the piecewise-linear CDF on the grid;
    x > 0 is the upper channel, x < 0 the lower, and x = 0 is split by a
    fair coin.
    """
    if n <= 0:
        raise ValueError("need at least one sample")
    grid = composite.grid
    cdf = cumulative_trapezoid(composite.marginal_density(), dx=grid.h, initial=0.0)
    if not cdf[-1] > 0:
        raise ValueError("marginal density has no mass")
    cdf /= cdf[-1]
    rng = np.random.default_rng(seed)
    u = rng.random(n)
    hi = np.clip(np.searchsorted(cdf, u, side="right"), 1, grid.n - 1)
    lo = hi - 1
    frac = (u - cdf[lo]) / (cdf[hi] - cdf[lo])
    x = grid.x[lo] + frac * grid.h
    upper = x > 0
    tie = x == 0
    if tie.any():
        upper[tie] = rng.random(int(tie.sum())) < 0.5
    n_upper = int(upper.sum())
    return OutcomeCounts(n_upper, n - n_upper, n, seed)
