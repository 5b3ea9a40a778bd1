"""Sampled wavefunctions from coefficient states, norms and observables.

The exponential prefactor is fixed to one: psi(x) = exp(S(x)) with the
real part of alpha_0 carrying the log-amplitude.  Physical normalization
happens at analysis time (expectation values divide by the norm), never
by rescaling coefficients.  Quadrature is composite trapezoid.
"""

from dataclasses import dataclass

import numpy as np

from .state import CoefficientState, PhysicalParams

__all__ = [
    "WaveGrid",
    "Observables",
    "ExponentOverflow",
    "ZeroNorm",
    "evaluate_at",
    "evaluate_on_grid",
    "norm_squared",
    "observables",
    "normalizability_check",
]

# just under the double-precision exp ceiling (exp(710) overflows)
_EXP_CUTOFF = 700.0


class ExponentOverflow(OverflowError):
    """Re S(x) exceeded the exp ceiling: non-normalizable state or a window
    wider than the representation's validity region."""


class ZeroNorm(ValueError):
    """Norm too small to divide by."""


@dataclass
class WaveGrid:
    """Complex samples psi(xmin + j*dx), j = 0..M-1, at one time instant."""

    xmin: float
    dx: float
    values: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.complex128)
        if self.values.ndim != 1 or len(self.values) < 8:
            raise ValueError("values must be a 1-D sequence of at least 8 samples")
        if not (np.isfinite(self.dx) and self.dx > 0):
            raise ValueError(f"dx must be positive and finite, got {self.dx!r}")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("grid values must be finite")

    @property
    def npoints(self) -> int:
        return len(self.values)

    @property
    def xs(self) -> np.ndarray:
        return self.xmin + self.dx * np.arange(self.npoints)


def evaluate_at(state: CoefficientState, xs: np.ndarray) -> np.ndarray:
    """exp(S(x)) at arbitrary positions, S by Horner's rule."""
    xs = np.asarray(xs, dtype=np.float64)
    a = state.alphas
    s = np.full(xs.shape, a[-1], dtype=np.complex128)
    for coeff in a[-2::-1]:
        s = s * xs + coeff
    peak = float(np.max(s.real))
    if peak > _EXP_CUTOFF:
        raise ExponentOverflow(
            f"Re S reaches {peak:.1f} > {_EXP_CUTOFF:.0f} on the requested window"
        )
    return np.exp(s)


def evaluate_on_grid(
    state: CoefficientState, xmin: float, xmax: float, points: int
) -> WaveGrid:
    """Sample the wavefunction on a uniform inclusive grid [xmin, xmax]."""
    if not xmax > xmin:
        raise ValueError(f"xmax must exceed xmin, got [{xmin}, {xmax}]")
    if points < 8:
        raise ValueError(f"points must be at least 8, got {points}")
    xs = np.linspace(xmin, xmax, points)
    values = evaluate_at(state, xs)
    return WaveGrid(xmin=xmin, dx=(xmax - xmin) / (points - 1), values=values, time=state.time)


def norm_squared(grid: WaveGrid) -> float:
    """Trapezoid integral of |psi|^2 over the grid window."""
    return float(np.trapezoid(np.abs(grid.values) ** 2, dx=grid.dx))


@dataclass(frozen=True)
class Observables:
    norm2: float
    mean_x: float
    mean_x2: float
    mean_p_re: float
    mean_p_im: float  # diagnostic; near zero for well-resolved states


def observables(grid: WaveGrid, params: PhysicalParams) -> Observables:
    """norm^2 and normalized <x>, <x^2>, <p> over the grid window.

    <p> uses -i*hbar*d/dx with central differences in the interior and
    one-sided differences at the ends; its residual imaginary part is
    reported as a discretization diagnostic.
    """
    n2 = norm_squared(grid)
    if n2 <= 1e-300:
        raise ZeroNorm("norm^2 vanishes on this window")
    xs = grid.xs
    density = np.abs(grid.values) ** 2
    mean_x = float(np.trapezoid(xs * density, dx=grid.dx)) / n2
    mean_x2 = float(np.trapezoid(xs**2 * density, dx=grid.dx)) / n2
    dpsi = np.gradient(grid.values, grid.dx)
    p_int = np.conj(grid.values) * (-1j * params.hbar) * dpsi
    mean_p = complex(np.trapezoid(p_int, dx=grid.dx)) / n2
    return Observables(n2, mean_x, mean_x2, mean_p.real, mean_p.imag)


def normalizability_check(state: CoefficientState, epsilon: float = 1e-12) -> bool:
    """True iff the leading coefficient above the magnitude floor is of even
    index n >= 2 with negative real part (so |psi| decays at both infinities)."""
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    above = np.nonzero(np.abs(state.alphas) > epsilon)[0]
    if len(above) == 0:
        return False
    n = int(above[-1])
    return bool(n >= 2 and n % 2 == 0 and state.alphas[n].real < 0)
