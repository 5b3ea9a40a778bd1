"""Coefficient-flow state types and the right-hand side of the coefficient ODEs.

The wavefunction is represented as psi(x, t) = exp(S(x, t)) with

    S(x, t) = sum_{n=0}^{N} alphas[n](t) * x**n,

truncated at a fixed order N.  Substituting into
i*hbar*dpsi/dt = -(hbar^2/2m)*d2psi/dx2 + V(x,t)*psi and matching powers
of x gives one ODE per coefficient:

    d(alpha_n)/dt = (i*hbar/2m) * [ (n+2)(n+1)*alpha_{n+2}
                     + sum_{k=0}^{n} (k+1)(n-k+1)*alpha_{k+1}*alpha_{n-k+1} ]
                    - (i/hbar) * V_n(t)

where V_n(t) is the n-th Taylor coefficient of the potential about x = 0,
with the 1/n! factor already absorbed (see the potential module).  The
infinite system is closed by holding alpha_n = 0 for every n > N.

Unit conventions: alphas[n] carries length^-n, V_n carries
energy * length^-n.  All functions here are pure; values are safe to
share between threads without synchronization.
"""

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "PhysicalParams",
    "CoefficientState",
    "VelocityVector",
    "convolution_term",
    "coefficient_velocity",
]


@dataclass(frozen=True)
class PhysicalParams:
    """hbar and particle mass, in any consistent unit system."""

    hbar: float = 1.0
    mass: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.hbar) and self.hbar > 0):
            raise ValueError(f"hbar must be positive and finite, got {self.hbar!r}")
        if not (math.isfinite(self.mass) and self.mass > 0):
            raise ValueError(f"mass must be positive and finite, got {self.mass!r}")


@dataclass
class CoefficientState:
    """Complex coefficient vector alpha_0..alpha_N at one time instant.

    ``alphas[n]`` multiplies x**n in the exponent; the array always has
    length ``truncation_order + 1``.  A physically meaningful state has
    only finite entries; states produced by a diverging time step may
    transiently violate this, which is what ``detect_blowup`` in the
    integrators module is for.
    """

    alphas: np.ndarray
    time: float = 0.0
    truncation_order: int = field(default=-1)

    def __post_init__(self):
        self.alphas = np.array(self.alphas, dtype=np.complex128)
        if self.alphas.ndim != 1:
            raise ValueError("alphas must be a one-dimensional sequence")
        if self.truncation_order == -1:
            self.truncation_order = len(self.alphas) - 1
        if len(self.alphas) != self.truncation_order + 1:
            raise ValueError(
                f"alphas has length {len(self.alphas)}, expected "
                f"truncation_order + 1 = {self.truncation_order + 1}"
            )
        if self.truncation_order < 2:
            raise ValueError("truncation_order must be at least 2")


@dataclass(frozen=True)
class VelocityVector:
    """Time derivatives d(alpha_n)/dt, same indexing as CoefficientState."""

    derivs: np.ndarray


def convolution_term(alphas, n: int) -> complex:
    """Quadratic self-interaction sum_{k=0}^{n} (k+1)(n-k+1) a_{k+1} a_{n-k+1}.

    This is the x**n coefficient of (dS/dx)**2.  Indices beyond the stored
    range count as zero coefficients.
    """
    a = np.asarray(alphas, dtype=np.complex128)
    total = 0.0 + 0.0j
    for k in range(n + 1):
        i, j = k + 1, n - k + 1
        if i < len(a) and j < len(a):
            total += (i * j) * a[i] * a[j]
    return complex(total)


def coefficient_velocity(
    state: CoefficientState, v_coeffs, params: PhysicalParams
) -> VelocityVector:
    """Right-hand side of the coefficient ODE system at the state's instant.

    ``v_coeffs`` holds the potential's Taylor coefficients V_0..V_M
    evaluated at the current time; entries beyond the stored range count
    as zero, as do alpha coefficients above the truncation order.
    """
    a = state.alphas
    n_max = state.truncation_order

    # ladder term (n+2)(n+1) * alpha_{n+2}, zero above the truncation order
    shifted = np.zeros(n_max + 1, dtype=np.complex128)
    shifted[: n_max - 1] = a[2:]
    n = np.arange(n_max + 1)
    kinetic = (n + 2) * (n + 1) * shifted

    # Cauchy square of the derivative series c_j = (j+1) * alpha_{j+1};
    # trailing zeros are trimmed first so the summation order (and thus the
    # bit pattern) depends only on the numerical content, not on how much
    # zero padding the truncation order happens to carry
    c = np.arange(1, n_max + 1) * a[1:]
    nonzero = np.nonzero(c)[0]
    quad = np.zeros(n_max + 1, dtype=np.complex128)
    if len(nonzero):
        c = c[: nonzero[-1] + 1]
        full = np.convolve(c, c)
        m = min(len(full), n_max + 1)
        quad[:m] = full[:m]

    v = np.asarray(v_coeffs, dtype=np.float64)
    pot = np.zeros(n_max + 1)
    m = min(len(v), n_max + 1)
    pot[:m] = v[:m]

    derivs = (0.5j * params.hbar / params.mass) * (kinetic + quad) - (
        1j / params.hbar
    ) * pot
    return VelocityVector(derivs)
