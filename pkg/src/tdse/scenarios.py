"""Closed-form references for convergence studies.

Each registered scenario pairs a structural matcher (does this
potential/initial-state combination have a known exact solution?) with
an error functional comparing a propagated final state against that
solution.  Everything here is exact coefficient dynamics:

  free              constant potential, support within {0,1,2}:
                    alpha_2(t) = a/(1 - (2i*hbar/m)*a*t) with a = alpha_2(0)
  linear            degree-1 potential with cos(t) or constant slope,
                    support within {0,1}:
                    alpha_1(t) = alpha_1(0) - (i/hbar) * integral of V_1
  harmonic_ground   V = v2*x^2 with alpha_2 at the stationary value
                    -sqrt(m*v2/2)/hbar and alpha_1 = 0: alpha_2 frozen,
                    alpha_0 advances linearly at rate (i*hbar/m)*alpha_2
  harmonic_coherent same well with alpha_1 != 0:
                    alpha_1(t) = alpha_1(0) * exp(-i*omega*t),
                    omega = sqrt(2*v2/m)
"""

import cmath
import math

import numpy as np

from .potential import Call, Const, PotentialModel, TimeVar
from .state import CoefficientState, PhysicalParams

__all__ = ["SCENARIOS", "detect_scenario", "reference_error"]

SCENARIOS = ("free", "linear", "harmonic_ground", "harmonic_coherent")

_SUPPORT_FLOOR = 1e-12
_MATCH_TOL = 1e-9


def _support(state: CoefficientState) -> set:
    return set(np.nonzero(np.abs(state.alphas) > _SUPPORT_FLOOR)[0].tolist())


def _ground_alpha2(v2: float, params: PhysicalParams) -> float:
    return -math.sqrt(params.mass * v2 / 2.0) / params.hbar


def _harmonic_well(potential: PotentialModel):
    """The v2 of a pure v2*x^2 model with constant positive v2, else None."""
    if set(potential.terms) != {2}:
        return None
    node = potential.terms[2]
    if isinstance(node, Const) and node.value > 0:
        return node.value
    return None


def _matches_free(potential, initial, params) -> bool:
    return potential.degree == 0 and _support(initial) <= {0, 1, 2}


def _matches_linear(potential, initial, params) -> bool:
    if set(potential.terms) - {0, 1} or 1 not in potential.terms:
        return False
    slope = potential.terms[1]
    known = isinstance(slope, Const) or slope == Call("cos", TimeVar())
    return known and _support(initial) <= {0, 1}


def _matches_harmonic(potential, initial, params, coherent: bool) -> bool:
    v2 = _harmonic_well(potential)
    if v2 is None or not _support(initial) <= {0, 1, 2}:
        return False
    a2 = complex(initial.alphas[2])
    if abs(a2 - _ground_alpha2(v2, params)) > _MATCH_TOL:
        return False
    displaced = abs(initial.alphas[1]) > _SUPPORT_FLOOR
    return displaced if coherent else not displaced


def detect_scenario(
    potential: PotentialModel, initial: CoefficientState, params: PhysicalParams
):
    """Name of the matching registered scenario, or None."""
    if _matches_free(potential, initial, params):
        return "free"
    if _matches_linear(potential, initial, params):
        return "linear"
    if _matches_harmonic(potential, initial, params, coherent=False):
        return "harmonic_ground"
    if _matches_harmonic(potential, initial, params, coherent=True):
        return "harmonic_coherent"
    return None


def reference_error(
    name: str,
    potential: PotentialModel,
    initial: CoefficientState,
    final: CoefficientState,
    params: PhysicalParams,
) -> float:
    """Absolute error of the propagated final state against the closed form."""
    elapsed = final.time - initial.time
    hbar, mass = params.hbar, params.mass
    if name == "free":
        a = complex(initial.alphas[2])
        exact = a / (1.0 - (2j * hbar / mass) * a * elapsed)
        return abs(complex(final.alphas[2]) - exact)
    if name == "linear":
        slope = potential.terms[1]
        if isinstance(slope, Const):
            accumulated = slope.value * elapsed
        else:  # cos(t)
            accumulated = math.sin(final.time) - math.sin(initial.time)
        exact = complex(initial.alphas[1]) - (1j / hbar) * accumulated
        return abs(complex(final.alphas[1]) - exact)
    if name == "harmonic_ground":
        a2 = complex(initial.alphas[2])
        exact0 = complex(initial.alphas[0]) + (1j * hbar / mass) * a2 * elapsed
        return max(
            abs(complex(final.alphas[2]) - a2),
            abs(complex(final.alphas[0]) - exact0),
        )
    if name == "harmonic_coherent":
        v2 = _harmonic_well(potential)
        omega = math.sqrt(2.0 * v2 / mass)
        exact = complex(initial.alphas[1]) * cmath.exp(-1j * omega * elapsed)
        return abs(complex(final.alphas[1]) - exact)
    raise ValueError(f"unknown scenario {name!r}")
