"""Fixed-step time integration of the coefficient flow.

Two steppers share the same velocity field: forward Euler (the baseline
finite-difference iteration, potential sampled at the left endpoint of
each step) and classical fourth-order Runge-Kutta (potential sampled at
the stage times t, t + dt/2, t + dt).  No adaptive step-size control;
convergence studies are the accuracy control.

Explicit stepping of this quadratic flow can diverge for large dt, so
blow-up is reported as a trajectory status rather than an exception.
"""

from dataclasses import dataclass

import numpy as np

from .potential import PotentialModel, eval_taylor_coefficients
from .state import CoefficientState, PhysicalParams, coefficient_velocity

__all__ = [
    "StepperConfig",
    "Trajectory",
    "euler_step",
    "rk4_step",
    "propagate",
    "detect_blowup",
]

INTEGRATORS = ("euler", "rk4")


@dataclass(frozen=True)
class StepperConfig:
    dt: float
    steps: int
    integrator: str = "euler"
    blowup_threshold: float = 1e12
    snapshot_stride: int = 1

    def __post_init__(self):
        if not (np.isfinite(self.dt) and self.dt > 0):
            raise ValueError(f"dt must be positive and finite, got {self.dt!r}")
        if self.steps < 1:
            raise ValueError(f"steps must be at least 1, got {self.steps!r}")
        if self.integrator not in INTEGRATORS:
            raise ValueError(
                f"integrator must be one of {INTEGRATORS}, got {self.integrator!r}"
            )
        if not (np.isfinite(self.blowup_threshold) and self.blowup_threshold > 0):
            raise ValueError("blowup_threshold must be positive and finite")
        if self.snapshot_stride < 1:
            raise ValueError("snapshot_stride must be at least 1")


@dataclass
class Trajectory:
    """Time-ordered snapshots; first snapshot is the initial state."""

    snapshots: list
    status: str  # 'completed' | 'aborted_blowup'

    @property
    def final(self) -> CoefficientState:
        return self.snapshots[-1]

    def times(self) -> np.ndarray:
        return np.array([s.time for s in self.snapshots])


def _velocity(state, potential, params, t):
    v = eval_taylor_coefficients(potential, t, state.truncation_order)
    return coefficient_velocity(state, v, params).derivs


def euler_step(
    state: CoefficientState,
    potential: PotentialModel,
    params: PhysicalParams,
    dt: float,
) -> CoefficientState:
    """One forward Euler step, potential sampled at the step's left endpoint."""
    derivs = _velocity(state, potential, params, state.time)
    return CoefficientState(state.alphas + dt * derivs, state.time + dt)


def rk4_step(
    state: CoefficientState,
    potential: PotentialModel,
    params: PhysicalParams,
    dt: float,
) -> CoefficientState:
    """One classical Runge-Kutta step over the same velocity field."""
    t, a = state.time, state.alphas

    def rhs(alphas, stage_t):
        stage = CoefficientState(alphas, stage_t)
        return _velocity(stage, potential, params, stage_t)

    k1 = rhs(a, t)
    k2 = rhs(a + 0.5 * dt * k1, t + 0.5 * dt)
    k3 = rhs(a + 0.5 * dt * k2, t + 0.5 * dt)
    k4 = rhs(a + dt * k3, t + dt)
    return CoefficientState(a + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4), t + dt)


def detect_blowup(state: CoefficientState, threshold: float) -> bool:
    """True iff any coefficient is non-finite or exceeds threshold in magnitude."""
    a = state.alphas
    if not np.all(np.isfinite(a)):
        return True
    return bool(np.any(np.abs(a) > threshold))


_STEPPERS = {"euler": euler_step, "rk4": rk4_step}


def propagate(
    initial: CoefficientState,
    potential: PotentialModel,
    params: PhysicalParams,
    cfg: StepperConfig,
) -> Trajectory:
    """Apply the configured stepper cfg.steps times from the initial state.

    Every snapshot_stride-th state is recorded, plus the initial and final
    ones.  If a step trips the blow-up detector the diverging state is
    discarded, the last healthy state becomes the final snapshot, and the
    trajectory is returned with status 'aborted_blowup'.
    """
    step = _STEPPERS[cfg.integrator]
    snapshots = [initial]
    state = initial
    for p in range(1, cfg.steps + 1):
        new = step(state, potential, params, cfg.dt)
        # anchor the clock at t0 + p*dt: repeated `time += dt` accumulates a
        # rounding error per step, which pollutes left-endpoint potential
        # sampling and closed-form comparisons on long runs
        new.time = initial.time + p * cfg.dt
        if detect_blowup(new, cfg.blowup_threshold):
            if snapshots[-1] is not state:
                snapshots.append(state)
            return Trajectory(snapshots, "aborted_blowup")
        state = new
        if p == cfg.steps or p % cfg.snapshot_stride == 0:
            snapshots.append(state)
    return Trajectory(snapshots, "completed")
