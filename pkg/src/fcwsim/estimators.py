"""Leading-vehicle state estimators fed by the lossy BSM stream.

Three reconstruction algorithms, selected per run:

  - constant velocity: hold the last received speed, advance position
    linearly; report zero acceleration while packets are missing.
  - constant acceleration: hold the last received acceleration, advance
    speed and position with the exact constant-acceleration step.
  - Kalman: discrete filter on the double integrator driven by the last
    received acceleration as control input, correcting on received
    positions only.

Kalman plant, state X = [v; x]:

    F = [[1, 0], [dt, 1]]      exact zero-order-hold transition
    G = [dt, dt^2/2]           input response (u = held acceleration)
    C = [0, 1]                 position is the only measurement
    Q = q * [[dt,     dt^2/2],
             [dt^2/2, dt^3/3]] continuous white-noise-acceleration model

Received speeds are not measurements; they only seed the state at the
first delivered slot. During loss the filter runs predict-only with the
held input.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from .channel import ReceivedSlot
from .errors import ConfigError
from .kinematics import (
    SampleClock,
    VehicleState,
    step_position_ca,
    step_position_cv,
    step_velocity_ca,
)


class EstimatorKind(Enum):
    CONSTANT_VELOCITY = "cv"
    CONSTANT_ACCELERATION = "ca"
    KALMAN = "kalman"


@dataclass(frozen=True)
class DeadReckonState:
    """Dead-reckoning estimator state: current estimate plus init flag."""

    est: VehicleState
    initialized: bool = True


@dataclass(frozen=True)
class KalmanConfig:
    """Filter tuning: process-noise intensity q ((m/s^2)^2), measurement
    variance r (m^2), initial covariance scale p0. Defaults are tuning
    choices, adjustable from the CLI."""

    q: float = 1.0
    r: float = 0.01
    p0: float = 1.0

    def __post_init__(self):
        if not (self.q > 0.0 and math.isfinite(self.q)):
            raise ConfigError(f"process noise q must be > 0: {self.q}")
        if not (self.r > 0.0 and math.isfinite(self.r)):
            raise ConfigError(f"measurement noise r must be > 0: {self.r}")
        if not (self.p0 >= 0.0 and math.isfinite(self.p0)):
            raise ConfigError(f"initial covariance p0 must be >= 0: {self.p0}")


@dataclass(frozen=True)
class KalmanState:
    """Filter state: mean [v; x], 2x2 covariance, held acceleration input."""

    mean: np.ndarray
    cov: np.ndarray
    held_input: float
    initialized: bool = True


def cv_predict(s: DeadReckonState, dt: float) -> DeadReckonState:
    """Constant-velocity coast: advance x, hold v, report a = 0."""
    _require_initialized(s)
    est = s.est
    return DeadReckonState(VehicleState(step_position_cv(est.x, est.v, dt), est.v, 0.0))


def ca_predict(s: DeadReckonState, dt: float) -> DeadReckonState:
    """Constant-acceleration coast: advance x and v with held a."""
    _require_initialized(s)
    est = s.est
    return DeadReckonState(
        VehicleState(
            step_position_ca(est.x, est.v, est.a, dt),
            step_velocity_ca(est.v, est.a, dt),
            est.a,
        )
    )


def kalman_init(state: VehicleState, kcfg: KalmanConfig) -> KalmanState:
    """Seed the filter from the first received BSM."""
    mean = np.array([state.v, state.x], dtype=float)
    cov = np.eye(2) * kcfg.p0
    return KalmanState(mean, cov, state.a)


def kalman_predict(s: KalmanState, dt: float, q: float = 1.0) -> KalmanState:
    """Time update over dt with the held acceleration as input.

    The mean update is F @ mean + G @ u, written out in the same expression
    order as the kinematic step functions so that loss-free streams over
    model-consistent data replay the sender's trajectory bit-identically.
    """
    _require_initialized(s)
    v, x = float(s.mean[0]), float(s.mean[1])
    u = s.held_input
    mean = np.array([v + u * dt, x + v * dt + 0.5 * u * dt * dt])
    f = np.array([[1.0, 0.0], [dt, 1.0]])
    half = 0.5 * dt * dt
    qm = q * np.array([[dt, half], [half, dt ** 3 / 3.0]])
    cov = f @ s.cov @ f.T + qm
    return KalmanState(mean, cov, s.held_input)


def kalman_correct(s: KalmanState, measured_x: float, r: float) -> KalmanState:
    """Measurement update with a received position; Joseph-form covariance."""
    _require_initialized(s)
    if not math.isfinite(measured_x):
        raise ValueError(f"non-finite measurement: {measured_x}")
    if r <= 0.0:
        raise ValueError(f"measurement variance must be > 0: {r}")
    innovation_var = s.cov[1, 1] + r
    gain = s.cov[:, 1] / innovation_var
    mean = s.mean + gain * (measured_x - s.mean[1])
    ikc = np.eye(2)
    ikc[:, 1] -= gain
    cov = ikc @ s.cov @ ikc.T + r * np.outer(gain, gain)
    cov = 0.5 * (cov + cov.T)
    return KalmanState(mean, cov, s.held_input)


def kalman_emit(s: KalmanState) -> VehicleState:
    """Map the filter state to a VehicleState (speed clamped at rest)."""
    _require_initialized(s)
    return VehicleState(float(s.mean[1]), max(0.0, float(s.mean[0])), s.held_input)


def estimate_stream(
    slots: Sequence[ReceivedSlot],
    kind: EstimatorKind,
    clock: SampleClock,
    kcfg: Optional[KalmanConfig] = None,
) -> list[VehicleState]:
    """Reconstruct the sender state at every slot of a received stream.

    Delivered slots snap the dead-reckoning estimators to the received
    state (measurement-update the Kalman filter); dropped slots advance by
    the selected prediction rule. slots[0] must be delivered.
    """
    if not slots or not slots[0].delivered:
        raise ValueError("estimate_stream requires a delivered slot 0")
    dt = clock.t_s
    if kind is EstimatorKind.KALMAN:
        return _kalman_stream(slots, dt, kcfg or KalmanConfig())

    predict = cv_predict if kind is EstimatorKind.CONSTANT_VELOCITY else ca_predict
    s = DeadReckonState(slots[0].bsm.state)
    estimates = [s.est]
    for slot in slots[1:]:
        s = DeadReckonState(slot.bsm.state) if slot.delivered else predict(s, dt)
        estimates.append(s.est)
    return estimates


def _kalman_stream(slots: Sequence[ReceivedSlot], dt: float, kcfg: KalmanConfig) -> list[VehicleState]:
    s = kalman_init(slots[0].bsm.state, kcfg)
    estimates = [kalman_emit(s)]
    for slot in slots[1:]:
        s = kalman_predict(s, dt, kcfg.q)
        if slot.delivered:
            received = slot.bsm.state
            s = kalman_correct(s, received.x, kcfg.r)
            # The newly received acceleration drives predictions from here on.
            s = KalmanState(s.mean, s.cov, received.a)
        estimates.append(kalman_emit(s))
    return estimates


def _require_initialized(s) -> None:
    if not s.initialized:
        raise ValueError("estimator state is not initialized")
