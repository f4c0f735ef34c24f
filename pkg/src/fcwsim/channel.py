"""Lossy V2V broadcast channel.

Each leading-vehicle sample becomes one basic safety message (BSM); the
channel drops messages independently with probability `per` (i.i.d.
Bernoulli loss, no bursts, no latency, no reordering). Slot 0 is always
delivered so every estimator has an initialization sample.

Randomness comes from numpy's Philox counter-based generator, so a given
(states, per, seed) triple always produces the identical loss pattern
regardless of what else has run in the process.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import ConfigError
from .kinematics import TimedState, VehicleState


@dataclass(frozen=True)
class Bsm:
    """One broadcast safety message: sequence number, send time, sender state."""

    seq: int
    t: float
    state: VehicleState


@dataclass(frozen=True)
class ChannelConfig:
    per: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if not math.isfinite(self.per) or not 0.0 <= self.per <= 1.0:
            raise ConfigError(f"packet error ratio must be in [0, 1]: {self.per}")


@dataclass(frozen=True)
class ReceivedSlot:
    """Outcome of one transmission step: the BSM, or None if it was dropped."""

    slot: int
    bsm: Optional[Bsm]

    @property
    def delivered(self) -> bool:
        return self.bsm is not None


def transmit(states: Sequence[TimedState], cfg: ChannelConfig) -> list[ReceivedSlot]:
    """Push one BSM per sample through the lossy channel.

    Returns one ReceivedSlot per input state. Slot 0 is forced delivered;
    every later slot is dropped independently with probability cfg.per.
    Deterministic in (states, cfg).
    """
    if not states:
        raise ValueError("transmit requires a non-empty state sequence")
    rng = np.random.Generator(np.random.Philox(cfg.seed))
    dropped = rng.random(len(states) - 1) < cfg.per
    slots = [ReceivedSlot(0, Bsm(0, states[0].t, states[0].state))]
    for i in range(1, len(states)):
        bsm = None if dropped[i - 1] else Bsm(i, states[i].t, states[i].state)
        slots.append(ReceivedSlot(i, bsm))
    return slots


def apply_mask(states: Sequence[TimedState], mask: Sequence[bool]) -> list[ReceivedSlot]:
    """Apply an explicit delivery mask (True = delivered) to a state sequence.

    For deterministic loss patterns in tests; mask[0] must be True.
    """
    if len(mask) != len(states):
        raise ValueError(f"mask length {len(mask)} != state count {len(states)}")
    if len(mask) > 0 and not mask[0]:
        raise ValueError("slot 0 must be delivered")
    return [
        ReceivedSlot(i, Bsm(i, ts.t, ts.state) if keep else None)
        for i, (ts, keep) in enumerate(zip(states, mask))
    ]


def mask_line(slots: Sequence[ReceivedSlot]) -> str:
    """Render a slot sequence as a debug string: '1' delivered, '0' dropped."""
    return "".join("1" if s.delivered else "0" for s in slots)
