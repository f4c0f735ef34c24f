"""Run orchestration: scenario x estimator x PER x seed sweeps.

Per step the pipeline is: channel slot -> estimator update -> two warning
evaluations -> confusion classification. The truth decision uses the exact
LV state; the estimated decision uses the reconstructed LV state for both
the warning range and the monitored gap (the system only knows the LV
through the network). The FV state is exact on both sides.

Every (scenario, PER, seed-index) cell draws its loss pattern from an
independent substream keyed by a SHA-256 mix of the master seed, so sweep
results are identical whether cells run serially or in parallel, and
extending the PER grid or seed count never perturbs existing cells. All
estimators face the same loss masks, making their comparison paired.
"""

from __future__ import annotations

import hashlib
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

from .camp_linear import CampParams, WarningDecision, evaluate
from .channel import ChannelConfig, transmit
from .errors import ConfigError
from .estimators import EstimatorKind, KalmanConfig, estimate_stream
from .kinematics import SampleClock, VehicleState
from .metrics import ConfusionCounts, MetricSummary, aggregate
from .scenarios import ScenarioTrace

SEED_DOMAIN = "fcwsim:v1"


def derive_seed(master_seed: int, scenario_id: str, per: float, seed_index: int) -> int:
    """64-bit channel seed for one (scenario, PER, repetition) cell.

    First 8 bytes (big-endian) of SHA-256 over
    "fcwsim:v1|<master>|<scenario id>|<per with 10 sig. digits>|<index>".
    """
    key = f"{SEED_DOMAIN}|{master_seed}|{scenario_id}|{per:.10g}|{seed_index}"
    return int.from_bytes(hashlib.sha256(key.encode("utf-8")).digest()[:8], "big")


@dataclass(frozen=True)
class RunConfig:
    """Sweep grid plus the shared decision/estimator parameters."""

    estimators: tuple[EstimatorKind, ...] = (
        EstimatorKind.CONSTANT_VELOCITY,
        EstimatorKind.CONSTANT_ACCELERATION,
        EstimatorKind.KALMAN,
    )
    pers: tuple[float, ...] = tuple(round(0.1 * i, 10) for i in range(1, 10))
    seeds: int = 20
    camp: CampParams = CampParams()
    kalman: KalmanConfig = KalmanConfig()
    master_seed: int = 0
    t_s: Optional[float] = None  # None: take the fleet's period

    def __post_init__(self):
        if not self.estimators:
            raise ConfigError("at least one estimator required")
        if not self.pers:
            raise ConfigError("at least one PER value required")
        for per in self.pers:
            if not 0.0 <= per <= 1.0:
                raise ConfigError(f"PER must be in [0, 1]: {per}")
        if self.seeds < 1:
            raise ConfigError(f"at least one seed required: {self.seeds}")


@dataclass(frozen=True)
class StepRecord:
    """One pipeline step: states, delivery flag, and both decisions."""

    step: int
    t: float
    true_state: VehicleState
    est_state: VehicleState
    delivered: bool
    truth: WarningDecision
    est: WarningDecision


@dataclass(frozen=True)
class SweepCell:
    """Aggregated metrics for one (estimator, PER) grid point."""

    estimator: EstimatorKind
    per: float
    summary: MetricSummary
    n_scenarios: int
    n_seeds: int


def truth_decisions(trace: ScenarioTrace, camp: CampParams) -> list[WarningDecision]:
    """Warning decisions from exact LV data; independent of estimator/PER/seed."""
    decisions = []
    offset = camp.length_offset
    for lv_ts, fv_ts in trace.steps():
        gap = lv_ts.state.x - fv_ts.state.x - offset
        decisions.append(evaluate(gap, fv_ts.state, lv_ts.state, camp))
    return decisions


def run_scenario(
    trace: ScenarioTrace,
    kind: EstimatorKind,
    per: float,
    seed: int,
    camp: CampParams = CampParams(),
    kalman: KalmanConfig = KalmanConfig(),
    truth: Optional[Sequence[WarningDecision]] = None,
) -> tuple[list[StepRecord], ConfusionCounts]:
    """Run one scenario through the full pipeline; deterministic in all inputs.

    `truth` may carry precomputed truth decisions for the trace; otherwise
    they are evaluated here.
    """
    slots = transmit(trace.lv, ChannelConfig(per=per, seed=seed))
    estimates = estimate_stream(slots, kind, SampleClock(t_s=trace.t_s), kalman)
    if truth is None:
        truth = truth_decisions(trace, camp)

    offset = camp.length_offset
    log = []
    ch = cs = is_ = ih = 0
    for k, (lv_ts, fv_ts) in enumerate(trace.steps()):
        est_state = estimates[k]
        est_gap = est_state.x - fv_ts.state.x - offset
        est_decision = evaluate(est_gap, fv_ts.state, est_state, camp)
        truth_decision = truth[k]
        if truth_decision.warn:
            if est_decision.warn:
                ch += 1
            else:
                is_ += 1
        elif est_decision.warn:
            ih += 1
        else:
            cs += 1
        log.append(
            StepRecord(k, lv_ts.t, lv_ts.state, est_state, slots[k].delivered, truth_decision, est_decision)
        )
    return log, ConfusionCounts(ch=ch, cs=cs, is_=is_, ih=ih)


def run_cell(
    fleet: Sequence[ScenarioTrace],
    kind: EstimatorKind,
    per: float,
    cfg: RunConfig,
    truth: Optional[dict[str, list[WarningDecision]]] = None,
) -> SweepCell:
    """Aggregate one (estimator, PER) cell over all scenarios and seed indices."""
    if truth is None:
        truth = {trace.id: truth_decisions(trace, cfg.camp) for trace in fleet}
    counts = []
    for trace in fleet:
        trace_truth = truth[trace.id]
        for seed_index in range(cfg.seeds):
            seed = derive_seed(cfg.master_seed, trace.id, per, seed_index)
            _, c = run_scenario(trace, kind, per, seed, cfg.camp, cfg.kalman, trace_truth)
            counts.append(c)
    return SweepCell(kind, per, aggregate(counts), len(fleet), cfg.seeds)


# Read-only per-worker state for parallel sweeps, installed by the pool
# initializer so the fleet is pickled once per worker instead of per task.
_WORKER_STATE: dict = {}


def _init_worker(fleet, cfg, truth) -> None:
    _WORKER_STATE["fleet"] = fleet
    _WORKER_STATE["cfg"] = cfg
    _WORKER_STATE["truth"] = truth


def _run_cell_task(task: tuple[EstimatorKind, float]) -> SweepCell:
    kind, per = task
    return run_cell(_WORKER_STATE["fleet"], kind, per, _WORKER_STATE["cfg"], _WORKER_STATE["truth"])


def sweep(fleet: Sequence[ScenarioTrace], cfg: RunConfig, jobs: int = 1) -> list[SweepCell]:
    """Full (estimator, PER) cross product, averaged over scenarios x seeds.

    Cells are emitted in the configured (estimator, PER) order and are
    bitwise independent of `jobs`.
    """
    if not fleet:
        raise ConfigError("sweep requires a non-empty fleet")
    _check_clock(fleet, cfg)
    truth = {trace.id: truth_decisions(trace, cfg.camp) for trace in fleet}
    tasks = [(kind, per) for kind in cfg.estimators for per in cfg.pers]
    if jobs <= 1 or len(tasks) == 1:
        return [run_cell(fleet, kind, per, cfg, truth) for kind, per in tasks]
    with ProcessPoolExecutor(
        max_workers=min(jobs, len(tasks)),
        initializer=_init_worker,
        initargs=(list(fleet), cfg, truth),
    ) as pool:
        return list(pool.map(_run_cell_task, tasks))


def _check_clock(fleet: Sequence[ScenarioTrace], cfg: RunConfig) -> None:
    periods = {trace.t_s for trace in fleet}
    if len(periods) > 1:
        raise ConfigError(f"fleet mixes sample periods: {sorted(periods)}")
    if cfg.t_s is not None and abs(cfg.t_s - fleet[0].t_s) > 1e-9:
        raise ConfigError(f"configured sample period {cfg.t_s} != fleet period {fleet[0].t_s}")


# ---------------------------------------------------------------------------
# Artifact writers. Floats use 9 significant digits so repeated runs produce
# byte-identical, replayable files.
# ---------------------------------------------------------------------------

def _fmt(value: float) -> str:
    return format(value, ".9g")


STEP_LOG_COLUMNS = (
    "step,t,delivered,true_x,true_v,true_a,est_x,est_v,est_a,"
    "gap,r_w_true,r_d_true,bor_true,bor_case_true,warn_true,"
    "gap_est,r_w_est,r_d_est,bor_est,bor_case_est,warn_est"
)


def write_step_log(log: Sequence[StepRecord], path: Path | str) -> None:
    """Per-step trace CSV: states, delivery flag, and both decision breakdowns."""
    lines = [STEP_LOG_COLUMNS]
    for r in log:
        t, e, td, ed = r.true_state, r.est_state, r.truth, r.est
        lines.append(
            ",".join(
                (
                    str(r.step), _fmt(r.t), str(int(r.delivered)),
                    _fmt(t.x), _fmt(t.v), _fmt(t.a),
                    _fmt(e.x), _fmt(e.v), _fmt(e.a),
                    _fmt(td.gap), _fmt(td.r_w), _fmt(td.r_d), _fmt(td.bor),
                    str(int(td.bor_case)), str(int(td.warn)),
                    _fmt(ed.gap), _fmt(ed.r_w), _fmt(ed.r_d), _fmt(ed.bor),
                    str(int(ed.bor_case)), str(int(ed.warn)),
                )
            )
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


SUMMARY_COLUMNS = "estimator,per,mean_tp,mean_accuracy,n_scenarios,n_seeds,n_undefined_tp"


def write_summary_csv(cells: Sequence[SweepCell], path: Path | str) -> None:
    """Sweep summary CSV, one row per (estimator, PER) cell."""
    lines = [SUMMARY_COLUMNS]
    for cell in cells:
        s = cell.summary
        lines.append(
            ",".join(
                (
                    cell.estimator.value, _fmt(cell.per),
                    _fmt(s.mean_tp) if s.mean_tp is not None else "",
                    _fmt(s.mean_accuracy) if s.mean_accuracy is not None else "",
                    str(cell.n_scenarios), str(cell.n_seeds), str(s.n_undefined_tp),
                )
            )
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_summary_json(cells: Sequence[SweepCell], cfg: RunConfig, path: Path | str) -> None:
    """Sweep summary JSON with the full config echo and per-cell spreads."""
    payload = {
        "config": {
            "estimators": [k.value for k in cfg.estimators],
            "pers": list(cfg.pers),
            "seeds": cfg.seeds,
            "master_seed": cfg.master_seed,
            "t_d": cfg.camp.t_d,
            "eps_v": cfg.camp.eps_v,
            "min_decel": cfg.camp.min_decel,
            "length_offset": cfg.camp.length_offset,
            "kalman_q": cfg.kalman.q,
            "kalman_r": cfg.kalman.r,
            "kalman_p0": cfg.kalman.p0,
        },
        "cells": [
            {
                "estimator": cell.estimator.value,
                "per": cell.per,
                "mean_tp": cell.summary.mean_tp,
                "mean_accuracy": cell.summary.mean_accuracy,
                "tp_std": cell.summary.tp_std,
                "accuracy_std": cell.summary.accuracy_std,
                "n_scenarios": cell.n_scenarios,
                "n_seeds": cell.n_seeds,
                "n_undefined_tp": cell.summary.n_undefined_tp,
                "n_undefined_accuracy": cell.summary.n_undefined_accuracy,
            }
            for cell in cells
        ],
    }
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
