"""Campaign-blocking simulator with a Monte Carlo random baseline.

Applies a mitigation plan one step at a time against a multi-technique
campaign.  A technique is blocked at the first step where the number of
applied mitigations mapped to it reaches the campaign's threshold; the
plan blocks the campaign when every technique is.  The baseline measures
the same walk over uniformly random mitigation orders, with one
counter-based RNG stream per trial so runs reproduce bit-for-bit
regardless of evaluation order.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .catalog import (
    Catalog,
    is_subtechnique,
    parent_technique,
    parse_mitigation_id,
    parse_technique_id,
)
from .errors import SimulationError, ValidationError
from .mcdm import RankedPlan

# Compiled kernel when the extension built, pure-Python twin otherwise.
# MITIPLAN_KERNEL=python forces the fallback (debugging, benchmarks).
if os.environ.get("MITIPLAN_KERNEL") == "python":
    from . import _mcsim_py as _kernel
else:
    try:
        from . import _mcsim as _kernel  # type: ignore[no-redef]
    except ImportError:
        from . import _mcsim_py as _kernel

MAX_SEED = 2**64 - 1


def kernel_backend() -> str:
    """Active steps-to-block kernel: "compiled" or "python"."""
    return "python" if _kernel.__name__.endswith("_py") else "compiled"


@dataclass(frozen=True)
class Campaign:
    """Attack scenario: techniques the adversary will use, and how many
    mapped mitigations it takes to block each one."""

    techniques: tuple[str, ...]
    block_threshold: int = 1

    def __post_init__(self):
        object.__setattr__(self, "techniques", tuple(self.techniques))
        if not self.techniques:
            raise ValidationError("campaign needs at least one technique")
        for tid in self.techniques:
            parse_technique_id(tid)
        if len(set(self.techniques)) != len(self.techniques):
            raise ValidationError("campaign techniques must be unique")
        if not isinstance(self.block_threshold, int) or self.block_threshold < 1:
            raise ValidationError(
                f"block threshold must be a positive integer, got {self.block_threshold!r}"
            )


@dataclass(frozen=True)
class SimulationResult:
    """Outcome of walking one mitigation order against a campaign."""

    steps_to_block: int | None
    per_technique_block_step: tuple[tuple[str, int | None], ...]
    coverage_curve: tuple[tuple[int, float], ...]

    def __post_init__(self):
        steps = [step for _, step in self.per_technique_block_step]
        expected = max(steps) if steps and None not in steps else None
        if self.steps_to_block != expected:
            raise ValidationError(
                "steps_to_block must be the max per-technique step, or absent "
                "when any technique stays unblocked"
            )
        fractions = [f for _, f in self.coverage_curve]
        if any(b < a for a, b in zip(fractions, fractions[1:])):
            raise ValidationError("coverage curve must be nondecreasing")
        ends_at_one = bool(fractions) and fractions[-1] == 1.0
        if (self.steps_to_block is not None) != ends_at_one:
            raise ValidationError(
                "coverage curve must end at 1.0 exactly when the campaign blocks"
            )

    @property
    def blocked(self) -> bool:
        return self.steps_to_block is not None

    def block_step(self, technique_id: str) -> int | None:
        for tid, step in self.per_technique_block_step:
            if tid == technique_id:
                return step
        raise SimulationError(f"{technique_id} is not part of this result")

    def to_dict(self) -> dict:
        return {
            "steps_to_block": self.steps_to_block,
            "per_technique_block_step": dict(self.per_technique_block_step),
            "coverage_curve": [[step, frac] for step, frac in self.coverage_curve],
        }


@dataclass(frozen=True)
class MonteCarloSummary:
    """Aggregate of random-order trials; mean/std are over blocked trials
    and absent when no trial blocked."""

    trials: int
    seed: int
    mean_steps: float | None
    std_steps: float | None
    unblocked_fraction: float

    def __post_init__(self):
        if self.trials < 1:
            raise ValidationError("trials must be >= 1")
        if not 0 <= self.seed <= MAX_SEED:
            raise ValidationError("seed must fit in 64 unsigned bits")
        if not 0.0 <= self.unblocked_fraction <= 1.0:
            raise ValidationError("unblocked_fraction must be in [0, 1]")
        if (self.mean_steps is None) != (self.std_steps is None):
            raise ValidationError("mean_steps and std_steps must be absent together")
        if (self.mean_steps is None) != (self.unblocked_fraction == 1.0):
            raise ValidationError(
                "mean_steps is absent exactly when every trial stayed unblocked"
            )

    def to_dict(self) -> dict:
        return {
            "trials": self.trials,
            "seed": self.seed,
            "mean_steps": self.mean_steps,
            "std_steps": self.std_steps,
            "unblocked_fraction": self.unblocked_fraction,
        }


@dataclass(frozen=True)
class ComparisonReport:
    """Plan-order result next to the random baseline.

    ratio = baseline mean steps / plan steps; absent when either side
    never blocks.
    """

    plan_result: SimulationResult
    baseline: MonteCarloSummary
    ratio: float | None

    @property
    def plan_steps(self) -> int | None:
        return self.plan_result.steps_to_block

    def to_dict(self) -> dict:
        return {
            "plan": self.plan_result.to_dict(),
            "baseline": self.baseline.to_dict(),
            "ratio": self.ratio,
        }


def resolve_campaign(campaign: Campaign, catalog: Catalog) -> tuple[str, ...]:
    """Campaign technique IDs as they appear in the catalog, sorted and
    de-duplicated.

    A sub-technique absent from the catalog falls back to its parent,
    matching catalogs ingested with sub-technique collapse.  A technique
    with no match either way is an error.
    """
    resolved = set()
    for tid in campaign.techniques:
        if catalog.has_technique(tid):
            resolved.add(tid)
            continue
        if is_subtechnique(tid):
            parent = parent_technique(tid)
            if catalog.has_technique(parent):
                resolved.add(parent)
                continue
        raise SimulationError(f"campaign technique {tid} not in catalog")
    return tuple(sorted(resolved))


def _mitigation_order(plan) -> tuple[str, ...]:
    if isinstance(plan, RankedPlan):
        return plan.mitigation_order()
    if isinstance(plan, str):
        raise ValidationError("plan must be a RankedPlan or a sequence of IDs")
    order = tuple(plan)
    for mid in order:
        parse_mitigation_id(mid)
    return order


def simulate_campaign(plan, catalog: Catalog, campaign: Campaign) -> SimulationResult:
    """Walk the plan in rank order and record when each campaign technique
    accumulates enough mapped mitigations to block.

    `plan` may be a RankedPlan or any sequence of mitigation IDs.  Every
    mitigation must exist in the catalog.  Deterministic.
    """
    order = _mitigation_order(plan)
    known = set(catalog.mitigation_ids())
    seen = set()
    for mid in order:
        if mid not in known:
            raise SimulationError(f"plan mitigation {mid} not in catalog")
        if mid in seen:
            raise SimulationError(f"plan applies {mid} twice")
        seen.add(mid)

    resolved = resolve_campaign(campaign, catalog)
    mapped = {tid: set(catalog.mitigations_for(tid)) for tid in resolved}
    counts = dict.fromkeys(resolved, 0)
    block_step: dict[str, int | None] = dict.fromkeys(resolved)
    blocked = 0
    curve = []
    for step, mid in enumerate(order, start=1):
        for tid in resolved:
            if block_step[tid] is None and mid in mapped[tid]:
                counts[tid] += 1
                if counts[tid] == campaign.block_threshold:
                    block_step[tid] = step
                    blocked += 1
        curve.append((step, blocked / len(resolved)))
    steps = max(block_step.values()) if blocked == len(resolved) else None
    return SimulationResult(
        steps_to_block=steps,
        per_technique_block_step=tuple((tid, block_step[tid]) for tid in resolved),
        coverage_curve=tuple(curve),
    )


def _cover_matrix(catalog: Catalog, resolved: tuple[str, ...]) -> np.ndarray:
    mids = catalog.mitigation_ids()
    row_of = {mid: i for i, mid in enumerate(mids)}
    covers = np.zeros((len(mids), len(resolved)), dtype=np.uint8)
    for j, tid in enumerate(resolved):
        for mid in catalog.mitigations_for(tid):
            covers[row_of[mid], j] = 1
    return covers


def trial_orders(m: int, trials: int, seed: int) -> np.ndarray:
    """Random mitigation orders, one permutation of 0..m-1 per trial.

    Trial t draws from its own counter-based stream keyed (seed, t), so
    the full batch is independent of generation order and can be
    regenerated per-trial by parallel workers.
    """
    orders = np.empty((trials, m), dtype=np.int64)
    for t in range(trials):
        key = np.array([seed, t], dtype=np.uint64)
        rng = np.random.Generator(np.random.Philox(key=key))
        orders[t] = rng.permutation(m)
    return orders


def random_baseline(
    catalog: Catalog, campaign: Campaign, trials: int, seed: int
) -> MonteCarloSummary:
    """Monte Carlo estimate of steps-to-block under uniformly random
    mitigation ordering.

    Unblockable trials (threshold unreachable for some technique) carry
    no step count; they only raise unblocked_fraction.
    """
    if trials < 1:
        raise ValidationError("trials must be >= 1")
    if not isinstance(seed, int) or not 0 <= seed <= MAX_SEED:
        raise ValidationError("seed must be an integer in [0, 2^64)")
    resolved = resolve_campaign(campaign, catalog)
    covers = _cover_matrix(catalog, resolved)
    orders = trial_orders(covers.shape[0], trials, seed)
    out = np.empty(trials, dtype=np.int64)
    _kernel.steps_to_block_batch(orders, covers, campaign.block_threshold, out)
    blocked = out[out > 0]
    unblocked_fraction = float(trials - blocked.size) / trials
    if blocked.size:
        mean = float(blocked.mean())
        std = float(blocked.std())
    else:
        mean = std = None
    return MonteCarloSummary(
        trials=trials,
        seed=seed,
        mean_steps=mean,
        std_steps=std,
        unblocked_fraction=unblocked_fraction,
    )


def compare_orders(
    plan, catalog: Catalog, campaign: Campaign, trials: int, seed: int
) -> ComparisonReport:
    """How much faster the ranked plan blocks the campaign than random
    ordering: simulate both and report the ratio of mean baseline steps
    to plan steps."""
    plan_result = simulate_campaign(plan, catalog, campaign)
    baseline = random_baseline(catalog, campaign, trials, seed)
    if plan_result.steps_to_block is not None and baseline.mean_steps is not None:
        ratio = baseline.mean_steps / plan_result.steps_to_block
    else:
        ratio = None
    return ComparisonReport(plan_result=plan_result, baseline=baseline, ratio=ratio)
