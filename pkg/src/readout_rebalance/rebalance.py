"""Measurement strategies: nominal, rebalanced, and symmetrized readout.

Rebalancing spends a small pilot fraction of the shot budget to estimate
per-qubit marginals, flips every qubit that is mostly excited with an X gate
before measurement, corrects readout errors in the physical basis, and
finally undoes the flips classically.  Fewer physical qubits then sit in the
error-prone excited state while every observable keeps its value.
"""

from dataclasses import dataclass, field

from .core import (
    DimensionError,
    FlipMask,
    ValidationError,
    qubit_marginals,
    rng_stream,
    xor_permute,
)
from .noise import sample_measured
from .unfold import UnfoldConfig, apply_unfold

STRATEGIES = ("nominal", "rebalanced", "symmetrized")


@dataclass(frozen=True)
class MeasurementPlan:
    """Shot budget and strategy for one measurement run.

    ``pilot_fraction`` of the budget goes to the mask-choosing pilot when
    the strategy is "rebalanced"; pilot shots are spent from the total and
    excluded from the returned histogram.
    """

    total_shots: int
    strategy: str = "nominal"
    pilot_fraction: float = 0.1
    unfold: UnfoldConfig = field(default_factory=UnfoldConfig)
    rng_seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "total_shots", int(self.total_shots))
        if self.strategy not in STRATEGIES:
            raise ValidationError(
                f"unknown strategy {self.strategy!r}, expected one of {STRATEGIES}"
            )
        if self.total_shots < 1:
            raise ValidationError("total_shots must be >= 1")
        if not 0.0 < float(self.pilot_fraction) < 1.0:
            raise ValidationError("pilot_fraction must lie strictly between 0 and 1")
        if self.strategy == "rebalanced" and self.pilot_shots < 1:
            raise ValidationError(
                "rebalanced strategy needs at least one pilot shot; "
                "increase total_shots or pilot_fraction"
            )
        if self.strategy == "symmetrized" and self.total_shots < 2:
            raise ValidationError("symmetrized strategy needs at least 2 shots")

    @property
    def pilot_shots(self):
        return int(round(float(self.pilot_fraction) * self.total_shots))


def choose_flip_mask(pilot):
    """Flip rule: set bit i when the pilot marginal of qubit i exceeds 0.5.

    The inequality is strict, so a marginal of exactly 0.5 leaves the qubit
    untouched.
    """
    if pilot.total <= 0:
        raise ValidationError("cannot choose a flip mask from an empty pilot")
    marginals = qubit_marginals(pilot)
    mask = 0
    for i, value in enumerate(marginals):
        if value > 0.5:
            mask |= 1 << i
    return FlipMask(pilot.n_qubits, mask)


def _plan_rng(plan, rng):
    return rng if rng is not None else rng_stream(plan.rng_seed)


def run_nominal(true_dist, response, plan, rng=None):
    """Measure all shots as-is, then unfold.  Returns the corrected histogram."""
    if true_dist.n_qubits != response.n_qubits:
        raise DimensionError("distribution width does not match response matrix")
    gen = _plan_rng(plan, rng)
    measured = sample_measured(true_dist, response, plan.total_shots, gen)
    return apply_unfold(measured, response, plan.unfold)


def run_rebalanced(true_dist, response, plan, rng=None, force_mask=None):
    """Pilot run, targeted X flips, main run, unfold, classical un-flip.

    The X gates act before the physical readout noise, so the main run
    samples the flipped distribution through the same response matrix;
    unfolding happens in the physical basis and the corrected histogram is
    permuted back to the original labels.  Returns ``(histogram, mask)``.

    With ``force_mask`` the pilot is skipped, the given mask is used and the
    whole budget goes to the main run (this is also what the symmetrized
    strategy uses for its flipped half).
    """
    if true_dist.n_qubits != response.n_qubits:
        raise DimensionError("distribution width does not match response matrix")
    gen = _plan_rng(plan, rng)
    if force_mask is None:
        pilot_rng, main_rng = gen.spawn(2)
        pilot = sample_measured(true_dist, response, plan.pilot_shots, pilot_rng)
        mask = choose_flip_mask(pilot)
        main_shots = plan.total_shots - plan.pilot_shots
    else:
        main_rng = gen
        mask = force_mask
        if mask.n_qubits != true_dist.n_qubits:
            raise DimensionError("forced mask width does not match distribution")
        main_shots = plan.total_shots

    flipped_truth = xor_permute(true_dist, mask)
    measured = sample_measured(flipped_truth, response, main_shots, main_rng)
    corrected = apply_unfold(measured, response, plan.unfold)
    return xor_permute(corrected, mask), mask


def run_symmetrized(true_dist, response, plan, rng=None):
    """Average of a nominal half and an all-qubits-flipped half.

    Half the budget runs nominally, half with every qubit flipped (mask
    independent of the state).  Each half is corrected separately, the
    flipped half is restored to the original basis, and the two corrected
    histograms are summed entrywise; since each carries half the shots the
    sum is the single-run-equivalent histogram.
    """
    if true_dist.n_qubits != response.n_qubits:
        raise DimensionError("distribution width does not match response matrix")
    gen = _plan_rng(plan, rng)
    nominal_rng, flipped_rng = gen.spawn(2)
    first_half = plan.total_shots // 2
    second_half = plan.total_shots - first_half

    nominal_plan = MeasurementPlan(
        total_shots=first_half,
        strategy="nominal",
        pilot_fraction=plan.pilot_fraction,
        unfold=plan.unfold,
        rng_seed=plan.rng_seed,
    )
    nominal_half = run_nominal(true_dist, response, nominal_plan, nominal_rng)

    flipped_plan = MeasurementPlan(
        total_shots=second_half,
        strategy="nominal",
        pilot_fraction=plan.pilot_fraction,
        unfold=plan.unfold,
        rng_seed=plan.rng_seed,
    )
    flipped_half, _ = run_rebalanced(
        true_dist,
        response,
        flipped_plan,
        flipped_rng,
        force_mask=FlipMask.full(true_dist.n_qubits),
    )
    return nominal_half + flipped_half


def run_plan(true_dist, response, plan, rng=None):
    """Dispatch on ``plan.strategy``.  Returns ``(histogram, mask or None)``."""
    if plan.strategy == "nominal":
        return run_nominal(true_dist, response, plan, rng), None
    if plan.strategy == "rebalanced":
        return run_rebalanced(true_dist, response, plan, rng)
    hist = run_symmetrized(true_dist, response, plan, rng)
    return hist, FlipMask.full(true_dist.n_qubits)
