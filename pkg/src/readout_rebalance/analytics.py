"""Ensemble statistics, the shots-equivalent metric, and the analytic
two-qubit variance formulas with their Monte Carlo oracle.

The two-qubit machinery quantifies what readout correction does to counting
noise: inverting the transition matrix restores expectation values but
inflates the variance of every state that can exchange counts with another,
which is the whole motivation for rebalancing toward the ground state.
"""

import numpy as np
from collections import Counter
from dataclasses import dataclass

from .core import ValidationError, rng_stream
from .rebalance import run_plan

VARIANCE_VARIANTS = ("as_printed", "mirror_symmetric")


@dataclass(frozen=True)
class EnsembleResult:
    """Mean and spread of an observable over repeated measurement runs."""

    repetitions: int
    mean: float
    std: float
    std_err_of_std: float
    strategy: str
    observable: str
    flip_mask_mode: int | None = None
    negative_runs: int = 0

    def __post_init__(self):
        if self.std < 0 or self.std_err_of_std < 0:
            raise ValidationError("standard deviations cannot be negative")


@dataclass(frozen=True)
class TwoQubitModel:
    """Two-qubit decay-only error model with fixed true counts.

    Labels read left to right as (qubit 0, qubit 1): ``n10`` is the number
    of true counts with qubit 0 excited and qubit 1 in the ground state.
    ``q0``/``q1`` are the per-qubit decay probabilities Pr(1 -> 0); the
    excitation errors Pr(0 -> 1) are zero in this model, so nothing ever
    leaves the ground state.
    """

    q0: float
    q1: float
    n00: int
    n01: int
    n10: int
    n11: int

    def __post_init__(self):
        for name, q in (("q0", self.q0), ("q1", self.q1)):
            if not 0.0 <= float(q) < 1.0:
                raise ValidationError(f"{name} = {q} outside [0, 1)")
        for name, n in (("n00", self.n00), ("n01", self.n01), ("n10", self.n10), ("n11", self.n11)):
            if int(n) < 0:
                raise ValidationError(f"{name} must be nonnegative")
            object.__setattr__(self, name, int(n))

    @property
    def total(self):
        return self.n00 + self.n01 + self.n10 + self.n11

    def true_counts(self):
        return np.array([self.n00, self.n01, self.n10, self.n11], dtype=np.float64)


def measured_state_probs(model):
    """Exact measured-state probabilities of the decay channel.

    Entry order (00, 01, 10, 11).  Each excited qubit decays independently,
    so e.g. the 11 column contributes q0*(1-q1) of its mass to 01.
    """
    n = model.true_counts() / model.total if model.total else np.zeros(4)
    q0, q1 = model.q0, model.q1
    p00 = n[0] + q0 * n[2] + q1 * n[1] + q0 * q1 * n[3]
    p01 = (1 - q1) * n[1] + q0 * (1 - q1) * n[3]
    p10 = (1 - q0) * n[2] + q1 * (1 - q0) * n[3]
    p11 = (1 - q0) * (1 - q1) * n[3]
    return np.array([p00, p01, p10, p11])


def appendix_a_expectations(model):
    """Exact expected measured counts E[N^PRC] for the four states."""
    return measured_state_probs(model) * model.total


def appendix_a_expectations_linear(model):
    """Measured-count expectations truncated at linear order in q.

    Identical to the exact values except for the dropped q0*q1 cross terms.
    """
    n00, n01, n10, n11 = model.true_counts()
    q0, q1 = model.q0, model.q1
    return np.array(
        [
            n00 + q0 * n10 + q1 * n01,
            (1 - q1) * n01 + q0 * n11,
            (1 - q0) * n10 + q1 * n11,
            (1 - q0 - q1) * n11,
        ]
    )


def linear_order_reconstruct(measured_counts, q0, q1):
    """First-order inverse of the decay channel applied to measured counts.

    Vectorized over leading axes: ``measured_counts[..., 4]`` in state order
    (00, 01, 10, 11).  This is the reconstruction whose variance the
    analytic formulas describe.
    """
    c = np.asarray(measured_counts, dtype=np.float64)
    c00, c01, c10, c11 = c[..., 0], c[..., 1], c[..., 2], c[..., 3]
    r00 = c00 - q1 * c01 - q0 * c10
    r01 = (1 + q1) * c01 - q0 * c11
    r10 = (1 + q0) * c10 - q1 * c11
    r11 = (1 + q0 + q1) * c11
    return np.stack([r00, r01, r10, r11], axis=-1)


def appendix_a_variances(model, variant="as_printed"):
    """Linear-order variances of the reconstructed counts.

    Var[N_hat] = N_ij (1 - N_ij / N) + DeltaVar with the excess terms

        DeltaVar[00] = q0 n10 + q1 n01
        DeltaVar[01] = q0 n11 + q1 n01
        DeltaVar[10] = q1 n11 + q1 n10   ("as_printed")
                       q1 n11 + q0 n10   ("mirror_symmetric")
        DeltaVar[11] = (q0 + q1) n11

    The two variants for the 10 state exist because the printed second term
    breaks the 01/10 relabeling symmetry; the Monte Carlo oracle decides
    which one is right (it sides with the mirror form).  All formulas carry
    O(q^2) corrections.
    """
    if variant not in VARIANCE_VARIANTS:
        raise ValidationError(
            f"unknown variant {variant!r}, expected one of {VARIANCE_VARIANTS}"
        )
    counts = model.true_counts()
    total = model.total
    multinomial = counts * (1.0 - counts / total) if total else np.zeros(4)
    q0, q1 = model.q0, model.q1
    d00 = q0 * model.n10 + q1 * model.n01
    d01 = q0 * model.n11 + q1 * model.n01
    if variant == "as_printed":
        d10 = q1 * model.n11 + q1 * model.n10
    else:
        d10 = q1 * model.n11 + q0 * model.n10
    d11 = (q0 + q1) * model.n11
    return multinomial + np.array([d00, d01, d10, d11])


@dataclass(frozen=True)
class OracleResult:
    """Empirical moments of the reconstructed counts from simulation."""

    variances: np.ndarray
    variance_std_errors: np.ndarray
    means: np.ndarray
    trials: int


def monte_carlo_variance_oracle(model, trials, rng):
    """Simulate the full measure-and-reconstruct pipeline and report variances.

    Each trial draws the measured counts as one multinomial over the exact
    channel probabilities and applies the linear-order reconstruction, so
    the only gap between these empirical variances and the analytic formulas
    is the O(q^2) truncation.  Standard errors on the variances come from
    the fourth-moment formula se(s^2) = sqrt((m4 - s^4) / trials).
    """
    if int(trials) < 100:
        raise ValidationError("need at least 100 trials for a meaningful variance")
    trials = int(trials)
    gen = rng if isinstance(rng, np.random.Generator) else rng_stream(rng)
    probs = measured_state_probs(model)
    probs = np.clip(probs, 0.0, None)
    probs = probs / probs.sum()
    draws = gen.multinomial(model.total, probs, size=trials).astype(np.float64)
    recon = linear_order_reconstruct(draws, model.q0, model.q1)
    means = recon.mean(axis=0)
    variances = recon.var(axis=0, ddof=1)
    centered = recon - means
    fourth = (centered ** 4).mean(axis=0)
    std_errors = np.sqrt(np.maximum(fourth - variances ** 2, 0.0) / trials)
    return OracleResult(variances, std_errors, means, trials)


def shots_equivalent_fraction(sigma_method, sigma_nominal):
    """Fraction of measurements a method needs for nominal statistical power.

    (sigma_method / sigma_nominal)^2: below one means the method reaches the
    nominal precision with proportionally fewer shots.
    """
    sm, sn = float(sigma_method), float(sigma_nominal)
    if sm <= 0 or sn <= 0:
        raise ValidationError("standard deviations must be positive")
    return (sm / sn) ** 2


def std_err_of_std(std, repetitions):
    """Normal-approximation standard error of a sample standard deviation."""
    return float(std / np.sqrt(2.0 * (int(repetitions) - 1)))


def ensemble_run(
    true_dist,
    response,
    plan,
    observable,
    repetitions,
    observable_label=None,
    seeds=None,
):
    """Repeat a measurement plan and summarize an observable across runs.

    Every repetition r draws its own stream from (plan.rng_seed, r), so
    results are reproducible and repetitions can run in any order.  An
    explicit ``seeds`` sequence (one per repetition, all distinct) can
    replace the derived ones.

    ``observable`` maps a corrected CountsHistogram to a float.
    """
    repetitions = int(repetitions)
    if repetitions < 2:
        raise ValidationError("need at least 2 repetitions for a standard deviation")
    if seeds is not None:
        seeds = [int(s) for s in seeds]
        if len(seeds) != repetitions:
            raise ValidationError("seeds must provide one entry per repetition")
        if len(set(seeds)) != len(seeds):
            raise ValidationError("repetition seeds must be independent (no duplicates)")

    values = np.empty(repetitions)
    masks = []
    negative_runs = 0
    for r in range(repetitions):
        gen = rng_stream(seeds[r]) if seeds is not None else rng_stream(plan.rng_seed, r)
        hist, mask = run_plan(true_dist, response, plan, gen)
        values[r] = observable(hist)
        if mask is not None:
            masks.append(mask.mask)
        if np.any(hist.counts < -1e-9):
            negative_runs += 1

    mean = float(values.mean())
    std = float(values.std(ddof=1))
    mask_mode = None
    if masks:
        counts = Counter(masks)
        top = max(counts.values())
        mask_mode = min(m for m, c in counts.items() if c == top)
    label = observable_label or getattr(observable, "__name__", "observable")
    return EnsembleResult(
        repetitions=repetitions,
        mean=mean,
        std=std,
        std_err_of_std=std_err_of_std(std, repetitions),
        strategy=plan.strategy,
        observable=label,
        flip_mask_mode=mask_mode,
        negative_runs=negative_runs,
    )
