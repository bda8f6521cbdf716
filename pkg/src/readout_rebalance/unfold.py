"""Readout-error correction: matrix inversion and iterative Bayesian unfolding.

Both unfolders take a measured histogram and a response matrix and return
an estimate of the true histogram at the same total.  Matrix inversion is
exactly unbiased for linear observables but can go negative; IBU stays
nonnegative and is the usual choice for actual correction work.
"""

import numpy as np
from dataclasses import dataclass

from .core import (
    CountsHistogram,
    DimensionError,
    NumericalError,
    ValidationError,
)

DEFAULT_IBU_ITERATIONS = 100
# refuse inversion beyond this condition number; far above anything a
# readout matrix should reach
DEFAULT_MAX_CONDITION = 1e12

_METHODS = ("matrix_inversion", "ibu")


@dataclass(frozen=True)
class UnfoldConfig:
    """Which unfolder to run and with what settings.

    ``ibu_prior`` only supports "uniform" for now; the field exists so a
    config file can name the prior explicitly.
    """

    method: str = "ibu"
    ibu_iterations: int = DEFAULT_IBU_ITERATIONS
    ibu_prior: str = "uniform"

    def __post_init__(self):
        if self.method not in _METHODS:
            raise ValidationError(
                f"unknown unfold method {self.method!r}, expected one of {_METHODS}"
            )
        if int(self.ibu_iterations) < 1:
            raise ValidationError("ibu_iterations must be >= 1")
        object.__setattr__(self, "ibu_iterations", int(self.ibu_iterations))
        if self.ibu_prior != "uniform":
            raise ValidationError("only the uniform IBU prior is implemented")


def _check_dims(measured, response):
    if measured.n_qubits != response.n_qubits:
        raise DimensionError("histogram width does not match response matrix")


def condition_report(response):
    """2-norm condition number of the response matrix (ratio of extreme
    singular values)."""
    return float(np.linalg.cond(response.entries))


def matrix_inverse_unfold(measured, response, max_condition=DEFAULT_MAX_CONDITION):
    """Unfold by solving R t = m.

    Solves the linear system rather than materializing R^-1.  Because the
    columns of R sum to one, the solution preserves the measured total.
    Entries may come out negative; they are returned as-is so downstream
    statistics stay unbiased.

    Raises
    ------
    NumericalError
        If R is singular or its condition number exceeds ``max_condition``.
    """
    _check_dims(measured, response)
    cond = condition_report(response)
    if not np.isfinite(cond) or cond > max_condition:
        raise NumericalError(
            f"response matrix condition number {cond:.3e} exceeds {max_condition:.3e}"
        )
    try:
        solution = np.linalg.solve(response.entries, measured.counts)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"response matrix is singular: {exc}") from exc
    return CountsHistogram(measured.n_qubits, solution)


def ibu_unfold(measured, response, iterations=DEFAULT_IBU_ITERATIONS, prior=None):
    """Iterative Bayesian unfolding (Richardson-Lucy / D'Agostini iteration).

    Starting from the prior scaled to the measured total (uniform when no
    prior is given), each step redistributes the measured counts with Bayes'
    rule:

        t[i] <- t[i] * sum_j R[j, i] * m[j] / (R t)[j]

    The iterate stays nonnegative and keeps the measured total at every
    step.  Convergence is controlled purely by the iteration count; the
    result depends only weakly on it for well-conditioned matrices.

    Raises
    ------
    ValidationError
        For negative or zero-total input histograms.
    NumericalError
        If some measured bin has counts but zero folded support, so no
        redistribution can explain it.
    """
    _check_dims(measured, response)
    if int(iterations) < 1:
        raise ValidationError("iterations must be >= 1")
    m = measured.counts
    if np.any(m < 0):
        raise ValidationError("IBU requires a nonnegative measured histogram")
    total = measured.total
    if total <= 0:
        raise ValidationError("IBU requires a histogram with positive total")

    if prior is None:
        t = np.full(response.dim, total / response.dim)
    else:
        if prior.n_qubits != measured.n_qubits:
            raise DimensionError("prior width does not match histogram")
        t = prior.probs * total

    R = response.entries
    for _ in range(int(iterations)):
        folded = R @ t
        empty = folded <= 0.0
        if np.any(empty & (m > 0)):
            j = int(np.argmax(empty & (m > 0)))
            raise NumericalError(
                f"measured bin {j} has counts but zero folded support; "
                "degenerate response/prior combination"
            )
        ratio = np.divide(m, folded, out=np.zeros_like(t), where=~empty)
        t = t * (R.T @ ratio)
    return CountsHistogram(measured.n_qubits, t)


def apply_unfold(measured, response, config):
    """Run the unfolder selected by an :class:`UnfoldConfig`."""
    if config.method == "matrix_inversion":
        return matrix_inverse_unfold(measured, response)
    return ibu_unfold(measured, response, iterations=config.ibu_iterations)
