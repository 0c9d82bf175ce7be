"""Pairwise likelihood-ratio tests for non-nested weighted families.

For fitted models i and j on the same sample, the pairwise statistic is

    t_ij = (L_i - L_j - (p_i - p_j)) / (sqrt(n) * a_hat),

where L are total log likelihoods, p are parameter dimensions, and a_hat
is the sample standard deviation (divisor n) of the per-observation
log-ratios. Model i stays in the confidence set at level alpha when
min_j t_ij >= -z, with z the upper alpha/(k-1) standard-normal point.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import DegenerateVarianceError
from .estimation import FittedModel


@dataclass(frozen=True)
class PairStatistic:
    """One pairwise comparison of model i against model j."""

    i: int
    j: int
    lr_total: float
    penalty: float
    a_hat: float
    t_value: float
    mean_lr: float

    def swapped(self) -> "PairStatistic":
        """The same comparison seen from model j's side."""
        return PairStatistic(
            i=self.j,
            j=self.i,
            lr_total=-self.lr_total,
            penalty=-self.penalty,
            a_hat=self.a_hat,
            t_value=-self.t_value,
            mean_lr=-self.mean_lr,
        )


@dataclass(frozen=True)
class TestOutcome:
    """Decision for one model against all rivals."""

    model_index: int
    pairs: tuple[PairStatistic, ...]
    min_t: float
    critical: float
    accepted: bool


def a_hat_squared(log_f_i, log_f_j) -> float:
    """Population-form variance (divisor n) of the per-observation log-ratios."""
    log_f_i = np.asarray(log_f_i, dtype=float)
    log_f_j = np.asarray(log_f_j, dtype=float)
    if log_f_i.shape != log_f_j.shape:
        raise ValueError(
            f"log-density vectors differ in shape: {log_f_i.shape} vs {log_f_j.shape}"
        )
    if log_f_i.size < 2:
        raise ValueError("need at least 2 observations for the variance estimate")
    lr = log_f_i - log_f_j
    value = float(np.mean(lr**2) - np.mean(lr) ** 2)
    return max(value, 0.0)


def critical_value(alpha: float, k: int) -> float:
    """Upper alpha/(k-1) standard-normal point; the decision threshold is its negative."""
    if k < 2:
        raise ValueError(f"need at least 2 candidate models, got k={k}")
    p = alpha / (k - 1)
    if not 0.0 < p < 1.0:
        raise ValueError(f"alpha/(k-1) = {p} must lie in (0, 1)")
    return float(special.ndtri(1.0 - p))


def t_statistic(fit_i: FittedModel, fit_j: FittedModel,
                i: int = 0, j: int = 1) -> PairStatistic:
    """Penalized, normalized log-likelihood-ratio statistic for fit_i vs fit_j."""
    if fit_i.n != fit_j.n:
        raise ValueError(f"fits use different sample sizes: {fit_i.n} vs {fit_j.n}")
    if fit_i.wf.weight.kind != fit_j.wf.weight.kind:
        raise ValueError(
            f"fits use different weight kinds: "
            f"{fit_i.wf.weight.kind!r} vs {fit_j.wf.weight.kind!r}"
        )
    n = fit_i.n
    lr = fit_i.loglik_per_obs - fit_j.loglik_per_obs
    lr_total = float(np.sum(lr))
    penalty = float(fit_i.param_dim - fit_j.param_dim)
    a2 = a_hat_squared(fit_i.loglik_per_obs, fit_j.loglik_per_obs)
    # relative guard: a2 of order eps^2 * mean(lr^2) is rounding noise, not signal
    scale = float(np.mean(lr**2))
    if a2 <= 1e-28 * max(1.0, scale):
        if lr_total == 0.0:
            t = 0.0
        else:
            raise DegenerateVarianceError(
                f"zero log-ratio variance with nonzero total ratio {lr_total}"
            )
        a_hat = 0.0
    else:
        a_hat = float(np.sqrt(a2))
        t = (lr_total - penalty) / (np.sqrt(n) * a_hat)
    return PairStatistic(
        i=i,
        j=j,
        lr_total=lr_total,
        penalty=penalty,
        a_hat=a_hat,
        t_value=float(t),
        mean_lr=lr_total / n,
    )


def decide(fits, alpha: float) -> list[TestOutcome]:
    """Accept/reject each model via its worst pairwise statistic.

    Model i is accepted iff min over j != i of t_ij is >= -critical_value
    (ties accepted). The unpenalized core is antisymmetric, so only the
    upper triangle is computed.
    """
    fits = list(fits)
    k = len(fits)
    if k < 2:
        raise ValueError(f"need at least 2 fitted models, got {k}")
    crit = critical_value(alpha, k)

    pair: dict[tuple[int, int], PairStatistic] = {}
    for i in range(k):
        for j in range(i + 1, k):
            ps = t_statistic(fits[i], fits[j], i=i, j=j)
            pair[(i, j)] = ps
            pair[(j, i)] = ps.swapped()

    outcomes = []
    for i in range(k):
        row = tuple(pair[(i, j)] for j in range(k) if j != i)
        min_t = min(ps.t_value for ps in row)
        outcomes.append(
            TestOutcome(
                model_index=i,
                pairs=row,
                min_t=min_t,
                critical=crit,
                accepted=min_t >= -crit,
            )
        )
    return outcomes
