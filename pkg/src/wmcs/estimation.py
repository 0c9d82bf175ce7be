"""Empirical estimators and quasi-maximum-likelihood fitting.

The fitting objective is the summed log weighted density. It is maximized
with a derivative-free simplex search run from a moment-based start plus
randomly perturbed restarts; positive parameters are optimized on the log
scale, which keeps every iterate inside the parameter domain.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .errors import InsufficientDataError, NonConvergenceError
from .weights import INDICATOR, LENGTH_BIASED, Region, WeightedFamily


class Dataset:
    """An i.i.d. univariate sample with a cached sorted copy for ECDF queries."""

    def __init__(self, values):
        arr = np.asarray(values, dtype=float).ravel()
        if arr.size == 0:
            raise ValueError("dataset must be non-empty")
        if not np.all(np.isfinite(arr)):
            raise ValueError("dataset values must all be finite")
        self._values = arr
        self._values.setflags(write=False)
        self._sorted = np.sort(arr)
        self._sorted.setflags(write=False)

    @property
    def values(self) -> np.ndarray:
        return self._values

    @property
    def sorted_values(self) -> np.ndarray:
        return self._sorted

    @property
    def n(self) -> int:
        return self._values.size

    def __len__(self) -> int:
        return self.n

    def ecdf(self, t):
        """Right-continuous empirical CDF: (1/n) * #{x_i <= t}."""
        t = np.asarray(t, dtype=float)
        counts = np.searchsorted(self._sorted, t, side="right")
        out = counts / self.n
        return float(out) if out.ndim == 0 else out

    def region_mass(self, region: Region) -> float:
        """Empirical probability of the half-open region (lower, upper]."""
        hi = self.ecdf(region.upper) if np.isfinite(region.upper) else 1.0
        lo = self.ecdf(region.lower) if np.isfinite(region.lower) else 0.0
        return float(hi - lo)


@dataclass(frozen=True)
class OptimizerOptions:
    """Knobs for the simplex maximizer; defaults match the CLI flags."""

    max_iter: int = 500
    tol: float = 1e-8
    restarts: int = 5
    seed: int = 0

    def __post_init__(self):
        if self.max_iter < 1 or self.restarts < 1 or not self.tol > 0:
            raise ValueError(f"invalid optimizer options: {self}")


@dataclass(frozen=True)
class FittedModel:
    """A weighted family with its QMLE parameters and per-observation log densities.

    ``loglik_per_obs`` holds each observation's contribution to the fitted
    log likelihood. For indicator weights, observations outside the region
    contribute exactly 0.0, so that log-likelihood differences between two
    models sharing the region depend only on in-region points; in-region
    entries include the (parameter-free) -log region-mass normalizer.
    """

    wf: WeightedFamily
    theta_hat: np.ndarray
    loglik_total: float
    loglik_per_obs: np.ndarray = field(repr=False)
    mean_loglik: float
    converged: bool
    n_restarts_used: int

    def __post_init__(self):
        object.__setattr__(self, "theta_hat", np.asarray(self.theta_hat, dtype=float))
        object.__setattr__(self, "loglik_per_obs", np.asarray(self.loglik_per_obs, dtype=float))

    @property
    def n(self) -> int:
        return self.loglik_per_obs.size

    @property
    def param_dim(self) -> int:
        return self.wf.param_dim

    @property
    def name(self) -> str:
        return self.wf.name


def mean_log_density(wf: WeightedFamily, theta, data: Dataset,
                     region_mass: float | None = None) -> float:
    """Sample mean of the log weighted density, (1/n) sum log f_w(x_i; theta).

    This is the strict plug-in estimator of the mean log density: any
    observation with zero weighted density (off-support, or outside an
    indicator region) makes the value -inf.
    """
    fam = type(wf.base).from_params(theta)
    values = WeightedFamily(fam, wf.weight).log_pdf(data.values, region_mass)
    return float(np.mean(values))


def _effective_values(wf: WeightedFamily, data: Dataset) -> np.ndarray:
    """Observations inside the weight's effective support (region and family support)."""
    x = data.values
    keep = wf.base.in_support(x)
    if wf.weight.kind == INDICATOR:
        keep &= wf.weight.region.contains(x)
    return x[keep]


def fit_qmle(wf: WeightedFamily, data: Dataset,
             options: OptimizerOptions | None = None) -> FittedModel:
    """Quasi-maximum-likelihood fit of a weighted family.

    Maximizes sum_i log f_w(x_i; theta) over the parameter domain. For
    indicator weights only in-region observations enter the objective (the
    region-mass normalizer is parameter-free and added afterwards).

    Raises
    ------
    InsufficientDataError
        Fewer than param_dim + 1 effective observations, or degenerate
        (constant) data for a multi-parameter family.
    NonConvergenceError
        No restart found a parameter point with finite likelihood.
    """
    opts = options or OptimizerOptions()
    family_cls = type(wf.base)
    positive = np.asarray(family_cls.positive, dtype=bool)
    p = wf.param_dim

    x_eff = _effective_values(wf, data)
    if x_eff.size < p + 1:
        raise InsufficientDataError(
            f"{wf.name}: {x_eff.size} effective observations for {p} parameters"
        )
    if p >= 2 and np.ptp(x_eff) == 0.0:
        raise InsufficientDataError(f"{wf.name}: degenerate data (all values equal)")

    # theta-free weight terms (log delta(x_i), -log region mass) are dropped
    # from the objective; only the length-biased normalizer depends on theta.
    # In-region points outside the family support stay in the objective: they
    # make the local likelihood -inf, so the candidate is correctly infeasible.
    if wf.weight.kind == INDICATOR:
        x_obj = data.values[wf.weight.region.contains(data.values)]
    else:
        x_obj = data.values
    length_biased = wf.weight.kind == LENGTH_BIASED
    n_obj = x_obj.size

    def to_theta(z: np.ndarray) -> np.ndarray:
        theta = z.copy()
        theta[positive] = np.exp(z[positive])
        return theta

    def negative_loglik(z: np.ndarray) -> float:
        # extreme simplex iterates may overflow; they just score as invalid
        with np.errstate(all="ignore"):
            theta = to_theta(z)
            try:
                fam = family_cls.from_params(theta)
            except ValueError:
                return 1e300
            total = float(np.sum(fam.log_pdf(x_obj)))
            if length_biased:
                total -= n_obj * np.log(fam.mean_value())
        return -total if np.isfinite(total) else 1e300

    theta0 = family_cls.moment_init(x_eff)
    z0 = theta0.copy()
    z0[positive] = np.log(np.maximum(theta0[positive], 1e-300))

    rng = np.random.default_rng(opts.seed)
    best = None
    best_converged = False
    for k in range(opts.restarts):
        z_start = z0 if k == 0 else z0 + rng.normal(0.0, 0.3, size=p)
        f_start = negative_loglik(z_start)
        result = minimize(
            negative_loglik,
            z_start,
            method="Nelder-Mead",
            options={
                "maxiter": opts.max_iter,
                "fatol": opts.tol * (1.0 + abs(f_start if f_start < 1e299 else 0.0)),
                "xatol": 1e-8,
            },
        )
        if best is None or result.fun < best.fun:
            best = result
            best_converged = bool(result.success)

    if best is None or best.fun >= 1e299:
        raise NonConvergenceError(
            f"{wf.name}: no restart reached a finite likelihood",
            best_theta=None if best is None else to_theta(best.x),
            best_objective=None if best is None else -best.fun,
        )

    theta_hat = to_theta(best.x)
    fitted = WeightedFamily(family_cls.from_params(theta_hat), wf.weight)

    x = data.values
    if wf.weight.kind == INDICATOR:
        mass = data.region_mass(wf.weight.region)
        inside = wf.weight.region.contains(x)
        per_obs = np.zeros(x.size)
        per_obs[inside] = fitted.base.log_pdf(x[inside]) - np.log(mass)
    else:
        per_obs = fitted.log_pdf(x)

    total = float(np.sum(per_obs))
    return FittedModel(
        wf=fitted,
        theta_hat=theta_hat,
        loglik_total=total,
        loglik_per_obs=per_obs,
        mean_loglik=total / data.n,
        converged=best_converged,
        n_restarts_used=opts.restarts,
    )
