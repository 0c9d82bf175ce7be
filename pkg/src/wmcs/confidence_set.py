"""Construction of weighted and local model confidence sets."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EstimationError, InsufficientDataError
from .estimation import Dataset, FittedModel, OptimizerOptions, fit_qmle
from .families import ParamFamily
from .vuong import TestOutcome, decide
from .weights import WeightedFamily, WeightSpec, indicator, Region


@dataclass(frozen=True)
class ConfidenceSet:
    """The candidate families not rejected at joint level 1 - alpha.

    ``fits`` is aligned with the original candidate list (None where the
    candidate could not be fitted); ``outcomes`` covers the successfully
    fitted candidates, indexed by their original positions.
    """

    alpha: float
    weight: WeightSpec
    members: tuple[int, ...]
    outcomes: tuple[TestOutcome, ...]
    fits: tuple[FittedModel | None, ...]
    region: Region | None = None
    warnings: tuple[str, ...] = ()

    @property
    def member_names(self) -> tuple[str, ...]:
        return tuple(self.fits[i].name for i in self.members)

    @property
    def member_fits(self) -> tuple[FittedModel, ...]:
        return tuple(self.fits[i] for i in self.members)

    @property
    def best_index(self) -> int:
        """Index of the largest mean log likelihood; always a member."""
        fitted = [(i, f) for i, f in enumerate(self.fits) if f is not None]
        return max(fitted, key=lambda pair: pair[1].mean_loglik)[0]

    def outcome_for(self, index: int) -> TestOutcome:
        for outcome in self.outcomes:
            if outcome.model_index == index:
                return outcome
        raise KeyError(f"no outcome for candidate {index}")

    def to_dict(self) -> dict:
        """JSON-ready summary."""
        table = []
        for outcome in self.outcomes:
            fit = self.fits[outcome.model_index]
            table.append(
                {
                    "index": outcome.model_index,
                    "model": fit.name,
                    "theta_hat": dict(zip(fit.wf.base.param_names, fit.theta_hat.tolist())),
                    "mean_loglik": fit.mean_loglik,
                    "t_row": {
                        f"vs_{self.fits[ps.j].name}": ps.t_value for ps in outcome.pairs
                    },
                    "min_t": _json_num(outcome.min_t),
                    "critical": _json_num(outcome.critical),
                    "accepted": outcome.accepted,
                }
            )
        return {
            "alpha": self.alpha,
            "weight": self.weight.kind,
            "region": None if self.region is None else [self.region.lower, self.region.upper],
            "members": list(self.member_names),
            "table": table,
            "warnings": list(self.warnings),
        }

    def table_rows(self) -> list[dict]:
        """Rows for a CSV table: hypothesis, statistic, conclusion."""
        rows = []
        for outcome in self.outcomes:
            fit = self.fits[outcome.model_index]
            rows.append(
                {
                    "hypothesis": fit.name,
                    "statistic": outcome.min_t,
                    "conclusion": "accepted" if outcome.accepted else "rejected",
                }
            )
        return rows


def _json_num(x: float):
    return None if not np.isfinite(x) else float(x)


def build_mcs(candidates, data: Dataset, alpha: float,
              options: OptimizerOptions | None = None,
              region: Region | None = None) -> ConfidenceSet:
    """Fit every candidate, run the pairwise tests, and keep the accepted ones.

    Candidates must share one weight kind and are assumed pairwise
    non-nested (not checked; no general computable test exists). A
    candidate whose fit fails is dropped with a recorded warning and the
    Bonferroni divisor k shrinks accordingly.
    """
    candidates = list(candidates)
    if len(candidates) < 2:
        raise ValueError(f"need at least 2 candidate models, got {len(candidates)}")
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    kinds = {wf.weight.kind for wf in candidates}
    if len(kinds) > 1:
        raise ValueError(f"candidates mix weight kinds: {sorted(kinds)}")

    fits: list[FittedModel | None] = []
    warnings: list[str] = []
    for idx, wf in enumerate(candidates):
        try:
            fits.append(fit_qmle(wf, data, options))
        except EstimationError as exc:
            fits.append(None)
            warnings.append(f"candidate {idx} ({wf.name}) excluded: {exc}")

    fitted_indices = [i for i, f in enumerate(fits) if f is not None]
    if not fitted_indices:
        raise InsufficientDataError(
            "no candidate could be fitted: " + "; ".join(warnings)
        )

    if len(fitted_indices) == 1:
        only = fitted_indices[0]
        outcome = TestOutcome(
            model_index=only, pairs=(), min_t=np.inf, critical=np.nan, accepted=True
        )
        return ConfidenceSet(
            alpha=alpha,
            weight=candidates[0].weight,
            members=(only,),
            outcomes=(outcome,),
            fits=tuple(fits),
            region=region,
            warnings=tuple(warnings),
        )

    raw = decide([fits[i] for i in fitted_indices], alpha)
    outcomes = []
    for outcome in raw:
        remap = fitted_indices[outcome.model_index]
        pairs = tuple(
            type(ps)(
                i=fitted_indices[ps.i],
                j=fitted_indices[ps.j],
                lr_total=ps.lr_total,
                penalty=ps.penalty,
                a_hat=ps.a_hat,
                t_value=ps.t_value,
                mean_lr=ps.mean_lr,
            )
            for ps in outcome.pairs
        )
        outcomes.append(
            TestOutcome(
                model_index=remap,
                pairs=pairs,
                min_t=outcome.min_t,
                critical=outcome.critical,
                accepted=outcome.accepted,
            )
        )
    members = tuple(o.model_index for o in outcomes if o.accepted)
    return ConfidenceSet(
        alpha=alpha,
        weight=candidates[0].weight,
        members=members,
        outcomes=tuple(outcomes),
        fits=tuple(fits),
        region=region,
        warnings=tuple(warnings),
    )


def build_local_mcs(candidates, data: Dataset, region: Region, alpha: float,
                    options: OptimizerOptions | None = None) -> ConfidenceSet:
    """Confidence set under an indicator weight restricted to ``region``.

    Each candidate family is wrapped with the indicator weight normalized
    by the ECDF mass of the region; the resulting set is valid on the
    region only. A single candidate is allowed (the set is trivially that
    candidate), so mixture construction works with one family per side.
    """
    candidates = list(candidates)
    mass = data.region_mass(region)
    if mass <= 0.0:
        raise InsufficientDataError(f"region {region} contains no observations")
    wrapped = []
    for cand in candidates:
        base = cand if isinstance(cand, ParamFamily) else cand.base
        wrapped.append(WeightedFamily(base, indicator(region.lower, region.upper)))
    if len(wrapped) == 1:
        fit = fit_qmle(wrapped[0], data, options)
        outcome = TestOutcome(
            model_index=0, pairs=(), min_t=np.inf, critical=np.nan, accepted=True
        )
        return ConfidenceSet(
            alpha=alpha,
            weight=wrapped[0].weight,
            members=(0,),
            outcomes=(outcome,),
            fits=(fit,),
            region=region,
        )
    return build_mcs(wrapped, data, alpha, options, region=region)
