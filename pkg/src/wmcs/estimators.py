"""Scikit-learn style estimators wrapping the confidence-set machinery.

Each estimator consumes a univariate sample (shape ``(n,)`` or ``(n, 1)``)
through ``fit`` and exposes the selected models via fitted attributes;
``score_samples`` evaluates the log density of the best retained model so
the estimators compose with standard model-selection tooling.

Candidates may be given as family names (``"lognormal"``), config
mappings (``{"family": ..., "weight": ...}``), ``ParamFamily`` instances,
or ready ``WeightedFamily`` objects.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .confidence_set import build_local_mcs, build_mcs
from .estimation import Dataset, OptimizerOptions
from .families import FAMILY_REGISTRY, ParamFamily
from .metrics import DensityHandle
from .mixture import build_mixture_set
from .weights import Region, WeightedFamily, identity, weighted_family_from_spec


def validate_sample(X) -> np.ndarray:
    """Coerce a univariate sample to a finite 1-D float array."""
    arr = np.asarray(X, dtype=float)
    if arr.ndim == 2 and arr.shape[1] == 1:
        arr = arr[:, 0]
    if arr.ndim != 1:
        raise ValueError(f"expected a univariate sample of shape (n,) or (n, 1), got {arr.shape}")
    if arr.size == 0:
        raise ValueError("empty sample")
    if not np.all(np.isfinite(arr)):
        raise ValueError("sample contains non-finite values")
    return arr


def as_weighted_family(candidate) -> WeightedFamily:
    """Normalize the accepted candidate forms to a WeightedFamily."""
    if isinstance(candidate, WeightedFamily):
        return candidate
    if isinstance(candidate, ParamFamily):
        return WeightedFamily(candidate, identity())
    if isinstance(candidate, str):
        try:
            cls = FAMILY_REGISTRY[candidate.lower()]
        except KeyError:
            known = ", ".join(sorted(FAMILY_REGISTRY))
            raise ValueError(f"unknown family {candidate!r}; known families: {known}") from None
        return WeightedFamily(cls.default(), identity())
    if isinstance(candidate, dict):
        return weighted_family_from_spec(candidate)
    raise TypeError(f"cannot interpret candidate {candidate!r}")


def _as_reference_handle(reference) -> DensityHandle | None:
    if reference is None:
        return None
    if isinstance(reference, DensityHandle):
        return reference
    if isinstance(reference, ParamFamily):
        return DensityHandle.from_family(reference)
    if isinstance(reference, dict):
        from .families import family_from_spec

        return DensityHandle.from_family(family_from_spec(reference))
    raise TypeError(f"cannot interpret reference density {reference!r}")


class ModelConfidenceSet(BaseEstimator):
    """Confidence set of non-nested candidate families for an unknown density.

    Fits every candidate by quasi-maximum likelihood, runs all pairwise
    penalized likelihood-ratio tests, and retains the candidates whose
    worst statistic stays above the Bonferroni-corrected normal threshold.

    Parameters
    ----------
    candidates : list
        Candidate models; see module docstring for the accepted forms.
        All candidates must share one weight kind.
    alpha : float, default 0.05
        Joint significance level of the set.
    restarts, max_iter, tol : optimizer controls per candidate fit.
    random_state : int, seed for the optimizer's restart perturbations.

    Attributes
    ----------
    members_ : tuple of int, indices of retained candidates.
    member_names_ : tuple of str.
    result_ : ConfidenceSet with fits, outcomes, and warnings.
    """

    def __init__(self, candidates, *, alpha=0.05, restarts=5, max_iter=500,
                 tol=1e-8, random_state=0):
        self.candidates = candidates
        self.alpha = alpha
        self.restarts = restarts
        self.max_iter = max_iter
        self.tol = tol
        self.random_state = random_state

    def _options(self) -> OptimizerOptions:
        return OptimizerOptions(
            max_iter=self.max_iter,
            tol=self.tol,
            restarts=self.restarts,
            seed=self.random_state,
        )

    def fit(self, X, y=None):
        sample = validate_sample(X)
        wfs = [as_weighted_family(c) for c in self.candidates]
        data = Dataset(sample)
        self.result_ = build_mcs(wfs, data, self.alpha, self._options())
        self.members_ = self.result_.members
        self.member_names_ = self.result_.member_names
        self.best_index_ = self.result_.best_index
        self._region_mass = None
        self.n_features_in_ = 1
        return self

    def score_samples(self, X):
        """Log density of the best retained model at the given points."""
        check_is_fitted(self, "result_")
        sample = validate_sample(X)
        fit = self.result_.fits[self.best_index_]
        return fit.wf.log_pdf(sample, self._region_mass)

    def score(self, X, y=None):
        """Total log likelihood of the best retained model."""
        return float(np.sum(self.score_samples(X)))


class LocalConfidenceSet(ModelConfidenceSet):
    """Confidence set restricted to a region of the support.

    Candidates are wrapped in an indicator weight over ``region`` (a
    ``(lower, upper]`` pair, infinite endpoints allowed) normalized by the
    empirical region mass; the selection is valid on that region only.
    """

    def __init__(self, candidates, region, *, alpha=0.05, restarts=5,
                 max_iter=500, tol=1e-8, random_state=0):
        super().__init__(
            candidates,
            alpha=alpha,
            restarts=restarts,
            max_iter=max_iter,
            tol=tol,
            random_state=random_state,
        )
        self.region = region

    def fit(self, X, y=None):
        sample = validate_sample(X)
        region = Region(float(self.region[0]), float(self.region[1]))
        bases = [as_weighted_family(c).base for c in self.candidates]
        data = Dataset(sample)
        self.result_ = build_local_mcs(bases, data, region, self.alpha, self._options())
        self.members_ = self.result_.members
        self.member_names_ = self.result_.member_names
        self.best_index_ = self.result_.best_index
        self._region_mass = data.region_mass(region)
        self.n_features_in_ = 1
        return self


class MixtureConfidenceSet(BaseEstimator):
    """Mixture confidence set over a two-part partition of the support.

    Builds one local confidence set per side of ``split`` at level
    ``beta`` (default: the exact budget keeping the joint level at
    ``alpha``), renormalizes every retained family on its side, and
    combines each cross pair with the mixing weight maximizing the sample
    mean log mixture density.

    Attributes
    ----------
    mixture_set_ : MixtureSet with local sets and all candidates.
    candidates_ : tuple of MixtureCandidate.
    best_index_ : candidate with the largest mean log mixture density.
    """

    def __init__(self, left_candidates, right_candidates, *, split=0.0,
                 alpha=0.05, beta=None, reference=None, restarts=5,
                 max_iter=500, tol=1e-8, random_state=0):
        self.left_candidates = left_candidates
        self.right_candidates = right_candidates
        self.split = split
        self.alpha = alpha
        self.beta = beta
        self.reference = reference
        self.restarts = restarts
        self.max_iter = max_iter
        self.tol = tol
        self.random_state = random_state

    def fit(self, X, y=None):
        sample = validate_sample(X)
        options = OptimizerOptions(
            max_iter=self.max_iter,
            tol=self.tol,
            restarts=self.restarts,
            seed=self.random_state,
        )
        left = [as_weighted_family(c).base for c in self.left_candidates]
        right = [as_weighted_family(c).base for c in self.right_candidates]
        self.mixture_set_ = build_mixture_set(
            left,
            right,
            Dataset(sample),
            split=self.split,
            alpha=self.alpha,
            beta=self.beta,
            reference=_as_reference_handle(self.reference),
            options=options,
        )
        self.candidates_ = self.mixture_set_.candidates
        self.alpha_opts_ = tuple(c.alpha_opt for c in self.candidates_)
        self.best_index_ = int(
            np.argmax([c.psi_at_opt for c in self.candidates_])
        )
        self.n_features_in_ = 1
        return self

    def score_samples(self, X):
        """Log density of the best mixture candidate at the given points."""
        check_is_fitted(self, "mixture_set_")
        sample = validate_sample(X)
        return self.candidates_[self.best_index_].log_pdf(sample)

    def score(self, X, y=None):
        return float(np.sum(self.score_samples(X)))
