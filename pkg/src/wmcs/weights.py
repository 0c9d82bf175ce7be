"""Weight functions and weighted densities.

A weighted density rescales a base density f by a nonnegative weight
delta(x) divided by a normalizer: delta(x) * f(x; theta) / norm. Three
weights are supported:

* ``identity``: delta = 1, norm = 1 (the unweighted family);
* ``length_biased``: delta(x) = x, norm = E_f(X) in closed form, so the
  normalizer moves with theta during fitting;
* ``indicator``: delta(x) = 1 if x falls in a region, norm = the
  probability of the region under the data-generating law, estimated
  empirically (the normalizer is parameter-free).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotAvailableError, ParameterDomainError
from .families import Gamma, Lognormal, ParamFamily, Weibull

IDENTITY = "identity"
LENGTH_BIASED = "length_biased"
INDICATOR = "indicator"
_KINDS = (IDENTITY, LENGTH_BIASED, INDICATOR)


@dataclass(frozen=True)
class Region:
    """Half-open interval (lower, upper]; endpoints may be infinite."""

    lower: float
    upper: float

    def __post_init__(self):
        if not self.lower < self.upper:
            raise ValueError(f"region requires lower < upper, got ({self.lower}, {self.upper}]")

    def contains(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return (x > self.lower) & (x <= self.upper)

    @property
    def is_whole_line(self) -> bool:
        return np.isneginf(self.lower) and np.isposinf(self.upper)

    def __str__(self) -> str:
        return f"({self.lower}, {self.upper}]"


def whole_line() -> Region:
    return Region(-np.inf, np.inf)


@dataclass(frozen=True)
class WeightSpec:
    """Descriptor of a weight function; ``region`` only applies to indicators."""

    kind: str
    region: Region | None = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"weight kind must be one of {_KINDS}, got {self.kind!r}")
        if self.kind == INDICATOR and self.region is None:
            raise ValueError("indicator weight requires a region")
        if self.kind != INDICATOR and self.region is not None:
            raise ValueError(f"{self.kind} weight does not take a region")

    @property
    def normalizer_rule(self) -> str:
        """How the normalizing constant is obtained for this weight."""
        if self.kind == IDENTITY:
            return "unit"
        if self.kind == LENGTH_BIASED:
            return "analytic_under_f"
        return "empirical_under_h"


def identity() -> WeightSpec:
    return WeightSpec(IDENTITY)


def length_biased() -> WeightSpec:
    return WeightSpec(LENGTH_BIASED)


def indicator(lower: float, upper: float) -> WeightSpec:
    return WeightSpec(INDICATOR, Region(float(lower), float(upper)))


def weight_from_spec(spec: dict | None) -> WeightSpec:
    """Parse ``{"kind": "length_biased"}`` or ``{"kind": "indicator", "region": [lo, hi]}``."""
    if spec is None:
        return identity()
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ValueError(f"weight spec must be a mapping with a 'kind' key: {spec!r}")
    kind = str(spec["kind"]).lower()
    if kind == INDICATOR:
        region = spec.get("region")
        if region is None or len(region) != 2:
            raise ValueError("indicator weight spec requires 'region': [lower, upper]")
        return indicator(float(region[0]), float(region[1]))
    if kind in (IDENTITY, LENGTH_BIASED):
        return WeightSpec(kind)
    raise ValueError(f"unknown weight kind {kind!r}")


# families whose length-biased law is again a standard law, so sampling is exact
_LB_EXACT = (Lognormal, Gamma, Weibull)


@dataclass(frozen=True)
class WeightedFamily:
    """A base family combined with a weight function."""

    base: ParamFamily
    weight: WeightSpec

    def __post_init__(self):
        if self.weight.kind == LENGTH_BIASED:
            lo, _ = self.base.support
            if lo < 0.0:
                raise ParameterDomainError(
                    f"length-biased weighting needs support in (0, inf); "
                    f"{self.base.name} has support {self.base.support}"
                )
            # requires a finite closed-form mean
            self.base.mean_value()

    @property
    def param_dim(self) -> int:
        return self.base.param_dim

    @property
    def name(self) -> str:
        if self.weight.kind == IDENTITY:
            return self.base.name
        if self.weight.kind == LENGTH_BIASED:
            return f"length_biased_{self.base.name}"
        return f"{self.base.name}|{self.weight.region}"

    def norm_constant(self, region_mass: float | None = None) -> float:
        """Normalizing constant of the weighted density.

        For indicator weights the empirical region probability must be
        supplied; the other weights compute it internally.
        """
        if self.weight.kind == IDENTITY:
            return 1.0
        if self.weight.kind == LENGTH_BIASED:
            return float(self.base.mean_value())
        if region_mass is None:
            raise ValueError("indicator weight needs the empirical region mass")
        if not region_mass > 0.0:
            raise ValueError(f"region mass must be > 0, got {region_mass}")
        return float(region_mass)

    def log_weight(self, x) -> np.ndarray:
        """log delta(x); -inf where the weight vanishes."""
        x = np.asarray(x, dtype=float)
        if self.weight.kind == IDENTITY:
            return np.zeros(x.shape)
        if self.weight.kind == LENGTH_BIASED:
            with np.errstate(divide="ignore", invalid="ignore"):
                return np.where(x > 0.0, np.log(np.maximum(x, 1e-300)), -np.inf)
        return np.where(self.weight.region.contains(x), 0.0, -np.inf)

    def log_pdf(self, x, region_mass: float | None = None) -> np.ndarray:
        """Log weighted density: log delta(x) - log norm + log f(x; theta)."""
        norm = self.norm_constant(region_mass)
        return self.log_weight(x) - np.log(norm) + self.base.log_pdf(x)

    def pdf(self, x, region_mass: float | None = None) -> np.ndarray:
        return np.exp(self.log_pdf(x, region_mass))

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        """Exact draws from the weighted density.

        Identity passes through to the base sampler. Length-biased sampling
        uses distributional identities: LB-Lognormal(mu, s2) is
        Lognormal(mu + s2, s2); LB-Gamma(a, s) is Gamma(a + 1, s); and for
        LB-Weibull(k, s), (X/s)^k is Gamma(1 + 1/k, 1).
        """
        if n < 1:
            raise ValueError("sample size must be >= 1")
        n = int(n)
        if self.weight.kind == IDENTITY:
            return self.base.sample(n, rng)
        if self.weight.kind == LENGTH_BIASED:
            theta = self.base.params
            if isinstance(self.base, Lognormal):
                mu, s2 = theta
                return rng.lognormal(mu + s2, np.sqrt(s2), n)
            if isinstance(self.base, Gamma):
                a, s = theta
                return rng.gamma(a + 1.0, s, n)
            if isinstance(self.base, Weibull):
                k, s = theta
                return s * rng.gamma(1.0 + 1.0 / k, 1.0, n) ** (1.0 / k)
        raise NotAvailableError(
            f"no exact sampler for weight {self.weight.kind!r} over {self.base.name}"
        )


def weighted_family_from_spec(spec: dict) -> WeightedFamily:
    """Parse a full model spec: family, optional params, optional weight."""
    from .families import family_from_spec

    base = family_from_spec(spec)
    return WeightedFamily(base, weight_from_spec(spec.get("weight")))
