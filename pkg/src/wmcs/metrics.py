"""Divergences and distances between densities via adaptive quadrature.

Infinite supports are truncated to a finite window covering at least
1 - 1e-10 of the mass of each density (union of per-density quantile
ranges); known kink locations are passed to the integrator as
breakpoints. The Hellinger distance here is sqrt(int (sqrt f - sqrt g)^2)
with no 1/2 factor, so it ranges in [0, sqrt(2)]; squared and normalized
variants used in reports are derived from it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import quad

from .errors import QuadratureError
from .families import Gamma, Lognormal, ParamFamily, Weibull
from .weights import IDENTITY, INDICATOR, LENGTH_BIASED, WeightedFamily

_MASS_EPS = 1e-10


@dataclass(frozen=True)
class DensityHandle:
    """A pointwise density with a finite effective integration window."""

    pdf: Callable[[np.ndarray], np.ndarray]
    lower: float
    upper: float
    breakpoints: tuple[float, ...] = ()

    def __post_init__(self):
        if not (np.isfinite(self.lower) and np.isfinite(self.upper)):
            raise ValueError("integration window must be finite")
        if not self.lower < self.upper:
            raise ValueError(f"empty integration window [{self.lower}, {self.upper}]")

    @classmethod
    def from_family(cls, family: ParamFamily, eps: float = _MASS_EPS) -> "DensityHandle":
        lo, hi = _family_bounds(family, eps)
        return cls(pdf=family.pdf, lower=lo, upper=hi)

    @classmethod
    def from_weighted(cls, wf: WeightedFamily, region_mass: float | None = None,
                      eps: float = _MASS_EPS) -> "DensityHandle":
        if wf.weight.kind == IDENTITY:
            return cls.from_family(wf.base, eps)
        if wf.weight.kind == LENGTH_BIASED:
            lo, hi = _length_biased_bounds(wf.base, eps)
            return cls(pdf=lambda x: wf.pdf(x), lower=lo, upper=hi)
        if wf.weight.kind == INDICATOR:
            region = wf.weight.region
            lo, hi = _family_bounds(wf.base, eps)
            lo = max(lo, region.lower) if np.isfinite(region.lower) else lo
            hi = min(hi, region.upper) if np.isfinite(region.upper) else hi
            breaks = tuple(b for b in (region.lower, region.upper) if np.isfinite(b))
            return cls(
                pdf=lambda x: wf.pdf(x, region_mass),
                lower=lo,
                upper=hi,
                breakpoints=breaks,
            )
        raise ValueError(f"unknown weight kind {wf.weight.kind!r}")

    @classmethod
    def from_region_density(cls, rd, eps: float = _MASS_EPS) -> "DensityHandle":
        """Handle for a region-renormalized density (duck-typed)."""
        lo, hi = _family_bounds(rd.family, eps)
        region = rd.region
        lo = max(lo, region.lower) if np.isfinite(region.lower) else lo
        hi = min(hi, region.upper) if np.isfinite(region.upper) else hi
        breaks = tuple(b for b in (region.lower, region.upper) if np.isfinite(b))
        return cls(pdf=rd.pdf, lower=lo, upper=hi, breakpoints=breaks)

    @classmethod
    def from_mixture(cls, candidate, eps: float = _MASS_EPS) -> "DensityHandle":
        """Handle for a two-component mixture candidate (duck-typed)."""
        left = cls.from_region_density(candidate.f_density, eps)
        right = cls.from_region_density(candidate.g_density, eps)
        breaks = tuple(sorted(set(left.breakpoints) | set(right.breakpoints)))
        return cls(
            pdf=candidate.pdf,
            lower=min(left.lower, right.lower),
            upper=max(left.upper, right.upper),
            breakpoints=breaks,
        )


def _family_bounds(family: ParamFamily, eps: float) -> tuple[float, float]:
    lo = float(family.ppf(eps / 2.0))
    hi = float(family.ppf(1.0 - eps / 2.0))
    slo, shi = family.support
    lo = max(lo, slo)
    hi = min(hi, shi)
    return lo, hi


def _length_biased_bounds(base: ParamFamily, eps: float) -> tuple[float, float]:
    """Exact quantile window of a length-biased law via its equivalent family."""
    theta = base.params
    if isinstance(base, Lognormal):
        mu, s2 = theta
        return _family_bounds(Lognormal(mu + s2, s2), eps)
    if isinstance(base, Gamma):
        a, s = theta
        return _family_bounds(Gamma(a + 1.0, s), eps)
    if isinstance(base, Weibull):
        k, s = theta
        g = Gamma(1.0 + 1.0 / k, 1.0)
        qlo, qhi = _family_bounds(g, eps)
        return s * qlo ** (1.0 / k), s * qhi ** (1.0 / k)
    raise ValueError(f"no length-biased quantile window for {base.name}")


def _merged_window(f: DensityHandle, g: DensityHandle) -> tuple[float, float, list[float]]:
    lo = min(f.lower, g.lower)
    hi = max(f.upper, g.upper)
    points = sorted(p for p in set(f.breakpoints) | set(g.breakpoints) if lo < p < hi)
    return lo, hi, points


def _integrate(func, lo: float, hi: float, points, quad_tol: float) -> float:
    result = quad(
        func,
        lo,
        hi,
        points=points or None,
        limit=200,
        epsabs=quad_tol,
        epsrel=min(1e-8, quad_tol),
        full_output=1,
    )
    value = result[0]
    if not np.isfinite(value):
        raise QuadratureError(f"integral did not converge on [{lo}, {hi}]")
    return float(value)


def kl_divergence(h: DensityHandle, f: DensityHandle, quad_tol: float = 1e-6) -> float:
    """int h log(h/f); +inf when f vanishes somewhere h does not."""
    lo, hi, points = _merged_window(h, f)
    grid = np.linspace(lo, hi, 2049)
    hv = np.asarray(h.pdf(grid), dtype=float)
    fv = np.asarray(f.pdf(grid), dtype=float)
    if np.any((hv > 0.0) & (fv <= 0.0)):
        return float("inf")

    def integrand(x):
        hx = float(h.pdf(np.asarray(x)))
        if hx <= 0.0:
            return 0.0
        fx = max(float(f.pdf(np.asarray(x))), 1e-300)
        return hx * (np.log(hx) - np.log(fx))

    return _integrate(integrand, lo, hi, points, quad_tol)


def hellinger(f: DensityHandle, g: DensityHandle, quad_tol: float = 1e-6) -> float:
    """sqrt(int (sqrt f - sqrt g)^2); symmetric, in [0, sqrt(2)]."""
    lo, hi, points = _merged_window(f, g)

    def integrand(x):
        fx = max(float(f.pdf(np.asarray(x))), 0.0)
        gx = max(float(g.pdf(np.asarray(x))), 0.0)
        return (np.sqrt(fx) - np.sqrt(gx)) ** 2

    return float(np.sqrt(max(_integrate(integrand, lo, hi, points, quad_tol), 0.0)))


def l2_distance(f: DensityHandle, g: DensityHandle, quad_tol: float = 1e-6) -> float:
    """sqrt(int (f - g)^2); symmetric and nonnegative."""
    lo, hi, points = _merged_window(f, g)

    def integrand(x):
        return (float(f.pdf(np.asarray(x))) - float(g.pdf(np.asarray(x)))) ** 2

    return float(np.sqrt(max(_integrate(integrand, lo, hi, points, quad_tol), 0.0)))
