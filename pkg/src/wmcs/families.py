"""Parametric density families.

Every family exposes the same surface: a vectorized ``log_pdf``, exact
``cdf``/``ppf``, an exact sampler driven by a ``numpy.random.Generator``,
a moment-based starting point for likelihood fitting, and (for the
positive-support families) a closed-form mean used as the length-biased
normalizer. Parameters follow the shape/scale conventions stated in each
class docstring; scale and shape parameters must be strictly positive.
"""

from __future__ import annotations

from typing import ClassVar, Sequence

import numpy as np
from scipy import special

from .errors import NotAvailableError, ParameterDomainError

_LOG_2PI = float(np.log(2.0 * np.pi))
_EULER_GAMMA = float(np.euler_gamma)


def _as_array(x) -> np.ndarray:
    return np.asarray(x, dtype=float)


class ParamFamily:
    """Base class for a named parametric family with a fixed parameter vector."""

    name: ClassVar[str] = ""
    param_names: ClassVar[tuple[str, ...]] = ()
    # True where the parameter's domain is (0, inf); such parameters are
    # optimized on the log scale during fitting.
    positive: ClassVar[tuple[bool, ...]] = ()
    support: ClassVar[tuple[float, float]] = (-np.inf, np.inf)

    def __init__(self, *theta: float):
        if len(theta) != len(self.param_names):
            raise ParameterDomainError(
                f"{self.name} expects {len(self.param_names)} parameters "
                f"{self.param_names}, got {len(theta)}"
            )
        vec = np.asarray(theta, dtype=float)
        if not np.all(np.isfinite(vec)):
            raise ParameterDomainError(f"{self.name} parameters must be finite: {vec}")
        for value, pos, pname in zip(vec, self.positive, self.param_names):
            if pos and value <= 0.0:
                raise ParameterDomainError(
                    f"{self.name} parameter {pname!r} must be > 0, got {value}"
                )
        self._theta = vec
        self._theta.setflags(write=False)
        self._validate()

    def _validate(self) -> None:
        """Hook for family-specific parameter constraints."""

    @property
    def params(self) -> np.ndarray:
        return self._theta

    @property
    def param_dim(self) -> int:
        return len(self.param_names)

    @classmethod
    def from_params(cls, theta: Sequence[float]) -> "ParamFamily":
        return cls(*np.asarray(theta, dtype=float))

    @classmethod
    def default(cls) -> "ParamFamily":
        """A valid placeholder instance; fitting replaces the parameters."""
        return cls(*cls._default_params)

    _default_params: ClassVar[tuple[float, ...]] = ()

    def in_support(self, x) -> np.ndarray:
        x = _as_array(x)
        lo, hi = self.support
        return (x > lo) & (x < hi)

    def log_pdf(self, x) -> np.ndarray:
        """Log density, elementwise; -inf off the (open) support."""
        x = _as_array(x)
        ok = self.in_support(x)
        out = np.full(x.shape, -np.inf)
        if np.any(ok):
            out[ok] = self._log_pdf_in(x[ok])
        return out

    def pdf(self, x) -> np.ndarray:
        return np.exp(self.log_pdf(x))

    def _log_pdf_in(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def cdf(self, x) -> np.ndarray:
        raise NotImplementedError

    def ppf(self, q) -> np.ndarray:
        raise NotImplementedError

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        if n < 1:
            raise ValueError("sample size must be >= 1")
        return self._sample(int(n), rng)

    def _sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        raise NotImplementedError

    def mean_value(self) -> float:
        """Closed-form E(X); only the positive-support families provide it."""
        raise NotAvailableError(f"no closed-form mean registered for {self.name}")

    @classmethod
    def moment_init(cls, x: np.ndarray) -> np.ndarray:
        """Cheap moment/quantile-based starting parameters for fitting."""
        raise NotImplementedError

    def __repr__(self) -> str:
        inner = ", ".join(f"{k}={v:.6g}" for k, v in zip(self.param_names, self._theta))
        return f"{type(self).__name__}({inner})"


class Normal(ParamFamily):
    """Normal with parameters (mu, sigma2)."""

    name = "normal"
    param_names = ("mu", "sigma2")
    positive = (False, True)
    support = (-np.inf, np.inf)
    _default_params = (0.0, 1.0)

    def _log_pdf_in(self, x):
        mu, s2 = self._theta
        return -0.5 * (_LOG_2PI + np.log(s2)) - (x - mu) ** 2 / (2.0 * s2)

    def cdf(self, x):
        mu, s2 = self._theta
        return special.ndtr((_as_array(x) - mu) / np.sqrt(s2))

    def ppf(self, q):
        mu, s2 = self._theta
        return mu + np.sqrt(s2) * special.ndtri(_as_array(q))

    def _sample(self, n, rng):
        mu, s2 = self._theta
        return rng.normal(mu, np.sqrt(s2), n)

    @classmethod
    def moment_init(cls, x):
        return np.array([np.median(x), max(np.var(x), 1e-12)])


class Cauchy(ParamFamily):
    """Cauchy with parameters (loc, scale)."""

    name = "cauchy"
    param_names = ("loc", "scale")
    positive = (False, True)
    support = (-np.inf, np.inf)
    _default_params = (0.0, 1.0)

    def _log_pdf_in(self, x):
        loc, sc = self._theta
        z = (x - loc) / sc
        return -np.log(np.pi * sc) - np.log1p(z * z)

    def cdf(self, x):
        loc, sc = self._theta
        return 0.5 + np.arctan((_as_array(x) - loc) / sc) / np.pi

    def ppf(self, q):
        loc, sc = self._theta
        return loc + sc * np.tan(np.pi * (_as_array(q) - 0.5))

    def _sample(self, n, rng):
        loc, sc = self._theta
        return loc + sc * rng.standard_cauchy(n)

    @classmethod
    def moment_init(cls, x):
        med = np.median(x)
        # the MAD equals the scale parameter for a Cauchy
        mad = np.median(np.abs(x - med))
        return np.array([med, max(mad, 1e-12)])


class Logistic(ParamFamily):
    """Logistic with parameters (loc, scale)."""

    name = "logistic"
    param_names = ("loc", "scale")
    positive = (False, True)
    support = (-np.inf, np.inf)
    _default_params = (0.0, 1.0)

    def _log_pdf_in(self, x):
        loc, sc = self._theta
        z = (x - loc) / sc
        # -z - 2*log(1+exp(-z)) evaluated stably on both tails
        return -np.abs(z) - 2.0 * np.log1p(np.exp(-np.abs(z))) - np.log(sc)

    def cdf(self, x):
        loc, sc = self._theta
        return special.expit((_as_array(x) - loc) / sc)

    def ppf(self, q):
        loc, sc = self._theta
        return loc + sc * special.logit(_as_array(q))

    def _sample(self, n, rng):
        loc, sc = self._theta
        return rng.logistic(loc, sc, n)

    @classmethod
    def moment_init(cls, x):
        # sd of a logistic is pi/sqrt(3) times the scale
        return np.array([np.median(x), max(np.std(x) * np.sqrt(3.0) / np.pi, 1e-12)])


class Laplace(ParamFamily):
    """Laplace with parameters (loc, scale); density (1/(2b)) exp(-|x-loc|/b)."""

    name = "laplace"
    param_names = ("loc", "scale")
    positive = (False, True)
    support = (-np.inf, np.inf)
    _default_params = (0.0, 1.0)

    def _log_pdf_in(self, x):
        loc, b = self._theta
        return -np.log(2.0 * b) - np.abs(x - loc) / b

    def cdf(self, x):
        loc, b = self._theta
        z = (_as_array(x) - loc) / b
        return np.where(z < 0, 0.5 * np.exp(z), 1.0 - 0.5 * np.exp(-z))

    def ppf(self, q):
        loc, b = self._theta
        q = _as_array(q)
        return np.where(q < 0.5, loc + b * np.log(2.0 * q), loc - b * np.log(2.0 * (1.0 - q)))

    def _sample(self, n, rng):
        loc, b = self._theta
        return rng.laplace(loc, b, n)

    @classmethod
    def moment_init(cls, x):
        med = np.median(x)
        return np.array([med, max(np.mean(np.abs(x - med)), 1e-12)])


class Gamma(ParamFamily):
    """Gamma with parameters (shape, scale); density x^(a-1) e^(-x/s) / (s^a Gamma(a))."""

    name = "gamma"
    param_names = ("shape", "scale")
    positive = (True, True)
    support = (0.0, np.inf)
    _default_params = (1.0, 1.0)

    def _log_pdf_in(self, x):
        a, s = self._theta
        return (a - 1.0) * np.log(x) - x / s - a * np.log(s) - special.gammaln(a)

    def cdf(self, x):
        a, s = self._theta
        x = _as_array(x)
        return np.where(x <= 0.0, 0.0, special.gammainc(a, np.maximum(x, 0.0) / s))

    def ppf(self, q):
        a, s = self._theta
        return s * special.gammaincinv(a, _as_array(q))

    def _sample(self, n, rng):
        a, s = self._theta
        return rng.gamma(a, s, n)

    def mean_value(self):
        a, s = self._theta
        return a * s

    @classmethod
    def moment_init(cls, x):
        m, v = np.mean(x), max(np.var(x), 1e-12)
        return np.array([max(m * m / v, 1e-6), max(v / m, 1e-12)])


class Weibull(ParamFamily):
    """Weibull with parameters (shape, scale); density (k/s)(x/s)^(k-1) e^(-(x/s)^k)."""

    name = "weibull"
    param_names = ("shape", "scale")
    positive = (True, True)
    support = (0.0, np.inf)
    _default_params = (1.0, 1.0)

    def _log_pdf_in(self, x):
        k, s = self._theta
        z = x / s
        return np.log(k / s) + (k - 1.0) * np.log(z) - z**k

    def cdf(self, x):
        k, s = self._theta
        x = _as_array(x)
        return np.where(x <= 0.0, 0.0, -np.expm1(-((np.maximum(x, 0.0) / s) ** k)))

    def ppf(self, q):
        k, s = self._theta
        return s * (-np.log1p(-_as_array(q))) ** (1.0 / k)

    def _sample(self, n, rng):
        k, s = self._theta
        return s * rng.weibull(k, n)

    def mean_value(self):
        k, s = self._theta
        return s * special.gamma(1.0 + 1.0 / k)

    @classmethod
    def moment_init(cls, x):
        # log X is a scaled Gumbel: Var(log X) = pi^2 / (6 k^2)
        lx = np.log(x)
        sd = max(np.std(lx), 1e-6)
        k0 = np.pi / (np.sqrt(6.0) * sd)
        s0 = np.exp(np.mean(lx) + _EULER_GAMMA / k0)
        return np.array([k0, s0])


class Lognormal(ParamFamily):
    """Lognormal with parameters (mu, sigma2) of log X."""

    name = "lognormal"
    param_names = ("mu", "sigma2")
    positive = (False, True)
    support = (0.0, np.inf)
    _default_params = (0.0, 1.0)

    def _log_pdf_in(self, x):
        mu, s2 = self._theta
        lx = np.log(x)
        return -0.5 * (_LOG_2PI + np.log(s2)) - lx - (lx - mu) ** 2 / (2.0 * s2)

    def cdf(self, x):
        mu, s2 = self._theta
        x = _as_array(x)
        out = np.zeros(x.shape)
        pos = x > 0.0
        out[pos] = special.ndtr((np.log(x[pos]) - mu) / np.sqrt(s2))
        return out

    def ppf(self, q):
        mu, s2 = self._theta
        return np.exp(mu + np.sqrt(s2) * special.ndtri(_as_array(q)))

    def _sample(self, n, rng):
        mu, s2 = self._theta
        return rng.lognormal(mu, np.sqrt(s2), n)

    def mean_value(self):
        mu, s2 = self._theta
        return float(np.exp(mu + 0.5 * s2))

    @classmethod
    def moment_init(cls, x):
        lx = np.log(x)
        return np.array([np.mean(lx), max(np.var(lx), 1e-12)])


class LaplaceLogisticMixture(ParamFamily):
    """Two-mode mixture: weight * Laplace + (1 - weight) * Logistic.

    Parameters (weight, laplace_loc, laplace_scale, logistic_loc,
    logistic_scale) with weight in (0, 1). Used as a bimodal ground
    truth for simulations; it is never fitted.
    """

    name = "laplace_logistic_mixture"
    param_names = ("weight", "laplace_loc", "laplace_scale", "logistic_loc", "logistic_scale")
    positive = (False, False, True, False, True)
    support = (-np.inf, np.inf)
    _default_params = (0.5, 0.0, 1.0, 0.0, 1.0)

    def _validate(self):
        w = self._theta[0]
        if not 0.0 < w < 1.0:
            raise ParameterDomainError(f"mixture weight must lie in (0, 1), got {w}")

    def _components(self) -> tuple[float, Laplace, Logistic]:
        w, l_loc, l_sc, g_loc, g_sc = self._theta
        return float(w), Laplace(l_loc, l_sc), Logistic(g_loc, g_sc)

    def _log_pdf_in(self, x):
        w, lap, logis = self._components()
        return np.logaddexp(np.log(w) + lap.log_pdf(x), np.log1p(-w) + logis.log_pdf(x))

    def cdf(self, x):
        w, lap, logis = self._components()
        return w * lap.cdf(x) + (1.0 - w) * logis.cdf(x)

    def ppf(self, q):
        w, lap, logis = self._components()
        q = np.atleast_1d(_as_array(q))
        lo = np.minimum(lap.ppf(q.min()), logis.ppf(q.min())) - 1.0
        hi = np.maximum(lap.ppf(q.max()), logis.ppf(q.max())) + 1.0
        out = np.array([self._invert_cdf(float(p), float(lo), float(hi)) for p in q])
        return out if out.size > 1 else out[0]

    def _invert_cdf(self, p, lo, hi):
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if self.cdf(mid) < p:
                lo = mid
            else:
                hi = mid
            if hi - lo < 1e-12 * max(1.0, abs(mid)):
                break
        return 0.5 * (lo + hi)

    def _sample(self, n, rng):
        w, lap, logis = self._components()
        pick = rng.random(n) < w
        out = np.empty(n)
        # draw both streams unconditionally so the draw count is fixed
        a = lap.sample(n, rng)
        b = logis.sample(n, rng)
        out[pick] = a[pick]
        out[~pick] = b[~pick]
        return out

    @classmethod
    def moment_init(cls, x):
        raise NotAvailableError("the two-component mixture is a simulation truth, not a fit target")


FAMILY_REGISTRY: dict[str, type[ParamFamily]] = {
    cls.name: cls
    for cls in (Normal, Cauchy, Logistic, Laplace, Gamma, Weibull, Lognormal, LaplaceLogisticMixture)
}


def family_from_spec(spec: dict) -> ParamFamily:
    """Build a family instance from a config mapping.

    Expected shape: ``{"family": "lognormal", "params": {"mu": 2, "sigma2": 0.5}}``.
    ``params`` may be omitted, in which case the family's default placeholder
    parameters are used (fitting overwrites them).
    """
    try:
        name = spec["family"]
    except (TypeError, KeyError):
        raise ValueError(f"model spec must be a mapping with a 'family' key: {spec!r}") from None
    try:
        cls = FAMILY_REGISTRY[str(name).lower()]
    except KeyError:
        known = ", ".join(sorted(FAMILY_REGISTRY))
        raise ValueError(f"unknown family {name!r}; known families: {known}") from None
    params = spec.get("params")
    if params is None:
        return cls.default()
    if not isinstance(params, dict):
        raise ValueError(f"'params' must be a mapping of parameter names, got {params!r}")
    unknown = set(params) - set(cls.param_names)
    if unknown:
        raise ValueError(f"unknown parameters {sorted(unknown)} for family {cls.name!r}")
    missing = set(cls.param_names) - set(params)
    if missing:
        raise ValueError(f"missing parameters {sorted(missing)} for family {cls.name!r}")
    return cls(*(float(params[k]) for k in cls.param_names))
