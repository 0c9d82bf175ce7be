"""Shared test utilities."""

import numpy as np

from wmcs import FittedModel, WeightedFamily, identity
from wmcs.weights import INDICATOR


def fixed_model(base_family, data, weight=None, region_mass=None):
    """A FittedModel for a fixed (not fitted) family.

    Mirrors fit_qmle's per-observation conventions: indicator weights give
    off-region points a 0.0 contribution and fold -log(region mass) into
    the in-region entries.
    """
    wf = WeightedFamily(base_family, weight or identity())
    x = data.values
    if wf.weight.kind == INDICATOR:
        inside = wf.weight.region.contains(x)
        mass = region_mass if region_mass is not None else data.region_mass(wf.weight.region)
        per = np.zeros(x.size)
        per[inside] = wf.base.log_pdf(x[inside]) - np.log(mass)
    else:
        per = wf.log_pdf(x)
    total = float(per.sum())
    return FittedModel(
        wf=wf,
        theta_hat=np.array(wf.base.params, dtype=float),
        loglik_total=total,
        loglik_per_obs=per,
        mean_loglik=total / data.n,
        converged=True,
        n_restarts_used=0,
    )


def acklam_ndtri(p: float) -> float:
    """High-precision inverse standard-normal CDF, independent of scipy.

    Acklam's rational approximation refined with one Halley step using
    math.erfc; relative error is near machine precision.
    """
    import math

    if not 0.0 < p < 1.0:
        raise ValueError("p must lie in (0, 1)")
    a = (-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
         1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00)
    b = (-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
         6.680131188771972e+01, -1.328068155288572e+01)
    c = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
         -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00)
    d = (7.784695709041462e-03, 3.224671290700398e-01,
         2.445134137142996e+00, 3.754408661907416e+00)
    p_low = 0.02425
    if p < p_low:
        q = math.sqrt(-2.0 * math.log(p))
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) / \
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0)
    elif p <= 1.0 - p_low:
        q = p - 0.5
        r = q * q
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q / \
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0)
    else:
        q = math.sqrt(-2.0 * math.log(1.0 - p))
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) / \
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0)
    # one Halley refinement
    e = 0.5 * math.erfc(-x / math.sqrt(2.0)) - p
    u = e * math.sqrt(2.0 * math.pi) * math.exp(x * x / 2.0)
    return x - u / (1.0 + x * u / 2.0)
