"""Mixture model confidence sets over a two-part partition of the support.

The procedure: split the support at a point, build one local confidence
set per part at level 1 - beta (beta within the budget keeping the joint
level at 1 - alpha), then combine every cross pair of local members
convexly. Each component is the fitted family renormalized to integrate
to one on its own part, so the combination is a proper density for every
mixing weight; the weight itself maximizes the sample mean log mixture
density and is clamped to [0, 1].
"""

from __future__ import annotations

import warnings as _warnings
from dataclasses import dataclass

import numpy as np

from .confidence_set import ConfidenceSet, build_local_mcs
from .errors import DegenerateMixtureError
from .estimation import Dataset, FittedModel, OptimizerOptions
from .families import ParamFamily
from .weights import Region

_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


def beta_budget(alpha: float, m: int) -> float:
    """Largest admissible per-partition level: 1 - (1 - alpha)^(1/m)."""
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    if m < 1:
        raise ValueError(f"partition count must be >= 1, got {m}")
    return float(1.0 - (1.0 - alpha) ** (1.0 / m))


@dataclass(frozen=True)
class RegionDensity:
    """A fitted family renormalized to integrate to one on a region."""

    family: ParamFamily
    region: Region
    log_mass: float

    @classmethod
    def build(cls, family: ParamFamily, region: Region) -> "RegionDensity":
        hi = family.cdf(region.upper) if np.isfinite(region.upper) else 1.0
        lo = family.cdf(region.lower) if np.isfinite(region.lower) else 0.0
        mass = float(hi - lo)
        if mass <= 0.0:
            raise DegenerateMixtureError(
                f"{family.name} puts no mass on region {region}"
            )
        return cls(family=family, region=region, log_mass=float(np.log(mass)))

    def log_pdf(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        out = np.full(x.shape, -np.inf)
        inside = self.region.contains(x)
        if np.any(inside):
            out[inside] = self.family.log_pdf(x[inside]) - self.log_mass
        return out

    def pdf(self, x) -> np.ndarray:
        return np.exp(self.log_pdf(x))


def psi_hat(alpha_mix: float, f_vals, g_vals) -> float:
    """Sample mean log mixture density at mixing weight ``alpha_mix``.

    ``f_vals`` and ``g_vals`` are per-observation density values (not
    logs). Returns -inf when some observation has zero mixture density.
    """
    if not 0.0 <= alpha_mix <= 1.0:
        raise ValueError(f"mixing weight must lie in [0, 1], got {alpha_mix}")
    f_vals = np.asarray(f_vals, dtype=float)
    g_vals = np.asarray(g_vals, dtype=float)
    if f_vals.shape != g_vals.shape:
        raise ValueError(f"density vectors differ in shape: {f_vals.shape} vs {g_vals.shape}")
    mix = alpha_mix * f_vals + (1.0 - alpha_mix) * g_vals
    if np.any(mix <= 0.0):
        return float("-inf")
    return float(np.mean(np.log(mix)))


def optimal_alpha(f_vals, g_vals, grid_size: int = 200, tol: float = 1e-6) -> float:
    """Mixing weight in [0, 1] maximizing the sample mean log mixture density.

    A coarse grid locates the maximum; golden-section search refines the
    bracketing interval. A flat objective (identical components) returns
    0.5; a maximum on the boundary returns exactly 0.0 or 1.0.
    """
    f_vals = np.asarray(f_vals, dtype=float)
    g_vals = np.asarray(g_vals, dtype=float)
    grid = np.linspace(0.0, 1.0, grid_size)
    values = np.array([psi_hat(a, f_vals, g_vals) for a in grid])
    finite = np.isfinite(values)
    if not np.any(finite):
        raise DegenerateMixtureError(
            "every mixing weight yields zero density at some observation"
        )
    if np.ptp(values[finite]) <= 1e-12 and np.all(finite):
        return 0.5
    k = int(np.argmax(np.where(finite, values, -np.inf)))
    if k == 0 or k == grid_size - 1:
        # concave objective maximized at a grid endpoint: the true argmax
        # is the boundary itself
        return float(grid[k])
    lo, hi = grid[k - 1], grid[k + 1]
    c = hi - _GOLDEN * (hi - lo)
    d = lo + _GOLDEN * (hi - lo)
    fc, fd = psi_hat(c, f_vals, g_vals), psi_hat(d, f_vals, g_vals)
    while hi - lo > tol:
        if fc > fd:
            hi, d, fd = d, c, fc
            c = hi - _GOLDEN * (hi - lo)
            fc = psi_hat(c, f_vals, g_vals)
        else:
            lo, c, fc = c, d, fd
            d = lo + _GOLDEN * (hi - lo)
            fd = psi_hat(d, f_vals, g_vals)
    return float(min(1.0, max(0.0, 0.5 * (lo + hi))))


@dataclass(frozen=True)
class MixtureCandidate:
    """A convex combination of one member from each local confidence set.

    ``hellinger_sq`` is the squared Hellinger distance (with the
    conventional 1/2 factor, so it ranges in [0, 1]) and ``l2_sq`` the
    integrated squared difference, both against a reference density when
    one is supplied. The fitted components may be None when a candidate
    is rebuilt from serialized parameters.
    """

    f_component: FittedModel | None
    g_component: FittedModel | None
    f_density: RegionDensity
    g_density: RegionDensity
    alpha_opt: float
    psi_at_opt: float
    hellinger_sq: float | None = None
    l2_sq: float | None = None

    @property
    def label(self) -> str:
        return (
            f"{self.alpha_opt:.3f}*{self.f_density.family.name}"
            f" + {1.0 - self.alpha_opt:.3f}*{self.g_density.family.name}"
        )

    def pdf(self, x) -> np.ndarray:
        return self.alpha_opt * self.f_density.pdf(x) + (
            1.0 - self.alpha_opt
        ) * self.g_density.pdf(x)

    def log_pdf(self, x) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return np.log(self.pdf(x))


@dataclass(frozen=True)
class MixtureSet:
    """All cross pairs of the two local sets with their mixing weights."""

    alpha: float
    beta: float
    split: float
    left: ConfidenceSet
    right: ConfidenceSet
    candidates: tuple[MixtureCandidate, ...]

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "beta": self.beta,
            "partition": self.split,
            "local_sets": {
                "left": self.left.to_dict(),
                "right": self.right.to_dict(),
            },
            "candidates": [candidate_to_dict(c) for c in self.candidates],
        }

    def table_rows(self) -> list[dict]:
        return candidate_table_rows(self.candidates)


def candidate_to_dict(c: MixtureCandidate) -> dict:
    return {
        "f": {
            "family": c.f_density.family.name,
            "params": dict(
                zip(c.f_density.family.param_names, c.f_density.family.params.tolist())
            ),
        },
        "g": {
            "family": c.g_density.family.name,
            "params": dict(
                zip(c.g_density.family.param_names, c.g_density.family.params.tolist())
            ),
        },
        "alpha_opt": c.alpha_opt,
        "psi_at_opt": c.psi_at_opt,
        "hellinger_sq": c.hellinger_sq,
        "l2_sq": c.l2_sq,
    }


def candidate_table_rows(candidates) -> list[dict]:
    rows = []
    for c in candidates:
        rows.append(
            {
                "combining_models": f"{c.f_density.family.name}"
                f" + {c.g_density.family.name}",
                "alpha_opt": c.alpha_opt,
                "hellinger_sq": c.hellinger_sq,
                "l2_sq": c.l2_sq,
            }
        )
    return rows


def build_mixture_set(
    left_candidates,
    right_candidates,
    data: Dataset,
    split: float,
    alpha: float,
    beta: float | None = None,
    reference=None,
    options: OptimizerOptions | None = None,
    quad_tol: float = 1e-6,
) -> MixtureSet:
    """Three-step mixture confidence set over the partition at ``split``.

    Builds the two local sets at level ``beta`` (default: the full budget
    for two partitions), then for every cross pair of members computes the
    optimal mixing weight on the full sample. When ``reference`` (a
    DensityHandle) is given, squared Hellinger and L2 diagnostics against
    it are attached to each candidate.
    """
    budget = beta_budget(alpha, 2)
    if beta is None:
        beta = budget
    elif beta > budget + 1e-12:
        raise ValueError(f"beta={beta} exceeds the budget {budget:.6f} for joint level {alpha}")
    elif beta <= 0.0:
        raise ValueError(f"beta must be positive, got {beta}")
    elif abs(beta - budget) <= 1e-12:
        _warnings.warn(
            f"beta={beta} sits exactly on the budget boundary {budget:.6f}",
            stacklevel=2,
        )

    region_left = Region(-np.inf, float(split))
    region_right = Region(float(split), np.inf)
    left = build_local_mcs(left_candidates, data, region_left, beta, options)
    right = build_local_mcs(right_candidates, data, region_right, beta, options)
    candidates = cross_candidates(
        left, right, data, left.members, right.members, reference, quad_tol
    )
    return MixtureSet(
        alpha=alpha,
        beta=float(beta),
        split=float(split),
        left=left,
        right=right,
        candidates=candidates,
    )


def cross_candidates(
    left: ConfidenceSet,
    right: ConfidenceSet,
    data: Dataset,
    left_members,
    right_members,
    reference=None,
    quad_tol: float = 1e-6,
) -> tuple[MixtureCandidate, ...]:
    """Mixture candidates for given member pairs of two local sets.

    The member lists may differ from the sets' own accepted members
    (e.g. membership decided on replication means); any index without a
    successful fit is skipped.
    """
    candidates = []
    x = data.values
    for fi in left_members:
        f_fit = left.fits[fi]
        if f_fit is None:
            continue
        f_density = RegionDensity.build(f_fit.wf.base, left.region)
        f_vals = f_density.pdf(x)
        for gj in right_members:
            g_fit = right.fits[gj]
            if g_fit is None:
                continue
            g_density = RegionDensity.build(g_fit.wf.base, right.region)
            g_vals = g_density.pdf(x)
            a_opt = optimal_alpha(f_vals, g_vals)
            psi = psi_hat(a_opt, f_vals, g_vals)
            hell_sq = l2_sq = None
            if reference is not None:
                from .metrics import DensityHandle, hellinger, l2_distance

                cand = MixtureCandidate(
                    f_component=f_fit,
                    g_component=g_fit,
                    f_density=f_density,
                    g_density=g_density,
                    alpha_opt=a_opt,
                    psi_at_opt=psi,
                )
                handle = DensityHandle.from_mixture(cand)
                hell_sq = 0.5 * hellinger(handle, reference, quad_tol) ** 2
                l2_sq = l2_distance(handle, reference, quad_tol) ** 2
            candidates.append(
                MixtureCandidate(
                    f_component=f_fit,
                    g_component=g_fit,
                    f_density=f_density,
                    g_density=g_density,
                    alpha_opt=a_opt,
                    psi_at_opt=psi,
                    hellinger_sq=hell_sq,
                    l2_sq=l2_sq,
                )
            )
    return tuple(candidates)
