"""Adaptive shrinking-grid eigenvalue search.

The search walks L = ceil(log2(1/eps)) levels. Level ``l`` lays a square
grid of spacing ``delta(l) = 1/(kappa (3*2^l)^m)`` over the current disk,
scans it in row-major order (real offset outer, imaginary inner) and accepts
the first point whose sigma0 estimate is at most ``delta(l)``; the disk then
recenters on that point with radius ``min(3 (kappa sigma)^(1/m), R)``. With
an exact oracle and valid ``(kappa, m)`` the accepted point at level ``l``
is within ``2^-l`` of an eigenvalue, so the final point is an
``eps``-estimate.

Grid points within a level may be evaluated in parallel or in batches: the
accepted point is always the lexicographically first passing index, so the
result does not depend on evaluation order. In noisy mode the per-call
failure probability is ``p_fail`` divided by the planned total number of
queries, the per-level oracle precision defaults to ``delta(l)/4``, and the
radius update uses ``sigma + precision``; the final answer is then within
``(5/4)^(1/m) * eps <= 1.25 eps`` of an eigenvalue on non-failing runs.

If some level produces no acceptance the search stops: with an exact oracle
that means the supplied ``(kappa, m)`` underestimate the true structure
(``BoundViolationError``); with a noisy oracle it is reported as a
probabilistic failure. No recovery is attempted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import BoundViolationError, InputError, ProbabilisticFailureError
from .linalg import operator_norm, require_matrix
from .oracle import (GroundVectorResult, SigmaOracleConfig,
                     _sigma_min_parts_exact, ground_vector, sigma0_batch)

__all__ = [
    "grid_spacing", "level_count", "Region", "SolverParams", "LevelRecord",
    "SolverTrace", "RegionScanResult", "EigenvectorResult",
    "estimate_eigenvalue", "estimate_real_eigenvalue",
    "has_eigenvalue_in_region", "eigenvector_for",
]

_NORM_TOL = 1e-12


def grid_spacing(level: int, kappa: float, m: int) -> float:
    """Grid spacing ``1 / (kappa * (3 * 2^level)^m)``."""
    if level < 1 or kappa < 1.0 or m < 1:
        raise InputError("grid_spacing requires level >= 1, kappa >= 1, m >= 1")
    base = 3.0 * (2.0 ** level)
    try:
        denom = kappa * base ** m
    except OverflowError:
        raise InputError(f"grid spacing underflows for level={level}, m={m}") from None
    if not math.isfinite(denom) or denom <= 0:
        raise InputError(f"grid spacing underflows for level={level}, m={m}")
    return 1.0 / denom


def level_count(epsilon: float) -> int:
    """Number of refinement levels, ``ceil(log2(1/epsilon))``.

    Base 2 because the search radius halves per level. Exact powers of two
    are snapped so 2**-8 gives 8 levels, not 9.
    """
    if not (0.0 < epsilon < 1.0):
        raise InputError("epsilon must lie in (0, 1)")
    x = -math.log2(epsilon)
    r = round(x)
    if abs(x - r) < 1e-9:
        return max(1, int(r))
    return max(1, math.ceil(x))


@dataclass(frozen=True)
class Region:
    """Search-region constraint for the 2-D scan.

    ``disk`` is the closed unit disk, ``right-half`` its Re(z) >= 0 part,
    ``real`` requests the 1-D real-axis scan, and ``rectangle`` uses the
    closed box ``rect = (re_lo, re_hi, im_lo, im_hi)``. Membership tests
    carry a slack of half a grid spacing so eigenvalues sitting exactly on
    the boundary remain detectable (inclusive-boundary convention).
    """

    kind: str = "disk"
    rect: tuple | None = None

    def __post_init__(self):
        if self.kind not in ("disk", "right-half", "real", "rectangle"):
            raise InputError(f"unknown region kind {self.kind!r}")
        if self.kind == "rectangle":
            if self.rect is None or len(self.rect) != 4:
                raise InputError("rectangle region needs rect=(re_lo, re_hi, im_lo, im_hi)")

    @classmethod
    def disk(cls) -> "Region":
        return cls("disk")

    @classmethod
    def right_half(cls) -> "Region":
        return cls("right-half")

    @classmethod
    def real_axis(cls) -> "Region":
        return cls("real")

    @classmethod
    def rectangle(cls, re_lo, re_hi, im_lo, im_hi) -> "Region":
        return cls("rectangle", (float(re_lo), float(re_hi), float(im_lo), float(im_hi)))

    def contains(self, pts: np.ndarray, slack: float = 0.0) -> np.ndarray:
        pts = np.asarray(pts, dtype=np.complex128)
        if self.kind == "disk":
            return np.abs(pts) <= 1.0 + slack
        if self.kind == "right-half":
            return (pts.real >= -slack) & (np.abs(pts) <= 1.0 + slack)
        if self.kind == "rectangle":
            a, b, c, d = self.rect
            return ((pts.real >= a - slack) & (pts.real <= b + slack)
                    & (pts.imag >= c - slack) & (pts.imag <= d + slack))
        return np.abs(pts.imag) <= slack


@dataclass(frozen=True)
class SolverParams:
    """Search configuration: target precision, conditioning bounds, failure
    budget, oracle and optional region constraint."""

    epsilon: float
    kappa: float = 1.0
    m: int = 1
    p_fail: float = 0.0
    oracle: SigmaOracleConfig = field(default_factory=SigmaOracleConfig)
    region: Region | None = None
    max_levels_override: int | None = None

    def __post_init__(self):
        if not (0.0 < self.epsilon < 1.0):
            raise InputError("epsilon must lie in (0, 1)")
        if self.kappa < 1.0:
            raise InputError("kappa must be >= 1")
        if self.m < 1:
            raise InputError("m must be >= 1")
        if not (0.0 <= self.p_fail < 1.0):
            raise InputError("p_fail must lie in [0, 1)")

    @property
    def levels(self) -> int:
        if self.max_levels_override is not None:
            return max(1, int(self.max_levels_override))
        return level_count(self.epsilon)


@dataclass
class LevelRecord:
    level: int
    center: complex
    radius: float
    delta: float
    half_width: int
    planned_points: int
    evaluated: int
    accepted: complex | None
    accepted_sigma: float | None

    def to_dict(self) -> dict:
        return {
            "level": self.level,
            "center": [self.center.real, self.center.imag],
            "radius": self.radius,
            "delta": self.delta,
            "half_width": self.half_width,
            "planned_points": self.planned_points,
            "evaluated": self.evaluated,
            "accepted": None if self.accepted is None
                        else [self.accepted.real, self.accepted.imag],
            "accepted_sigma": self.accepted_sigma,
        }


@dataclass
class SolverTrace:
    """Audit log of a search run."""

    dim: int
    levels: list = field(default_factory=list)
    total_oracle_calls: int = 0
    outcome: str = "incomplete"

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "levels": [rec.to_dict() for rec in self.levels],
            "total_oracle_calls": self.total_oracle_calls,
            "outcome": self.outcome,
        }

    def summary_dict(self) -> dict:
        return {
            "dim": self.dim,
            "levels_run": len(self.levels),
            "total_oracle_calls": self.total_oracle_calls,
            "outcome": self.outcome,
        }


@dataclass(frozen=True)
class RegionScanResult:
    found: bool
    eigenvalue: complex | None
    margin: float | None
    trace: SolverTrace


@dataclass(frozen=True)
class EigenvectorResult:
    vector: np.ndarray
    residual: float
    degenerate: bool


def _check_norm(a) -> np.ndarray:
    m = require_matrix(a)
    nrm = operator_norm(m)
    if nrm > 1.0 + _NORM_TOL:
        raise InputError(f"operator norm {nrm:.6g} exceeds 1; rescale the matrix "
                         "(CLI: --normalize)")
    return m


def _planned_calls(params: SolverParams, dim: int) -> int:
    total = 0
    for lvl in range(1, params.levels + 1):
        delta = grid_spacing(lvl, params.kappa, params.m)
        radius = 1.0 if lvl == 1 else min(1.0, 1.25 * 2.0 ** (1 - lvl))
        s = math.ceil(radius / delta)
        total += (2 * s + 1) ** dim
    return total


def _level_oracle(params: SolverParams, delta: float, theta: float) -> SigmaOracleConfig:
    cfg = params.oracle
    if cfg.mode == "exact":
        return cfg
    precision = cfg.precision if cfg.precision is not None else delta / 4.0
    return replace(cfg, precision=precision, fail_prob=theta)


def _run_grid_search(a: np.ndarray, params: SolverParams, dim: int,
                     region: Region | None, stop_if_level1_empty: bool):
    """Shared 2-D / 1-D level loop. Returns (estimate, trace) or a
    RegionScanResult when the level-1 scan certifies emptiness."""
    n = a.shape[0]
    trace = SolverTrace(dim=dim)
    if n == 1:
        # single entry is the eigenvalue; no grid needed
        trace.outcome = "found"
        return complex(a[0, 0]), trace

    noisy = params.oracle.mode == "noisy"
    theta = 0.0
    if noisy and params.p_fail > 0.0:
        theta = params.p_fail / _planned_calls(params, dim)
    elif noisy:
        theta = params.oracle.fail_prob

    center = 0.0 + 0.0j
    radius = 1.0
    for lvl in range(1, params.levels + 1):
        delta = grid_spacing(lvl, params.kappa, params.m)
        cfg = _level_oracle(params, delta, theta)
        s = math.ceil(radius / delta)
        width = 2 * s + 1
        offsets = np.arange(-s, s + 1, dtype=np.float64) * delta
        planned = width ** dim
        rec = LevelRecord(level=lvl, center=center, radius=radius, delta=delta,
                          half_width=s, planned_points=planned, evaluated=0,
                          accepted=None, accepted_sigma=None)
        accepted = None
        exact = cfg.mode == "exact"
        if dim == 1:
            re_line = center.real + offsets
            mask = None
            if region is not None:
                mask = region.contains(re_line + 1j * center.imag, slack=delta / 2.0)
            if exact and mask is None:
                vals = _sigma_min_parts_exact(a, re_line, center.imag)
                rec.evaluated += width
            else:
                mask = np.ones(width, dtype=bool) if mask is None else mask
                vals = np.full(width, np.inf)
                if mask.any():
                    keys = np.flatnonzero(mask)
                    vals[mask] = sigma0_batch(a, re_line[mask] + 1j * center.imag,
                                              cfg, key_base=(lvl,), key_indices=keys)
                    rec.evaluated += int(mask.sum())
            hits = np.flatnonzero(vals <= delta)
            if hits.size:
                k = int(hits[0])
                accepted = (complex(re_line[k], center.imag), float(vals[k]))
        else:
            im_line = center.imag + offsets
            for col, re_off in enumerate(offsets):
                re_s = center.real + re_off
                mask = None
                if region is not None:
                    mask = region.contains(re_s + 1j * im_line, slack=delta / 2.0)
                    if not mask.any():
                        continue
                if exact and mask is None:
                    vals = _sigma_min_parts_exact(a, re_s, im_line)
                    rec.evaluated += width
                elif exact:
                    vals = np.full(width, np.inf)
                    vals[mask] = _sigma_min_parts_exact(a, re_s, im_line[mask])
                    rec.evaluated += int(mask.sum())
                else:
                    mask = np.ones(width, dtype=bool) if mask is None else mask
                    vals = np.full(width, np.inf)
                    keys = np.flatnonzero(mask) + col * width
                    vals[mask] = sigma0_batch(a, re_s + 1j * im_line[mask], cfg,
                                              key_base=(lvl,), key_indices=keys)
                    rec.evaluated += int(mask.sum())
                hits = np.flatnonzero(vals <= delta)
                if hits.size:
                    k = int(hits[0])
                    accepted = (complex(re_s, im_line[k]), float(vals[k]))
                    break
        trace.total_oracle_calls += rec.evaluated
        trace.levels.append(rec)

        if accepted is None:
            if lvl == 1 and stop_if_level1_empty:
                trace.outcome = "no-eigenvalue-in-region"
                return RegionScanResult(found=False, eigenvalue=None,
                                        margin=delta, trace=trace)
            if noisy:
                trace.outcome = "probabilistic-failure"
                raise ProbabilisticFailureError(
                    f"no acceptance at level {lvl} under the noisy oracle",
                    level=lvl, trace=trace)
            trace.outcome = "bound-violation"
            raise BoundViolationError(
                f"no grid point accepted at level {lvl}; the supplied "
                f"kappa={params.kappa}, m={params.m} likely underestimate "
                "the true structure", level=lvl, trace=trace)

        mu_acc, sig_acc = accepted
        rec.accepted = mu_acc
        rec.accepted_sigma = sig_acc
        center = mu_acc
        sig_eff = sig_acc + (cfg.precision if noisy else 0.0)
        radius = min(3.0 * (params.kappa * sig_eff) ** (1.0 / params.m), radius)

    trace.outcome = "found"
    return center, trace


def estimate_eigenvalue(a, params: SolverParams):
    """Estimate one eigenvalue of ``A`` (||A|| <= 1) to within
    ``params.epsilon``; returns ``(estimate, trace)``."""
    m = _check_norm(a)
    if params.region is not None and params.region.kind == "real":
        return estimate_real_eigenvalue(m, params)
    out = _run_grid_search(m, params, dim=2, region=params.region,
                           stop_if_level1_empty=False)
    return out


def estimate_real_eigenvalue(a, params: SolverParams):
    """1-D variant of :func:`estimate_eigenvalue` for matrices whose
    eigenvalues are all real (caller-asserted contract; not verified)."""
    m = _check_norm(a)
    out = _run_grid_search(m, params, dim=1, region=None,
                           stop_if_level1_empty=False)
    return out


def has_eigenvalue_in_region(a, params: SolverParams) -> RegionScanResult:
    """Existence scan: run the search restricted to ``params.region``.

    Returns ``found`` with an epsilon-estimate, or ``none`` when no level-1
    in-region point passed the sigma0 <= delta(1) test, which certifies that
    no eigenvalue lies further than delta(1) inside the region (the returned
    margin). Exact oracle only: the soundness of "none" is not probabilistic.
    """
    m = _check_norm(a)
    if params.oracle.mode != "exact":
        raise InputError("has_eigenvalue_in_region requires the exact oracle")
    region = params.region
    if region is None:
        raise InputError("has_eigenvalue_in_region requires params.region")
    dim = 1 if region.kind == "real" else 2
    out = _run_grid_search(m, params, dim=dim,
                           region=None if dim == 1 else region,
                           stop_if_level1_empty=True)
    if isinstance(out, RegionScanResult):
        return out
    estimate, trace = out
    return RegionScanResult(found=True, eigenvalue=estimate, margin=None,
                            trace=trace)


def eigenvector_for(a, lam: complex, gap_bound: float,
                    eps0: float | None = None) -> EigenvectorResult:
    """Eigenvector extraction from an eigenvalue estimate.

    ``lam`` is an estimate of an eigenvalue, ``gap_bound`` a lower bound on
    the distance to the rest of the spectrum. When the estimation error
    ``eps0`` is known it must satisfy ``eps0 < gap_bound/2`` for the
    smallest singular direction to be the right eigenvector; the residual
    ``||(A - lam I) v||`` is returned for an a-posteriori check.
    """
    m = require_matrix(a)
    if gap_bound <= 0:
        raise InputError("gap_bound must be positive")
    if eps0 is not None and not eps0 < gap_bound / 2.0:
        raise InputError(f"estimate error {eps0} must be below gap_bound/2 = {gap_bound / 2.0}")
    gv: GroundVectorResult = ground_vector(m, lam)
    b = m.copy()
    idx = np.arange(m.shape[0])
    b[idx, idx] -= lam
    residual = float(np.linalg.norm(b @ gv.vector))
    return EigenvectorResult(vector=gv.vector, residual=residual,
                             degenerate=gv.degenerate)
