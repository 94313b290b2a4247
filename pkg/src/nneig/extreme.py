"""Annulus search for the smallest-modulus eigenvalue and the spectral gap.

The modulus of the smallest-modulus eigenvalue is bracketed by an annulus
``[R1, R2]``, initialized from a single sigma0 query at the origin:
``R1 = sigma0(0)``, ``R2 = min(3 (kappa sigma0(0))^(1/m), 1)``. Each sweep
samples M points on the circle ``|z| = R1`` with
``delta = (1/kappa) ((R2 - R1)/6)^m``:

* some point passes (``sigma0 <= delta``): the outer radius drops to
  ``R1 + 3 (kappa sigma)^(1/m)``, at most halving the width;
* all points fail: the sample disks cover the circle of radius
  ``R1 + c*delta``, so the inner radius advances by ``c*delta``.

``delta`` is recomputed whenever either radius changes (one fixed value per
sweep). The search returns the most recent passing point once the width
drops below epsilon. The spectral gap runs a second pass on the shifted,
renormalized matrix with a small exclusion radius around zero so the just
subtracted eigenvalue is not rediscovered.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import BoundViolationError, InputError, ProbabilisticFailureError
from .linalg import operator_norm, require_matrix
from .oracle import SigmaOracleConfig, sigma0, sigma0_batch

__all__ = ["ExtremeParams", "Annulus", "SweepRecord", "ExtremeTrace",
           "GapResult", "circle_count", "smallest_modulus_eigenvalue",
           "spectral_gap", "largest_modulus_eigenvalue"]

_NORM_TOL = 1e-12
_INVERSE_SIZE_CAP = 256


@dataclass(frozen=True)
class ExtremeParams:
    """Annulus-search configuration; ``c`` is the circle-cover constant."""

    epsilon: float
    kappa: float = 1.0
    m: int = 1
    p_fail: float = 0.0
    oracle: SigmaOracleConfig = field(default_factory=SigmaOracleConfig)
    c: float = 0.9
    max_sweeps: int = 100000

    def __post_init__(self):
        if not (0.0 < self.epsilon < 1.0):
            raise InputError("epsilon must lie in (0, 1)")
        if self.kappa < 1.0:
            raise InputError("kappa must be >= 1")
        if self.m < 1:
            raise InputError("m must be >= 1")
        if not (0.0 < self.c < 1.0):
            raise InputError("cover constant c must lie in (0, 1)")


@dataclass(frozen=True)
class Annulus:
    r_inner: float
    r_outer: float
    level: int


@dataclass
class SweepRecord:
    sweep: int
    r_inner: float
    r_outer: float
    delta: float
    num_points: int
    case: int  # 1 accepted, 2 advanced inner radius
    accepted: complex | None = None
    accepted_sigma: float | None = None

    def to_dict(self) -> dict:
        return {
            "sweep": self.sweep, "r_inner": self.r_inner,
            "r_outer": self.r_outer, "delta": self.delta,
            "num_points": self.num_points, "case": self.case,
            "accepted": None if self.accepted is None
                        else [self.accepted.real, self.accepted.imag],
            "accepted_sigma": self.accepted_sigma,
        }


@dataclass
class ExtremeTrace:
    sweeps: list = field(default_factory=list)
    total_oracle_calls: int = 0
    outcome: str = "incomplete"

    def to_dict(self) -> dict:
        return {"sweeps": [s.to_dict() for s in self.sweeps],
                "total_oracle_calls": self.total_oracle_calls,
                "outcome": self.outcome}

    def summary_dict(self) -> dict:
        return {"sweeps_run": len(self.sweeps),
                "total_oracle_calls": self.total_oracle_calls,
                "outcome": self.outcome}


def circle_count(r_inner: float, delta: float, c: float) -> tuple[int, bool]:
    """Number of delta-disks centered on the circle ``|z| = r_inner`` needed
    to cover the circle of radius ``r_inner + c*delta``.

    Uses ``M = ceil(pi / arcsin(sqrt(1-c^2) delta / r_inner))`` while the
    arcsin argument stays below 1; for thinner annuli (argument >= 1) it
    falls back to the exact chord criterion, which yields a small M. The
    flag reports the degenerate case where a single disk already covers.
    """
    if r_inner < 0 or delta <= 0 or not (0.0 < c < 1.0):
        raise InputError("circle_count requires r_inner >= 0, delta > 0, 0 < c < 1")
    if r_inner == 0.0:
        return 1, True
    arg = math.sqrt(1.0 - c * c) * delta / r_inner
    if arg <= 1.0:
        return int(math.ceil(math.pi / math.asin(arg))), False
    r_outer = r_inner + c * delta
    if r_inner + r_outer <= delta:
        return 1, True
    cos_bound = (r_inner * r_inner + r_outer * r_outer - delta * delta) / (2.0 * r_inner * r_outer)
    if cos_bound <= -1.0:
        return 1, True
    m = int(math.ceil(math.pi / math.acos(min(1.0, cos_bound)))) if cos_bound < 1.0 else 0
    if m < 1:
        raise InputError("annulus step delta too small relative to the cover constant")
    return m, m == 1


def _annulus_search(a: np.ndarray, params: ExtremeParams, *,
                    skip_radius: float = 0.0, excluded_bound: float = 0.0):
    """Core sweep loop. With ``skip_radius > 0``, eigenvalues of modulus
    below ``excluded_bound`` are ignored: the annulus starts at
    ``[skip_radius, 1]`` and delta is capped so the excluded cluster can
    never trigger an acceptance. Returns (estimate | None, trace); None
    means the skip-mode walk emptied the annulus (nothing outside the
    excluded cluster)."""
    noisy = params.oracle.mode == "noisy"
    trace = ExtremeTrace()
    theta = 0.0
    if noisy:
        theta = params.oracle.fail_prob
        if params.p_fail > 0.0:
            # conservative upfront budget split over a worst-case call count
            delta_fin = (params.epsilon / 12.0) ** params.m / params.kappa
            m_bound = math.ceil(math.pi / math.asin(min(1.0, math.sqrt(1.0 - params.c ** 2) * delta_fin)))
            sweeps_bound = (math.ceil(math.log2(1.0 / params.epsilon)) + 1) * (math.ceil(6.0 * params.kappa / params.c) + 2)
            theta = params.p_fail / max(1, m_bound * sweeps_bound)

    if skip_radius > 0.0:
        r1, r2 = skip_radius, 1.0
    else:
        init_cfg = params.oracle
        init_prec = 0.0
        if noisy:
            init_prec = (init_cfg.precision if init_cfg.precision is not None
                         else params.epsilon / 10.0)
            init_cfg = replace(init_cfg, precision=init_prec, fail_prob=theta)
        est = sigma0(a, 0.0, init_cfg, key=(0, 0))
        trace.total_oracle_calls += 1
        s0 = est.value
        if s0 <= max(1e-12, params.epsilon / 10.0):
            trace.outcome = "found"
            return 0.0 + 0.0j, trace
        r1 = max(0.0, s0 - init_prec)
        r2 = min(3.0 * (params.kappa * (s0 + init_prec)) ** (1.0 / params.m), 1.0)

    last_accept = None

    for sweep in range(1, params.max_sweeps + 1):
        width = r2 - r1
        if width < params.epsilon:
            if last_accept is not None:
                trace.outcome = "found"
                return last_accept, trace
            # the bracket narrowed without a single acceptance: the modulus
            # is pinned but no point on the circle ever passed
            if skip_radius > 0.0:
                trace.outcome = "annulus-empty"
                return None, trace
            trace.outcome = "bound-violation"
            raise BoundViolationError(
                f"annulus narrowed to {width:.3g} at sweep {sweep} without "
                "any acceptance; supplied kappa/m likely underestimate the "
                "true structure", level=sweep, trace=trace)
        delta = (1.0 / params.kappa) * (width / 6.0) ** params.m
        if skip_radius > 0.0:
            cap = (1.0 / params.kappa) * (0.9 * (r1 - excluded_bound) / 3.0) ** params.m
            delta = min(delta, cap)
        if delta <= 0.0:
            break
        cfg = params.oracle
        if noisy:
            cfg = replace(cfg, precision=(cfg.precision if cfg.precision is not None
                                          else delta / 4.0), fail_prob=theta)
        m_pts, _ = circle_count(r1, delta, params.c)
        angles = 2.0 * math.pi * np.arange(m_pts) / m_pts
        mus = r1 * np.exp(1j * angles)
        vals = sigma0_batch(a, mus, cfg, key_base=(sweep,))
        trace.total_oracle_calls += m_pts
        rec = SweepRecord(sweep=sweep, r_inner=r1, r_outer=r2, delta=delta,
                          num_points=m_pts, case=2)
        hits = np.flatnonzero(vals <= delta)
        if hits.size:
            j0 = int(hits[0])
            sig = float(vals[j0])
            sig_eff = sig + (cfg.precision if noisy else 0.0)
            rec.case = 1
            rec.accepted = complex(mus[j0])
            rec.accepted_sigma = sig
            trace.sweeps.append(rec)
            r2 = min(r1 + 3.0 * (params.kappa * sig_eff) ** (1.0 / params.m), r2)
            last_accept = complex(mus[j0])
            if r2 - r1 < params.epsilon:
                trace.outcome = "found"
                return last_accept, trace
        else:
            trace.sweeps.append(rec)
            advance = params.c * delta
            if r1 + advance >= r2:
                if skip_radius > 0.0:
                    trace.outcome = "annulus-empty"
                    return None, trace
                trace.outcome = "bound-violation"
                raise BoundViolationError(
                    f"annulus emptied at sweep {sweep} without locating an "
                    f"eigenvalue; supplied kappa={params.kappa}, m={params.m} "
                    "likely underestimate the true structure",
                    level=sweep, trace=trace)
            r1 += advance

    trace.outcome = "nonconvergence"
    exc = ProbabilisticFailureError if noisy else BoundViolationError
    raise exc(f"annulus search did not converge within {params.max_sweeps} sweeps",
              trace=trace)


def smallest_modulus_eigenvalue(a, params: ExtremeParams):
    """Estimate the eigenvalue of smallest modulus of a nonsingular ``A``
    with ``||A|| <= 1``; returns ``(estimate, trace)``.

    Near-singular input (``sigma0(0) <= max(1e-12, eps/10)``) short-circuits
    to 0. The returned point lies on the final inner circle, within epsilon
    of an eigenvalue whose modulus is within epsilon of the minimum.
    """
    m = require_matrix(a)
    nrm = operator_norm(m)
    if nrm > 1.0 + _NORM_TOL:
        raise InputError(f"operator norm {nrm:.6g} exceeds 1; rescale the matrix")
    est, trace = _annulus_search(m, params)
    return est, trace


@dataclass(frozen=True)
class GapResult:
    gap: float
    lambda_min: complex
    near_singular: bool
    trace_first: ExtremeTrace
    trace_second: ExtremeTrace


def spectral_gap(a, params: ExtremeParams) -> GapResult:
    """Distance from the smallest-modulus eigenvalue to the rest of the
    spectrum.

    First pass finds ``lambda_min``; the second pass runs on
    ``B = (A - lambda_min I)/(1 + |lambda_min|)`` with an exclusion radius
    around zero (the residue of the subtracted eigenvalue, of modulus at
    most eps/2, must not be rediscovered). If the second pass walks out of
    its annulus, every eigenvalue sits inside the exclusion radius: the gap
    is below resolution and is reported as 0 with ``near_singular`` set.
    Result is within O(eps) of the true gap for simple spectra.
    """
    m = require_matrix(a)
    lam, trace1 = smallest_modulus_eigenvalue(m, params)
    s = 1.0 + abs(lam)
    b = m.copy()
    idx = np.arange(m.shape[0])
    b[idx, idx] -= lam
    b /= s

    eps_b = params.epsilon / s
    excluded = 0.5 * params.epsilon / s
    params_b = replace(params, epsilon=eps_b)
    est, trace2 = _annulus_search(b, params_b, skip_radius=2.5 * excluded,
                                  excluded_bound=excluded)
    if est is None:
        return GapResult(gap=0.0, lambda_min=lam, near_singular=True,
                         trace_first=trace1, trace_second=trace2)
    return GapResult(gap=abs(est) * s, lambda_min=lam, near_singular=False,
                     trace_first=trace1, trace_second=trace2)


def largest_modulus_eigenvalue(a, params: ExtremeParams):
    """Largest-modulus eigenvalue via the annulus search on the inverse.

    Exact-oracle convenience for dense desk-scale matrices (n <= 256): forms
    ``A^{-1}`` explicitly, renormalizes, searches for its smallest-modulus
    eigenvalue and maps back. Inversion conditioning applies: accuracy
    degrades for nearly singular input.
    """
    m = require_matrix(a)
    if params.oracle.mode != "exact":
        raise InputError("largest_modulus_eigenvalue supports the exact oracle only")
    n = m.shape[0]
    if n > _INVERSE_SIZE_CAP:
        raise InputError(f"matrix size {n} exceeds the inversion guard "
                         f"({_INVERSE_SIZE_CAP})")
    sv = np.linalg.svd(m, compute_uv=False)
    if sv[-1] <= max(1e-12, params.epsilon / 10.0):
        raise InputError("matrix is singular to working precision; the "
                         "largest-modulus search needs a nonsingular input")
    inv = np.linalg.inv(m)
    inv_norm = float(np.linalg.norm(inv, 2))
    c = inv / inv_norm
    eps_c = min(0.5, params.epsilon / inv_norm)
    params_c = replace(params, epsilon=eps_c)
    nu, trace = _annulus_search(c, params_c)
    if nu == 0:
        raise BoundViolationError("inverse search returned 0; input is "
                                  "effectively singular", trace=trace)
    return 1.0 / (inv_norm * nu), trace
