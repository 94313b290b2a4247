"""Chebyshev constructions: sqrt approximant, smoothed step, their product,
and the spectral check of the Hermitianized shifted operator.

The target is a real polynomial p with |p(x)| <= 1 on [-1, 1] and
|p(x) - sqrt(x)| <= eps on [eta, 1]. It is assembled from

* ``p1``: Chebyshev interpolant of sqrt on [eta/2, 1], degree found by
  doubling plus bisection against a dense error sweep;
* ``p2``: a bounded step polynomial rising from 0 to 1 across
  (eta/2, eta), built from an error-function surrogate centered at
  3*eta/4.

Off [eta/2, 1] the interpolant p1 grows exponentially, so the step factor
must vanish fast enough pointwise to keep the product admissible. The
product is therefore formed by sampling ``p1(x) * g(x)`` (g the analytic
step surrogate, whose deep tail is exact in floating point where a stored
polynomial's would drown in coefficient roundoff) at Chebyshev nodes of the
product grid and transforming to coefficients; in exact arithmetic this is
the same polynomial as the basis-linearized product.

All node/coefficient transforms are DCTs, so construction and verification
run in O(N log N).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial import chebyshev as _cheb
from scipy.fft import dct, idct
from scipy.special import erf

from .errors import ApproximationError, InputError
from .linalg import require_matrix

__all__ = ["ChebPoly", "chebyshev_nodes", "coeffs_from_node_values",
           "node_values_from_coeffs", "cheb_sqrt", "heaviside_poly",
           "sqrt_product", "HmuReport", "verify_Hmu"]

_DEFAULT_CAP = 4096
_HMU_CAP = 65536
_BOUND_TOL = 1e-9


# ---------------------------------------------------------------------------
# node <-> coefficient transforms (first-kind Chebyshev points)

def chebyshev_nodes(m: int) -> np.ndarray:
    """First-kind Chebyshev points cos(pi (j + 1/2) / m), j = 0..m-1."""
    if m < 1:
        raise InputError("need at least one node")
    return np.cos(np.pi * (np.arange(m) + 0.5) / m)


def coeffs_from_node_values(values) -> np.ndarray:
    """Chebyshev coefficients of the degree m-1 interpolant through the
    values at :func:`chebyshev_nodes(m)`."""
    v = np.asarray(values, dtype=np.float64)
    c = dct(v, type=2) / v.size
    c[0] /= 2.0
    return c


def node_values_from_coeffs(coeffs, m: int | None = None) -> np.ndarray:
    """Evaluate a Chebyshev series at :func:`chebyshev_nodes(m)`; ``m``
    defaults to the coefficient count and may be larger (zero padding)."""
    c = np.asarray(coeffs, dtype=np.float64)
    m = c.size if m is None else int(m)
    if m < c.size:
        raise InputError("node count must be at least the coefficient count")
    spec = np.zeros(m)
    spec[:c.size] = c * m
    spec[0] *= 2.0
    return idct(spec, type=2)


@dataclass(frozen=True)
class ChebPoly:
    """Real polynomial in the Chebyshev-T basis scaled to ``domain``.

    ``bounded`` flags that |p| <= 1 + 1e-9 on [-1, 1] was verified (the
    admissibility condition for eigenvalue-transform use). Evaluation
    outside the domain extrapolates.
    """

    coefficients: np.ndarray
    domain: tuple = (-1.0, 1.0)
    bounded: bool = False

    def __post_init__(self):
        c = np.asarray(self.coefficients, dtype=np.float64)
        c.setflags(write=False)
        object.__setattr__(self, "coefficients", c)
        a, b = self.domain
        if not a < b:
            raise InputError("domain must be an interval (a, b) with a < b")

    @property
    def degree(self) -> int:
        return self.coefficients.size - 1

    def __call__(self, x):
        a, b = self.domain
        y = (2.0 * np.asarray(x, dtype=np.float64) - (a + b)) / (b - a)
        return _cheb.chebval(y, self.coefficients)


def _to_domain(ref_pts: np.ndarray, domain) -> np.ndarray:
    a, b = domain
    return 0.5 * (ref_pts + 1.0) * (b - a) + a


def _dense_values(coeffs: np.ndarray, n_min: int = 4096):
    """Values on a Chebyshev grid at least 4x finer than the degree."""
    m = 1 << max(12, (4 * coeffs.size - 1).bit_length())
    m = max(m, n_min)
    return chebyshev_nodes(m), node_values_from_coeffs(coeffs, m)


def _bisect_min_degree(check, lo: int, hi: int, coarse: float = 0.0) -> int:
    """Smallest degree in (lo, hi] passing ``check``; ``hi`` is known to
    pass. ``coarse`` > 0 stops early once the bracket is within that
    relative width (used at very large degrees)."""
    while hi - lo > 1 and (coarse == 0.0 or (hi - lo) > coarse * hi):
        mid = (lo + hi) // 2
        if check(mid):
            hi = mid
        else:
            lo = mid
    return hi


# ---------------------------------------------------------------------------
# sqrt interpolant

def cheb_sqrt(eta: float, eps: float, max_degree: int = _DEFAULT_CAP) -> ChebPoly:
    """Polynomial approximation of sqrt on [eta/2, 1].

    Interpolates sqrt at Chebyshev points scaled to [eta/2, 1], doubling the
    degree until a dense sweep shows max error <= eps, then bisecting down
    to the smallest passing degree. The result is rescaled so it never
    exceeds 1 on its domain. Degree grows like log(1/eps) at fixed eta.
    """
    if not (0.0 < eta < 1.0) or not (0.0 < eps < 1.0):
        raise InputError("cheb_sqrt requires eta, eps in (0, 1)")
    domain = (eta / 2.0, 1.0)
    target = 0.49 * eps

    def build(deg: int) -> np.ndarray:
        nodes = _to_domain(chebyshev_nodes(deg + 1), domain)
        return coeffs_from_node_values(np.sqrt(nodes))

    def err(coeffs: np.ndarray) -> float:
        ref, vals = _dense_values(coeffs)
        x = _to_domain(ref, domain)
        return float(np.max(np.abs(vals - np.sqrt(x))))

    def check(deg: int) -> bool:
        return err(build(deg)) <= target

    deg = 4
    while deg <= max_degree and not check(deg):
        deg *= 2
    if deg > max_degree:
        raise ApproximationError(
            f"sqrt approximant did not reach eps={eps} below degree {max_degree}")
    deg = _bisect_min_degree(check, deg // 2, deg)
    coeffs = build(deg)
    _, vals = _dense_values(coeffs)
    peak = float(np.max(np.abs(vals)))
    if peak > 1.0:
        coeffs = coeffs / (peak * (1.0 + 1e-12))
    return ChebPoly(coefficients=coeffs, domain=domain, bounded=False)


# ---------------------------------------------------------------------------
# smoothed step

@dataclass(frozen=True)
class _Step:
    center: float
    width: float

    def __call__(self, x):
        z = (np.asarray(x, dtype=np.float64) - self.center) / (self.width * math.sqrt(2.0))
        return 0.5 * (1.0 + erf(z))


def _step_surrogate(eta: float, tail_target: float) -> _Step:
    # width such that the surrogate itself sits within tail_target/2 of the
    # step outside the transition band (eta/2, eta)
    w = (eta / 4.0) / math.sqrt(2.0 * math.log(2.0 / tail_target))
    return _Step(center=0.75 * eta, width=w)


def heaviside_poly(eta: float, eps: float, left_eps: float | None = None,
                   max_degree: int = _DEFAULT_CAP) -> ChebPoly:
    """Bounded polynomial approximation of the step H(x - 3*eta/4).

    Meets ``|p2(x) - H(x - 3 eta/4)| <= eps`` for x in [-1, eta/2] and
    [eta, 1], and ``|p2| <= 1`` on [-1, 1]. ``left_eps`` tightens only the
    low-side bound (used when the step must suppress a large cofactor);
    it cannot go below 1e-13, the resolution of stored coefficients.
    """
    if not (0.0 < eta < 1.0) or not (0.0 < eps < 1.0):
        raise InputError("heaviside_poly requires eta, eps in (0, 1)")
    left = eps if left_eps is None else left_eps
    if left < 1e-13:
        raise InputError("left_eps below 1e-13 is not representable in a "
                         "stored coefficient basis")
    step = _step_surrogate(eta, min(0.9 * eps, 0.9 * left))
    left_zone = lambda x: x <= eta / 2.0
    right_zone = lambda x: x >= eta

    def build(deg: int) -> np.ndarray:
        nodes = chebyshev_nodes(deg + 1)
        return coeffs_from_node_values(step(nodes))

    def check_coeffs(coeffs: np.ndarray) -> bool:
        ref, vals = _dense_values(coeffs)
        if np.max(np.abs(vals)) > 1.0 + 1e-13:
            return False
        lz, rz = left_zone(ref), right_zone(ref)
        return (float(np.max(np.abs(vals[lz]))) <= left
                and float(np.max(np.abs(vals[rz] - 1.0))) <= eps)

    def check(deg: int) -> bool:
        return check_coeffs(_rescaled(build(deg)))

    def _rescaled(coeffs: np.ndarray) -> np.ndarray:
        _, vals = _dense_values(coeffs)
        peak = float(np.max(np.abs(vals)))
        if peak > 1.0:
            coeffs = coeffs / (peak * (1.0 + 1e-12))
        return coeffs

    deg = 8
    while deg <= max_degree and not check(deg):
        deg *= 2
    if deg > max_degree:
        raise ApproximationError(
            f"step approximant did not reach eps={eps} (left {left}) below "
            f"degree {max_degree}")
    deg = _bisect_min_degree(check, deg // 2, deg, coarse=0.02 if deg > 4096 else 0.0)
    coeffs = _rescaled(build(deg))
    return ChebPoly(coefficients=coeffs, domain=(-1.0, 1.0), bounded=True)


# ---------------------------------------------------------------------------
# product

@lru_cache(maxsize=32)
def sqrt_product(eta: float, eps: float, max_degree: int = _DEFAULT_CAP) -> ChebPoly:
    """Admissible sqrt approximant: |p| <= 1 on [-1, 1] and
    |p - sqrt(x)| <= eps on [eta, 1].

    Splits the budget as eps1 = eps/2 for the sqrt interpolant and
    eps2 = eps/(2 (1 + eps1)) for the step factor, then forms the product
    on the Chebyshev grid of its exact degree. The step width is chosen
    from the measured off-domain growth of the sqrt interpolant so the
    product stays below 1 everywhere.
    """
    if not (0.0 < eta < 1.0) or not (0.0 < eps < 1.0):
        raise InputError("sqrt_product requires eta, eps in (0, 1)")
    eps1 = eps / 2.0
    eps2 = eps / (2.0 * (1.0 + eps1))
    p1 = cheb_sqrt(eta, eps1, max_degree=max_degree)

    # measured growth of p1 left of its domain decides how hard the step
    # tail must vanish
    probe = np.linspace(-1.0, eta / 2.0, 4096)
    p1_left_max = float(np.max(np.abs(p1(probe))))
    right_target = 0.45 * eps2

    for widen in range(4):
        left_target = min(0.9 * eps2, 0.4 / p1_left_max) * (0.25 ** widen)
        step = _step_surrogate(eta, min(left_target, right_target))
        poly = _product_poly(p1, step, eta, eps, max_degree)
        if poly is not None:
            return poly
    raise ApproximationError(
        f"sqrt product did not meet |p|<=1 and eps={eps} on [eta,1] below "
        f"degree {max_degree} (eta={eta})")


def _product_poly(p1: ChebPoly, step: _Step, eta: float, eps: float,
                  max_degree: int) -> ChebPoly | None:
    def build(deg: int) -> np.ndarray:
        nodes = chebyshev_nodes(deg + 1)
        g = step(nodes)
        vals = np.zeros_like(g)
        live = g > 0.0
        vals[live] = p1(nodes[live]) * g[live]
        return coeffs_from_node_values(vals)

    def check_coeffs(coeffs: np.ndarray) -> bool:
        ref, vals = _dense_values(coeffs)
        if float(np.max(np.abs(vals))) > 1.0:
            return False
        rz = ref >= eta
        return float(np.max(np.abs(vals[rz] - np.sqrt(ref[rz])))) <= 0.98 * eps

    def check(deg: int) -> bool:
        return check_coeffs(build(deg))

    deg = 32
    while deg <= max_degree and not check(deg):
        deg *= 2
    if deg > max_degree:
        return None
    deg = _bisect_min_degree(check, deg // 2, deg, coarse=0.02 if deg > 4096 else 0.0)
    coeffs = build(deg)
    return ChebPoly(coefficients=coeffs, domain=(-1.0, 1.0), bounded=True)


# ---------------------------------------------------------------------------
# Hermitianized shifted operator

@dataclass(frozen=True)
class HmuReport:
    """Spectral verification of the Hermitianized shifted operator.

    ``spectral_error`` is the largest deviation between the polynomial
    transform of the normalized Gram operator's spectrum and the exact
    square-root spectrum; ``sigma_map_error`` checks that the exact operator
    spectrum equals sqrt((sigma_i^2 / alpha_mu^2 + nu) / (1 + nu)) over the
    singular values sigma_i of the shifted matrix. Recovering a singular
    value from an eigenvalue estimate amplifies error by at most
    alpha_mu * sqrt(1 + nu) / sqrt(nu) (inverse slope of the map near
    sigma = 0).
    """

    mu: complex
    nu: float
    alpha_mu: float
    spectral_error: float
    sigma_map_error: float
    poly_degree: int


def verify_Hmu(a, mu: complex, nu: float = 0.01, eps: float = 1e-3,
               max_degree: int = _HMU_CAP) -> HmuReport:
    """Build G = ((A - mu I)^dag (A - mu I) / alpha^2 + nu I)/(1 + nu),
    apply the admissible sqrt polynomial to it spectrally, and compare with
    the exact square root; also confirm the singular-value map of the exact
    operator spectrum.
    """
    m = require_matrix(a)
    if nu <= 0:
        raise InputError("nu must be positive")
    if not (0.0 < eps < 1.0):
        raise InputError("eps must lie in (0, 1)")
    mu = complex(mu)
    alpha = 1.0 + abs(mu)
    b = m.copy()
    idx = np.arange(m.shape[0])
    b[idx, idx] -= mu
    g = (b.conj().T @ b) / (alpha * alpha)
    g = (g + g.conj().T) / 2.0
    g[idx, idx] += nu
    g /= (1.0 + nu)
    evals = np.linalg.eigvalsh(g)
    eta = nu / (1.0 + nu)
    if evals[0] < eta - 1e-12 or evals[-1] > 1.0 + 1e-12:
        raise InputError(
            f"spectrum [{evals[0]:.3e}, {evals[-1]:.3e}] escapes "
            f"[{eta:.3e}, 1]; the input norm exceeds 1")
    p = sqrt_product(eta, eps, max_degree=max_degree)
    clipped = np.clip(evals, eta, 1.0)
    spectral_error = float(np.max(np.abs(p(clipped) - np.sqrt(clipped))))
    if spectral_error > eps:
        raise ApproximationError(
            f"spectral error {spectral_error:.3e} exceeds eps={eps}")
    sig = np.linalg.svd(b, compute_uv=False)
    mapped = np.sqrt((sig * sig / (alpha * alpha) + nu) / (1.0 + nu))
    sigma_map_error = float(np.max(np.abs(np.sort(mapped) - np.sort(np.sqrt(evals)))))
    return HmuReport(mu=mu, nu=float(nu), alpha_mu=alpha,
                     spectral_error=spectral_error,
                     sigma_map_error=sigma_map_error,
                     poly_degree=p.degree)
