"""Smallest-singular-value queries for shifted matrices.

``sigma0(A, mu)`` evaluates the smallest singular value of ``A - mu*I``,
either exactly (LAPACK, with a closed form for n <= 2) or through a noise
model: with probability ``1 - fail_prob`` the returned value lies within
``precision`` of the truth, otherwise it is drawn uniformly from
``[0, ||A|| + |mu|]``. Noise is keyed by query coordinates, never by call
order, so grids can be evaluated in any order (or in parallel) without
changing the stream.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .linalg import require_matrix

__all__ = ["SigmaOracleConfig", "SigmaEstimate", "sigma0", "sigma0_batch",
           "GroundVectorResult", "ground_vector", "distance_bound"]

_MU_BOUND = 2.0
_DEGENERACY_TOL = 1e-12


@dataclass(frozen=True)
class SigmaOracleConfig:
    """Oracle mode and noise parameters.

    ``precision``/``fail_prob`` only apply in noisy mode; ``fail_prob`` is
    the per-call failure probability.
    """

    mode: str = "exact"
    precision: float | None = None
    fail_prob: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.mode not in ("exact", "noisy"):
            raise InputError(f"oracle mode must be 'exact' or 'noisy', got {self.mode!r}")
        if self.mode == "noisy":
            if self.precision is None or self.precision <= 0:
                raise InputError("noisy mode requires precision > 0")
        if not (0.0 <= self.fail_prob < 1.0):
            raise InputError("fail_prob must lie in [0, 1)")


@dataclass(frozen=True)
class SigmaEstimate:
    value: float
    mu: complex
    exact_backend_value: float | None = None


def _check_mu(mu: complex) -> complex:
    mu = complex(mu)
    if not (np.isfinite(mu.real) and np.isfinite(mu.imag)):
        raise InputError("shift mu must be finite")
    if abs(mu) > _MU_BOUND:
        raise InputError(f"|mu| = {abs(mu):.3g} exceeds the search disk bound {_MU_BOUND}")
    return mu


def _sigma_min_parts_exact(a: np.ndarray, re, im) -> np.ndarray:
    """Smallest singular values of ``A - (re + i*im) I``.

    ``re`` and ``im`` may each be a scalar or an array (broadcast); keeping
    grid lines in this split form lets the n <= 2 closed forms run in pure
    real arithmetic, which is what makes large grid scans affordable.
    """
    n = a.shape[0]
    if n == 1:
        dr = a[0, 0].real - re
        di = a[0, 0].imag - im
        return np.sqrt(dr * dr + di * di)
    if n == 2:
        # closed form, sigma_min^2 = 2 |det|^2 / (f + disc) with f the squared
        # Frobenius norm and disc^2 = f^2 - 4 |det|^2; stable for tiny sigma_min
        qr_, qi_ = a[0, 1].real, a[0, 1].imag
        rr_, ri_ = a[1, 0].real, a[1, 0].imag
        c2 = qr_ * qr_ + qi_ * qi_ + rr_ * rr_ + ri_ * ri_
        bcr = qr_ * rr_ - qi_ * ri_
        bci = qr_ * ri_ + qi_ * rr_
        pr = a[0, 0].real - re
        pi = a[0, 0].imag - im
        sr = a[1, 1].real - re
        si = a[1, 1].imag - im
        f = pr * pr + pi * pi + sr * sr + si * si + c2
        detr = pr * sr - pi * si - bcr
        deti = pr * si + pi * sr - bci
        adet2 = detr * detr + deti * deti
        disc = np.sqrt(np.maximum(f * f - 4.0 * adet2, 0.0))
        denom = f + disc
        out = np.sqrt(2.0 * adet2 / np.where(denom > 0.0, denom, 1.0))
        return np.where(denom > 0.0, out, 0.0)
    mus = np.ravel(np.asarray(re, dtype=np.float64) + 1j * np.asarray(im, dtype=np.float64))
    out = np.empty(mus.size, dtype=np.float64)
    idx = np.arange(n)
    chunk = max(1, 2 ** 22 // (n * n))
    for start in range(0, mus.size, chunk):
        sel = mus[start:start + chunk]
        stack = np.broadcast_to(a, (sel.size, n, n)).copy()
        stack[:, idx, idx] -= sel[:, None]
        out[start:start + chunk] = np.linalg.svd(stack, compute_uv=False)[:, -1]
    return out


def _sigma_min_batch_exact(a: np.ndarray, mus: np.ndarray) -> np.ndarray:
    """Smallest singular values of A - mu*I for a vector of shifts."""
    mus = np.asarray(mus, dtype=np.complex128).ravel()
    if a.shape[0] <= 2:
        return np.atleast_1d(_sigma_min_parts_exact(
            a, np.ascontiguousarray(mus.real), np.ascontiguousarray(mus.imag)))
    return _sigma_min_parts_exact(a, mus.real, mus.imag)


def _rng_for(cfg: SigmaOracleConfig, mu: complex, key: tuple | None) -> np.random.Generator:
    if key is None:
        # stand-alone calls: key the stream by the query coordinate itself
        key = (int(np.float64(mu.real).view(np.uint64)),
               int(np.float64(mu.imag).view(np.uint64)))
    return np.random.default_rng([int(cfg.seed) & 0xFFFFFFFF, *(int(k) & 0xFFFFFFFFFFFF for k in key)])


def sigma0(a, mu: complex, cfg: SigmaOracleConfig | None = None,
           key: tuple | None = None) -> SigmaEstimate:
    """Query the smallest singular value of ``A - mu*I``.

    In noisy mode the randomness is a deterministic function of
    ``(cfg.seed, key)``; when ``key`` is omitted it is derived from the bits
    of ``mu``, so repeated queries of the same point return the same draw.
    """
    m = require_matrix(a)
    mu = _check_mu(mu)
    if cfg is None:
        cfg = SigmaOracleConfig()
    true = float(_sigma_min_batch_exact(m, np.array([mu]))[0])
    if cfg.mode == "exact":
        return SigmaEstimate(value=true, mu=mu, exact_backend_value=None)
    rng = _rng_for(cfg, mu, key)
    if rng.random() < cfg.fail_prob:
        upper = float(np.linalg.norm(m, 2)) + abs(mu)
        value = float(rng.uniform(0.0, upper))
    else:
        value = max(0.0, true + float(rng.uniform(-cfg.precision, cfg.precision)))
    return SigmaEstimate(value=value, mu=mu, exact_backend_value=true)


def sigma0_batch(a, mus, cfg: SigmaOracleConfig | None = None,
                 key_base: tuple = (), key_indices=None) -> np.ndarray:
    """Vector of sigma0 estimates; element ``i`` uses key
    ``key_base + (key_indices[i],)`` in noisy mode (default: enumeration)."""
    m = require_matrix(a)
    mus = np.asarray(mus, dtype=np.complex128).ravel()
    if mus.size and float(np.max(np.abs(mus))) > _MU_BOUND:
        raise InputError(f"a shift exceeds the search disk bound {_MU_BOUND}")
    if cfg is None:
        cfg = SigmaOracleConfig()
    true = _sigma_min_batch_exact(m, mus)
    if cfg.mode == "exact":
        return true
    if key_indices is None:
        key_indices = np.arange(mus.size)
    upper = float(np.linalg.norm(m, 2))
    out = np.empty_like(true)
    for i, mu in enumerate(mus):
        rng = _rng_for(cfg, mu, (*key_base, int(key_indices[i])))
        if rng.random() < cfg.fail_prob:
            out[i] = rng.uniform(0.0, upper + abs(mu))
        else:
            out[i] = max(0.0, true[i] + rng.uniform(-cfg.precision, cfg.precision))
    return out


@dataclass(frozen=True)
class GroundVectorResult:
    vector: np.ndarray
    sigma: float
    degenerate: bool
    gap: float


def ground_vector(a, mu: complex) -> GroundVectorResult:
    """Unit right singular vector of ``A - mu*I`` for the smallest singular
    value.

    Phase convention: the first entry of largest magnitude is made real and
    non-negative. When the two smallest singular values coincide to within
    1e-12 the returned vector is an arbitrary member of the subspace and the
    result is flagged degenerate.
    """
    m = require_matrix(a)
    mu = _check_mu(mu)
    b = m.copy()
    idx = np.arange(m.shape[0])
    b[idx, idx] -= mu
    _, s, vh = np.linalg.svd(b)
    v = vh[-1].conj()
    gap = float(s[-2] - s[-1]) if s.size > 1 else 0.0
    degenerate = s.size > 1 and gap < _DEGENERACY_TOL
    k = int(np.argmax(np.abs(v)))
    phase = v[k] / abs(v[k])
    v = v * phase.conjugate()
    v[k] = abs(v[k])  # force exact real non-negative pivot
    return GroundVectorResult(vector=v, sigma=float(s[-1]), degenerate=degenerate, gap=gap)


def distance_bound(sigma: float, kappa: float, m: int) -> float:
    """Upper bound on the distance from a query point to the nearest
    eigenvalue, given its sigma0 value: ``kappa*sigma`` for diagonalizable
    structure (m = 1), ``3 (kappa sigma)^(1/m)`` for block size m."""
    x = kappa * sigma
    if m == 1:
        return x
    return 3.0 * x ** (1.0 / m)
