"""Test-matrix generation with known spectra and Jordan structure.

Matrices come out normalized to spectral norm at most 1; the normalization
factor is recorded so ground-truth eigenvalues stay exact. The similarity
transform is ``P = U @ diag(ramp) @ V`` with Haar-random unitaries, so its
condition number equals the requested target exactly.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError
from .linalg import require_matrix

__all__ = ["JordanSpec", "GeneratedMatrix", "haar_unitary", "jordan_block",
           "jordan_matrix", "companion_matrix"]


@dataclass(frozen=True)
class JordanSpec:
    """Recipe for a matrix with prescribed Jordan blocks.

    ``eigenvalues[i]`` is the eigenvalue of the i-th block of size
    ``block_sizes[i]``; ``kappa_target`` is the condition number of the
    similarity transform.
    """

    eigenvalues: tuple
    block_sizes: tuple
    kappa_target: float = 1.0
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "eigenvalues", tuple(complex(z) for z in self.eigenvalues))
        object.__setattr__(self, "block_sizes", tuple(int(b) for b in self.block_sizes))
        if len(self.eigenvalues) != len(self.block_sizes):
            raise InputError("eigenvalues and block_sizes must have equal length")
        if not self.block_sizes:
            raise InputError("at least one Jordan block is required")
        if any(b < 1 for b in self.block_sizes):
            raise InputError("block sizes must be positive")
        if self.kappa_target < 1.0:
            raise InputError("kappa_target must be >= 1")

    @property
    def n(self) -> int:
        return sum(self.block_sizes)


@dataclass(frozen=True)
class GeneratedMatrix:
    """A generated matrix plus the ground truth needed to check results."""

    matrix: np.ndarray
    true_eigenvalues: tuple
    kappa_used: float | None
    m_max: int
    scale: float

    def to_dict(self) -> dict:
        from .linalg import _matrix_to_json_obj
        return {
            "matrix": _matrix_to_json_obj(self.matrix),
            "true_eigenvalues": [[z.real, z.imag] for z in self.true_eigenvalues],
            "kappa_used": self.kappa_used,
            "m_max": self.m_max,
            "scale": self.scale,
        }


def haar_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR of a complex Ginibre matrix."""
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def jordan_block(lam: complex, size: int) -> np.ndarray:
    j = np.eye(size, k=1, dtype=np.complex128)
    j[np.arange(size), np.arange(size)] = lam
    return j


def jordan_matrix(spec: JordanSpec) -> GeneratedMatrix:
    """Build ``A = P J P^{-1} / scale`` for the requested Jordan form.

    ``scale = max(1, ||P J P^{-1}||)`` keeps the output inside the unit norm
    ball; ``true_eigenvalues`` are the block eigenvalues divided by the same
    factor, one entry per block.
    """
    if any(abs(z) > 1.0 for z in spec.eigenvalues):
        warnings.warn("eigenvalues outside the unit disk; the matrix will be "
                      "rescaled and the spectrum shrunk accordingly")
    n = spec.n
    j = np.zeros((n, n), dtype=np.complex128)
    pos = 0
    for lam, size in zip(spec.eigenvalues, spec.block_sizes):
        j[pos:pos + size, pos:pos + size] = jordan_block(lam, size)
        pos += size

    rng = np.random.default_rng(spec.seed)
    if n == 1:
        p = np.ones((1, 1), dtype=np.complex128)
        kappa_used = 1.0
    else:
        u = haar_unitary(n, rng)
        v = haar_unitary(n, rng)
        ramp = np.geomspace(np.sqrt(spec.kappa_target), 1.0 / np.sqrt(spec.kappa_target), n)
        p = (u * ramp) @ v
        sv = np.linalg.svd(p, compute_uv=False)
        kappa_used = float(sv[0] / sv[-1])

    raw = p @ j @ np.linalg.inv(p)
    norm = float(np.linalg.norm(raw, 2))
    scale = max(1.0, norm)
    matrix = raw / scale
    true = tuple(z / scale for z in spec.eigenvalues)
    return GeneratedMatrix(matrix=matrix, true_eigenvalues=true,
                           kappa_used=kappa_used, m_max=max(spec.block_sizes),
                           scale=scale)


def companion_matrix(coeffs) -> GeneratedMatrix:
    """Companion matrix of the monic polynomial x^d + c_{d-1} x^{d-1} + ... + c_0.

    ``coeffs`` lists (c_0, ..., c_{d-1}); the leading 1 is implicit. The
    matrix is divided by ``scale = max(1, ||C||)`` and polynomial roots are
    recovered as ``scale * eigenvalue``. True eigenvalues are not recorded
    (they are what the caller wants to find); ``m_max`` is set to the degree,
    the largest block a companion matrix can carry.
    """
    c = np.asarray(list(coeffs), dtype=np.complex128)
    if c.ndim != 1 or c.size < 1:
        raise InputError("need at least one coefficient (degree >= 1)")
    if not np.all(np.isfinite(c.view(np.float64))):
        raise InputError("coefficients must be finite")
    d = c.size
    comp = np.eye(d, k=-1, dtype=np.complex128)
    comp[:, -1] = -c
    comp = require_matrix(comp)
    scale = max(1.0, float(np.linalg.norm(comp, 2)))
    return GeneratedMatrix(matrix=comp / scale, true_eigenvalues=(),
                           kappa_used=None, m_max=d, scale=scale)
