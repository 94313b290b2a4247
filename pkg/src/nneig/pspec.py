"""Pseudospectrum level sets on uniform complex-plane grids.

A point mu belongs to the eps-pseudospectrum when sigma0(mu) <= eps. The
grid evaluator stores raw sigma0 values so any list of eps thresholds can
be tested afterwards; the inclusion checker validates the spectral
enclosures (distance-to-spectrum vs sigma0, with the kappa / defective
exponent corrections) and the nesting of the level sets.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError
from .linalg import require_matrix
from .matgen import GeneratedMatrix
from .oracle import _sigma_min_batch_exact, distance_bound

__all__ = ["PspecGrid", "pspec_grid", "InclusionReport", "check_inclusions",
           "write_pspec_csv", "write_pspec_meta"]

_MU_BOUND = 2.0


@dataclass(frozen=True)
class PspecGrid:
    """sigma0 sampled on a uniform re/im grid; ``values[j, i]`` belongs to
    ``re_points[i] + 1j * im_points[j]``."""

    re_range: tuple
    im_range: tuple
    resolution: int
    values: np.ndarray

    @property
    def re_points(self) -> np.ndarray:
        return np.linspace(self.re_range[0], self.re_range[1], self.resolution)

    @property
    def im_points(self) -> np.ndarray:
        return np.linspace(self.im_range[0], self.im_range[1], self.resolution)

    def points(self) -> np.ndarray:
        re = self.re_points
        im = self.im_points
        return re[None, :] + 1j * im[:, None]

    def membership(self, eps: float) -> np.ndarray:
        return self.values <= eps


def pspec_grid(a, region, resolution: int) -> PspecGrid:
    """Evaluate sigma0 at every node of a ``resolution x resolution`` grid
    over ``region = ((re_lo, re_hi), (im_lo, im_hi))``."""
    m = require_matrix(a)
    (re_lo, re_hi), (im_lo, im_hi) = region
    if not (re_lo < re_hi and im_lo < im_hi):
        raise InputError("region intervals must be nonempty")
    if resolution < 2:
        raise InputError("resolution must be at least 2")
    corners = [complex(re, im) for re in (re_lo, re_hi) for im in (im_lo, im_hi)]
    if max(abs(c) for c in corners) > _MU_BOUND:
        raise InputError(f"region extends beyond |mu| <= {_MU_BOUND}")
    re = np.linspace(re_lo, re_hi, resolution)
    im = np.linspace(im_lo, im_hi, resolution)
    mus = (re[None, :] + 1j * im[:, None]).ravel()
    vals = _sigma_min_batch_exact(m, mus).reshape(resolution, resolution)
    return PspecGrid(re_range=(float(re_lo), float(re_hi)),
                     im_range=(float(im_lo), float(im_hi)),
                     resolution=int(resolution), values=vals)


@dataclass
class InclusionReport:
    eps_list: tuple
    checked_nodes: int
    violations: list = field(default_factory=list)
    nesting_ok: bool = True

    @property
    def ok(self) -> bool:
        return self.nesting_ok and not self.violations


def check_inclusions(a, gen: GeneratedMatrix, eps_list, *,
                     region=((-1.0, 1.0), (-1.0, 1.0)), resolution: int = 200,
                     tol: float = 1e-9, grid: PspecGrid | None = None) -> InclusionReport:
    """Verify the spectral enclosures of the pseudospectrum on a grid.

    For every node and every eps: inner, distance-to-spectrum <= eps implies
    sigma0 <= eps + tol; outer, sigma0 <= eps implies distance <=
    kappa*eps + tol (m_max = 1) or 3 (kappa eps)^(1/m_max) + tol otherwise.
    Also verifies that memberships are nested across eps_list. Requires
    ground-truth eigenvalues and conditioning metadata.
    """
    if not gen.true_eigenvalues:
        raise InputError("check_inclusions needs ground-truth eigenvalues")
    if gen.kappa_used is None:
        raise InputError("check_inclusions needs the achieved kappa")
    if grid is None:
        grid = pspec_grid(a, region, resolution)
    eps_list = tuple(sorted(float(e) for e in eps_list))
    pts = grid.points()
    lams = np.asarray(gen.true_eigenvalues, dtype=np.complex128)
    dist = np.min(np.abs(pts[..., None] - lams[None, None, :]), axis=-1)
    sig = grid.values
    report = InclusionReport(eps_list=eps_list,
                             checked_nodes=pts.size * len(eps_list))
    kappa, m_max = gen.kappa_used, gen.m_max
    for eps in eps_list:
        if m_max == 1:
            outer_radius = kappa * eps
        elif kappa * eps <= 1.0:
            outer_radius = distance_bound(eps, kappa, m_max)
        else:
            # the defective enclosure radius exceeds any possible distance
            outer_radius = 3.0
        inner_bad = (dist <= eps) & (sig > eps + tol)
        outer_bad = (sig <= eps) & (dist > outer_radius + tol)
        for kind, bad in (("inner", inner_bad), ("outer", outer_bad)):
            for j, i in zip(*np.nonzero(bad)):
                report.violations.append({
                    "eps": eps, "kind": kind,
                    "re": float(pts[j, i].real), "im": float(pts[j, i].imag),
                    "sigma0": float(sig[j, i]), "distance": float(dist[j, i]),
                })
    members = [grid.membership(eps) for eps in eps_list]
    for small, big in zip(members, members[1:]):
        if np.any(small & ~big):
            report.nesting_ok = False
    return report


def write_pspec_csv(grid: PspecGrid, path: str) -> None:
    pts = grid.points()
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["re", "im", "sigma0"])
        for j in range(grid.resolution):
            for i in range(grid.resolution):
                writer.writerow([repr(pts[j, i].real), repr(pts[j, i].imag),
                                 repr(float(grid.values[j, i]))])


def write_pspec_meta(grid: PspecGrid, eps_list, path: str) -> None:
    with open(path, "w") as fh:
        json.dump({"re_range": list(grid.re_range),
                   "im_range": list(grid.im_range),
                   "resolution": grid.resolution,
                   "eps_list": [float(e) for e in eps_list]}, fh, sort_keys=True)
        fh.write("\n")
