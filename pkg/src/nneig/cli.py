"""Command-line front end.

Every subcommand emits a single JSON document (stdout or ``--out``) that
echoes its fully resolved configuration, so runs are reproducible
byte-for-byte from the same inputs and seed. Exit codes: 0 success,
2 input error, 3 bound violation, 4 probabilistic failure,
5 approximation failure.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__
from .chebapprox import sqrt_product, verify_Hmu
from .errors import InputError, NneigError
from .extreme import (ExtremeParams, largest_modulus_eigenvalue,
                      smallest_modulus_eigenvalue, spectral_gap)
from .linalg import operator_norm, read_matrix, require_matrix, write_matrix
from .matgen import JordanSpec, companion_matrix, jordan_matrix
from .oracle import SigmaOracleConfig
from .pspec import pspec_grid, write_pspec_csv, write_pspec_meta
from .solver import (Region, SolverParams, estimate_eigenvalue,
                     estimate_real_eigenvalue, eigenvector_for,
                     has_eigenvalue_in_region)

_REGIONS = {"disk": None, "right-half": Region.right_half(), "real": Region.real_axis()}


def _parse_complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError as exc:
        raise InputError(f"cannot parse complex number {text!r}") from exc


def _parse_complex_list(text: str) -> list[complex]:
    return [_parse_complex(tok) for tok in text.split(",") if tok.strip()]


def _emit(obj: dict, out: str | None) -> None:
    text = json.dumps(obj, sort_keys=True, indent=2) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _c2pair(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def _load_matrix(args) -> tuple[np.ndarray, float]:
    """Read the input matrix; with --normalize, rescale to unit norm and
    return the factor so spectra can be mapped back."""
    a = read_matrix(args.infile)
    rescale = 1.0
    if getattr(args, "normalize", False):
        nrm = operator_norm(a)
        if nrm > 1.0:
            rescale = nrm
            a = a / nrm
    return a, rescale


def _oracle_config(args) -> SigmaOracleConfig:
    return SigmaOracleConfig(mode=args.oracle,
                             precision=args.oracle_eps,
                             seed=args.seed)


def _solver_params(args, region=None) -> SolverParams:
    return SolverParams(epsilon=args.eps, kappa=args.kappa, m=args.m,
                        p_fail=args.pfail, oracle=_oracle_config(args),
                        region=region)


def _trace_payload(trace, mode: str) -> dict:
    return trace.summary_dict() if mode == "summary" else trace.to_dict()


def _config_echo(args, names) -> dict:
    return {name: getattr(args, name) for name in names if hasattr(args, name)}


def _add_common(p, with_solver=True):
    p.add_argument("--seed", type=int, default=0, help="seed for all randomness")
    p.add_argument("--out", default=None, help="write the result JSON here instead of stdout")
    p.add_argument("--trace", choices=["full", "summary"], default="full",
                   help="embed the full trace or only totals")
    p.add_argument("-v", "--verbose", action="store_true", help="progress to stderr")
    if with_solver:
        p.add_argument("--in", dest="infile", required=True, help="input matrix (.json or .mtx)")
        p.add_argument("--eps", type=float, required=True, help="target precision")
        p.add_argument("--kappa", type=float, default=1.0,
                       help="upper bound on the Jordan condition number")
        p.add_argument("--m", type=int, default=1,
                       help="upper bound on the largest Jordan block size")
        p.add_argument("--pfail", type=float, default=0.0,
                       help="total failure budget for the noisy oracle")
        p.add_argument("--oracle", choices=["exact", "noisy"], default="exact")
        p.add_argument("--oracle-eps", dest="oracle_eps", type=float, default=None,
                       help="noisy oracle per-call precision (default: delta/4 per level)")
        p.add_argument("--normalize", action="store_true",
                       help="rescale the matrix to unit norm; outputs are mapped back")


_SOLVER_FLAGS = ["infile", "eps", "kappa", "m", "pfail", "oracle", "oracle_eps",
                 "seed", "normalize", "region", "trace"]


def cmd_eig(args) -> dict:
    a, rescale = _load_matrix(args)
    region = _REGIONS[args.region]
    params = _solver_params(args, region=region)
    est, trace = estimate_eigenvalue(a, params)
    return {"eigenvalue": _c2pair(est * rescale),
            "rescale": rescale,
            "trace": _trace_payload(trace, args.trace)}


def cmd_eig_real(args) -> dict:
    a, rescale = _load_matrix(args)
    params = _solver_params(args)
    est, trace = estimate_real_eigenvalue(a, params)
    return {"eigenvalue": float(est.real) * rescale,
            "rescale": rescale,
            "trace": _trace_payload(trace, args.trace)}


def cmd_region(args) -> dict:
    a, rescale = _load_matrix(args)
    params = _solver_params(args, region=_REGIONS[args.region] or Region.disk())
    result = has_eigenvalue_in_region(a, params)
    out = {"found": result.found, "rescale": rescale,
           "trace": _trace_payload(result.trace, args.trace)}
    if result.found:
        out["eigenvalue"] = _c2pair(result.eigenvalue * rescale)
    else:
        out["margin"] = result.margin * rescale
    return out


def cmd_extreme(args) -> dict:
    a, rescale = _load_matrix(args)
    params = ExtremeParams(epsilon=args.eps, kappa=args.kappa, m=args.m,
                           p_fail=args.pfail, oracle=_oracle_config(args), c=args.c)
    fn = largest_modulus_eigenvalue if args.largest else smallest_modulus_eigenvalue
    est, trace = fn(a, params)
    return {"eigenvalue": _c2pair(est * rescale),
            "modulus": abs(est) * rescale,
            "rescale": rescale,
            "trace": _trace_payload(trace, args.trace)}


def cmd_gap(args) -> dict:
    a, rescale = _load_matrix(args)
    params = ExtremeParams(epsilon=args.eps, kappa=args.kappa, m=args.m,
                           p_fail=args.pfail, oracle=_oracle_config(args), c=args.c)
    result = spectral_gap(a, params)
    return {"gap": result.gap * rescale,
            "lambda_min": _c2pair(result.lambda_min * rescale),
            "near_singular": result.near_singular,
            "rescale": rescale,
            "trace_first": _trace_payload(result.trace_first, args.trace),
            "trace_second": _trace_payload(result.trace_second, args.trace)}


def cmd_eigvec(args) -> dict:
    a, rescale = _load_matrix(args)
    lam = _parse_complex(args.lam) / rescale
    result = eigenvector_for(a, lam, gap_bound=args.gap_bound, eps0=args.eps0)
    return {"vector": [_c2pair(z) for z in result.vector],
            "residual": result.residual * rescale,
            "degenerate": result.degenerate,
            "rescale": rescale}


def cmd_pspec(args) -> dict:
    a, _ = _load_matrix(args)
    region = ((args.re[0], args.re[1]), (args.im[0], args.im[1]))
    grid = pspec_grid(a, region, args.resolution)
    eps_list = [float(t) for t in args.eps_list.split(",")] if args.eps_list else []
    if args.out_csv:
        write_pspec_csv(grid, args.out_csv)
    if args.out_meta:
        write_pspec_meta(grid, eps_list, args.out_meta)
    out = {"re_range": list(grid.re_range), "im_range": list(grid.im_range),
           "resolution": grid.resolution,
           "sigma0_min": float(np.min(grid.values)),
           "sigma0_max": float(np.max(grid.values))}
    if eps_list:
        out["member_counts"] = {repr(e): int(np.sum(grid.membership(e))) for e in eps_list}
    return out


def cmd_gen(args) -> dict:
    spec = JordanSpec(eigenvalues=tuple(_parse_complex_list(args.eigs)),
                      block_sizes=tuple(int(t) for t in args.blocks.split(",")),
                      kappa_target=args.kappa_target, seed=args.seed)
    if args.n is not None and spec.n != args.n:
        raise InputError(f"block sizes sum to {spec.n}, not the requested n={args.n}")
    gen = jordan_matrix(spec)
    bundle = gen.to_dict()
    if args.out_matrix:
        write_matrix(gen.matrix, args.out_matrix)
    return bundle


def cmd_roots(args) -> dict:
    # descending coefficients with the leading 1 included, e.g. "1,0,-0.25"
    coeffs = _parse_complex_list(args.monic)
    if not coeffs or coeffs[0] != 1:
        raise InputError("--monic expects descending coefficients starting with 1")
    ascending = list(reversed(coeffs[1:]))
    gen = companion_matrix(ascending)
    params = SolverParams(epsilon=args.eps, kappa=args.kappa, m=args.m,
                          p_fail=args.pfail, oracle=_oracle_config(args))
    est, trace = estimate_eigenvalue(gen.matrix, params)
    root = est * gen.scale
    # one root per run: the search is deterministic, rerunning returns the
    # same root; deflation is out of scope
    return {"root": _c2pair(root), "companion_scale": gen.scale,
            "trace": _trace_payload(trace, args.trace)}


def cmd_approx_sqrt(args) -> dict:
    poly = sqrt_product(args.eta, args.eps)
    xs = np.linspace(args.eta, 1.0, args.samples)
    vals = poly(xs)
    errs = np.abs(vals - np.sqrt(xs))
    if args.out_csv:
        with open(args.out_csv, "w") as fh:
            fh.write("x,p,sqrt,error\n")
            for x, v, e in zip(xs, vals, errs):
                fh.write(f"{x!r},{v!r},{np.sqrt(x)!r},{e!r}\n")
    return {"eta": args.eta, "eps": args.eps, "degree": poly.degree,
            "max_error_on_interval": float(np.max(errs)),
            "bounded": bool(poly.bounded)}


def cmd_hmu(args) -> dict:
    a, _ = _load_matrix(args)
    report = verify_Hmu(a, _parse_complex(args.mu), nu=args.nu, eps=args.eps)
    return {"mu": _c2pair(report.mu), "nu": report.nu,
            "alpha_mu": report.alpha_mu,
            "spectral_error": report.spectral_error,
            "sigma_map_error": report.sigma_map_error,
            "poly_degree": report.poly_degree}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nneig",
        description="Eigenvalue estimation for non-normal matrices via "
                    "smallest-singular-value grid search")
    parser.add_argument("--version", action="version", version=f"nneig {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eig", help="estimate one eigenvalue")
    _add_common(p)
    p.add_argument("--region", choices=["disk", "right-half", "real"], default="disk")
    p.set_defaults(fn=cmd_eig, echo=_SOLVER_FLAGS)

    p = sub.add_parser("eig-real", help="estimate an eigenvalue of a real-spectrum matrix")
    _add_common(p)
    p.set_defaults(fn=cmd_eig_real, echo=_SOLVER_FLAGS)

    p = sub.add_parser("region", help="decide whether an eigenvalue exists in a region")
    _add_common(p)
    p.add_argument("--region", choices=["disk", "right-half", "real"],
                   default="right-half")
    p.set_defaults(fn=cmd_region, echo=_SOLVER_FLAGS)

    p = sub.add_parser("extreme", help="smallest-modulus (or largest with --largest) eigenvalue")
    _add_common(p)
    p.add_argument("--c", type=float, default=0.9, help="circle-cover constant in (0,1)")
    p.add_argument("--largest", action="store_true",
                   help="search the inverse for the largest-modulus eigenvalue")
    p.set_defaults(fn=cmd_extreme, echo=_SOLVER_FLAGS + ["c", "largest"])

    p = sub.add_parser("gap", help="spectral gap via a second pass on the shifted matrix")
    _add_common(p)
    p.add_argument("--c", type=float, default=0.9, help="circle-cover constant in (0,1)")
    p.set_defaults(fn=cmd_gap, echo=_SOLVER_FLAGS + ["c"])

    p = sub.add_parser("eigvec", help="eigenvector from an eigenvalue estimate")
    _add_common(p, with_solver=False)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--lambda", dest="lam", required=True,
                   help="eigenvalue estimate, e.g. '0.5+0.25j'")
    p.add_argument("--gap-bound", dest="gap_bound", type=float, required=True,
                   help="lower bound on the distance to the rest of the spectrum")
    p.add_argument("--eps0", type=float, default=None,
                   help="known error of the estimate (must be < gap-bound/2)")
    p.add_argument("--normalize", action="store_true")
    p.set_defaults(fn=cmd_eigvec, echo=["infile", "lam", "gap_bound", "eps0", "normalize"])

    p = sub.add_parser("pspec", help="sigma0 level-set grid")
    _add_common(p, with_solver=False)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--re", type=float, nargs=2, default=[-1.0, 1.0], metavar=("LO", "HI"))
    p.add_argument("--im", type=float, nargs=2, default=[-1.0, 1.0], metavar=("LO", "HI"))
    p.add_argument("--resolution", type=int, default=100)
    p.add_argument("--eps-list", dest="eps_list", default="",
                   help="comma-separated thresholds for membership counts")
    p.add_argument("--out-csv", dest="out_csv", default=None)
    p.add_argument("--out-meta", dest="out_meta", default=None)
    p.set_defaults(fn=cmd_pspec,
                   echo=["infile", "re", "im", "resolution", "eps_list"])

    p = sub.add_parser("gen", help="generate a test matrix with known Jordan structure")
    _add_common(p, with_solver=False)
    p.add_argument("--eigs", required=True, help="comma-separated block eigenvalues")
    p.add_argument("--blocks", required=True, help="comma-separated block sizes")
    p.add_argument("--kappa-target", dest="kappa_target", type=float, default=1.0)
    p.add_argument("--n", type=int, default=None, help="cross-check the total dimension")
    p.add_argument("--out-matrix", dest="out_matrix", default=None,
                   help="also write the bare matrix to this path")
    p.set_defaults(fn=cmd_gen,
                   echo=["eigs", "blocks", "kappa_target", "n", "seed"])

    p = sub.add_parser("roots", help="one root of a monic polynomial via its companion matrix")
    _add_common(p, with_solver=False)
    p.add_argument("--monic", required=True,
                   help="descending coefficients with leading 1, e.g. '1,0,-0.25'")
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--kappa", type=float, default=1.0)
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--pfail", type=float, default=0.0)
    p.add_argument("--oracle", choices=["exact", "noisy"], default="exact")
    p.add_argument("--oracle-eps", dest="oracle_eps", type=float, default=None)
    p.set_defaults(fn=cmd_roots,
                   echo=["monic", "eps", "kappa", "m", "pfail", "oracle", "seed"])

    p = sub.add_parser("approx-sqrt", help="bounded sqrt approximant error table")
    _add_common(p, with_solver=False)
    p.add_argument("--eta", type=float, required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--samples", type=int, default=1024)
    p.add_argument("--out-csv", dest="out_csv", default=None)
    p.set_defaults(fn=cmd_approx_sqrt, echo=["eta", "eps", "samples"])

    p = sub.add_parser("hmu", help="spectral check of the Hermitianized shifted operator")
    _add_common(p, with_solver=False)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--mu", required=True)
    p.add_argument("--nu", type=float, default=0.01)
    p.add_argument("--eps", type=float, default=1e-3)
    p.add_argument("--normalize", action="store_true")
    p.set_defaults(fn=cmd_hmu, echo=["infile", "mu", "nu", "eps", "normalize"])

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        result = args.fn(args)
    except NneigError as exc:
        _emit({"error": {"category": exc.category, "message": str(exc)}},
              getattr(args, "out", None))
        return exc.exit_code
    payload = {"command": args.command,
               "config": _config_echo(args, args.echo),
               "result": result}
    _emit(payload, args.out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
