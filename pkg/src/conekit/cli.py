"""Command-line front end: every checker and experiment behind a single
``conekit`` entry point with seeded, reproducible JSON output.

Exit codes follow the decision-procedure convention: 0 means the check
ran and passed (or the experiment completed), 2 means it ran and the
finding is negative, and 1 means the run itself failed, in which case a
structured ``{"error": {"kind": ..., "detail": ...}}`` payload is
printed instead of a result.  With ``--out`` the payload is also written
to a file, together with a ``<out>.manifest.json`` sidecar recording the
command, its full configuration, the seed, the library version, and the
wall time, so a run can be reproduced from its artifacts alone.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .cones import Hyperbolicity, Polyhedral, Psd, Veronese, cone_from_json_dict
from .errors import ConekitError, UsageError
from .hyperbolic import (
    derivative_relaxation,
    hyperbolic_eigenvalues,
    lineality_space,
    localize,
    verify_mult3,
)
from .linalg import svec
from .neighborly import (
    builtin_dataset,
    double_vanishing_dimension,
    estimate_growth_constant,
    is_k_neighborly_polyhedral,
    kw_certificate_veronese,
)
from .polynomials import elementary_symmetric, hankel_determinant_polynomial, parse_poly
from .recovery import (
    dt_equivalence_study,
    exact_recovery_trial_lp,
    exact_recovery_trial_sdp,
    gaussian_map_psd,
    most_tc_study,
    summary_csv,
)
from .tangent import (
    _extreme_sampler,
    _gaussian_moment_direction,
    is_k_terracini_dual,
    is_k_terracini_primal,
    terracini_upgrade_check,
)

_SEED_BOUND = 2 ** 62

_CONE_HELP = ("builtin name (psd:d, orthant:d, square-cone, veronese:n:2d, "
              "esym:d:l, hankel-det:d), inline JSON, a JSON file path, "
              "or '-' for stdin")


# ---------------------------------------------------------------------------
# input plumbing


def builtin_cone(name: str):
    """Resolve a builtin cone name like ``psd:3`` or ``esym:4:2``."""
    key = str(name).strip().lower()
    head, _, rest = key.partition(":")
    parts = rest.split(":") if rest else []

    def dims(count):
        if len(parts) != count or any(not p for p in parts):
            raise UsageError(
                f"cone {name!r} needs {count} integer parameter(s)")
        try:
            vals = [int(p) for p in parts]
        except ValueError:
            raise UsageError(f"cone {name!r} has non-integer parameters")
        if any(v < 1 for v in vals):
            raise UsageError(f"cone {name!r} parameters must be positive")
        return vals

    if head == "psd":
        (d,) = dims(1)
        return Psd(d)
    if head == "orthant":
        (d,) = dims(1)
        return Polyhedral(np.eye(d))
    if head == "square-cone":
        if parts:
            raise UsageError("square-cone takes no parameters")
        gens = np.array([[1.0, 1.0, 1.0], [-1.0, 1.0, 1.0],
                         [1.0, -1.0, 1.0], [-1.0, -1.0, 1.0]]) / np.sqrt(3.0)
        return Polyhedral(gens)
    if head == "veronese":
        n, two_d = dims(2)
        return Veronese(n, two_d)
    if head == "esym":
        d, l = dims(2)
        return Hyperbolicity(elementary_symmetric(d, l), np.ones(d),
                             check=False)
    if head == "hankel-det":
        (d,) = dims(1)
        return Hyperbolicity(hankel_determinant_polynomial(d),
                             _gaussian_moment_direction(2 * d - 2),
                             check=False)
    raise UsageError(
        f"unknown builtin cone {name!r}; expected one of psd:d, orthant:d, "
        "square-cone, veronese:n:2d, esym:d:l, hankel-det:d")


_BUILTIN_HEADS = {"psd", "orthant", "square-cone", "veronese", "esym",
                  "hankel-det"}


def _read_source(text: str) -> str:
    """Inline JSON, '-' for stdin, or a file path."""
    s = text.strip()
    if s == "-":
        return sys.stdin.read()
    if s.startswith("[") or s.startswith("{"):
        return s
    try:
        return Path(s).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {text!r}: {exc}")


def _load_json(text: str):
    try:
        return json.loads(_read_source(text))
    except json.JSONDecodeError as exc:
        raise UsageError(f"malformed JSON in {text[:40]!r}: {exc}")


def load_cone(spec: str):
    if spec.strip().split(":")[0].strip().lower() in _BUILTIN_HEADS:
        return builtin_cone(spec)
    data = _load_json(spec)
    if not isinstance(data, dict):
        raise UsageError("cone JSON must be an object with a 'type' field")
    return cone_from_json_dict(data)


def _parse_vector(text: str) -> np.ndarray:
    """Comma-separated floats ('1,1,1') or a JSON array."""
    s = text.strip()
    if s.startswith("["):
        data = _load_json(s)
    else:
        data = [p for p in s.split(",") if p.strip()]
    try:
        v = np.asarray([float(x) for x in data])
    except (TypeError, ValueError):
        raise UsageError(f"cannot parse vector from {text!r}")
    if v.ndim != 1 or v.size == 0:
        raise UsageError(f"cannot parse vector from {text!r}")
    return v


def _as_ray(entry) -> np.ndarray:
    a = np.asarray(entry, dtype=float)
    if a.ndim == 2:
        return svec(a)  # symmetric matrix given entrywise
    if a.ndim != 1:
        raise UsageError("each ray must be a vector or a square matrix")
    return a


def _load_points(text: str) -> np.ndarray:
    s = text.strip()
    if s and not s.startswith(("[", "{", "-")) and not Path(s).exists():
        return builtin_dataset(s)
    data = _load_json(text)
    pts = np.asarray(data, dtype=float)
    if pts.ndim == 1:
        pts = pts[None, :]
    if pts.ndim != 2 or pts.size == 0:
        raise UsageError("points must be a non-empty list of vectors")
    return pts


def _tol_kw(args) -> dict:
    return {} if args.tol is None else {"tol": args.tol}


# ---------------------------------------------------------------------------
# commands


def cmd_terracini(args):
    cone = load_cone(args.cone)
    if args.upgrade is not None:
        if args.rays or args.random is not None:
            raise UsageError("--upgrade does not take --rays or --random")
        report = terracini_upgrade_check(cone, args.upgrade,
                                         samples=args.samples,
                                         seed=args.seed)
        return report, not report["all_pass"]

    if (args.rays is None) == (args.random is None):
        raise UsageError("give exactly one of --rays or --random")
    if args.random is not None:
        if args.random < 1:
            raise UsageError("--random must be positive")
        draw = _extreme_sampler(cone, np.random.default_rng(args.seed))
        rays = [draw() for _ in range(args.random)]
    else:
        data = _load_json(args.rays)
        if not isinstance(data, list) or not data:
            raise UsageError("--rays must be a non-empty JSON list")
        rays = [_as_ray(r) for r in data]

    if args.method == "dual":
        verdict = is_k_terracini_dual(cone, rays, **_tol_kw(args))
    else:
        verdict = is_k_terracini_primal(
            cone, rays, k=args.k,
            check_extreme=not args.skip_extremality_check, **_tol_kw(args))
    return verdict.to_json_dict(), not verdict.passed


def cmd_neighborly(args):
    cone = load_cone(args.cone)
    if not isinstance(cone, Polyhedral):
        raise UsageError("neighborliness scan needs a polyhedral cone")
    verdict = is_k_neighborly_polyhedral(
        cone, args.k, max_subsets=args.max_subsets, sample=args.sample,
        seed=args.seed or 0, jobs=args.jobs, **_tol_kw(args))
    return verdict.to_json_dict(include_witnesses=args.witnesses), \
        not verdict.passed


def _poly_and_vec(args, name, expect_vars):
    vec = getattr(args, name, None)
    if vec is None:
        return None
    v = _parse_vector(vec)
    if v.size != expect_vars:
        raise UsageError(
            f"--{name.replace('_', '-')} has {v.size} entries but the "
            f"polynomial has {expect_vars} variables")
    return v


def cmd_hyperbolic(args):
    p = parse_poly(args.poly)
    e = _poly_and_vec(args, "e", p.num_vars)
    x = _poly_and_vec(args, "x", p.num_vars)
    et = _poly_and_vec(args, "e_tilde", p.num_vars)

    if args.action == "eig":
        spec = hyperbolic_eigenvalues(p, e, x)
        payload = {
            "eigenvalues": [float(t) for t in spec.eigenvalues],
            "rank": spec.rank,
            "mult": spec.mult,
            "imag_residual": spec.imag_residual,
        }
        return payload, False
    if args.action == "localize":
        q, mult = localize(p, x)
        return {"mult": mult, "poly": q.to_json_dict()}, False
    if args.action == "derivative":
        q = derivative_relaxation(p, e, et)
        return {"poly": q.to_json_dict()}, False
    if args.action == "lineality":
        sub = lineality_space(p, e)
        return {"dim": sub.dim, "basis": sub.basis.T.tolist()}, False
    # mult3
    ok = verify_mult3(p, e, e if et is None else et, x)
    return {"passed": bool(ok)}, not ok


def cmd_veronese(args):
    pts = _load_points(args.points)
    if args.action == "certificate":
        coeffs = kw_certificate_veronese(pts, args.d, check=not args.no_check,
                                         seed=args.seed or 0)
        payload = {
            "n": int(pts.shape[1]),
            "two_d": 2 * args.d,
            "num_points": int(pts.shape[0]),
            "coefficients": coeffs.tolist(),
        }
        return payload, False
    if args.action == "growth":
        cert = estimate_growth_constant(pts, d=args.d, n=args.n,
                                        num_samples=args.num_samples,
                                        epsilon=args.epsilon, seed=args.seed)
        return cert.to_json_dict(), False
    # double-vanish
    dim = double_vanishing_dimension(pts, args.n, args.deg)
    return {"dim": int(dim)}, False


def _recover_loop(args, kind):
    rng = np.random.default_rng(args.seed)
    seeds = rng.integers(_SEED_BOUND, size=(args.trials, 3))
    records = []
    for t in range(args.trials):
        map_rng = np.random.default_rng(seeds[t, 0])
        plant_rng = np.random.default_rng(seeds[t, 1])
        if kind == "lp":
            A = map_rng.standard_normal((args.n, args.d))
            support = plant_rng.choice(args.d, size=args.k, replace=False)
            x_star = np.zeros(args.d)
            x_star[support] = plant_rng.exponential(1.0, size=args.k)
            trial = exact_recovery_trial_lp(A, x_star, seed=int(seeds[t, 2]),
                                            **_tol_kw(args))
        else:
            mats = gaussian_map_psd(args.d, args.n, seed=int(seeds[t, 0]))
            G = plant_rng.standard_normal((args.d, args.k))
            trial = exact_recovery_trial_sdp(mats, G @ G.T,
                                             seed=int(seeds[t, 2]),
                                             **_tol_kw(args))
        records.append(trial)

    num_valid = sum(r.valid for r in records)
    num_rec = sum(bool(r.recovered) for r in records)
    num_exact = sum(r.exact_recovery for r in records)
    payload = {
        "kind": f"recover-{kind}",
        "config": {"d": args.d, "n": args.n, "k": args.k,
                   "trials": args.trials, "seed": args.seed},
        "num_valid": int(num_valid),
        "num_recovered": int(num_rec),
        "num_exact_recovery": int(num_exact),
        "exact_recovery_rate": num_exact / args.trials,
    }
    if args.records:
        payload["trials"] = [r.to_json_dict() for r in records]
    return payload, False


def cmd_recover(args):
    if args.action in ("lp", "sdp"):
        return _recover_loop(args, args.action)
    if args.action == "dt-study":
        report = dt_equivalence_study(
            args.d, args.n, args.k, args.trials, args.seed,
            plants=args.plants, face_samples=args.face_samples,
            jobs=args.jobs, **_tol_kw(args))
    else:
        report = most_tc_study(
            args.d, args.n, args.k, args.trials, args.seed,
            plants=args.plants, jobs=args.jobs,
            perturbations=args.perturbations, **_tol_kw(args))
    return report, False


# ---------------------------------------------------------------------------
# parser / entry point


class _Parser(argparse.ArgumentParser):
    """Argparse that reports bad usage through the exit-1 error path
    instead of argparse's own exit code 2 (reserved for negative
    findings)."""

    def error(self, message):
        raise UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="conekit",
                     description="Terracini convexity checkers and "
                                 "recovery experiments.")
    parser.add_argument("--version", action="version",
                        version=f"conekit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, seed="optional"):
        p.add_argument("--tol", type=float, default=None,
                       help="override the default numerical tolerance")
        p.add_argument("--out", default=None,
                       help="also write the payload here, plus a "
                            "<out>.manifest.json sidecar")
        if seed == "required":
            p.add_argument("--seed", type=int, required=True,
                           help="RNG seed (required: stochastic command)")
        elif seed == "optional":
            p.add_argument("--seed", type=int, default=None,
                           help="RNG seed (required for stochastic modes)")

    p = sub.add_parser("terracini",
                       help="tangent-space additivity check on a cone")
    p.add_argument("--cone", required=True, help=_CONE_HELP)
    p.add_argument("--rays", help="JSON list of rays (vectors, or matrices "
                                  "for PSD-type cones); file path or '-'")
    p.add_argument("--random", type=int, default=None, metavar="COUNT",
                   help="draw COUNT random extreme rays instead of --rays")
    p.add_argument("--k", type=int, default=None,
                   help="cap on the collection size (default: all rays)")
    p.add_argument("--method", choices=("primal", "dual"), default="primal")
    p.add_argument("--skip-extremality-check", action="store_true",
                   help="trust the rays to be extreme")
    p.add_argument("--upgrade", type=int, default=None, metavar="K_MAX",
                   help="sampled evidence scan for k = 1..K_MAX instead of "
                        "a single collection")
    p.add_argument("--samples", type=int, default=50,
                   help="samples per k in --upgrade mode")
    common(p)
    p.set_defaults(func=cmd_terracini, _command="terracini")

    p = sub.add_parser("neighborly",
                       help="k-neighborliness scan of a polyhedral cone")
    p.add_argument("--cone", required=True, help=_CONE_HELP)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--max-subsets", type=int, default=1_000_000)
    p.add_argument("--sample", type=int, default=None,
                   help="spot-check this many random subsets when the "
                        "exhaustive count exceeds --max-subsets")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--witnesses", action="store_true",
                   help="include exposing functionals in the output")
    common(p)
    p.set_defaults(func=cmd_neighborly, _command="neighborly")

    p = sub.add_parser("hyperbolic",
                       help="hyperbolic-polynomial operations")
    p.add_argument("action",
                   choices=("eig", "localize", "derivative", "lineality",
                            "mult3"))
    p.add_argument("--poly", required=True,
                   help="polynomial text, e.g. 'x1 x2 x3' or "
                        "'x1^2 - x2^2 - x3^2'")
    p.add_argument("--e", help="hyperbolicity direction (comma-separated "
                               "or JSON)")
    p.add_argument("--e-tilde", dest="e_tilde",
                   help="relaxation direction (default: --e)")
    p.add_argument("--x", help="evaluation point")
    common(p, seed="none")
    p.set_defaults(func=cmd_hyperbolic, _command="hyperbolic")

    p = sub.add_parser("veronese",
                       help="moment-cone certificates and dimensions")
    p.add_argument("action", choices=("certificate", "growth",
                                      "double-vanish"))
    p.add_argument("--points", required=True,
                   help="dataset name (e.g. blekherman-s), JSON rows, "
                        "file path, or '-'")
    p.add_argument("--d", type=int, default=None,
                   help="half-degree d (forms have degree 2d)")
    p.add_argument("--n", type=int, default=None, help="ambient dimension")
    p.add_argument("--deg", type=int, default=None,
                   help="full degree 2d (double-vanish)")
    p.add_argument("--num-samples", type=int, default=200)
    p.add_argument("--epsilon", type=float, default=0.5)
    p.add_argument("--no-check", action="store_true",
                   help="skip the certificate self-check")
    common(p)
    p.set_defaults(func=cmd_veronese, _command="veronese")

    p = sub.add_parser("recover",
                       help="planted LP/SDP recovery experiments")
    p.add_argument("action", choices=("lp", "sdp", "dt-study",
                                      "most-tc-study"))
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True,
                   help="sparsity (lp) or planted rank (sdp)")
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--plants", type=int, default=20,
                   help="planted points per map (studies)")
    p.add_argument("--face-samples", type=int, default=None,
                   help="sampled faces per map when exhaustion is too "
                        "large (dt-study)")
    p.add_argument("--perturbations", type=int, default=2,
                   help="perturbed map copies (most-tc-study)")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--records", action="store_true",
                   help="include per-trial records (lp/sdp)")
    p.add_argument("--format", choices=("json", "csv"), default="json",
                   help="csv prints the per-map summary table (studies)")
    common(p, seed="required")
    p.set_defaults(func=cmd_recover, _command="recover")

    return parser


def _validate(args):
    if args._command == "hyperbolic":
        need = {"eig": ("e", "x"), "localize": ("x",), "derivative": ("e",),
                "lineality": ("e",), "mult3": ("e", "x")}[args.action]
        for name in need:
            if getattr(args, name) is None:
                raise UsageError(
                    f"hyperbolic {args.action} requires --{name.replace('_', '-')}")
    if args._command == "veronese":
        need = {"certificate": ("d",), "growth": (),
                "double-vanish": ("n", "deg")}[args.action]
        for name in need:
            if getattr(args, name) is None:
                raise UsageError(f"veronese {args.action} requires --{name}")
    if args._command == "recover" and args.format == "csv" \
            and args.action in ("lp", "sdp"):
        raise UsageError("--format csv is only available for the studies")
    stochastic = (
        (args._command == "terracini"
         and (args.random is not None or args.upgrade is not None))
        or (args._command == "neighborly" and args.sample is not None)
        or (args._command == "veronese" and args.action == "growth"))
    if stochastic and args.seed is None:
        raise UsageError("--seed is required for stochastic modes")


def _jsonable(obj):
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON-serializable: {type(obj).__name__}")


def _render(payload, fmt: str) -> str:
    if fmt == "csv":
        return summary_csv(payload)
    return json.dumps(payload, indent=2, sort_keys=True,
                      default=_jsonable) + "\n"


def _command_path(args) -> str:
    action = getattr(args, "action", None)
    return args._command + (f" {action}" if action else "")


def _write_outputs(args, text: str, wall: float):
    sys.stdout.write(text)
    if not getattr(args, "out", None):
        return
    out = Path(args.out)
    out.write_text(text)
    config = {k: v for k, v in sorted(vars(args).items())
              if not k.startswith("_") and k not in ("func", "out")}
    manifest = {
        "command": _command_path(args),
        "config": config,
        "seed": config.get("seed"),
        "version": __version__,
        "wall_time_s": round(wall, 3),
        "outputs": [str(out.resolve())],
    }
    Path(str(out) + ".manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def main(argv=None) -> int:
    parser = _build_parser()
    start = time.perf_counter()
    try:
        args = parser.parse_args(argv)
        _validate(args)
        payload, negative = args.func(args)
        text = _render(payload, getattr(args, "format", "json"))
        _write_outputs(args, text, time.perf_counter() - start)
    except ConekitError as exc:
        detail = str(exc)
        sys.stdout.write(json.dumps(
            {"error": {"kind": exc.kind, "detail": detail}},
            indent=2, sort_keys=True) + "\n")
        return 1
    return 2 if negative else 0


if __name__ == "__main__":
    sys.exit(main())
