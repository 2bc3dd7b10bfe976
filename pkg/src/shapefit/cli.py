"""Command-line front end.

Subcommands: approximate | verify | negative | kernels | list.  Outputs are
deterministic CSV/JSON artifacts (17 significant digits); each report path
can also render a matplotlib figure next to the delimited output.

Exit codes: 0 pass, 1 invariant failure (report still written), 2 validation
failure, 3 numerical failure.  SHAPEFIT_THREADS caps sweep parallelism.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import negatives, registry
from .core import (ConstraintSet, SignPattern, SpecTuple, check_membership,
                   rate_weight, validate_spec)
from .lporacle import LPNumericalError, min_error_constrained
from .minimax import RemezError
from .polykernels import kernel_ratio_range
from .smoothness import modulus_value
from .splinebuild import (BlendError, KnotDensityError, KnotSequence,
                          build_copositive_spline, build_intertwining_spline,
                          error_table)

EXIT_OK, EXIT_INVARIANT, EXIT_VALIDATION, EXIT_NUMERIC = 0, 1, 2, 3


class ConfigError(ValueError):
    pass


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return f"{v:.17g}"
    return str(v)


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])
    return path


def _threads():
    try:
        return max(1, int(os.environ.get("SHAPEFIT_THREADS", "1")))
    except ValueError:
        return 1


def load_config(path):
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except OSError as e:
        raise ConfigError(f"cannot read config: {e}") from None
    except json.JSONDecodeError as e:
        raise ConfigError(f"config is not valid JSON: {e}") from None
    if "function" not in cfg or "spec" not in cfg:
        raise ConfigError("config needs 'function' and 'spec' entries")
    try:
        f = registry.make(cfg["function"])
    except KeyError as e:
        raise ConfigError(str(e)) from None
    try:
        Y = SignPattern(tuple(cfg.get("Y", ())))
        A = ConstraintSet(tuple((float(a), int(m)) for a, m in cfg.get("A", ())))
    except ValueError as e:
        raise ConfigError(f"bad Y/A: {e}") from None
    s = cfg["spec"]
    spec = SpecTuple(s.get("family", "intertwining"), int(s["r"]), int(s["k"]),
                     int(s["m1"]), None if s.get("m2") is None else int(s["m2"]),
                     int(s["m3"]))
    ok, reason = validate_spec(spec)
    if not ok:
        raise ConfigError(f"spec rejected: {reason}")
    knots = KnotSequence(cfg["knots"]) if "knots" in cfg else None
    n = cfg.get("n")
    return {
        "f": f, "Y": Y, "A": A, "spec": spec, "knots": knots,
        "n": None if n is None else int(n),
        "grid": int(cfg.get("grid", 2048)),
        "seed": int(cfg.get("seed", 0)),
    }


def _build(cfg):
    builder = (build_intertwining_spline
               if cfg["spec"].family in ("intertwining", "onesided")
               else build_copositive_spline)
    return builder(cfg["f"], cfg["Y"], cfg["A"], cfg["spec"],
                   knots=cfg["knots"], n=cfg["n"])


def cmd_approximate(args):
    cfg = load_config(args.config)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    try:
        report = _build(cfg)
    except (KnotDensityError, ValueError) as e:
        print(json.dumps({"error": "validation", "reason": str(e),
                          "required_n": getattr(e, "required_n", None)}))
        return EXIT_VALIDATION
    except (BlendError, RemezError, LPNumericalError, ArithmeticError) as e:
        print(json.dumps({"error": "numerical", "reason": str(e)}))
        return EXIT_NUMERIC

    S = report.spline
    (out / "spline.json").write_text(S.to_json())
    rows = error_table(report, cfg["f"])
    _write_csv(out / "errors.csv",
               ["i", "z_i", "z_im1", "err", "bound", "ratio"],
               [[r["i"], r["z_i"], r["z_im1"], r["err"], r["bound"], r["ratio"]]
                for r in rows])
    xs = np.linspace(-1.0, 1.0, 4 * cfg["grid"] + 1)
    fx = cfg["f"].eval(0, xs)
    sx = S.eval(xs)
    if args.emit_plot_data:
        bound = np.interp(xs, [0.5 * (r["z_i"] + r["z_im1"]) for r in rows[::-1]],
                          [r["bound"] for r in rows[::-1]])
        _write_csv(out / "plotdata.csv", ["x", "f", "S", "bound"],
                   list(zip(xs, fx, sx, bound)))
    if args.figures:
        from . import plots
        plots.approximation_figure(
            out / "approximate.png", xs, fx, sx, cfg["Y"].points,
            cfg["A"].points, f"{cfg['spec'].family} spline, n={report.n}")
    print(json.dumps({"n": report.n, "order": S.order, "blends": len(report.blends),
                      "out": str(out)}))
    return EXIT_OK


def cmd_verify(args):
    cfg = load_config(args.config)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    ns = [int(v) for v in args.n.split(",")] if args.n else [cfg["n"] or 64]
    f, Y, A, spec = cfg["f"], cfg["Y"], cfg["A"], cfg["spec"]

    header = ["n", "sign_residual", "hermite_rel", "max_interval_ratio",
              "profile_ratio", "membership_ok"]
    pointwise_targets = []
    if args.pointwise:
        m1, m2, m3 = spec.orders()
        if m1 is not None and m1 >= 0:
            pointwise_targets += [(a, m1) for a in A.points if abs(a) < 1]
        if m2 is not None and m2 >= 0:
            pointwise_targets += [(y, m2) for y in Y.points]
        pointwise_targets += [(1.0, m3), (-1.0, m3)]
        header += [f"pointwise@{pt:g}" for pt, _ in pointwise_targets]

    rows_out, ratios, ok_all = [], [], True
    for n in ns:
        try:
            report = _build({**cfg, "n": n, "knots": None})
        except (KnotDensityError, ValueError) as e:
            print(json.dumps({"error": "validation", "n": n, "reason": str(e)}))
            return EXIT_VALIDATION
        except (BlendError, RemezError, LPNumericalError, ArithmeticError) as e:
            print(json.dumps({"error": "numerical", "n": n, "reason": str(e)}))
            return EXIT_NUMERIC
        S = report.spline
        om = _omega_interp(f, spec, n)
        mem = check_membership(S, f, Y, A, spec, grid_density=cfg["grid"],
                               n=n, omega_fn=om, profile=True)
        tab = error_table(report, f)
        max_ratio = max(r["ratio"] for r in tab)
        ratios.append(max_ratio)
        ok_all = ok_all and mem.ok
        row = [n, mem.sign_residual, mem.max_hermite_rel(), max_ratio,
               mem.profile_ratio, mem.ok]
        for pt, m in pointwise_targets:
            row.append(_pointwise_ratio(S, f, spec, n, pt, m, om))
        rows_out.append(row)

    stable = all(max(a, b) <= 2.0 * min(a, b) + 1e-12 for a, b in zip(ratios, ratios[1:])) \
        if len(ratios) > 1 else True
    _write_csv(out / "verify.csv", header, rows_out)
    if args.figures:
        from . import plots
        plots.verify_figure(out / "verify.png", ns, ratios,
                            f"{spec.family} ratio stability: {f.name}")
    print(json.dumps({"ns": ns, "ratios": ratios, "membership_ok": ok_all,
                      "stable": stable, "out": str(out)}))
    return EXIT_OK if (ok_all and stable) else EXIT_INVARIANT


def _omega_interp(f, spec, n, resolution=(128, 128)):
    """Monotone interpolator of t -> omega_k(f^(r), t) on a logarithmic ladder."""
    ts = np.geomspace(1.0 / n**2 * 0.5, rate_weight(n, 0.0) * 1.01, 16)
    oms = np.array([modulus_value(f.deriv_fn(spec.r), spec.k, float(t),
                                  (-1, 1), resolution) for t in ts])
    oms = np.maximum.accumulate(np.maximum(oms, 0.0))

    def om(t):
        return np.interp(t, ts, oms)

    return om


def _pointwise_ratio(S, f, spec, n, lam, m, om, grid=4097):
    """sup |f-S| / (|x-lam|^(m+1) rho_n^(r-m-1) omega_k(f^(r), rho_n))."""
    xs = np.linspace(-1.0, 1.0, grid)
    xs = xs[np.abs(xs - lam) > 1e-9]
    rho = rate_weight(n, xs)
    denom = np.abs(xs - lam) ** (m + 1) * rho ** (spec.r - m - 1) * om(rho)
    good = denom > 1e-300
    if not good.any():
        return 0.0
    return float(np.max(np.abs(f.eval(0, xs[good]) - S.eval(xs[good])) / denom[good]))


def _negative_pass(family_id, rows):
    """Family-specific divergence criterion; thresholds are artifact choices
    (the claims assert divergence, not rates at a fixed n)."""
    ratios = [r["ratio"] for r in rows]
    if family_id == "lem1":
        return all(r["status"] == "infeasible" for r in rows)
    if family_id in ("tmplem", "tmplemder"):
        xs = [1.0 / (r["param"] + 1.0) for r in rows]
        ys = ratios
        if any(v is None or v <= 0 for v in ys):
            return False
        slope = float(np.polyfit(np.log(xs), np.log(ys), 1)[0])
        return slope >= 0.8
    if family_id == "lemma205":
        return all(r["status"] == "optimal" for r in rows)
    good = [v for v in ratios if v is not None]
    if len(good) < 2:
        return False
    tail = good[-4:]
    return all(a < b for a, b in zip(tail, tail[1:])) and good[-1] > good[0]


def cmd_negative(args):
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    try:
        fam = negatives.family(args.family)
    except KeyError as e:
        print(json.dumps({"error": "validation", "reason": str(e)}))
        return EXIT_VALIDATION
    n = int(args.n.split(",")[0]) if args.n else 8
    sweep = [float(v) for v in args.sweep.split(",")] if args.sweep else list(fam.default_sweep)

    if args.family == "lem1":
        rows = []
        for nn in ([int(v) for v in args.n.split(",")] if args.n else list(range(1, 11))):
            inst = fam.instantiate(fam.default_sweep[0])
            prob = inst.approx_problem(nn, grid_size=args.grid)
            estar, _, cert = min_error_constrained(prob)
            rows.append({"family": "lem1", "n": nn, "param": fam.default_sweep[0],
                         "Estar": estar, "normalizer": 1.0,
                         "ratio": estar, "status": cert.status})
    else:
        from .lporacle import certify_blowup

        workers = _threads()
        if workers > 1:
            def one(p):
                return certify_blowup(args.family, n, [p], grid_size=args.grid)[0]
            with ThreadPoolExecutor(max_workers=workers) as ex:
                rows = list(ex.map(one, sweep))
        else:
            rows = certify_blowup(args.family, n, sweep, grid_size=args.grid)

    _write_csv(out / f"negative_{args.family}.csv",
               ["family", "n", "param", "Estar", "normalizer", "ratio", "status"],
               [[r["family"], r["n"], r["param"], r["Estar"], r["normalizer"],
                 r["ratio"], r["status"]] for r in rows])
    if args.figures:
        from . import plots
        plots.negative_figure(out / f"negative_{args.family}.png",
                              [abs(r["param"] + 1.0) if args.family.startswith("tmplem")
                               else r["param"] for r in rows],
                              [r["ratio"] for r in rows], args.family, fam.param_name)
    passed = _negative_pass(args.family, rows)
    print(json.dumps({"family": args.family, "rows": len(rows), "pass": passed,
                      "out": str(out)}))
    return EXIT_OK if passed else EXIT_INVARIANT


def cmd_kernels(args):
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    ns = [int(v) for v in (args.n or "16").split(",")]
    rows = []
    ok = True
    for n in ns:
        for j in range(1, n):
            lo, hi = kernel_ratio_range(n, j, args.grid)
            good = lo >= 1.0 - 1e-9 and hi <= 4000.0 * (1.0 + 1e-9)
            ok = ok and good
            rows.append({"n": n, "j": j, "min": lo, "max": hi, "ok": good})
    _write_csv(out / "kernels.csv", ["n", "j", "min", "max", "ok"],
               [[r["n"], r["j"], r["min"], r["max"], r["ok"]] for r in rows])
    if args.figures:
        from . import plots
        plots.kernels_figure(out / "kernels.png", rows,
                             "localized kernel ratio vs the two-sided bounds [1, 4000]")
    print(json.dumps({"ns": ns, "rows": len(rows), "pass": ok, "out": str(out)}))
    return EXIT_OK if ok else EXIT_INVARIANT


def cmd_list(args):
    manifest = [{
        "id": fam.id,
        "param": fam.param_name,
        "default_sweep": list(fam.default_sweep),
        "claim": fam.claim,
        "normalizer": fam.normalizer_desc,
        "description": fam.description,
    } for fam in negatives.catalog()]
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "families.json").write_text(json.dumps(manifest, indent=1))
    for fam in manifest:
        print(f"{fam['id']:<14} param={fam['param']:<7} {fam['claim']}")
    print(f"\nregistry functions: {', '.join(registry.names())}")
    return EXIT_OK


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="shapefit",
        description="Shape-preserving approximation with interpolatory "
                    "constraints: builders, verification and LP certification.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, config=True):
        if config:
            p.add_argument("--config", required=True, help="JSON run configuration")
        p.add_argument("--n", help="comma-separated n values")
        p.add_argument("--grid", type=int, default=1024, help="certification grid size")
        p.add_argument("--out", default="out", help="output directory")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--emit-plot-data", action="store_true")
        p.add_argument("--figures", action="store_true",
                       help="render PNG figures next to the CSV output")

    p = sub.add_parser("approximate", help="build a constrained spline, write "
                                           "spline JSON and per-interval error CSV")
    common(p)
    p.set_defaults(fn=cmd_approximate)

    p = sub.add_parser("verify", help="membership residuals and error-functional "
                                      "ratios over an n sweep")
    common(p)
    p.add_argument("--pointwise", action="store_true",
                   help="add pointwise improvement columns near constraint points")
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("negative", help="certify a counterexample family by LP sweep")
    p.add_argument("family")
    p.add_argument("--sweep", help="comma-separated parameter sweep")
    common(p, config=False)
    p.set_defaults(fn=cmd_negative)

    p = sub.add_parser("kernels", help="two-sided localized-kernel bound check")
    common(p, config=False)
    p.set_defaults(fn=cmd_kernels)

    p = sub.add_parser("list", help="list counterexample families and registry functions")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_list)

    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as e:
        print(json.dumps({"error": "validation", "reason": str(e)}))
        return EXIT_VALIDATION
    except LPNumericalError as e:
        print(json.dumps({"error": "numerical", "reason": str(e)}))
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
