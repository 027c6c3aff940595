"""Command-line front end: figure reproduction, acceptance suites, and thin
verbs over the samplers, form factor, geodesics and FS estimators.

Every run writes a manifest (seed, config snapshot, input hash, checksums of
each output) next to its CSVs. Identical (config, seed) reproduce identical
CSVs regardless of --threads. Exit codes: 0 ok, 1 acceptance failure,
2 usage/config error.
"""

from __future__ import annotations

import argparse
import configparser
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import acceptance
from .ensembles import EnsembleSpec, FamilySpec, Tridiagonal, sample
from .figures import run_figure
from .geodesics import (GeodesicConstants, gue_conserved_residual,
                        gue_geodesic_phi, gue_geodesic_r, intbreak_geodesic)
from .geometry import FS_MC_KINDS, fs_mc_2x2, qmt_mc
from .output import RunManifest, write_csv
from .prng import stream
from .spectra import sff, sff_time_grid

DEFAULT_OUT = "rmtgeom-out"
ENV_OUT = "RMTGEOM_OUT_DIR"

QMT_CSV_HEADER = ["r", "phi", "grr_mean", "grr_se", "gpp_mean", "gpp_se",
                  "grp_mean", "grp_se", "M", "rejected"]


class ConfigError(Exception):
    pass


def _load_config(path):
    """Flat key-value config with sections; [run] holds the global defaults."""
    cfg = {"seed": None, "threads": None, "out_dir": None, "paper_scale": None}
    if path is None:
        return cfg
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise ConfigError(f"config file not found: {path}")
    if parser.has_section("run"):
        sec = parser["run"]
        try:
            if "seed" in sec:
                cfg["seed"] = sec.getint("seed")
            if "threads" in sec:
                cfg["threads"] = sec.getint("threads")
            if "paper_scale" in sec:
                cfg["paper_scale"] = sec.getboolean("paper_scale")
        except ValueError as err:
            raise ConfigError(f"config field parse error in [run]: {err}") from err
        cfg["out_dir"] = sec.get("out_dir", None)
    return cfg


def _resolve(args):
    cfg = _load_config(args.config)
    seed = args.seed if args.seed is not None else (cfg["seed"] or 0)
    threads = args.threads if args.threads is not None else (cfg["threads"] or 1)
    out_dir = args.out_dir or cfg["out_dir"] or os.environ.get(ENV_OUT, DEFAULT_OUT)
    paper = args.paper_scale or bool(cfg["paper_scale"])
    Path(out_dir).mkdir(parents=True, exist_ok=True)
    return seed, threads, Path(out_dir), paper


def _manifest(command, out_dir, seed, extra, paths):
    man = RunManifest(command=command, config=extra, master_seed=seed)
    for p in paths:
        man.add_output(p)
    man.write(out_dir)


def cmd_figure(args) -> int:
    seed, threads, out_dir, paper = _resolve(args)
    overrides = {}
    if args.dim is not None:
        overrides["N"] = args.dim
    if args.realizations is not None:
        overrides["M"] = args.realizations
    paths = run_figure(args.id, out_dir, seed=seed, paper_scale=paper,
                       threads=threads, **overrides)
    _manifest(f"figure {args.id}", out_dir, seed,
              {"paper_scale": paper, "threads": threads, **overrides},
              paths)
    print(f"{args.id}: wrote {len(paths)} file(s) to {out_dir}")
    return 0


def cmd_accept(args) -> int:
    _, threads, out_dir, _ = _resolve(args)
    cfg = _load_config(args.config)
    # acceptance uses its frozen per-criterion seeds unless one is forced
    seed = args.seed if args.seed is not None else cfg["seed"]
    suites = [args.suite] if args.suite else sorted(acceptance.SUITES)
    overall = True
    for suite in suites:
        results = acceptance.run_suite(suite, seed=seed, threads=threads)
        report = acceptance.report_as_dict(suite, results)
        path = out_dir / f"accept_{suite}.json"
        path.write_text(json.dumps(report, indent=2) + "\n")
        for res in results:
            status = "PASS" if res.passed else "FAIL"
            print(f"[{status}] criterion {res.cid} {res.name} "
                  f"({res.runtime_s:.1f}s)")
            for c in res.checks:
                if not c.passed:
                    print(f"    FAIL {c.name}: observed {c.observed:.6g}, "
                          f"target {c.target:.6g}, tol {c.tolerance:.3g}"
                          + (f"  [{c.note}]" if c.note else ""))
        overall = overall and report["pass"]
    return 0 if overall else 1


def _build_spec(kind, dim, variance, beta, eta):
    mapping = {"gue": "GUE", "diagonal": "DiagonalGaussian",
               "tridiag-beta": "TridiagonalBeta", "eta2x2": "InvariantEta2x2"}
    return EnsembleSpec(mapping[kind], dim, variance=variance,
                        dyson_beta=beta, eta=eta)


def cmd_sample(args) -> int:
    seed, _, out_dir, _ = _resolve(args)
    spec = _build_spec(args.ensemble, args.dim, args.variance, args.beta, args.eta)
    H = sample(spec, stream(seed, args.realization))
    dense = H.to_dense() if isinstance(H, Tridiagonal) else H
    rows = [(i, j, np.real(dense[i, j]), np.imag(dense[i, j]))
            for i in range(args.dim) for j in range(args.dim)]
    path = write_csv(out_dir / f"sample_{args.ensemble}.csv",
                     ["row", "col", "re", "im"], rows)
    _manifest("sample", out_dir, seed,
              {"ensemble": args.ensemble, "dim": args.dim,
               "realization": args.realization}, [path])
    print(f"wrote {path}")
    return 0


def cmd_sff(args) -> int:
    seed, _, out_dir, _ = _resolve(args)
    t = sff_time_grid(args.t_min, args.t_max, args.t_num)
    gue = EnsembleSpec("GUE", args.dim, variance=args.variance)
    spec = FamilySpec(gue, gue, None, r=args.r) if args.r > 0 else gue
    series = sff(spec, t, args.realizations, master_seed=seed)
    path = write_csv(out_dir / "sff.csv", ["t", "R_mean", "R_stderr", "M"],
                     zip(series.t, series.mean, series.stderr,
                         [series.realizations] * len(series.t)))
    _manifest("sff", out_dir, seed,
              {"dim": args.dim, "r": args.r, "M": args.realizations}, [path])
    print(f"wrote {path}")
    return 0


def cmd_geodesic(args) -> int:
    seed, _, out_dir, _ = _resolve(args)
    if args.family == "intbreak":
        # caption convention: --K quotes the conserved squared speed
        K = math.sqrt(args.K)
        traj = intbreak_geodesic(args.theta0, 0.0, K, args.L, args.branch,
                                 args.lam_max)
        rows = zip(traj.lam, traj.theta, traj.r, traj.phi,
                   traj.L_residual, traj.K_residual)
        path = write_csv(out_dir / "geodesic_intbreak.csv",
                         ["lambda", "theta", "r", "phi", "L_residual",
                          "K_residual"], rows)
        print(f"wrote {path} (termination: {traj.termination})")
    else:
        c = GeodesicConstants(K=args.K, L=args.L, A=args.A)
        from .geodesics import gue_divergence_lambda
        lam_hi = min(args.lam_max, 0.999 * gue_divergence_lambda(
            c, args.r0, args.branch))
        lam = np.linspace(0.0, lam_hi, 400)
        r = gue_geodesic_r(c, args.r0, args.branch, lam)
        phi = gue_geodesic_phi(c, args.r0, args.branch, lam)
        l_res, k_res = gue_conserved_residual(c, args.r0, args.branch, lam)
        theta = np.arctan(1.0 / r)
        path = write_csv(out_dir / "geodesic_gue.csv",
                         ["lambda", "theta", "r", "phi", "L_residual",
                          "K_residual"],
                         zip(lam, theta, r, phi, l_res, k_res))
        print(f"wrote {path}")
    _manifest("geodesic", out_dir, seed,
              {"family": args.family, "theta0": args.theta0, "K": args.K,
               "L": args.L, "branch": args.branch, "lam_max": args.lam_max,
               "r0": args.r0}, [path])
    return 0


def cmd_fs(args) -> int:
    seed, threads, out_dir, _ = _resolve(args)
    fam = args.family
    if fam in ("gue", "intbreak", "tridiag"):
        N = args.dim
        if fam == "gue":
            g = EnsembleSpec("GUE", N)
            h0, hp = g, g
        elif fam == "intbreak":
            h0 = EnsembleSpec("DiagonalGaussian", N)
            hp = EnsembleSpec("GUE", N)
        else:
            h0 = EnsembleSpec("TridiagonalBeta", N, dyson_beta=args.gamma)
            hp = EnsembleSpec("TridiagonalBeta", N, dyson_beta=args.beta)
        est = qmt_mc(h0, hp, hp, args.r, args.phi, args.realizations,
                     master_seed=seed, threads=threads)
        rows = [(args.r, args.phi, est.g_rr[0], est.g_rr[1],
                 est.g_phiphi[0], est.g_phiphi[1], est.g_rphi[0],
                 est.g_rphi[1], est.realizations, est.rejected_degenerate)]
        path = write_csv(out_dir / f"fs_{fam}.csv", QMT_CSV_HEADER, rows)
    else:
        kind = {"eta": "InvariantEta", "haar1": "HaarBetaCase1",
                "haar2": "HaarBetaCase2", "tridiag2x2": "TridiagBeta"}[fam]
        params = {"eta": args.eta} if kind == "InvariantEta" \
            else {"beta": args.beta}
        mean, se = fs_mc_2x2(kind, params, args.r, args.realizations,
                             master_seed=seed)
        path = write_csv(out_dir / f"fs_{fam}.csv",
                         ["r", "grr_mean", "grr_se", "M"],
                         [(args.r, mean, se, args.realizations)])
    _manifest("fs", out_dir, seed,
              {"family": fam, "dim": args.dim, "r": args.r,
               "M": args.realizations, "threads": threads}, [path])
    print(f"wrote {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="rmtgeom",
        description="Random-matrix state-space geometry toolkit")
    p.add_argument("--seed", type=int, default=None,
                   help="master seed (recorded in every manifest)")
    p.add_argument("--threads", type=int, default=None,
                   help="worker threads for realization loops")
    p.add_argument("--out-dir", default=None,
                   help=f"output directory (env {ENV_OUT}, default {DEFAULT_OUT})")
    p.add_argument("--paper-scale", action="store_true",
                   help="caption-faithful sizes instead of desk scale")
    p.add_argument("--config", default=None,
                   help="INI config file; [run] section holds defaults")
    sub = p.add_subparsers(dest="command", required=True)

    f = sub.add_parser("figure", help="reproduce one reference figure as CSV")
    f.add_argument("id", choices=[f"fig{i}" for i in range(1, 13)])
    f.add_argument("--dim", type=int, default=None, help="override N")
    f.add_argument("--realizations", type=int, default=None, help="override M")
    f.set_defaults(fn=cmd_figure)

    a = sub.add_parser("accept", help="run acceptance suites, write JSON reports")
    a.add_argument("suite", nargs="?", choices=sorted(acceptance.SUITES),
                   default=None)
    a.set_defaults(fn=cmd_accept)

    s = sub.add_parser("sample", help="dump one ensemble realization as CSV")
    s.add_argument("--ensemble", required=True,
                   choices=["gue", "diagonal", "tridiag-beta", "eta2x2"])
    s.add_argument("--dim", type=int, required=True)
    s.add_argument("--variance", type=float, default=None)
    s.add_argument("--beta", type=float, default=None)
    s.add_argument("--eta", type=float, default=None)
    s.add_argument("--realization", type=int, default=0)
    s.set_defaults(fn=cmd_sample)

    q = sub.add_parser("sff", help="spectral form factor of a GUE (family)")
    q.add_argument("--dim", type=int, required=True)
    q.add_argument("--r", type=float, default=0.0,
                   help="coupling of H0 + r P (0: single GUE)")
    q.add_argument("--variance", type=float, default=None)
    q.add_argument("--realizations", type=int, default=100)
    q.add_argument("--t-min", type=float, default=0.1)
    q.add_argument("--t-max", type=float, default=1000.0)
    q.add_argument("--t-num", type=int, default=120)
    q.set_defaults(fn=cmd_sff)

    geo = sub.add_parser("geodesic", help="geodesic trajectory CSV")
    geo.add_argument("--family", choices=["gue", "intbreak"], required=True)
    geo.add_argument("--theta0", type=float, default=math.pi / 4)
    geo.add_argument("--K", type=float, default=0.1,
                     help="intbreak: conserved squared speed (caption "
                          "convention); gue: speed constant")
    geo.add_argument("--L", type=float, default=0.1)
    geo.add_argument("--A", type=float, default=1.0)
    geo.add_argument("--r0", type=float, default=1.0)
    geo.add_argument("--branch", choices=["growing", "decaying"],
                     default="decaying")
    geo.add_argument("--lam-max", type=float, default=80.0)
    geo.set_defaults(fn=cmd_geodesic)

    fs = sub.add_parser("fs", help="fidelity-susceptibility / QMT estimates")
    fs.add_argument("--family", required=True,
                    choices=["gue", "intbreak", "tridiag", "tridiag2x2",
                             "eta", "haar1", "haar2"])
    fs.add_argument("--dim", type=int, default=2)
    fs.add_argument("--r", type=float, required=True)
    fs.add_argument("--phi", type=float, default=math.pi / 7)
    fs.add_argument("--realizations", type=int, default=1000)
    fs.add_argument("--beta", type=float, default=2.0)
    fs.add_argument("--gamma", type=float, default=0.5)
    fs.add_argument("--eta", type=float, default=0.5)
    fs.set_defaults(fn=cmd_fs)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        return 2 if err.code not in (0,) else 0
    try:
        return args.fn(args)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 2
    except (ValueError, KeyError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
