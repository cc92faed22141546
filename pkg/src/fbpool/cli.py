"""Command line interface: solve | slice | energy | fb | regdist | verify | radial.

All outputs are deterministic for a fixed --seed; JSON is emitted with sorted
keys so reports diff cleanly.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import boundary, energy, freeboundary, geometry, harness, minimize2d, regdist, slice1d


def _json_print(obj) -> None:
    print(json.dumps(obj, sort_keys=True, indent=2))


def _parse_rect(text: str) -> geometry.Rect:
    x0, x1, y0, y1 = (float(t) for t in text.split(","))
    return geometry.Rect(x0, x1, y0, y1)


def cmd_slice(args) -> int:
    sol = slice1d.slice_minimize(args.f)
    out = {"f": sol.f, "a": sol.a, "b": sol.b, "energy": sol.energy}
    if args.oracle_n:
        out["oracle_energy"] = slice1d.slice_oracle(args.f, args.oracle_n).energy
    _json_print(out)
    return 0


def cmd_energy(args) -> int:
    field = geometry.load_field(args.field)
    sub = _parse_rect(args.sub) if args.sub else None
    weights = boundary.Weights.constant(args.qplus, args.qminus)
    rep = energy.energy_J(field, weights, sub, args.ztol)
    _json_print(rep.to_dict())
    return 0


def cmd_solve(args) -> int:
    p = boundary.ProfileParams(N=args.N, alpha=args.alpha)
    grid = minimize2d.default_grid(args.N, hy=args.hy, hx_max=args.hx_max)
    eps = (
        tuple(float(t) for t in args.eps_schedule.split(","))
        if args.eps_schedule
        else minimize2d.default_eps_schedule(grid.hy)
    )
    cfg = minimize2d.SolveConfig(
        profile=p,
        grid=grid,
        eps_schedule=eps,
        max_iter=args.max_iter,
        rel_tol=args.tol,
        seed=args.seed,
        weights=boundary.Weights.constant(args.qplus, args.qminus),
    )
    result = minimize2d.solve(cfg)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    geometry.save_field(result.u, out / "field.txt")
    (out / "energy.json").write_text(
        json.dumps(result.final_energy.to_dict(), sort_keys=True, indent=2)
    )
    with open(out / "energy_history.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["iteration", "smoothed_energy"])
        for k, e in enumerate(result.energy_history):
            w.writerow([k, repr(e)])
    print(f"converged={result.converged} total={result.final_energy.total!r}")
    return 0


def cmd_fb(args) -> int:
    field = geometry.load_field(args.field)
    fb = freeboundary.classify_points(
        freeboundary.extract_boundaries(field, args.ztol), args.rcls
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    names = {freeboundary.ONE_PHASE: "one_phase", freeboundary.TWO_PHASE: "two_phase"}
    for sign, fname in ((+1, "gamma_plus.csv"), (-1, "gamma_minus.csv")):
        pts = fb.vertices(sign)
        labs = fb.labels(sign)
        with open(out / fname, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["x", "y", "label"])
            for (x, y), lab in zip(pts, labs):
                w.writerow([repr(float(x)), repr(float(y)), names[int(lab)]])
    with open(out / "branch_points.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "y"])
        for x, y in fb.branch_points:
            w.writerow([repr(float(x)), repr(float(y))])
    pools = freeboundary.find_pools(field, args.ztol)
    (out / "pools.json").write_text(
        json.dumps([p.to_dict() for p in pools], sort_keys=True, indent=2)
    )
    print(f"pools={len(pools)} branch_points={fb.branch_points.shape[0]}")
    return 0


def cmd_regdist(args) -> int:
    f_plus = regdist.graph_from_spec(json.loads(args.graph_plus))
    f_minus = regdist.graph_from_spec(json.loads(args.graph_minus))
    qv = float(args.q)

    def q(x, y):
        return np.full_like(np.asarray(x, dtype=float), qv)

    spec_p = regdist.GraphMeasureSpec(f=f_plus, q=q, R=args.R)
    spec_m = regdist.GraphMeasureSpec(f=f_minus, q=q, R=args.R)
    half = args.half_width
    n = int(round(2 * half / args.hy))
    grid = geometry.Grid(geometry.Rect(-half, half, -half, half), n, n)
    field = regdist.build_almost_minimizer(spec_p, spec_m, grid)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    geometry.save_field(field, out / "field.txt")
    growth = regdist.growth_checks(spec_p, sample_n=args.growth_samples, seed=args.seed)
    (out / "growth.json").write_text(json.dumps(growth.to_dict(), sort_keys=True, indent=2))
    weights = regdist.trace_weights(spec_p, spec_m, holder_alpha=args.holder_alpha)
    cert = regdist.almost_min_certificate(
        field,
        weights,
        holder_alpha=args.holder_alpha,
        n_balls=args.n_balls,
        seed=args.seed,
        graphs=(f_plus, f_minus),
    )
    (out / "certificate.json").write_text(
        json.dumps(cert.to_dict(), sort_keys=True, indent=2)
    )
    print(f"certificate_slope={cert.slope!r} ok={cert.slope_ok}")
    return 0


def cmd_verify(args) -> int:
    cfg = harness.VerifyConfig(
        N_list=tuple(float(t) for t in args.N_list.split(",")),
        alpha=args.alpha,
        hy=args.hy,
        delta=args.delta,
        theta=args.theta,
        seed=args.seed,
        hx_max=args.hx_max,
        max_iter=args.max_iter,
        rel_tol=args.tol,
    )
    report = harness.run_verify(cfg)
    text = report.to_json()
    if args.out:
        Path(args.out).write_text(text)
    else:
        print(text)
    for key in sorted(report.per_n):
        for c in report.per_n[key]:
            print(f"[{key}] {'PASS' if c['passed'] else 'FAIL'} {c['name']}")
    if report.all_passed or args.expect_subcritical:
        return 0
    return 1


def cmd_radial(args) -> int:
    rep = harness.radial_decay_check(
        [float(t) for t in args.N_list.split(",")], args.alpha
    )
    _json_print(rep.to_dict())
    return 0 if rep.passed else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="fbpool",
        description="Two-phase free-boundary energies on rectangles: "
        "solve, audit, and measure pool and branch-point structure.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("slice", help="closed-form 1D slice minimizer and its oracle")
    s.add_argument("--f", type=float, required=True, help="boundary value f >= 0")
    s.add_argument("--oracle-n", type=int, default=0, dest="oracle_n",
                   help="grid points per axis for the brute-force oracle")
    s.set_defaults(func=cmd_slice)

    s = sub.add_parser("energy", help="energy report of a dumped field")
    s.add_argument("--field", required=True, help="field dump file")
    s.add_argument("--sub", default=None, help="sub-rectangle x0,x1,y0,y1")
    s.add_argument("--ztol", type=float, default=0.0)
    s.add_argument("--qplus", type=float, default=1.0)
    s.add_argument("--qminus", type=float, default=1.0)
    s.set_defaults(func=cmd_energy)

    s = sub.add_parser("solve", help="minimize the two-phase energy on [-3N,3N]x[-1,1]")
    s.add_argument("--N", type=float, required=True)
    s.add_argument("--alpha", type=float, default=0.1)
    s.add_argument("--hy", type=float, default=1.0 / 64.0)
    s.add_argument("--hx-max", type=float, default=1.0 / 32.0, dest="hx_max")
    s.add_argument("--eps-schedule", default=None, dest="eps_schedule",
                   help="comma-separated decreasing smoothing widths")
    s.add_argument("--max-iter", type=int, default=2000, dest="max_iter")
    s.add_argument("--tol", type=float, default=1e-6)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--qplus", type=float, default=1.0)
    s.add_argument("--qminus", type=float, default=1.0)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("fb", help="free boundaries, labels, branch points, pools")
    s.add_argument("--field", required=True)
    s.add_argument("--ztol", type=float, default=0.0)
    s.add_argument("--rcls", type=float, default=None)
    s.add_argument("--out", default=".")
    s.set_defaults(func=cmd_fb)

    s = sub.add_parser("regdist", help="build an almost-minimizer with prescribed graphs")
    s.add_argument("--graph-plus", required=True, dest="graph_plus",
                   help='JSON graph spec, e.g. {"kind":"points-list","points":[0.0]}')
    s.add_argument("--graph-minus", required=True, dest="graph_minus")
    s.add_argument("--R", type=float, default=40.0)
    s.add_argument("--hy", type=float, default=1.0 / 64.0)
    s.add_argument("--half-width", type=float, default=1.0, dest="half_width")
    s.add_argument("--q", type=float, default=np.pi)
    s.add_argument("--holder-alpha", type=float, default=0.5, dest="holder_alpha")
    s.add_argument("--growth-samples", type=int, default=25, dest="growth_samples")
    s.add_argument("--n-balls", type=int, default=32, dest="n_balls")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_regdist)

    s = sub.add_parser("verify", help="run the named check battery per N")
    s.add_argument("--N-list", default="5,10,20", dest="N_list")
    s.add_argument("--alpha", type=float, default=0.1)
    s.add_argument("--hy", type=float, default=1.0 / 64.0)
    s.add_argument("--hx-max", type=float, default=1.0 / 32.0, dest="hx_max")
    s.add_argument("--delta", type=float, default=0.5)
    s.add_argument("--theta", type=float, default=0.15)
    s.add_argument("--max-iter", type=int, default=2000, dest="max_iter")
    s.add_argument("--tol", type=float, default=1e-6)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", default=None)
    s.add_argument("--expect-subcritical", action="store_true", dest="expect_subcritical",
                   help="record failures for small N without failing the run")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("radial", help="radial cross-energy decay fit against 1/log(2N)")
    s.add_argument("--N-list", default="100,10000,1000000", dest="N_list")
    s.add_argument("--alpha", type=float, default=0.1)
    s.set_defaults(func=cmd_radial)

    return ap


def cli_main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    try:
        return args.func(args)
    except (geometry.DomainError, geometry.AlignmentError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
