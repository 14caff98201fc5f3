"""Command-line front end for the benchmark scenarios.

Verbs:

- ``run``: solve one scenario, write the curve CSV, a plain-text solve
  report, and (unless suppressed) a PNG rendering.
- ``compare``: solve one scenario under two or more pipelines on the
  identical mesh and stepping; write a merged CSV plus deviation summary.
- ``sweep``: vary the thickness quadrature order (error measured against
  the closed-form pipeline) or the thickness-to-width ratio (error of the
  closed form against the 5-point quadrature reference).
- ``verify``: run the deterministic self-check suite (finite-difference
  tangent probes, pipeline equivalence, switch-interval scans); exits
  nonzero if any check fails.

Scenarios are flat key = value text files; ``--scenario`` accepts a file
path or the name of a bundled scenario.  Exit codes: 0 success, 1 failed
verification, 2 scenario/usage errors, 3 solver failure.
"""

import argparse
import sys
from importlib import resources
from pathlib import Path

from .bench import (
    compare_pipelines,
    curve_csv_text,
    pipeline_label,
    run_scenario,
    sweep_csv_text,
    sweep_gauss_points,
    sweep_thickness_ratio,
    verify_checks,
)
from .errors import ParseError, SolverFailure
from .scenario import load_scenario, parse_scenario


def bundled_scenario_names():
    root = resources.files("igashell") / "scenarios"
    return sorted(p.name[:-4] for p in root.iterdir() if p.name.endswith(".scn"))


def resolve_scenario(spec):
    """Load a scenario from a path or from the bundled set by name."""
    path = Path(spec)
    if path.exists():
        return load_scenario(path)
    name = spec[:-4] if spec.endswith(".scn") else spec
    candidate = resources.files("igashell") / "scenarios" / f"{name}.scn"
    if candidate.is_file():
        return parse_scenario(candidate.read_text(encoding="utf-8"), name=name)
    known = ", ".join(bundled_scenario_names())
    raise ParseError(
        f"scenario {spec!r} is neither a file nor a bundled name "
        f"(bundled: {known})"
    )


def switch_warning(sc, pipeline):
    """Warning text for pipeline choices that cannot represent the model."""
    if pipeline == "dd" and sc.switch:
        return (
            "warning: the directly-decoupled pipeline ignores the "
            "mid-surface asymmetry introduced by the fiber tension switch; "
            "bending-dominated responses will deviate from the projected "
            "pipelines"
        )
    return None


def _file_label(label):
    return label.replace("(", "").replace(")", "")


def _report_text(result):
    lines = [
        f"scenario: {result.scenario.name}",
        f"kind: {result.scenario.kind}",
        f"pipeline: {result.pipeline_label}",
        f"converged: {result.report.converged}",
        f"load steps: {len(result.report.steps)}",
        f"linear solves: {result.report.n_solves}",
        "steps (load factor, iterations, residual norm):",
    ]
    for step in result.report.steps:
        lines.append(
            f"  {step.load_factor:.6f}  {step.iterations:3d}  "
            f"{step.residual_norm:.3e}"
        )
    return "\n".join(lines) + "\n"


def _parse_pipeline_token(token):
    """'np', 'ap', 'dd', or 'np(5)' -> (pipeline, n_gp or None)."""
    token = token.strip()
    if token.endswith(")") and "(" in token:
        base, _, inner = token[:-1].partition("(")
        if base != "np":
            raise ParseError(
                f"only the quadrature pipeline takes a point count: {token!r}"
            )
        try:
            return base, int(inner)
        except ValueError:
            raise ParseError(f"bad quadrature point count in {token!r}") from None
    if token not in ("np", "ap", "dd"):
        raise ParseError(f"unknown pipeline {token!r} (expected np, ap or dd)")
    return token, None


def cmd_run(args):
    sc = resolve_scenario(args.scenario)
    pipeline = args.pipeline if args.pipeline else sc.pipeline
    warning = switch_warning(sc, pipeline)
    if warning:
        print(warning, file=sys.stderr)
    result = run_scenario(
        sc, pipeline=pipeline, n_gp=args.gauss_points, steps=args.steps
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    stem = f"{sc.name}--{_file_label(result.pipeline_label)}"
    csv_path = out / f"{stem}.csv"
    csv_path.write_text(curve_csv_text(result), encoding="utf-8")
    (out / f"{stem}-report.txt").write_text(_report_text(result), encoding="utf-8")
    if not args.no_figures:
        from .figures import render_curve

        render_curve(result, out / f"{stem}.png")
    print(f"wrote {csv_path}")
    return 0


def cmd_compare(args):
    sc = resolve_scenario(args.scenario)
    tokens = [t for part in args.pipelines for t in part.split(",") if t]
    specs = [_parse_pipeline_token(t) for t in tokens]
    if len(specs) < 2:
        raise ParseError("compare needs at least two --pipeline values")
    for pipeline, _ in specs:
        warning = switch_warning(sc, pipeline)
        if warning:
            print(warning, file=sys.stderr)
    results, deviations = compare_pipelines(sc, specs, steps=args.steps)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    labels = [r.pipeline_label for r in results]
    stem = f"{sc.name}--compare-{'-'.join(_file_label(l) for l in labels)}"
    lines = [f"# scenario: {sc.name}", f"# kind: {sc.kind}",
             f"# reference pipeline: {labels[0]}"]
    for label, dev in deviations.items():
        lines.append(f"# max relative deviation [{label}]: {dev!r}")
    header = ["load_factor", results[0].control_label]
    header += [f"{results[0].response_label}[{label}]" for label in labels]
    lines.append(",".join(header))
    reference = results[0]
    for i in range(reference.load_factors.size):
        row = [repr(float(reference.load_factors[i])),
               repr(float(reference.control[i]))]
        row += [repr(float(r.response[i])) for r in results]
        lines.append(",".join(row))
    csv_path = out / f"{stem}.csv"
    csv_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    if not args.no_figures:
        from .figures import render_comparison

        render_comparison(results, out / f"{stem}.png")
    for label, dev in deviations.items():
        print(f"max relative deviation [{label} vs {labels[0]}]: {dev:.3e}")
    print(f"wrote {csv_path}")
    return 0


def cmd_sweep(args):
    sc = resolve_scenario(args.scenario)
    values = [v for part in args.values for v in part.split(",") if v]
    if len(values) < 2:
        raise ParseError("sweep needs at least two --values entries")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if args.axis == "n_gp":
        try:
            points = [int(v) for v in values]
        except ValueError:
            raise ParseError("n_gp sweep values must be integers") from None
        _, rows = sweep_gauss_points(sc, points, steps=args.steps)
        axis_label = "n_gp"
        title = f"{sc.name}: quadrature error vs closed form"
    else:
        try:
            ratios = [float(v) for v in values]
        except ValueError:
            raise ParseError("thickness_ratio sweep values must be numbers") from None
        rows = sweep_thickness_ratio(sc, ratios, steps=args.steps)
        axis_label = "thickness_ratio"
        title = f"{sc.name}: closed-form error vs 5-point quadrature"
    csv_path = out / f"{sc.name}--sweep-{axis_label}.csv"
    csv_path.write_text(sweep_csv_text(sc, axis_label, rows), encoding="utf-8")
    if not args.no_figures:
        from .figures import render_sweep

        render_sweep(axis_label, rows, out / f"{sc.name}--sweep-{axis_label}.png",
                     title)
    for value, err in rows:
        print(f"{axis_label} = {value}: max relative deviation {err:.3e}")
    print(f"wrote {csv_path}")
    return 0


def cmd_verify(args):
    checks = verify_checks(seed=args.seed, corrupt_tangent=args.corrupt_tangent)
    failed = 0
    lines = []
    for name, passed, detail in checks:
        status = "PASS" if passed else "FAIL"
        failed += 0 if passed else 1
        lines.append(f"{status}  {name}: {detail}")
    text = "\n".join(lines)
    print(text)
    print(f"{len(checks) - failed}/{len(checks)} checks passed")
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / f"verify-seed{args.seed}.txt").write_text(text + "\n",
                                                         encoding="utf-8")
    return 1 if failed else 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="igashell",
        description="Thin-shell benchmark runner (quadrature, closed-form "
                    "and decoupled constitutive pipelines).",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, scenario=True):
        if scenario:
            p.add_argument("--scenario", required=True,
                           help="scenario file path or bundled scenario name")
            p.add_argument("--out", default=".", help="output directory")
            p.add_argument("--steps", type=int, default=None,
                           help="override the scenario's load step count")
            p.add_argument("--no-figures", action="store_true",
                           help="skip PNG rendering")

    p_run = sub.add_parser("run", help="solve one scenario and write its curve")
    add_common(p_run)
    p_run.add_argument("--pipeline", choices=("np", "ap", "dd"), default=None,
                       help="override the scenario's pipeline")
    p_run.add_argument("--gauss-points", type=int, default=None,
                       help="override the through-thickness quadrature order")
    p_run.set_defaults(func=cmd_run)

    p_cmp = sub.add_parser("compare",
                           help="run several pipelines on one scenario")
    add_common(p_cmp)
    p_cmp.add_argument("--pipeline", dest="pipelines", action="append",
                       default=[], metavar="P",
                       help="pipeline token (np, ap, dd or np(N)); repeat or "
                            "comma-separate; first token is the reference")
    p_cmp.set_defaults(func=cmd_compare)

    p_swp = sub.add_parser("sweep", help="error sweep along one model axis")
    add_common(p_swp)
    p_swp.add_argument("--axis", choices=("n_gp", "thickness_ratio"),
                       required=True)
    p_swp.add_argument("--values", action="append", default=[], metavar="V",
                       help="axis values; repeat or comma-separate")
    p_swp.set_defaults(func=cmd_sweep)

    p_ver = sub.add_parser("verify", help="run the self-check suite")
    p_ver.add_argument("--seed", type=int, default=0)
    p_ver.add_argument("--out", default=None,
                       help="also write the report into this directory")
    p_ver.add_argument("--corrupt-tangent", action="store_true",
                       help="self-test hook: corrupt one tangent entry and "
                            "expect the FD check to fail")
    p_ver.set_defaults(func=cmd_verify)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SolverFailure as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        report = getattr(exc, "report", None)
        if report is not None:
            print(
                f"converged steps: {len(report.steps)}, "
                f"linear solves: {report.n_solves}",
                file=sys.stderr,
            )
        return 3


if __name__ == "__main__":
    sys.exit(main())
