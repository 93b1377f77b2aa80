"""Command line front end: verify, compute, catalog, selftest.

Exit codes: 0 all checks passed, 1 at least one inequality violation,
2 configuration or input error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .campaign import (
    CHECK_NAMES,
    STATE_KINDS,
    CampaignConfig,
    ConfigError,
    emit_report,
    run_campaign,
)
from .inequalities import (
    check_conj1,
    check_conj2,
    check_main,
    check_robertson,
    classify_equality,
    prepare,
)
from .io import InstanceFormatError, load_instance
from .monotone import CatalogError, catalog_families, parse_function_spec
from .selftest import run_selftest


def _csv_list(text: str) -> list[str]:
    return [part.strip() for part in text.split(",") if part.strip()]


def _parse_pairs(text: str) -> list[tuple[str, str]]:
    pairs = []
    for chunk in _csv_list(text):
        parts = chunk.split("/")
        if len(parts) != 2:
            raise ConfigError(f"pairs: expected f/g, got {chunk!r}")
        pairs.append((parts[0].strip(), parts[1].strip()))
    return pairs


def _campaign_kwargs(args) -> dict:
    kwargs = {}
    if args.dims is not None:
        kwargs["dims"] = [int(x) for x in _csv_list(args.dims)]
    if args.num_obs is not None:
        kwargs["num_obs"] = [int(x) for x in _csv_list(args.num_obs)]
    if args.instances is not None:
        kwargs["instances_per_cell"] = args.instances
    if args.functions is not None:
        kwargs["functions"] = _csv_list(args.functions)
    if args.pairs is not None:
        kwargs["function_pairs"] = _parse_pairs(args.pairs)
    if args.t_grid is not None:
        kwargs["t_grid"] = [float(x) for x in _csv_list(args.t_grid)]
    if args.tol is not None:
        kwargs["tol"] = args.tol
    if args.kinds is not None:
        kwargs["kinds"] = _csv_list(args.kinds)
    if args.checks is not None:
        kwargs["checks"] = _csv_list(args.checks)
    if args.seed is not None:
        kwargs["seed"] = args.seed
    return kwargs


def _cmd_verify(args) -> int:
    try:
        config = CampaignConfig(**_campaign_kwargs(args))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    report = run_campaign(config, workers=args.workers)
    text = emit_report(report, args.format, args.out)
    if args.out is None:
        sys.stdout.write(text)
    totals = report.totals()
    print(
        f"verify: {totals['pass']} pass, {totals['fail']} fail, "
        f"{totals['hypothesis_skipped']} hypothesis-skipped, "
        f"{totals['clamped']} clamped, {report.runtime:.2f}s",
        file=sys.stderr,
    )
    for violation in report.violations[:10]:
        print(f"violation: {violation}", file=sys.stderr)
    return 0 if report.ok else 1


def _cmd_compute(args) -> int:
    loaded = load_instance(args.instance)
    inst = prepare(loaded.state, list(loaded.observables), digest=Path(args.instance).name)
    tol = args.tol if args.tol is not None else 1e-9
    failures = 0

    def show(rep):
        nonlocal failures
        status = "pass" if rep.passed else "FAIL"
        if not rep.hypothesis_ok:
            status = "skipped (dominance hypothesis not met)"
        elif not rep.passed:
            failures += 1
        extras = " ".join(
            f"{k}={v:.12g}" for k, v in rep.components.items() if isinstance(v, float)
        )
        print(f"  {rep.name}: lhs={rep.lhs:.12g} rhs={rep.rhs:.12g} margin={rep.margin:.3e} [{status}]")
        if extras:
            print(f"    {extras}")

    print(f"instance {args.instance}: dim={loaded.state.dim}, observables={len(loaded.observables)}")
    print(f"  eigenvalues: {' '.join(f'{v:.6g}' for v in loaded.state.eigenvalues)}")
    for spec in loaded.functions:
        f = parse_function_spec(spec)
        print(f"function {f.label}:")
        show(check_main(inst, f, tol))
        show(check_conj1(inst, f, tol))
    show(check_robertson(inst, tol))
    for fs, gs in loaded.pairs:
        f, g = parse_function_spec(fs), parse_function_spec(gs)
        print(f"pair ({f.label}, {g.label}):")
        show(check_conj2(inst, f, g, tol))
        got = classify_equality(inst, f, g, tol)
        print(
            f"  equality: verdict={got.verdict} det_cov={got.det_cov:.12g} "
            f"det_qov_f={got.det_qov_f:.12g} det_qov_g={got.det_qov_g:.12g} "
            f"consistent={got.consistent}"
        )
        if not got.consistent:
            failures += 1
    return 0 if failures == 0 else 1


def _cmd_catalog(args) -> int:
    for family in catalog_families():
        name = family["name"]
        if family["parameter"]:
            name = f"{name} ({family['parameter']})"
        line = f"{name:<28} f(x) = {family['formula']:<34} f(0) = {family['value_at_zero']:<10} {family['class']}"
        if family["transform"]:
            line += f"  ftilde = {family['transform']}"
        print(line)
    return 0


def _cmd_selftest(args) -> int:
    tol = args.tol if args.tol is not None else 1e-9
    return 0 if run_selftest(tol) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qfidet",
        description="Verify determinant bounds between covariance and quantum covariance matrices.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    verify = sub.add_parser("verify", help="run a randomized verification campaign")
    verify.add_argument("--seed", type=int, default=None, help="root seed for instance derivation")
    verify.add_argument("--dims", default=None, help="comma-separated state dimensions, e.g. 2,3,4")
    verify.add_argument("--num-obs", default=None, help="comma-separated observable counts")
    verify.add_argument("--instances", type=int, default=None, help="instances per (n, N, kind) cell")
    verify.add_argument("--functions", default=None, help="comma-separated function specs, e.g. sld,wyd:0.3")
    verify.add_argument("--pairs", default=None, help="comma-separated f/g pairs, e.g. sld/wy")
    verify.add_argument("--t-grid", default=None, help="comma-separated t values in [0,1]")
    verify.add_argument("--tol", type=float, default=None, help="relative tolerance (default 1e-9)")
    verify.add_argument("--kinds", default=None, help=f"state kinds from: {','.join(STATE_KINDS)}")
    verify.add_argument("--checks", default=None, help=f"checks from: {','.join(CHECK_NAMES)}")
    verify.add_argument("--out", default=None, help="write the report to this path")
    verify.add_argument("--format", choices=("json", "csv"), default="json")
    verify.add_argument("--workers", type=int, default=1)
    verify.set_defaults(handler=_cmd_verify)

    compute = sub.add_parser("compute", help="run every check on one instance file")
    compute.add_argument("instance", help="path to an instance JSON file")
    compute.add_argument("--tol", type=float, default=None)
    compute.set_defaults(handler=_cmd_compute)

    catalog = sub.add_parser("catalog", help="list the built-in monotone function families")
    catalog.set_defaults(handler=_cmd_catalog)

    selftest = sub.add_parser("selftest", help="run the hand-derived fixture battery")
    selftest.add_argument("--tol", type=float, default=None)
    selftest.set_defaults(handler=_cmd_selftest)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except (ConfigError, InstanceFormatError, CatalogError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entry() -> None:
    raise SystemExit(main())
