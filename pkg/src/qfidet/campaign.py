"""Verification campaigns over derived-seed random instances.

Every instance is generated from hash(seed, n, N, kind, index), so any cell
or single instance reproduces in isolation and the report is identical for
any worker count: cells are independent work items and the merge happens in
a fixed order.  The JSON report is the source of truth; CSV is a flattened
view with one row per (check, n, N, f, g, t) combination, aggregated over
state kinds and instances.
"""

from __future__ import annotations

import csv
import io
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path

from .inequalities import (
    check_conj1,
    check_conj2,
    check_firey,
    check_main,
    check_metric_contraction,
    check_robertson,
    classify_equality,
    prepare_random,
)
from .monotone import CatalogError, parse_function_spec
from .states import derive_seed, random_partition

REPORT_VERSION = "qfi-report/1"
CHECK_NAMES = ("main", "conj1", "conj2", "firey", "robertson", "equality", "contraction")
STATE_KINDS = ("generic", "degenerate", "near-singular")
VIOLATION_CAP = 100
DEFAULT_T_GRID = (0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0)


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class CampaignConfig:
    dims: tuple[int, ...] = (2, 3, 4)
    num_obs: tuple[int, ...] = (1, 2, 3)
    instances_per_cell: int = 1000
    functions: tuple[str, ...] = ("sld", "wy", "wyd:0.3", "kubo-mori")
    function_pairs: tuple[tuple[str, str], ...] = (
        ("sld", "wy"),
        ("sld", "wyd:0.3"),
        ("wy", "wyd:0.3"),
    )
    kinds: tuple[str, ...] = STATE_KINDS
    t_grid: tuple[float, ...] = DEFAULT_T_GRID
    tol: float = 1e-9
    seed: int = 2026
    checks: tuple[str, ...] = CHECK_NAMES

    def __post_init__(self):
        coerce = object.__setattr__
        coerce(self, "dims", tuple(int(n) for n in self.dims))
        coerce(self, "num_obs", tuple(int(n) for n in self.num_obs))
        coerce(self, "instances_per_cell", int(self.instances_per_cell))
        coerce(self, "functions", tuple(str(s) for s in self.functions))
        coerce(self, "function_pairs", tuple((str(a), str(b)) for a, b in self.function_pairs))
        coerce(self, "kinds", tuple(str(k) for k in self.kinds))
        coerce(self, "t_grid", tuple(float(t) for t in self.t_grid))
        coerce(self, "tol", float(self.tol))
        coerce(self, "seed", int(self.seed))
        coerce(self, "checks", tuple(str(c) for c in self.checks))

        if not self.dims:
            raise ConfigError("dims: need at least one dimension")
        for n in self.dims:
            if not 2 <= n <= 16:
                raise ConfigError(f"dims: {n} outside the supported range [2, 16]")
        if not self.num_obs:
            raise ConfigError("num_obs: need at least one observable count")
        for n in self.num_obs:
            if n < 1:
                raise ConfigError(f"num_obs: counts must be positive, got {n}")
        if self.instances_per_cell < 0:
            raise ConfigError(f"instances_per_cell: must be nonnegative, got {self.instances_per_cell}")
        if not self.functions:
            raise ConfigError("functions: need at least one function spec")
        for spec in self.functions:
            _checked_spec(spec, "functions")
        for fs, gs in self.function_pairs:
            _checked_spec(fs, "function_pairs")
            _checked_spec(gs, "function_pairs")
        if not self.kinds:
            raise ConfigError("kinds: need at least one state kind")
        for kind in self.kinds:
            if kind not in STATE_KINDS:
                raise ConfigError(f"kinds: unknown kind {kind!r}; expected one of {', '.join(STATE_KINDS)}")
        for t in self.t_grid:
            if not 0.0 <= t <= 1.0:
                raise ConfigError(f"t_grid: values must lie in [0, 1], got {t}")
        if not self.tol > 0.0:
            raise ConfigError(f"tol: must be positive, got {self.tol}")
        if not self.checks:
            raise ConfigError("checks: need at least one check")
        for check in self.checks:
            if check not in CHECK_NAMES:
                raise ConfigError(f"checks: unknown check {check!r}; expected one of {', '.join(CHECK_NAMES)}")


def _checked_spec(spec: str, field: str) -> None:
    try:
        parse_function_spec(spec)
    except CatalogError as exc:
        raise ConfigError(f"{field}: {exc}") from None


@dataclass(frozen=True)
class CampaignReport:
    config: CampaignConfig
    counts: dict
    rows: list
    worst: dict
    violations: list
    runtime: float
    version: str = REPORT_VERSION

    @property
    def total_failures(self) -> int:
        return sum(c["fail"] for c in self.counts.values())

    @property
    def ok(self) -> bool:
        return self.total_failures == 0

    def totals(self) -> dict:
        out = {"pass": 0, "fail": 0, "hypothesis_skipped": 0, "clamped": 0}
        for quad in self.counts.values():
            for key in out:
                out[key] += quad[key]
        return out

    def to_dict(self) -> dict:
        return {
            "version": self.version,
            "config": asdict(self.config),
            "counts": self.counts,
            "rows": self.rows,
            "worst": self.worst,
            "violations": self.violations,
            "totals": self.totals(),
            "runtime": self.runtime,
        }


def _run_cell(config: CampaignConfig, n: int, n_obs: int, kind: str) -> dict:
    functions = [parse_function_spec(s) for s in config.functions]
    pairs = [(parse_function_spec(a), parse_function_spec(b)) for a, b in config.function_pairs]
    eq_pairs = pairs if pairs else [(functions[0], None)]
    tol = config.tol
    # row value: [pass, fail, clamps, worst_margin, worst_instance]
    rows: dict[tuple, list] = {}
    counts = {c: {"pass": 0, "fail": 0, "hypothesis_skipped": 0, "clamped": 0} for c in config.checks}
    violations: list[dict] = []

    def note(check, rep, fl, gl, t, index, derived):
        row = rows.setdefault((check, n, n_obs, fl, gl, t), [0, 0, 0, None, ""])
        quad = counts[check]
        if not rep.hypothesis_ok:
            quad["hypothesis_skipped"] += 1
            return
        quad["clamped"] += rep.clamps
        row[2] += rep.clamps
        if rep.passed:
            quad["pass"] += 1
            row[0] += 1
        else:
            quad["fail"] += 1
            row[1] += 1
            if len(violations) < VIOLATION_CAP:
                violations.append(
                    {
                        "check": check,
                        "n": n,
                        "N": n_obs,
                        "kind": kind,
                        "index": index,
                        "seed": config.seed,
                        "derived_seed": derived,
                        "f": fl,
                        "g": gl,
                        "t": t,
                        "margin": rep.margin,
                    }
                )
        if row[3] is None or rep.margin < row[3]:
            row[3] = rep.margin
            row[4] = f"kind={kind},index={index}"

    def note_classification(got, fl, gl, index):
        row = rows.setdefault(("equality", n, n_obs, fl, gl, None), [0, 0, 0, None, ""])
        quad = counts["equality"]
        if not got.consistent:
            quad["fail"] += 1
            row[1] += 1
            if row[3] is None or row[3] > -1.0:
                row[3] = -1.0
                row[4] = f"kind={kind},index={index}"
            if len(violations) < VIOLATION_CAP:
                violations.append(
                    {
                        "check": "equality",
                        "n": n,
                        "N": n_obs,
                        "kind": kind,
                        "index": index,
                        "seed": config.seed,
                        "derived_seed": derive_seed(config.seed, n, n_obs, kind, index),
                        "f": fl,
                        "g": gl,
                        "t": None,
                        "margin": -1.0,
                        "verdict": got.verdict,
                    }
                )
        elif not got.resolved:
            quad["hypothesis_skipped"] += 1
        else:
            quad["pass"] += 1
            row[0] += 1
            if row[3] is None:
                row[3] = 0.0
                row[4] = f"kind={kind},index={index}"

    for index in range(config.instances_per_cell):
        derived = derive_seed(config.seed, n, n_obs, kind, index)
        inst = prepare_random(n, n_obs, derived, kind)
        if "main" in counts:
            for f in functions:
                note("main", check_main(inst, f, tol), f.label, None, None, index, derived)
        if "conj1" in counts:
            for f in functions:
                note("conj1", check_conj1(inst, f, tol), f.label, None, None, index, derived)
        if "conj2" in counts:
            for f, g in pairs:
                note("conj2", check_conj2(inst, f, g, tol), f.label, g.label, None, index, derived)
        if "firey" in counts:
            for t in config.t_grid:
                for f in functions:
                    note("firey", check_firey(inst, f, t, tol=tol), f.label, None, t, index, derived)
                for f, g in pairs:
                    note("firey", check_firey(inst, f, t, g=g, tol=tol), f.label, g.label, t, index, derived)
        if "robertson" in counts:
            note("robertson", check_robertson(inst, tol), None, None, None, index, derived)
        if "equality" in counts:
            for f, g in eq_pairs:
                got = classify_equality(inst, f, g, tol)
                note_classification(got, f.label, g.label if g is not None else None, index)
        if "contraction" in counts:
            x = inst.observables[0]
            partition = random_partition(n, derive_seed("partition", derived))
            for f in functions:
                rep = check_metric_contraction(inst.state, x, f, partition, tol)
                note("contraction", rep, f.label, None, None, index, derived)

    return {"rows": rows, "counts": counts, "violations": violations}


def _cell_entry(args):
    return _run_cell(*args)


def _row_sort_key(key):
    check, n, n_obs, fl, gl, t = key
    return (check, n, n_obs, fl or "", gl or "", -1.0 if t is None else t)


def run_campaign(config: CampaignConfig, workers: int = 1) -> CampaignReport:
    start = time.perf_counter()
    cells = [(config, n, n_obs, kind) for n in config.dims for n_obs in config.num_obs for kind in config.kinds]
    if workers > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            partials = list(pool.map(_cell_entry, cells))
    else:
        partials = [_run_cell(*cell) for cell in cells]

    merged: dict[tuple, list] = {}
    counts = {c: {"pass": 0, "fail": 0, "hypothesis_skipped": 0, "clamped": 0} for c in config.checks}
    violations: list[dict] = []
    for part in partials:
        for key, val in part["rows"].items():
            row = merged.setdefault(key, [0, 0, 0, None, ""])
            row[0] += val[0]
            row[1] += val[1]
            row[2] += val[2]
            if val[3] is not None and (row[3] is None or val[3] < row[3]):
                row[3] = val[3]
                row[4] = val[4]
        for check, quad in part["counts"].items():
            for name, value in quad.items():
                counts[check][name] += value
        violations.extend(part["violations"])
    del violations[VIOLATION_CAP:]

    rows = []
    for key in sorted(merged, key=_row_sort_key):
        check, n, n_obs, fl, gl, t = key
        npass, nfail, clamps, margin, instance = merged[key]
        rows.append(
            {
                "check": check,
                "n": n,
                "N": n_obs,
                "f": fl,
                "g": gl,
                "t": t,
                "pass": npass,
                "fail": nfail,
                "worst_margin": margin,
                "clamps": clamps,
                "worst_instance": instance,
            }
        )
    worst: dict[str, dict] = {}
    for row in rows:
        margin = row["worst_margin"]
        if margin is None:
            continue
        cur = worst.get(row["check"])
        if cur is None or margin < cur["margin"]:
            worst[row["check"]] = {
                "margin": margin,
                "n": row["n"],
                "N": row["N"],
                "f": row["f"],
                "g": row["g"],
                "t": row["t"],
                "instance": row["worst_instance"],
            }
    runtime = time.perf_counter() - start
    return CampaignReport(
        config=config,
        counts=counts,
        rows=rows,
        worst=worst,
        violations=violations,
        runtime=runtime,
    )


def emit_report(report: CampaignReport, fmt: str = "json", path: str | Path | None = None) -> str:
    if fmt == "json":
        text = json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n"
    elif fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["check", "n", "N", "f", "g", "t", "pass", "fail", "worst_margin", "clamps"])
        for row in report.rows:
            writer.writerow(
                [
                    row["check"],
                    row["n"],
                    row["N"],
                    row["f"] or "",
                    row["g"] or "",
                    "" if row["t"] is None else f"{row['t']:g}",
                    row["pass"],
                    row["fail"],
                    "" if row["worst_margin"] is None else f"{row['worst_margin']:.12g}",
                    row["clamps"],
                ]
            )
        text = buf.getvalue()
    else:
        raise ConfigError(f"format: expected json or csv, got {fmt!r}")
    if path is not None:
        Path(path).write_text(text)
    return text
