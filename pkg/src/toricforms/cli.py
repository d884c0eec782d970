"""Command line front end: `toricforms space | verify | qexp`.

Reports are JSON, deterministic for a given configuration and code version:
wall-clock timings go to standard output only (or into the report with --timing).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .cache import CODE_VERSION, DiskCache, warm_eisenstein, warm_products
from .field import format_cyc
from .hecke import sturm_bound
from .qseries import (
    QExpansion,
    default_precision,
    eisenstein_basis,
    s2_series,
    s_series,
    tilde_s_series,
)
from .suites import SUITES, run_suite, space_summary

SCHEMA = "toricforms.report/1"
log = logging.getLogger("toricforms")


@dataclass
class RunConfig:
    levels: list[int]
    prec: int | None = None
    budget: int = 200
    cache_dir: str | None = None
    out: str | None = None
    jobs: int = 1
    allow_low_precision: bool = False
    timing: bool = False
    verbose: bool = False
    extra: dict = field(default_factory=dict)

    def precision_for(self, l: int) -> int:
        return self.prec if self.prec is not None else default_precision(l)


class PrecisionError(ValueError):
    pass


def _encode(obj):
    """Exact integers become decimal strings; everything else passes through."""
    if isinstance(obj, bool) or obj is None:
        return obj
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, dict):
        return {k: _encode(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_encode(v) for v in obj]
    return obj


def parse_levels(values) -> list[int]:
    """Accepts repeated --level, comma lists and ranges like 11-17."""
    out = []
    for item in values:
        for part in str(item).split(","):
            part = part.strip()
            if not part:
                continue
            if "-" in part:
                lo, hi = part.split("-", 1)
                out.extend(range(int(lo), int(hi) + 1))
            else:
                out.append(int(part))
    for l in out:
        if l < 2:
            raise argparse.ArgumentTypeError(f"invalid level {l}: must be > 1")
    return out


def check_precision(cfg: RunConfig, l: int) -> int:
    prec = cfg.precision_for(l)
    bound = sturm_bound(l)
    if prec < bound:
        if not cfg.allow_low_precision:
            raise PrecisionError(f"precision {prec} below the Sturm bound {bound} at level {l}")
        log.warning("precision %d is below the Sturm bound %d at level %d; results are not conclusive", prec, bound, l)
    return prec


def _verify_level(args) -> dict:
    l, suites, prec, budget, cache_dir = args
    if cache_dir is not None:
        cache = DiskCache(cache_dir)
        try:
            warm_products(l, prec, cache)
        except ArithmeticError:
            pass  # reported by the suites themselves
    checks = []
    timings = {}
    for name in suites:
        t0 = time.perf_counter()
        checks.extend(run_suite(name, l, prec, budget))
        timings[name] = round(time.perf_counter() - t0, 3)
    return {"level": l, "prec": prec, "checks": checks, "timings": timings}


def cmd_verify(cfg: RunConfig, suite: str) -> tuple[dict, int]:
    suites = list(SUITES) if suite == "all" else [suite]
    jobs_in = []
    for l in cfg.levels:
        prec = check_precision(cfg, l)
        jobs_in.append((l, suites, prec, cfg.budget, cfg.cache_dir))
    if cfg.jobs > 1 and len(jobs_in) > 1:
        with ProcessPoolExecutor(max_workers=min(cfg.jobs, len(jobs_in))) as ex:
            results = list(ex.map(_verify_level, jobs_in))
    else:
        results = [_verify_level(j) for j in jobs_in]
    ok = all(c["pass"] for r in results for c in r["checks"])
    for r in results:
        for c in r["checks"]:
            status = "PASS" if c["pass"] else "FAIL"
            print(f"[{status}] level {r['level']} {c['name']}  ({r['timings'].get(c['name'].split('[')[0], 0)} s)")
        if not cfg.timing:
            r.pop("timings")
    report = {
        "schema": SCHEMA,
        "codeVersion": CODE_VERSION,
        "command": "verify",
        "config": {"suite": suite, **_config_echo(cfg)},
        "results": results,
        "pass": ok,
    }
    return report, 0 if ok else 1


def cmd_space(cfg: RunConfig) -> tuple[dict, int]:
    results = []
    for l in cfg.levels:
        summary = space_summary(l)
        results.append({"level": l, **summary})
        print(f"level {l}: " + ", ".join(f"{k} = {v}" for k, v in summary.items()))
    report = {"schema": SCHEMA, "codeVersion": CODE_VERSION, "command": "space", "config": _config_echo(cfg), "results": results, "pass": True}
    return report, 0


def build_qexp(kind: str, a: int, b: int | None, l: int, prec: int) -> QExpansion:
    if kind == "s":
        return s_series(a, l, prec)
    if kind == "s2":
        return s2_series(a, l, prec)
    if kind == "tilde":
        return tilde_s_series(a % l, l, prec)
    if kind == "product":
        if b is None:
            raise ValueError("product needs --b")
        return s_series(a, l, prec) * s_series(b, l, prec)
    raise ValueError(f"unknown series kind {kind!r}")


def cmd_qexp(cfg: RunConfig, kind: str, a: int, b: int | None) -> tuple[dict, int]:
    results = []
    for l in cfg.levels:
        prec = cfg.prec if cfg.prec is not None else default_precision(l)
        f = build_qexp(kind, a, b, l, prec)
        lines = [f"q^{n}: {format_cyc(c)}" for n, c in enumerate(f.coeffs)]
        print(f"level {l}, {kind} a={a}" + (f" b={b}" if b is not None else ""))
        print("\n".join("  " + s for s in lines))
        entry = {"level": l, "prec": prec, "coefficients": [format_cyc(c) for c in f.coeffs], "series": f.to_json()}
        if kind == "product":
            basis = eisenstein_basis(l, prec, strict=False)
            entry["eisensteinComplete"] = basis.rank == basis.expected
            entry["modEisensteinZero"] = basis.contains(f) if basis.rank == basis.expected else None
            print(f"  reduces to 0 mod E({l}): {entry['modEisensteinZero']}")
        results.append(entry)
    report = {
        "schema": SCHEMA,
        "codeVersion": CODE_VERSION,
        "command": "qexp",
        "config": {"kind": kind, "a": a, "b": b, **_config_echo(cfg)},
        "results": results,
        "pass": True,
    }
    return report, 0


def _config_echo(cfg: RunConfig) -> dict:
    d = asdict(cfg)
    # the cache location and worker count do not influence results
    for k in ("cache_dir", "out", "jobs", "verbose", "extra", "timing"):
        d.pop(k)
    return d


def write_report(report: dict, path: str | None) -> None:
    if path is None:
        return
    text = json.dumps(_encode(report), indent=2, sort_keys=True) + "\n"
    Path(path).write_text(text)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="toricforms", description="Toric modular forms: exact verification harness")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--level", action="append", required=True, help="level(s): 11, 11,13 or 11-17; repeatable")
    common.add_argument("--prec", type=int, default=None, help="number of q-expansion coefficients")
    common.add_argument("--budget", type=int, default=200, help="largest n tried when growing Hecke spans")
    common.add_argument("--cache-dir", default=None, help="disk cache (default $TORICFORMS_CACHE_DIR)")
    common.add_argument("--no-cache", action="store_true", help="disable the disk cache")
    common.add_argument("--out", default=None, help="write the JSON report here")
    common.add_argument("--jobs", type=int, default=None, help="worker processes (default: cores)")
    common.add_argument("--allow-low-precision", action="store_true", help="permit precision below the Sturm bound")
    common.add_argument("--timing", action="store_true", help="include wall-clock timings in the JSON report")
    common.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("space", parents=[common], help="dimensions of symbol spaces")
    v = sub.add_parser("verify", parents=[common], help="run a verification suite")
    v.add_argument("--suite", choices=list(SUITES) + ["all"], default="all")
    q = sub.add_parser("qexp", parents=[common], help="print an explicit q-expansion")
    q.add_argument("--kind", choices=["s", "s2", "tilde", "product"], required=True)
    q.add_argument("--a", type=int, required=True)
    q.add_argument("--b", type=int, default=None)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    ns = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        levels = parse_levels(ns.level)
    except (ValueError, argparse.ArgumentTypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    cache_dir = None
    if not ns.no_cache:
        cache_dir = ns.cache_dir or os.environ.get("TORICFORMS_CACHE_DIR")
    jobs = ns.jobs if ns.jobs is not None else max(1, min(os.cpu_count() or 1, len(levels)))
    cfg = RunConfig(
        levels=levels,
        prec=ns.prec,
        budget=ns.budget,
        cache_dir=cache_dir,
        out=ns.out,
        jobs=jobs,
        allow_low_precision=ns.allow_low_precision,
        timing=ns.timing,
        verbose=ns.verbose,
    )
    t0 = time.perf_counter()
    try:
        if ns.command == "space":
            report, code = cmd_space(cfg)
        elif ns.command == "verify":
            report, code = cmd_verify(cfg, ns.suite)
        else:
            report, code = cmd_qexp(cfg, ns.kind, ns.a, ns.b)
    except PrecisionError as exc:
        print(f"error: {exc} (use --allow-low-precision to override)", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    elapsed = time.perf_counter() - t0
    if cfg.timing:
        report["elapsedSeconds"] = round(elapsed, 3)
    write_report(report, cfg.out)
    print(f"{'OK' if code == 0 else 'FAILED'} in {elapsed:.2f} s")
    return code


if __name__ == "__main__":
    raise SystemExit(main())
