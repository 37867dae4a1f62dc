"""``hamcat`` command line: list, verify and simulate catalog systems.

Exit codes: 0 success, 1 verification or integration failure, 2 usage or
configuration error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from . import __version__
from .catalog import REGISTRY, VARIANTS, CatalogError, Registry
from .dynamics import METHODS, drift_report, integrate, trajectory_csv
from .expr import ExprError
from .verify import reports_to_json, reports_to_text, verify_system

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
DEFAULT_SEED = 42


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    ids: list[str] = field(default_factory=list)
    pattern: str | None = None
    params: dict[str, float] = field(default_factory=dict)
    seed: int = DEFAULT_SEED
    n_samples: int = 100
    tol: float = 1e-9
    dt: float = 1e-3
    T: float = 10.0
    method: str = "rk4"
    fmt: str = "text"
    output: str | None = None
    catalogs: list[str] = field(default_factory=list)
    variant: str = "both"
    errata: bool = False
    z0: tuple[float, ...] | None = None
    hamiltonian: int = 1


def _default_seed() -> int:
    raw = os.environ.get("HAMCAT_SEED")
    if raw is None or raw == "":
        return DEFAULT_SEED
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"HAMCAT_SEED must be an integer, got {raw!r}") from None


def _param(text: str) -> tuple[str, float]:
    name, sep, value = text.partition("=")
    if not sep or not name.strip():
        raise argparse.ArgumentTypeError(f"expected name=value, got {text!r}")
    try:
        return name.strip(), float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"parameter {name!r}: {value!r} is not a number") from None


def _floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hamcat",
                                description="Catalog, verify and simulate superintegrable "
                                            "Hamiltonian systems built from Lie algebras.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--catalog", action="append", default=[], metavar="FILE",
                        help="extra JSON catalog file (repeatable)")
        sp.add_argument("--output", "-o", metavar="PATH", help="write output to PATH")

    c = sub.add_parser("catalog", help="list systems")
    c.add_argument("pattern", nargs="?", help="glob on system ids, e.g. 'group/*'")
    common(c)

    v = sub.add_parser("verify", help="run verification checks and classify")
    v.add_argument("ids", nargs="*", help="system ids or globs")
    v.add_argument("--all", action="store_true", help="verify every catalog system")
    v.add_argument("--json", action="store_true", help="emit the JSON report")
    v.add_argument("--param", action="append", type=_param, default=[], metavar="NAME=VALUE")
    v.add_argument("--seed", type=int)
    v.add_argument("--n-samples", type=_positive_int, default=100)
    v.add_argument("--tol", type=float, default=1e-9)
    v.add_argument("--variant", choices=(*VARIANTS, "both"), default="both")
    v.add_argument("--errata", action="store_true",
                   help="show printed versus curated formulas for each system")
    common(v)

    s = sub.add_parser("simulate", help="integrate the flow of a system's Hamiltonian")
    s.add_argument("id")
    s.add_argument("--z0", type=_floats, help="comma-separated start point")
    s.add_argument("--dt", type=float, default=1e-3)
    s.add_argument("--T", type=float, default=10.0)
    s.add_argument("--method", choices=METHODS, default="rk4")
    s.add_argument("--format", choices=("csv", "json"), default="csv")
    s.add_argument("--param", action="append", type=_param, default=[], metavar="NAME=VALUE")
    s.add_argument("--variant", choices=VARIANTS, default="curated")
    s.add_argument("--hamiltonian", type=_positive_int, default=1,
                   help="which stored Hamiltonian drives the flow (1-based)")
    common(s)
    return p


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(command=ns.command, catalogs=list(ns.catalog), output=ns.output)
    if ns.command == "catalog":
        cfg.pattern = ns.pattern
    elif ns.command == "verify":
        if ns.all and ns.ids:
            raise UsageError("give system ids or --all, not both")
        if not ns.all and not ns.ids:
            raise UsageError("no systems selected; give ids or --all")
        cfg.ids = [] if ns.all else list(ns.ids)
        cfg.params = dict(ns.param)
        cfg.seed = ns.seed if ns.seed is not None else _default_seed()
        cfg.n_samples, cfg.tol = ns.n_samples, ns.tol
        cfg.fmt = "json" if ns.json else "text"
        cfg.variant, cfg.errata = ns.variant, ns.errata
    else:
        cfg.ids = [ns.id]
        cfg.params = dict(ns.param)
        cfg.z0, cfg.dt, cfg.T, cfg.method = ns.z0, ns.dt, ns.T, ns.method
        cfg.fmt, cfg.variant, cfg.hamiltonian = ns.format, ns.variant, ns.hamiltonian
        if not cfg.dt > 0:
            raise UsageError("--dt must be positive")
        if cfg.T < cfg.dt:
            raise UsageError("--T must be at least --dt")
    return cfg


def _registry(cfg: RunConfig) -> Registry:
    if not cfg.catalogs:
        return REGISTRY
    reg = REGISTRY.copy()
    for path in cfg.catalogs:
        if not Path(path).is_file():
            raise UsageError(f"catalog file not found: {path}")
        reg.load_file(path)
    return reg


def _check_glob(pattern: str) -> None:
    depth = 0
    for ch in pattern:
        if ch == "[":
            depth += 1
        elif ch == "]" and depth:
            depth -= 1
    if depth:
        raise UsageError(f"malformed glob {pattern!r}: unbalanced '['")


def _select(reg: Registry, ids: Sequence[str]) -> list[str]:
    if not ids:
        return reg.ids()
    out: list[str] = []
    for item in ids:
        if any(ch in item for ch in "*?["):
            _check_glob(item)
            matched = reg.ids(item)
            if not matched:
                raise UsageError(f"no system matches {item!r}")
        else:
            reg.spec(item)
            matched = [item]
        out += [m for m in matched if m not in out]
    return out


def _emit(text: str, cfg: RunConfig, stdout=None) -> None:
    if cfg.output:
        Path(cfg.output).write_text(text, encoding="utf-8")
    else:
        (stdout or sys.stdout).write(text)


def cmd_catalog(cfg: RunConfig, stdout=None) -> int:
    reg = _registry(cfg)
    if cfg.pattern:
        _check_glob(cfg.pattern)
    rows = [("id", "kind", "algebra", "claimed")]
    for sid in reg.ids(cfg.pattern):
        spec = reg.spec(sid)
        rows.append((sid, spec.kind, spec.algebra, spec.claimed_class))
    widths = [max(len(r[i]) for r in rows) for i in range(4)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in rows]
    lines.append(f"{len(rows) - 1} systems")
    _emit("\n".join(lines) + "\n", cfg, stdout)
    return EXIT_OK


def errata_diff(reg: Registry, sid: str, params=None) -> list[str]:
    """Printed versus curated formulas, plus printed right-hand sides next to
    the mechanically substituted Hamiltonian."""
    spec = reg.spec(sid)
    cur = reg.get_system(sid, params, "curated")
    lines = []

    def pair(label, printed, curated):
        if printed != curated:
            lines.append(f"  {label}: printed {printed}")
            lines.append(f"  {' ' * len(label)}  curated {curated}")

    for i, (a, b) in enumerate(zip(spec.Q_printed or spec.Q, spec.Q), 1):
        pair(f"Q{i}", a, b)
    if spec.darboux_printed:
        for i, (a, b) in enumerate(zip(spec.darboux_printed, spec.darboux), 1):
            pair(f"y{i}", a, b)
    for i, (h, hc) in enumerate(zip(spec.hamiltonians, cur.hamiltonians), 1):
        pair(f"H{i}", h.printed or h.form, h.form)
        for text in h.rhs:
            lines.append(f"  H{i} printed value {text}; substituted {hc.expr}")
    if spec.errata:
        lines.append(f"  errata: {spec.errata}")
    return lines


def cmd_verify(cfg: RunConfig, stdout=None) -> int:
    reg = _registry(cfg)
    ids = _select(reg, cfg.ids)
    variants = VARIANTS if cfg.variant == "both" else (cfg.variant,)
    reports = []
    for sid in ids:
        for variant in variants:
            sys_ = reg.get_system(sid, cfg.params, variant)
            reports.append(verify_system(sys_, cfg.n_samples, cfg.tol, cfg.seed))
    curated_fail = [r.system for r in reports if r.variant == "curated" and not r.passed]
    printed_fail = [r.system for r in reports if r.variant == "printed" and not r.passed]
    if cfg.fmt == "json":
        meta = {"seed": cfg.seed, "n_samples": cfg.n_samples, "tol": cfg.tol}
        if cfg.errata:
            meta["errata"] = {sid: errata_diff(reg, sid, cfg.params) for sid in ids
                              if reg.spec(sid).errata}
        text = reports_to_json(reports, **meta)
    else:
        text = reports_to_text(reports)
        if cfg.errata:
            for sid in ids:
                diff = errata_diff(reg, sid, cfg.params)
                if diff:
                    text += f"\n{sid}\n" + "\n".join(diff) + "\n"
        text += (f"\n{len(ids)} systems, seed {cfg.seed}, {cfg.n_samples} samples, "
                 f"tol {cfg.tol:g}; curated failures: {len(curated_fail)}; "
                 f"printed discrepancies: {len(printed_fail)}\n")
    _emit(text, cfg, stdout)
    return EXIT_FAIL if curated_fail else EXIT_OK


def cmd_simulate(cfg: RunConfig, stdout=None, stderr=None) -> int:
    stdout, stderr = stdout or sys.stdout, stderr or sys.stderr
    reg = _registry(cfg)
    sid = cfg.ids[0]
    sys_ = reg.get_system(sid, cfg.params, cfg.variant)
    if cfg.hamiltonian > len(sys_.hamiltonians):
        raise UsageError(f"{sid} has {len(sys_.hamiltonians)} Hamiltonian(s)")
    ham = sys_.hamiltonians[cfg.hamiltonian - 1]
    messages = []
    z0 = cfg.z0
    if z0 is None:
        z0 = sys_.start_point()
        messages.append("default start point " + ",".join(f"{c:g}" for c in z0))
    if len(z0) != sys_.dimension:
        raise UsageError(f"{sid}: --z0 needs {sys_.dimension} values "
                         f"({','.join(sys_.coordinates)}), got {len(z0)}")
    traj = integrate(sys_, z0, cfg.dt, cfg.T, cfg.method, H=ham.expr)

    watch = {"H": ham.expr}
    for label, f in zip((*sys_.core_labels, *sys_.extra_labels), (*sys_.core, *sys_.extra)):
        watch.setdefault(label, f)
    if ham.casimir:
        for i, q in enumerate(sys_.Q, 1):
            watch.setdefault(f"Q{i}", q)
    drift = drift_report(traj, watch)

    if cfg.fmt == "json":
        doc = {"system": sid, "variant": cfg.variant, "params": dict(sys_.params),
               "hamiltonian": ham.form, "method": cfg.method, "dt": cfg.dt, "T": cfg.T,
               "coordinates": list(traj.coordinates), "times": traj.times,
               "states": [list(z) for z in traj.states], "drift": drift,
               "completed": traj.completed, "error": traj.error or None}
        body = json.dumps(doc) + "\n"
    else:
        body = trajectory_csv(traj)
    _emit(body, cfg, stdout)

    summary = stdout if cfg.output else stderr
    for m in messages:
        summary.write(f"# {m}\n")
    width = max(len(k) for k in drift)
    summary.write(f"# drift ({cfg.method}, dt={cfg.dt:g}, T={cfg.T:g}, H={ham.form})\n")
    for k, v in drift.items():
        summary.write(f"#   {k.ljust(width)}  {v:.3e}\n")
    if not traj.completed:
        stderr.write(f"hamcat: integration stopped: {traj.error}\n")
        return EXIT_FAIL
    return EXIT_OK


COMMANDS = {"catalog": cmd_catalog, "verify": cmd_verify, "simulate": cmd_simulate}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = config_from_args(ns)
        return COMMANDS[cfg.command](cfg)
    except (UsageError, CatalogError, ExprError, ValueError) as err:
        print(f"hamcat: error: {err}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
