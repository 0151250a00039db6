"""Command line interface: design / simulate / sweep / verify.

Exit codes: 0 success (all checks pass), 1 check failure, 2 infeasible
domain, 3 design failure, 4 blow-up, 5 degenerate initial data, 64 usage,
65 bad data format, 66 missing input.
"""

from __future__ import annotations

import argparse
import copy
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import design as _design
from . import dynamics as _dynamics
from . import lyapunov as _lyapunov
from . import runio as _runio
from . import trigger as _trigger
from .config import RunConfig, load_config
from .errors import (
    BlowUpError,
    ConfigurationError,
    DataFormatError,
    DegenerateInitialDataError,
    DesignFailureError,
    InfeasibleDomainError,
    WavetrigError,
)
from .grid import Grid, discrete_poincare_constant, poincare_constant
from .initial import build_field

__all__ = ["main", "entrypoint", "run_from_config", "design_from_config"]

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_INFEASIBLE = 2
EXIT_DESIGN_FAILURE = 3
EXIT_BLOWUP = 4
EXIT_DEGENERATE = 5
EXIT_USAGE = 64
EXIT_DATAERR = 65
EXIT_NOINPUT = 66


class UsageError(WavetrigError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would sys.exit(2); 2 means infeasible here
        raise UsageError(message)


def _resolve_c_omega(cfg: RunConfig, g: Grid) -> tuple[float, str]:
    d = cfg.design
    if d.comega_source == "user":
        return float(d.comega_value), "user"
    return poincare_constant(g, d.comega_source), d.comega_source


def design_from_config(cfg: RunConfig, g: Grid) -> _design.StabilityCertificate:
    c_omega, source = _resolve_c_omega(cfg, g)
    inp = _design.DesignInput(
        alpha=cfg.alpha,
        c_omega=c_omega,
        c_omega_source=source,
        s_gamma0=cfg.design.s_gamma0,
        s_gamma1=cfg.design.s_gamma1,
        theta_margin=cfg.design.theta_margin,
    )
    return _design.build_certificate(inp)


def run_checks(record: _lyapunov.RunRecord) -> tuple[dict, bool]:
    """All checks applicable to a record; returns (reports, all_passed).

    The decay-rate guarantees are proven for the event-triggered policy, so
    vdot/envelope/deviation-floor outcomes gate the verdict only there; on
    baseline policies they are reported as advisory.  The sandwich identity
    and the one-step dwell floor hold for any trajectory and always gate.
    """
    reports: dict = {}
    ok = True
    event_mode = record.mode == "event-triggered"
    if record.certificate is not None:
        for check, gating in (
            (_lyapunov.check_equivalence, True),
            (_lyapunov.check_vdot, event_mode),
            (_lyapunov.check_envelope, event_mode),
        ):
            rep = check(record)
            d = rep.to_dict()
            d["gating"] = gating
            reports[rep.name] = d
            if gating:
                ok = ok and rep.passed
    if event_mode:
        rep = _lyapunov.check_trigger_invariant(record)
        d = rep.to_dict()
        d["gating"] = True
        reports[rep.name] = d
        ok = ok and rep.passed
    if record.events is not None and len(record.events) > 0:
        stats = _trigger.zeno_report(record.events, horizon=float(record.t[-1]), dt=record.dt)
        dwell_ok = stats.event_count <= 1 or stats.min_dwell >= record.dt * (1.0 - 1e-12)
        if event_mode:
            dwell_ok = dwell_ok and stats.floor_ok
        reports["zeno"] = {"passed": dwell_ok, "gating": True, **stats.to_dict()}
        ok = ok and dwell_ok
    return reports, ok


def run_from_config(cfg: RunConfig) -> tuple[_lyapunov.RunRecord, dict]:
    """Design (if needed), simulate, and check one configured run."""
    g = cfg.build_grid()
    z0 = build_field(g, cfg.z0)
    z1 = build_field(g, cfg.z1)
    integ = _dynamics.IntegratorConfig(t_end=cfg.t_end, dt=cfg.dt, cfl_fraction=cfg.cfl_fraction)

    certificate = None
    trigger_params = None
    period = cfg.period
    if cfg.mode != "uncontrolled":
        if cfg.certificate_path:
            certificate = _runio.read_certificate(cfg.certificate_path)
        else:
            certificate = design_from_config(cfg, g)
        scale = _trigger.initial_threshold_scale(
            z0, z1, certificate.epsilon, cfg.alpha, g, variant=cfg.design.eta0_variant
        )
        if scale <= _dynamics.DEGENERATE_REL * g.volume:
            raise DegenerateInitialDataError(
                f"initial data gives threshold scale {scale}; the trigger floor would vanish"
            )
        trigger_params = _trigger.TriggerParams.from_certificate(certificate, scale)
        if cfg.mode == "periodic" and period is None:
            # like-for-like update counts: reuse the matched run's mean dwell
            matched = _dynamics.simulate(
                z0, z1, cfg.alpha, g, integ, trigger_params, certificate, mode="event-triggered"
            )
            stats = _trigger.zeno_report(matched.events, horizon=float(matched.t[-1]), dt=matched.dt)
            period = stats.mean_dwell

    t0 = time.perf_counter()
    record = _dynamics.simulate(
        z0, z1, cfg.alpha, g, integ,
        trigger_params=trigger_params,
        certificate=certificate,
        mode=cfg.mode,
        period=period,
    )
    wall = time.perf_counter() - t0
    reports, ok = run_checks(record)
    delta_emp = reports.get("envelope", {}).get("details", {}).get("delta_emp")
    summary_extra = {
        "checks": reports,
        "checks_passed": ok,
        "delta_emp": delta_emp,
        "eta0_variant": cfg.design.eta0_variant,
        "period": period,
        "update_count": len(record.events) if record.events is not None else 0,
        "wall_clock_s": wall,
        "config": cfg.to_dict(),
    }
    return record, summary_extra


def _print_check_lines(reports: dict):
    for name, rep in reports.items():
        status = "PASS" if rep.get("passed") else "FAIL"
        if not rep.get("gating", True):
            status += " (advisory)"
        if name == "zeno":
            extra = f"events={rep['event_count']} min_dwell={rep['min_dwell']:.6g}"
        else:
            extra = f"violations={rep.get('n_violations', 0)} worst={rep.get('worst', float('nan')):.3e}"
        print(f"{name}: {status} ({extra})")


def _apply_overrides(cfg: RunConfig, args) -> RunConfig:
    cfg = copy.deepcopy(cfg)
    if getattr(args, "alpha", None) is not None:
        cfg.alpha = args.alpha
    if getattr(args, "length", None) is not None or getattr(args, "n", None) is not None:
        base = cfg.domain if cfg.domain.get("kind") == "interval" else {"kind": "interval", "length": 1.0, "n": 199}
        cfg.domain = dict(base)
        if args.length is not None:
            cfg.domain["length"] = args.length
        if args.n is not None:
            cfg.domain["n"] = args.n
    if getattr(args, "dt", None) is not None:
        cfg.dt = args.dt
    if getattr(args, "t_end", None) is not None:
        cfg.t_end = args.t_end
    if getattr(args, "mode", None) is not None:
        cfg.mode = args.mode
    if getattr(args, "period", None) is not None:
        cfg.period = args.period
    if getattr(args, "eta0_variant", None) is not None:
        cfg.design.eta0_variant = args.eta0_variant
    if getattr(args, "comega_source", None) is not None:
        cfg.design.comega_source = args.comega_source
    if getattr(args, "comega_value", None) is not None:
        cfg.design.comega_value = args.comega_value
    if getattr(args, "certificate", None) is not None:
        cfg.certificate_path = args.certificate
    if getattr(args, "out", None) is not None:
        cfg.out = args.out
    # re-run validation on the mutated pieces
    return RunConfig.from_dict(cfg.to_dict())


def _load_cfg(args) -> RunConfig:
    if args.config is not None:
        cfg = load_config(args.config)
    else:
        cfg = RunConfig()
    return _apply_overrides(cfg, args)


def cmd_design(args) -> int:
    cfg = _load_cfg(args)
    g = cfg.build_grid()
    cert = design_from_config(cfg, g)
    out = Path(cfg.out)
    path = out / "certificate.json"
    _runio.write_certificate(cert, path)
    print(
        f"certificate written to {path}: alpha={cert.alpha:.6g} "
        f"C_Omega={cert.c_omega:.6g} ({cert.c_omega_source}) "
        f"decay_rate={cert.decay_rate:.6g} overshoot={cert.overshoot:.6g}"
    )
    return EXIT_OK


def cmd_simulate(args) -> int:
    cfg = _load_cfg(args)
    record, extra = run_from_config(cfg)
    out = _runio.save_run(record, cfg.out, summary_extra=extra)
    print(f"run written to {out} (steps={record.n_steps}, events={extra['update_count']})")
    _print_check_lines(extra["checks"])
    return EXIT_OK if extra["checks_passed"] else EXIT_CHECK_FAILED


def _parse_list(text: str, what: str) -> list[float]:
    try:
        values = [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise UsageError(f"bad {what} list {text!r}: {exc}") from exc
    if not values:
        raise UsageError(f"empty {what} list")
    return values


def _sweep_cell(cfg: RunConfig, alpha: float, length: float, out_root: Path) -> dict:
    row = {"alpha": alpha, "L": length, "C_Omega": float("nan"), "feasible": 0,
           "delta": float("nan"), "K": float("nan"), "events": 0, "delta_emp": float("nan")}
    cell_cfg = copy.deepcopy(cfg)
    cell_cfg.alpha = alpha
    if cell_cfg.domain.get("kind") != "interval":
        raise ConfigurationError("sweep varies interval length; domain must be an interval")
    cell_cfg.domain = dict(cell_cfg.domain)
    cell_cfg.domain["length"] = length
    cell_cfg.out = str(out_root / f"cell_a{alpha:g}_L{length:g}")
    g = cell_cfg.build_grid()
    c_omega = discrete_poincare_constant(g)
    row["C_Omega"] = c_omega
    if c_omega >= _design.SQRT2:
        return row  # infeasible cell, not an error
    cell_cfg.design.comega_source = "user"
    cell_cfg.design.comega_value = c_omega
    try:
        record, extra = run_from_config(cell_cfg)
        _runio.save_run(record, cell_cfg.out, summary_extra=extra)
    except WavetrigError as exc:
        row["error"] = str(exc)
        return row
    cert = record.certificate
    row.update(
        feasible=1,
        delta=cert.decay_rate,
        K=cert.overshoot,
        events=extra["update_count"],
        delta_emp=extra["delta_emp"],
    )
    return row


def cmd_sweep(args) -> int:
    cfg = _load_cfg(args)
    alphas = _parse_list(args.alphas, "alpha")
    lengths = _parse_list(args.lengths, "length")
    out_root = Path(cfg.out)
    out_root.mkdir(parents=True, exist_ok=True)
    cells = [(a, L) for a in alphas for L in lengths]
    env_cap = os.environ.get("WAVETRIG_THREADS")
    workers = int(env_cap) if env_cap else min(8, os.cpu_count() or 1)
    workers = max(1, min(workers, len(cells)))
    rows: list[dict | None] = [None] * len(cells)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = {pool.submit(_sweep_cell, cfg, a, L, out_root): i for i, (a, L) in enumerate(cells)}
        for fut, i in futures.items():
            try:
                rows[i] = fut.result()
            except WavetrigError as exc:
                a, L = cells[i]
                rows[i] = {"alpha": a, "L": L, "C_Omega": float("nan"), "feasible": 0,
                           "delta": float("nan"), "K": float("nan"), "events": 0,
                           "delta_emp": float("nan"), "error": str(exc)}
    path = out_root / "sweep.csv"
    with open(path, "w") as fh:
        fh.write("alpha,L,C_Omega,feasible,delta,K,events,delta_emp\n")
        for row in rows:
            fh.write(
                f"{_runio.fmt(row['alpha'])},{_runio.fmt(row['L'])},{_runio.fmt(row['C_Omega'])},"
                f"{row['feasible']},{_runio.fmt(row['delta'])},{_runio.fmt(row['K'])},"
                f"{row['events']},{_runio.fmt(row['delta_emp'])}\n"
            )
    n_ok = sum(1 for r in rows if "error" not in r)
    n_feasible = sum(r["feasible"] for r in rows)
    print(f"sweep written to {path}: {len(rows)} cells, {n_feasible} feasible, {len(rows) - n_ok} errored")
    for row in rows:
        if "error" in row:
            print(f"  cell alpha={row['alpha']:g} L={row['L']:g} failed: {row['error']}", file=sys.stderr)
    return EXIT_OK if n_ok > 0 else EXIT_CHECK_FAILED


def cmd_verify(args) -> int:
    record, _summary = _runio.load_run(args.rundir)
    reports, ok = run_checks(record)
    if not reports:
        print("no checks applicable (no certificate, no events)")
        return EXIT_OK
    _print_check_lines(reports)
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def build_parser() -> _Parser:
    parser = _Parser(prog="wavetrig", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--alpha", type=float)
        p.add_argument("--length", type=float, help="interval length override")
        p.add_argument("--n", type=int, help="interior node count override")
        p.add_argument("--dt", type=float)
        p.add_argument("--t-end", dest="t_end", type=float)
        p.add_argument("--mode", choices=("event-triggered", "continuous-damping", "periodic", "uncontrolled"))
        p.add_argument("--period", type=float)
        p.add_argument("--eta0-variant", dest="eta0_variant", choices=("v0", "reduced"))
        p.add_argument("--comega-source", dest="comega_source",
                       choices=("discrete", "dirichlet-closed-form", "wirtinger", "user"))
        p.add_argument("--comega-value", dest="comega_value", type=float)
        p.add_argument("--certificate", help="path to an existing certificate.json")
        p.add_argument("--out")

    p_design = sub.add_parser("design", help="compute and write a stability certificate")
    add_common(p_design)
    p_design.set_defaults(func=cmd_design)

    p_sim = sub.add_parser("simulate", help="simulate a configured run and check it")
    add_common(p_sim)
    p_sim.set_defaults(func=cmd_simulate)

    p_sweep = sub.add_parser("sweep", help="design+simulate over an alpha x length grid")
    add_common(p_sweep)
    p_sweep.add_argument("--alphas", required=True, help="comma-separated damping gains")
    p_sweep.add_argument("--lengths", required=True, help="comma-separated interval lengths")
    p_sweep.set_defaults(func=cmd_sweep)

    p_verify = sub.add_parser("verify", help="re-run all checks on a persisted run directory")
    p_verify.add_argument("rundir")
    p_verify.set_defaults(func=cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FileNotFoundError as exc:
        missing = str(exc)
        print(f"error: {missing}", file=sys.stderr)
        return EXIT_USAGE if "config" in missing else EXIT_NOINPUT
    except InfeasibleDomainError as exc:
        print(f"infeasible domain: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except DesignFailureError as exc:
        print(f"design failure: {exc}", file=sys.stderr)
        return EXIT_DESIGN_FAILURE
    except BlowUpError as exc:
        print(f"blow-up: {exc}", file=sys.stderr)
        return EXIT_BLOWUP
    except DegenerateInitialDataError as exc:
        print(f"degenerate initial data: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except DataFormatError as exc:
        print(f"data format error: {exc}", file=sys.stderr)
        return EXIT_DATAERR
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def entrypoint():
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
