"""Run persistence: CSV time series, CSV event log, JSON summary and
certificate files.

Floats are written in scientific notation with 17 significant digits so a
write/read cycle is bit-exact and identical runs produce byte-identical
series files.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .config import RunConfig
from .design import StabilityCertificate
from .errors import DataFormatError
from .lyapunov import RunRecord
from .trigger import EventLog, TriggerParams

__all__ = [
    "SERIES_COLUMNS",
    "SERIES_COLUMNS_UNCONTROLLED",
    "fmt",
    "save_run",
    "load_run",
    "write_certificate",
    "read_certificate",
]

SERIES_COLUMNS = (
    "t", "E", "V", "norm_z_sq", "norm_v_sq", "norm_gradz_sq",
    "norm_e_sq", "eta0", "trigger_value", "event",
)
SERIES_COLUMNS_UNCONTROLLED = ("t", "E", "V", "norm_z_sq", "norm_v_sq", "norm_gradz_sq")


def fmt(x: float) -> str:
    return format(float(x), ".17e")


def _json_default(obj):
    # numpy scalars/arrays show up in check details and diagnostics
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serializable: {type(obj)}")


def _record_columns(record: RunRecord) -> dict[str, np.ndarray]:
    return {
        "t": record.t,
        "E": record.energy,
        "V": record.lyapunov,
        "norm_z_sq": record.norm_z_sq,
        "norm_v_sq": record.norm_v_sq,
        "norm_gradz_sq": record.norm_gradz_sq,
        "norm_e_sq": record.norm_e_sq,
        "eta0": record.eta0,
        "trigger_value": record.trigger_value,
        "event": record.event,
    }


def save_run(record: RunRecord, outdir: str | Path, summary_extra: dict | None = None) -> Path:
    """Write series.csv, events.csv and summary.json into ``outdir``."""
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    names = SERIES_COLUMNS_UNCONTROLLED if record.mode == "uncontrolled" else SERIES_COLUMNS
    columns = _record_columns(record)
    with open(out / "series.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(names)
        for i in range(record.t.size):
            row = []
            for name in names:
                if name == "event":
                    row.append(str(int(columns[name][i])))
                else:
                    row.append(fmt(columns[name][i]))
            writer.writerow(row)

    with open(out / "events.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(("k", "t_k", "dwell"))
        if record.events is not None:
            prev = None
            for k, t in zip(record.events.ks, record.events.times):
                dwell = float("nan") if prev is None else t - prev
                writer.writerow((str(k), fmt(t), fmt(dwell)))
                prev = t

    summary = {
        "mode": record.mode,
        "dt": record.dt,
        "n_steps": record.n_steps,
        "event_count": len(record.events) if record.events is not None else 0,
        "certificate": record.certificate.to_dict() if record.certificate else None,
        "trigger": (
            {
                "gamma0": record.trigger.gamma0,
                "gamma1": record.trigger.gamma1,
                "theta": record.trigger.theta,
                "eta0_scale": record.trigger.eta0_scale,
            }
            if record.trigger
            else None
        ),
        "meta": record.meta,
    }
    if summary_extra:
        summary.update(summary_extra)
    with open(out / "summary.json", "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True, default=_json_default)
        fh.write("\n")
    return out


def _parse_series(path: Path) -> dict[str, np.ndarray]:
    try:
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            rows = list(reader)
    except (OSError, StopIteration) as exc:
        raise DataFormatError(f"cannot read series file {path}: {exc}") from exc
    if header not in (list(SERIES_COLUMNS), list(SERIES_COLUMNS_UNCONTROLLED)):
        raise DataFormatError(f"unexpected series header in {path}: {header}")
    try:
        data = np.array([[float(x) for x in row] for row in rows])
    except ValueError as exc:
        raise DataFormatError(f"non-numeric entry in {path}: {exc}") from exc
    if data.ndim != 2 or data.shape[0] < 2 or data.shape[1] != len(header):
        raise DataFormatError(f"malformed series table in {path}")
    return {name: data[:, j] for j, name in enumerate(header)}


def load_run(rundir: str | Path) -> tuple[RunRecord, dict]:
    """Rebuild a RunRecord (and the summary dict) from a run directory."""
    d = Path(rundir)
    series_path = d / "series.csv"
    summary_path = d / "summary.json"
    if not series_path.is_file() or not summary_path.is_file():
        raise FileNotFoundError(f"run directory {d} lacks series.csv or summary.json")
    try:
        summary = json.loads(summary_path.read_text())
    except json.JSONDecodeError as exc:
        raise DataFormatError(f"summary.json is not valid JSON: {exc}") from exc
    cols = _parse_series(series_path)
    n = cols["t"].size
    nan = np.full(n, np.nan)
    mode = summary.get("mode", "event-triggered")
    cert = summary.get("certificate")
    certificate = StabilityCertificate.from_dict(cert) if cert else None
    trig = summary.get("trigger")
    trigger_params = TriggerParams(**trig) if trig else None
    event = cols.get("event")
    event_arr = event.astype(bool) if event is not None else np.zeros(n, dtype=bool)

    events = None
    if mode != "uncontrolled":
        events = EventLog()
        idx = np.flatnonzero(event_arr)
        for order, i in enumerate(idx):
            events.append(
                order,
                float(cols["t"][i]),
                float(cols["trigger_value"][i]),
                float(cols["norm_e_sq"][i]),
                float(cols["eta0"][i]),
            )

    t = cols["t"]
    if n >= 2:
        dt = float(t[1] - t[0])
    else:
        dt = float(summary.get("dt", 0.0))
    record = RunRecord(
        t=t,
        energy=cols["E"],
        lyapunov=cols["V"],
        norm_z_sq=cols["norm_z_sq"],
        norm_v_sq=cols["norm_v_sq"],
        norm_gradz_sq=cols["norm_gradz_sq"],
        norm_e_sq=cols.get("norm_e_sq", nan),
        eta0=cols.get("eta0", nan),
        trigger_value=cols.get("trigger_value", nan),
        event=event_arr,
        events=events,
        certificate=certificate,
        trigger=trigger_params,
        mode=mode,
        dt=dt,
        meta=summary.get("meta", {}),
    )
    return record, summary


def write_certificate(cert: StabilityCertificate, path: str | Path):
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(cert.to_dict(), fh, indent=2, sort_keys=True, default=_json_default)
        fh.write("\n")


def read_certificate(path: str | Path) -> StabilityCertificate:
    p = Path(path)
    if not p.is_file():
        raise FileNotFoundError(f"certificate file not found: {p}")
    try:
        return StabilityCertificate.from_dict(json.loads(p.read_text()))
    except (json.JSONDecodeError, TypeError) as exc:
        raise DataFormatError(f"cannot parse certificate {p}: {exc}") from exc


def config_echo(cfg: RunConfig) -> dict:
    return cfg.to_dict()
