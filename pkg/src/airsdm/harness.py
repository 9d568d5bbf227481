"""Batch experiment driver: sweeps, method dispatch, result tables.

An :class:`ExperimentSpec` names a scene, one sweep axis, a set of methods
and a seed list; :func:`run_experiment` runs every (sweep value, method,
seed) cell and returns sorted :class:`ResultRow` records.  Per-cell
failures become flagged rows instead of aborting the batch.  Tables are
emitted as CSV (schema versioned in a header comment) and/or JSON, both
of which round-trip losslessly through the matching readers.
"""

from __future__ import annotations

import csv
import json
import math
import re
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .scene import SceneConfig, build_channels, dbm_to_watts
from .model import Design, NoiseProfile, secrecy_rate
from .ldt_cffp import run_ldt_cffp
from .nsp_mrr import NspOptions, PaScalarContext, blocked_secrecy_rate, run_nsp_mrr_pa
from .pa_search import (
    annealing_search,
    exhaustive_search,
    fixed_beta_search,
    fixed_eta_search,
    fixed_point_search,
    pso_search,
)

__all__ = [
    "METHODS",
    "SWEEP_KINDS",
    "SweepSpec",
    "ExperimentSpec",
    "ResultRow",
    "run_experiment",
    "emit_results",
    "read_results_csv",
    "read_results_json",
]

CSV_SCHEMA = "# airsdm-results v1"
CSV_COLUMNS = ("method", "sweep_name", "sweep_value", "seed", "sr_bits",
               "iterations", "wall_time_s", "flags", "eta", "beta")

METHODS = (
    "ldt-cffp",          # monolithic-IRS surrogate ascent
    "nsp-mrr-pa/ES",     # blocked pipeline, exhaustive power-split search
    "nsp-mrr-pa/PSO",    # blocked pipeline, particle-swarm search
    "nsp-mrr-pa/SA",     # blocked pipeline, annealing search
    "fixed-eta",         # blocked pipeline, eta pinned at 0.5, beta searched
    "fixed-beta",        # blocked pipeline, beta pinned at 0.5, eta searched
    "fixed-both",        # blocked pipeline, (eta, beta) pinned at (0.5, 0.5)
    "zero-reflection",   # no IRS: matched-filter CM beam, AN nulled at Bob
)

SWEEP_KINDS = ("n_elements", "total_power_dbm", "n1", "n2", "pa_grid")

# Methods whose final design carries a power split the pa_grid sweep can map.
_NSP_METHODS = ("nsp-mrr-pa/ES", "nsp-mrr-pa/PSO", "nsp-mrr-pa/SA",
                "fixed-eta", "fixed-beta", "fixed-both")


@dataclass
class SweepSpec:
    """One sweep axis: what varies between experiment points.

    ``n_elements`` varies the monolithic element count N (blocked methods
    get N1 = N2 = N/2); ``n1``/``n2`` vary one block; ``total_power_dbm``
    varies the power budget; ``pa_grid`` evaluates the converged secrecy
    surface at explicit (eta, beta) pairs.
    """

    kind: str
    values: list

    def __post_init__(self) -> None:
        if self.kind not in SWEEP_KINDS:
            raise ValueError(f"unknown sweep kind {self.kind!r}; expected one of {SWEEP_KINDS}")
        if not self.values:
            raise ValueError("sweep values must be non-empty")
        if self.kind in ("n_elements", "n1", "n2"):
            for v in self.values:
                if int(v) != v or v < 1:
                    raise ValueError(f"{self.kind} values must be positive integers, got {v!r}")
            if self.kind == "n_elements" and any(int(v) % 2 for v in self.values):
                raise ValueError("n_elements values must be even (blocked methods split N in half)")
            self.values = [int(v) for v in self.values]
        elif self.kind == "pa_grid":
            pairs = []
            for v in self.values:
                e, b = v
                if not (0.0 < e < 1.0 and 0.0 < b < 1.0):
                    raise ValueError(f"pa_grid pairs must lie in (0, 1)^2, got {v!r}")
                pairs.append((float(e), float(b)))
            self.values = pairs
        else:
            self.values = [float(v) for v in self.values]

    def to_dict(self) -> dict:
        values = [list(v) if isinstance(v, tuple) else v for v in self.values]
        return {"kind": self.kind, "values": values}


@dataclass
class ExperimentSpec:
    """Everything needed to reproduce one batch of runs."""

    sweep: SweepSpec
    methods: list[str]
    scene: SceneConfig = field(default_factory=SceneConfig)
    power_dbm: float = 20.0      # operating power when the sweep is not over power
    noise_dbm: float = -70.0     # per-receiver and per-element noise power
    seeds: list[int] = field(default_factory=lambda: list(range(1, 21)))
    out: str | None = None       # output path stem for emit_results
    formats: list[str] = field(default_factory=lambda: ["csv"])
    workers: int = 1             # thread-pool width; rows are sorted, so any width is equivalent

    def __post_init__(self) -> None:
        if isinstance(self.sweep, dict):
            self.sweep = SweepSpec(**self.sweep)
        if isinstance(self.scene, dict):
            self.scene = SceneConfig.from_dict(self.scene)
        if not self.methods:
            raise ValueError("methods must be non-empty")
        for m in self.methods:
            if m not in METHODS:
                raise ValueError(f"unknown method {m!r}; expected one of {METHODS}")
        if not self.seeds:
            raise ValueError("seeds must be non-empty")
        if len(set(self.seeds)) != len(self.seeds):
            raise ValueError("seeds must be distinct")
        self.seeds = [int(s) for s in self.seeds]
        for f in self.formats:
            if f not in ("csv", "json"):
                raise ValueError(f"unknown format {f!r}; expected 'csv' or 'json'")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        if self.sweep.kind == "pa_grid":
            bad = [m for m in self.methods if m not in _NSP_METHODS]
            if bad:
                raise ValueError(f"pa_grid sweeps need power-split methods, not {bad}")

    def to_dict(self) -> dict:
        return {
            "sweep": self.sweep.to_dict(),
            "methods": list(self.methods),
            "scene": self.scene.to_dict(),
            "power_dbm": self.power_dbm,
            "noise_dbm": self.noise_dbm,
            "seeds": list(self.seeds),
            "out": self.out,
            "formats": list(self.formats),
            "workers": self.workers,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentSpec":
        known = {"sweep", "methods", "scene", "power_dbm", "noise_dbm",
                 "seeds", "out", "formats", "workers"}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown experiment fields: {sorted(unknown)}")
        if "sweep" not in data or "methods" not in data:
            raise ValueError("experiment spec needs 'sweep' and 'methods'")
        return cls(**data)

    def to_file(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n")

    @classmethod
    def from_file(cls, path: str | Path) -> "ExperimentSpec":
        try:
            data = json.loads(Path(path).read_text())
        except OSError as exc:
            raise ValueError(f"cannot read experiment spec {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ValueError(f"invalid JSON in experiment spec {path}: {exc}") from exc
        return cls.from_dict(data)


@dataclass
class ResultRow:
    """One completed (or failed, flagged) run."""

    method: str
    sweep_name: str
    sweep_value: object          # int, float, or (eta, beta) tuple for pa_grid
    seed: int
    sr_bits: float
    iterations: int
    wall_time_s: float
    flags: list[str] = field(default_factory=list)
    eta: float | None = None
    beta: float | None = None


def _noise_profile(spec: ExperimentSpec) -> NoiseProfile:
    w = dbm_to_watts(spec.noise_dbm)
    return NoiseProfile(sigma2_irs=w, sigma2_b=w, sigma2_e=w)


def _scene_at(spec: ExperimentSpec, value, seed: int) -> tuple[SceneConfig, float]:
    """Scene and power (watts) for one sweep point.

    The run seed is folded into the channel seed so Rician scenes draw a
    fresh realization per seed; pure-LoS scenes ignore it.
    """
    cfg = spec.scene
    power_dbm = spec.power_dbm
    kind = spec.sweep.kind
    if kind == "n_elements":
        cfg = replace(cfg, n_irs=value, n1=value // 2, n2=value - value // 2)
    elif kind == "n1":
        cfg = replace(cfg, n1=value, n_irs=value + cfg.n2)
    elif kind == "n2":
        cfg = replace(cfg, n2=value, n_irs=cfg.n1 + value)
    elif kind == "total_power_dbm":
        power_dbm = value
    cfg = replace(cfg, seed=cfg.seed + seed)
    return cfg, dbm_to_watts(power_dbm)


_SEARCHERS = {
    "nsp-mrr-pa/ES": exhaustive_search,
    "nsp-mrr-pa/PSO": pso_search,
    "nsp-mrr-pa/SA": annealing_search,
    "fixed-eta": fixed_eta_search,
    "fixed-beta": fixed_beta_search,
    "fixed-both": fixed_point_search,
}


def _zero_reflection_design(ch, p_watts: float) -> tuple[Design, list[str]]:
    """No-IRS baseline: matched CM beam, AN beam nulled at Bob, half power each."""
    flags: list[str] = []
    h_b, h_e = ch.h_b, ch.h_e
    v_b = math.sqrt(p_watts / 2.0) * h_b / np.linalg.norm(h_b)
    resid = h_e - (np.vdot(h_b, h_e) / np.vdot(h_b, h_b)) * h_b
    nrm = float(np.linalg.norm(resid))
    if nrm > 1e-12 * float(np.linalg.norm(h_e)):
        v_e = math.sqrt(p_watts / 2.0) * resid / nrm
    else:
        v_e = np.zeros_like(h_e)
        flags.append("zero-reflection-degenerate")
    theta = np.zeros(ch.H_si.shape[0], dtype=complex)
    return Design(v_b=v_b, v_e=v_e, theta=theta), flags


def _run_point(spec: ExperimentSpec, value, method: str, seed: int) -> ResultRow:
    cfg, p_watts = _scene_at(spec, value, seed)
    noise = _noise_profile(spec)
    ch, bch = build_channels(cfg)
    if method == "ldt-cffp":
        design, trace = run_ldt_cffp(ch, noise, p_watts, seed=seed)
        return ResultRow(method, spec.sweep.kind, value, seed,
                         secrecy_rate(ch, design, noise),
                         trace.iterations, trace.wall_time_s, list(trace.flags))
    if method == "zero-reflection":
        t0 = time.perf_counter()
        design, flags = _zero_reflection_design(ch, p_watts)
        sr = secrecy_rate(ch, design, noise)
        return ResultRow(method, spec.sweep.kind, value, seed, sr, 0,
                         max(time.perf_counter() - t0, 1e-9), flags)
    design, trace = run_nsp_mrr_pa(bch, noise, p_watts,
                                   searcher=_SEARCHERS[method], seed=seed)
    return ResultRow(method, spec.sweep.kind, value, seed,
                     blocked_secrecy_rate(bch, design, noise),
                     trace.iterations, trace.wall_time_s, list(trace.flags),
                     eta=design.pa.eta, beta=design.pa.beta)


def _run_pa_grid(spec: ExperimentSpec, method: str, seed: int) -> list[ResultRow]:
    """One pipeline run, then the converged secrecy surface at every pair."""
    cfg, p_watts = _scene_at(spec, None, seed)
    noise = _noise_profile(spec)
    _, bch = build_channels(cfg)
    design, trace = run_nsp_mrr_pa(bch, noise, p_watts,
                                   searcher=_SEARCHERS[method], seed=seed)
    opt = NspOptions()
    ctx = PaScalarContext(bch, design.v_b, design.v_e, design.theta1,
                          design.theta2, opt.mu, p_watts, noise)
    pairs = spec.sweep.values
    etas = np.array([p[0] for p in pairs])
    betas = np.array([p[1] for p in pairs])
    surface = np.asarray(ctx(etas, betas), dtype=float)
    return [
        ResultRow(method, "pa_grid", pair, seed, float(sr),
                  trace.iterations, trace.wall_time_s, list(trace.flags),
                  eta=pair[0], beta=pair[1])
        for pair, sr in zip(pairs, surface)
    ]


def _value_key(value) -> tuple:
    if isinstance(value, tuple):
        return tuple(float(v) for v in value)
    if value is None:
        return (0.0,)
    return (float(value),)


def _row_key(row: ResultRow) -> tuple:
    return (row.method, row.sweep_name, _value_key(row.sweep_value), row.seed)


def run_experiment(spec: ExperimentSpec) -> list[ResultRow]:
    """Run every (sweep value, method, seed) cell; failures become flagged rows.

    Rows come back sorted by (method, sweep, value, seed), so the table is
    independent of execution order (and of ``spec.workers``).
    """
    if spec.sweep.kind == "pa_grid":
        jobs = [(None, m, s) for m in spec.methods for s in spec.seeds]
    else:
        jobs = [(v, m, s) for v in spec.sweep.values
                for m in spec.methods for s in spec.seeds]

    def run_one(job) -> list[ResultRow]:
        value, method, seed = job
        t0 = time.perf_counter()
        try:
            if spec.sweep.kind == "pa_grid":
                return _run_pa_grid(spec, method, seed)
            return [_run_point(spec, value, method, seed)]
        except Exception as exc:  # noqa: BLE001 - contract: never abort the batch
            flag = f"error:{type(exc).__name__}: {exc}"
            return [ResultRow(method, spec.sweep.kind, value, seed,
                              float("nan"), 0,
                              max(time.perf_counter() - t0, 1e-9), [flag])]

    if spec.workers > 1:
        with ThreadPoolExecutor(max_workers=spec.workers) as pool:
            batches = list(pool.map(run_one, jobs))
    else:
        batches = [run_one(job) for job in jobs]
    rows = [row for batch in batches for row in batch]
    rows.sort(key=_row_key)
    return rows


# --- emission / parsing ---------------------------------------------------

def _format_value(value) -> str:
    if isinstance(value, tuple):
        return "|".join(repr(float(v)) for v in value)
    if isinstance(value, int):
        return str(value)
    return repr(float(value))


_INT_RE = re.compile(r"^-?\d+$")


def _parse_value(text: str):
    if "|" in text:
        return tuple(float(part) for part in text.split("|"))
    if _INT_RE.match(text):
        return int(text)
    return float(text)


def _format_flags(flags: list[str]) -> str:
    return ";".join(f.replace(";", ",") for f in flags)


def _row_to_record(row: ResultRow) -> dict:
    value = list(row.sweep_value) if isinstance(row.sweep_value, tuple) else row.sweep_value
    return {
        "method": row.method,
        "sweep_name": row.sweep_name,
        "sweep_value": value,
        "seed": row.seed,
        "sr_bits": row.sr_bits,
        "iterations": row.iterations,
        "wall_time_s": row.wall_time_s,
        "flags": list(row.flags),
        "eta": row.eta,
        "beta": row.beta,
    }


def _record_to_row(rec: dict) -> ResultRow:
    value = rec["sweep_value"]
    if isinstance(value, list):
        value = tuple(float(v) for v in value)
    return ResultRow(
        method=rec["method"],
        sweep_name=rec["sweep_name"],
        sweep_value=value,
        seed=int(rec["seed"]),
        sr_bits=float(rec["sr_bits"]),
        iterations=int(rec["iterations"]),
        wall_time_s=float(rec["wall_time_s"]),
        flags=list(rec["flags"]),
        eta=None if rec["eta"] is None else float(rec["eta"]),
        beta=None if rec["beta"] is None else float(rec["beta"]),
    )


def emit_results(rows: list[ResultRow], out: str | Path,
                 formats: tuple[str, ...] = ("csv",)) -> list[Path]:
    """Write the table as ``<out>.csv`` / ``<out>.json``; returns the paths."""
    if not rows:
        raise ValueError("refusing to emit an empty result table")
    stem = Path(out)
    written: list[Path] = []
    for fmt in formats:
        if fmt == "csv":
            path = stem.with_suffix(".csv")
            try:
                with open(path, "w", newline="") as fh:
                    fh.write(CSV_SCHEMA + "\n")
                    writer = csv.writer(fh, lineterminator="\n")
                    writer.writerow(CSV_COLUMNS)
                    for row in rows:
                        writer.writerow([
                            row.method,
                            row.sweep_name,
                            _format_value(row.sweep_value),
                            row.seed,
                            repr(float(row.sr_bits)),
                            row.iterations,
                            repr(float(row.wall_time_s)),
                            _format_flags(row.flags),
                            "" if row.eta is None else repr(float(row.eta)),
                            "" if row.beta is None else repr(float(row.beta)),
                        ])
            except OSError as exc:
                raise OSError(f"cannot write results to {path}: {exc}") from exc
        elif fmt == "json":
            path = stem.with_suffix(".json")
            payload = {"schema": "airsdm-results v1",
                       "rows": [_row_to_record(r) for r in rows]}
            try:
                path.write_text(json.dumps(payload, indent=2) + "\n")
            except OSError as exc:
                raise OSError(f"cannot write results to {path}: {exc}") from exc
        else:
            raise ValueError(f"unknown format {fmt!r}; expected 'csv' or 'json'")
        written.append(path)
    return written


def read_results_csv(path: str | Path) -> list[ResultRow]:
    rows: list[ResultRow] = []
    try:
        with open(path, newline="") as fh:
            lines = [ln for ln in fh if not ln.startswith("#")]
    except OSError as exc:
        raise OSError(f"cannot read results from {path}: {exc}") from exc
    reader = csv.reader(lines)
    header = next(reader, None)
    if header != list(CSV_COLUMNS):
        raise ValueError(f"unexpected results header in {path}: {header}")
    for rec in reader:
        (method, sweep_name, value, seed, sr, iters, wall, flags, eta, beta) = rec
        rows.append(ResultRow(
            method=method,
            sweep_name=sweep_name,
            sweep_value=_parse_value(value),
            seed=int(seed),
            sr_bits=float(sr),
            iterations=int(iters),
            wall_time_s=float(wall),
            flags=flags.split(";") if flags else [],
            eta=None if eta == "" else float(eta),
            beta=None if beta == "" else float(beta),
        ))
    return rows


def read_results_json(path: str | Path) -> list[ResultRow]:
    try:
        payload = json.loads(Path(path).read_text())
    except OSError as exc:
        raise OSError(f"cannot read results from {path}: {exc}") from exc
    if payload.get("schema") != "airsdm-results v1":
        raise ValueError(f"unexpected results schema in {path}: {payload.get('schema')!r}")
    return [_record_to_row(rec) for rec in payload["rows"]]
