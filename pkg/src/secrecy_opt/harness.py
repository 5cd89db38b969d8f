"""Monte-Carlo sweeps, slope estimation and result emission.

A sweep is a grid over (trial, antenna config, SNR, scheme).  Channels are
drawn once per (trial, config) from a counter-derived seed and shared across
schemes and SNR points, so adding a scheme or an SNR never perturbs the
channel draws.  Records are merged in deterministic order regardless of the
worker count.
"""

from __future__ import annotations

import concurrent.futures
import json
import math
import os
import time
from dataclasses import dataclass, field

import numpy as np

from .channel import (
    AntennaConfig,
    CovariancePair,
    WiretapChannel,
    make_secrecy_result,
    sample_channel,
)
from .errors import InfeasibleConfigError, SecrecyOptError
from .mimome import gauss_seidel_solve
from .misome import (
    TwoLayerConfig,
    alignment_closed_form,
    misome_secrecy_capacity,
    zf_baseline,
)
from .sdof import alignment_precoders, sdof_closed_form

SCHEMES = ("optimal-misome", "alignment", "zf", "gauss-seidel", "sdof-theory")

CSV_COLUMNS = ("seed", "snr_db", "scheme", "cs_bits", "iterations",
               "wall_time_ms", "flags")


@dataclass
class ExperimentConfig:
    """One sweep description; ``configs`` may hold several antenna configs
    (config-sweep presets encode the active config in each record's flags)."""

    configs: list
    snr_db_list: list
    trials: int = 50
    seed: int = 2024
    schemes: tuple = ("optimal-misome",)
    overrides: dict = field(default_factory=dict)

    def __post_init__(self):
        if isinstance(self.configs, AntennaConfig):
            self.configs = [self.configs]
        if self.trials < 1:
            raise SecrecyOptError("trials must be >= 1")
        if not self.snr_db_list:
            raise SecrecyOptError("snr_db_list must be non-empty")
        for s in self.schemes:
            if s not in SCHEMES:
                raise SecrecyOptError(f"unknown scheme {s!r}")


@dataclass
class TrialRecord:
    seed: int
    snr_db: float
    scheme: str
    cs_bits: float
    iterations: int
    wall_time_ms: float
    flags: str


def snr_db_to_power(snr_db: float) -> float:
    return 10.0 ** (snr_db / 10.0)


def trial_seed(master_seed: int, trial: int) -> int:
    """Stable per-trial seed, independent of scheme and SNR lists."""
    return int(np.random.SeedSequence([master_seed, trial]).generate_state(1)[0])


def _alignment_result(ch: WiretapChannel, p: float):
    """Alignment-scheme secrecy rate: the closed-form power split for a
    single-antenna receiver, equal per-stream power on the precoder columns
    otherwise."""
    if ch.config.nb == 1:
        form = alignment_closed_form(ch, p)
        return form.cs_sub, 0, []
    pair = alignment_precoders(ch)
    ka, kj = pair.v.shape[1], pair.w.shape[1]
    per = p / (ka + kj)
    qa = per * pair.v @ pair.v.conj().T
    qj = (per * pair.w @ pair.w.conj().T if kj
          else np.zeros((ch.config.nj, ch.config.nj), dtype=complex))
    res = make_secrecy_result(ch, CovariancePair(qa=qa, qj=qj))
    return res.cs, 0, []


def run_scheme(ch: WiretapChannel, scheme: str, p: float,
               overrides: dict | None = None):
    """Run one scheme on one channel; returns (cs_bits, iterations, flags)."""
    overrides = overrides or {}
    flags: list = []
    if scheme == "sdof-theory":
        return float(sdof_closed_form(ch.config).d_star), 0, flags
    if scheme == "optimal-misome":
        cfg = TwoLayerConfig(
            grid_points=int(overrides.get("grid_points", 200)),
            refinement_iters=int(overrides.get("refinement_iters", 25)),
        )
        res = misome_secrecy_capacity(ch, p, cfg)
        if res.diagnostics.get("inner_failures"):
            flags.append("inner-failures=%d" % res.diagnostics["inner_failures"])
        return res.cs, res.diagnostics["evaluations"], flags
    if scheme == "alignment":
        try:
            return _alignment_result(ch, p)
        except InfeasibleConfigError:
            return 0.0, 0, ["alignment-infeasible"]
    if scheme == "zf":
        res = zf_baseline(ch, p)
        return res.cs, 0, flags
    if scheme == "gauss-seidel":
        rep = gauss_seidel_solve(
            ch, p,
            tol=float(overrides.get("tol", 1e-2)),
            max_iters=int(overrides.get("max_iters", 100)),
        )
        if not rep.converged:
            flags.append("not-converged")
        if rep.final.diagnostics.get("clamped"):
            flags.append("clamped")
        return rep.final.cs, rep.iterations, flags
    raise SecrecyOptError(f"unknown scheme {scheme!r}")


def _config_flag(config: AntennaConfig) -> str:
    na, nb, ne, nj = config
    return f"na={na};nb={nb};ne={ne};nj={nj}"


def _run_cell(cfg: ExperimentConfig, trial: int, config: AntennaConfig):
    """All records of one (trial, config) cell, in (snr, scheme) order."""
    seed = trial_seed(cfg.seed, trial)
    ch = sample_channel(config, seed)
    config_flag = [_config_flag(config)] if len(cfg.configs) > 1 else []
    records = []
    for snr_db in cfg.snr_db_list:
        p = snr_db_to_power(snr_db)
        for scheme in cfg.schemes:
            t0 = time.perf_counter()
            try:
                cs, iters, flags = run_scheme(ch, scheme, p, cfg.overrides)
            except SecrecyOptError as exc:
                cs, iters = 0.0, 0
                flags = [f"error:{type(exc).__name__}"]
            wall = (time.perf_counter() - t0) * 1000.0
            records.append(TrialRecord(
                seed=seed, snr_db=float(snr_db), scheme=scheme,
                cs_bits=max(float(cs), 0.0), iterations=int(iters),
                wall_time_ms=wall, flags=";".join(config_flag + flags),
            ))
    return records


def run_sweep(cfg: ExperimentConfig) -> list:
    """Execute the sweep; deterministic record order and content (excluding
    wall_time_ms) for a fixed config.  SECRECY_OPT_THREADS caps parallelism
    across (trial, config) cells."""
    cells = [(trial, config)
             for trial in range(cfg.trials) for config in cfg.configs]
    workers = int(os.environ.get("SECRECY_OPT_THREADS", "1"))
    if workers <= 1 or len(cells) == 1:
        chunks = [_run_cell(cfg, t, c) for t, c in cells]
    else:
        with concurrent.futures.ThreadPoolExecutor(workers) as pool:
            chunks = list(pool.map(lambda tc: _run_cell(cfg, *tc), cells))
    return [rec for chunk in chunks for rec in chunk]


def empirical_sdof_slope(ch: WiretapChannel, scheme: str,
                         p1_db: float = 40.0, p2_db: float = 50.0,
                         overrides: dict | None = None) -> float:
    """Finite-difference slope of the secrecy rate against log2 of the
    power budget, the empirical counterpart of the degrees-of-freedom
    limit."""
    if p2_db <= p1_db:
        raise SecrecyOptError("p2_db must exceed p1_db")
    cs1, _, _ = run_scheme(ch, scheme, snr_db_to_power(p1_db), overrides)
    cs2, _, _ = run_scheme(ch, scheme, snr_db_to_power(p2_db), overrides)
    return (cs2 - cs1) / (math.log2(snr_db_to_power(p2_db))
                          - math.log2(snr_db_to_power(p1_db)))


# --- emission ----------------------------------------------------------------

def _record_row(rec: TrialRecord) -> dict:
    return {
        "seed": rec.seed,
        "snr_db": rec.snr_db,
        "scheme": rec.scheme,
        "cs_bits": rec.cs_bits,
        "iterations": rec.iterations,
        "wall_time_ms": rec.wall_time_ms,
        "flags": rec.flags,
    }


def emit_results(records: list, format: str, path) -> None:
    """Write records as CSV (fixed column order) or a JSON array."""
    rows = [_record_row(r) for r in records]
    try:
        if format == "csv":
            with open(path, "w", encoding="utf-8", newline="") as fh:
                fh.write(",".join(CSV_COLUMNS) + "\n")
                for row in rows:
                    fh.write(",".join(_csv_cell(row[c]) for c in CSV_COLUMNS)
                             + "\n")
        elif format == "json":
            with open(path, "w", encoding="utf-8") as fh:
                json.dump(rows, fh, indent=1)
        else:
            raise SecrecyOptError(f"unknown format {format!r}")
    except OSError as exc:
        raise SecrecyOptError(f"cannot write {path}: {exc}") from exc


def _csv_cell(value) -> str:
    if isinstance(value, float):
        return repr(value)
    text = str(value)
    if "," in text or '"' in text:
        return '"' + text.replace('"', '""') + '"'
    return text


def parse_results_csv(path) -> list:
    """Round-trip reader for :func:`emit_results` CSV output."""
    import csv

    records = []
    with open(path, encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            records.append(TrialRecord(
                seed=int(row["seed"]), snr_db=float(row["snr_db"]),
                scheme=row["scheme"], cs_bits=float(row["cs_bits"]),
                iterations=int(row["iterations"]),
                wall_time_ms=float(row["wall_time_ms"]), flags=row["flags"],
            ))
    return records


# --- figure presets ----------------------------------------------------------

def preset(name: str, trials: int | None = None,
           seed: int = 2024) -> ExperimentConfig:
    """Named sweep configurations for the standard comparison figures,
    at desk scale (tens of trials rather than ~1000)."""
    if name == "fig2":
        return ExperimentConfig(
            configs=[AntennaConfig(3, 1, 3, 2)],
            snr_db_list=[0, 5, 10, 15, 20, 25, 30],
            trials=trials or 50, seed=seed,
            schemes=("optimal-misome", "alignment", "zf"),
            overrides={"grid_points": 64},
        )
    if name in ("fig3", "fig4"):
        return ExperimentConfig(
            configs=[AntennaConfig(3, 3, 3, 4)],
            snr_db_list=[0, 5, 10, 15, 20, 25, 30] if name == "fig3" else [10],
            trials=trials or 50, seed=seed,
            schemes=("gauss-seidel", "alignment"),
        )
    if name == "fig5":
        return ExperimentConfig(
            configs=[AntennaConfig(na, 3, 4, 3) for na in range(1, 9)],
            snr_db_list=[40, 50],
            trials=trials or 20, seed=seed,
            schemes=("alignment", "sdof-theory"),
        )
    if name == "fig6":
        return ExperimentConfig(
            configs=[AntennaConfig(na, nb, 4, 2)
                     for nb in range(1, 5) for na in range(1, 7)],
            snr_db_list=[40, 50],
            trials=trials or 10, seed=seed,
            schemes=("alignment", "sdof-theory"),
        )
    if name == "fig7":
        return ExperimentConfig(
            configs=[AntennaConfig(na, nb, 4, 4)
                     for nb in range(1, 5) for na in range(1, 7)],
            snr_db_list=[40, 50],
            trials=trials or 10, seed=seed,
            schemes=("alignment", "sdof-theory"),
        )
    raise SecrecyOptError(f"unknown preset {name!r}")


PRESETS = ("fig2", "fig3", "fig4", "fig5", "fig6", "fig7")
