"""End-to-end experiment orchestration and deterministic reporting.

A run goes correction chain -> cut-curve chain -> theory CDFs ->
deviation report, writing CSVs and a JSON summary.  Outputs are
byte-identical for identical (config, seed): the two chains use
independent streams spawned from the master seed, all files are written
with fixed number formatting, and wall-clock times go to a separate
timing.json that is excluded from the determinism contract.
"""

from __future__ import annotations

import csv
import json
import math
import time
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import correction as corr_mod
from . import cutcurve as cut_mod
from . import stats as stats_mod
from . import theory as theory_mod

SCHEMA_VERSION = 1

GEOMETRY_TO_CURVE = {"disc": "circle", "halfplane": "semicircle_upper"}
GEOMETRY_TO_ENSEMBLE = {"disc": "free", "halfplane": "halfplane"}


class StageError(RuntimeError):
    """A pipeline stage failed; carries the stage name."""

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"stage {stage!r} failed: {cause}")
        self.stage = stage


@dataclass(frozen=True)
class RunConfig:
    """Every knob of one experiment; round-trips through JSON losslessly."""

    geometry: str = "disc"  # disc | halfplane
    n_steps: int = 30_000
    n_samples: int = 200_000  # proposed cut-curve samples (pre-rejection)
    stride: int = 200
    radius: float = 0.2
    nu: float = 0.75
    correction_n_steps: int = 101
    correction_samples: int = 200_000
    correction_stride: int = 4
    theta_step: float = 1.0
    n_batches: int = 20
    seed: int = 0
    schema_version: int = SCHEMA_VERSION

    def __post_init__(self):
        if self.geometry not in GEOMETRY_TO_CURVE:
            raise ValueError(f"geometry must be one of {sorted(GEOMETRY_TO_CURVE)}")
        if self.schema_version != SCHEMA_VERSION:
            raise ValueError(f"unsupported schema version {self.schema_version}")
        if self.correction_n_steps % 2 != 1:
            raise ValueError("correction_n_steps must be odd (middle-bond ensemble)")

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        return cls(**json.loads(text))

    def stage_seeds(self) -> dict:
        """Independent integer seeds per stage from the master seed."""
        children = np.random.SeedSequence(self.seed).spawn(2)
        return {
            "correction": int(children[0].generate_state(1, np.uint32)[0]),
            "cutcurve": int(children[1].generate_state(1, np.uint32)[0]),
        }


def _fmt(x) -> str:
    if isinstance(x, float):
        return format(x, ".12g")
    return str(x)


def _write_csv(path: Path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def write_correction_csv(path: Path, table, lcorr):
    _write_csv(path,
               ["theta_deg", "p_v", "p_v_stderr", "l", "l_stderr", "n_success"],
               zip(table.theta_grid, table.p_values, table.p_stderr,
                   lcorr.l_values, lcorr.l_stderr, table.n_success))


def write_samples_csv(path: Path, run):
    _write_csv(path,
               ["chain_id", "sample_index", "angle_deg", "bond_orientation"],
               ((s.chain_id, s.sample_index, s.angle, s.bond_orientation)
                for s in run.samples))


def write_cdf_csv(path: Path, report):
    band = report.band_two_sigma
    band = np.zeros_like(report.grid) if band is None else band
    _write_csv(path,
               ["angle_deg", "ecdf", "theory_uncorrected", "theory_corrected",
                "dev_uncorrected", "dev_corrected", "band_two_sigma"],
               zip(report.grid, report.ecdf, report.theory_uncorrected,
                   report.theory_corrected, report.deviation_uncorrected,
                   report.deviation_corrected, band))


def theory_cdfs(geometry: str, grid_deg, correction=None):
    """(uncorrected, corrected) theory CDF arrays on a degree grid.

    disc: angles folded to [0, 90] (the period of the lattice structure),
    so the CDF is four times the full-circle CDF.  halfplane: angles on
    [0, 180].
    """
    grid = np.asarray(grid_deg, dtype=np.float64)
    tag = "disc_center" if geometry == "disc" else "halfplane_semicircle"
    fold_factor = 4.0 if geometry == "disc" else 1.0
    out = []
    for corr in (None, correction):
        dens = theory_mod.theoretical_density(tag, corr)
        out.append(fold_factor * np.asarray(
            theory_mod.density_cdf(dens, np.radians(grid))))
    return out[0], out[1]


def run_experiment(config: RunConfig, out_dir) -> dict:
    """Run the full pipeline and write the report bundle to out_dir.

    Returns the summary dictionary (also written to summary.json).
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    seeds = config.stage_seeds()
    timing = {}

    def staged(name, fn):
        t0 = time.perf_counter()
        try:
            result = fn()
        except Exception as exc:  # noqa: BLE001 - re-tagged for the CLI
            raise StageError(name, exc) from exc
        timing[name] = time.perf_counter() - t0
        return result

    def stage_correction():
        grid = corr_mod.default_theta_grid(config.theta_step)
        table = corr_mod.estimate_p2(grid, config.correction_n_steps,
                                     config.correction_samples,
                                     stride=config.correction_stride,
                                     seed=seeds["correction"],
                                     n_batches=config.n_batches)
        return table, corr_mod.assemble_l(table)

    table, lcorr = staged("correction", stage_correction)

    def stage_cutcurve():
        curve = cut_mod.CutCurve(GEOMETRY_TO_CURVE[config.geometry], config.radius)
        return cut_mod.sample_cutcurve(
            GEOMETRY_TO_ENSEMBLE[config.geometry], curve, config.n_steps,
            config.n_samples, stride=config.stride, seed=seeds["cutcurve"],
            nu=config.nu)

    run = staged("cutcurve", stage_cutcurve)

    def stage_compare():
        if config.geometry == "disc":
            grid = np.arange(0.0, 90.0 + 0.5 * config.theta_step, config.theta_step)
            fold = 90.0
        else:
            grid = np.arange(0.0, 180.0 + 0.5 * config.theta_step, config.theta_step)
            fold = None
        uncorr, corrd = theory_cdfs(config.geometry, grid, lcorr.interpolator())
        return stats_mod.compare_cdfs(grid, run.angles, uncorr, corrd,
                                      fold=fold, n_batches=config.n_batches)

    report = staged("compare", stage_compare)

    write_correction_csv(out / "correction.csv", table, lcorr)
    write_samples_csv(out / "samples.csv", run)
    write_cdf_csv(out / "cdf.csv", report)

    summary = {
        "config": json.loads(config.to_json()),
        "seeds": seeds,
        "n_accepted": len(run.samples),
        "acceptance_fraction": run.acceptance_fraction,
        "n_zero": run.n_zero,
        "n_multi": run.n_multi,
        "n_degenerate": run.n_degenerate,
        "pivot_accept_rate": run.accept_rate_pivot,
        "max_dev_uncorrected": report.max_dev_uncorrected,
        "max_dev_corrected": report.max_dev_corrected,
    }
    (out / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    manifest = {
        "schema_version": SCHEMA_VERSION,
        "seeds": seeds,
        "config": json.loads(config.to_json()),
        "versions": {"numpy": np.__version__},
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    # wall times are machine-dependent by nature; kept out of the
    # byte-identical reproducibility surface
    (out / "timing.json").write_text(json.dumps(timing, indent=2, sort_keys=True) + "\n")
    return summary
