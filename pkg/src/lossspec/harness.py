"""Monte Carlo experiment runner for size and power grids.

A configuration spans a grid of data-generating cells (model, theta,
error law, n), a set of test statistics, a calibration method, and levels.
Every replication of every cell draws from streams derived as

    sample stream     (master_seed, cell, replication)
    bootstrap stream  (master_seed, cell, replication, replicate)

where the cell key is a hash of the cell's own description, so extending a
grid never perturbs the streams of existing cells, and replications are
independent of execution order and worker count. Models that take no
theta are collapsed onto a single theta = 0 cell.

Replications whose statistics are numerically degenerate are skipped and
counted; a cell where more than 1% of replications degenerate aborts the
run with a diagnostic, since that signals a systematic problem rather
than bad luck.

Reports serialize to a single JSON document with an embedded CSV table
for spreadsheet import. Numeric fields survive the round trip bit-exactly
(floats are written in shortest round-trip decimal form). Wall-clock
metadata is quarantined in a `metadata` field excluded from the config
hash, so repeated runs produce byte-identical primary content.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Optional, Sequence

from . import __version__ as _pkg_version
from ._backend import BACKEND
from .bootstrap import MODES, bootstrap_many
from .dgp import DGPSpec, gen_sample, parse_model
from .exceptions import DataFormatError, DegenerateSampleError
from .kernels import KernelSpec, kernel_constants, parse_kernel
from .loss import loss_curvature
from .rng import Tag, content_key, derive_key
from .smoothing import BandwidthRule, nw_fit, parse_bandwidth, parse_ratio, resolve_bandwidth
from .stats import (
    TestSpec,
    asymptotic_calibration_glr,
    asymptotic_calibration_q,
    estimate_omega,
    glr_statistic,
    loss_statistic,
    ols_fit,
    parse_test,
)

__all__ = [
    "ExperimentConfig",
    "CellResult",
    "MCReport",
    "PRESETS",
    "parse_config_text",
    "preset_config",
    "run_experiment",
    "persist_report",
    "load_report",
    "merge_reports",
    "mc_standard_error",
]

SCHEMA_VERSION = 1

_THETA_MODELS = ("p1_quadratic", "p2_threshold", "p3_smooth_transition")


def mc_standard_error(rate: float, reps: int) -> float:
    """Monte Carlo standard error, in percent, of a rejection rate."""
    return 100.0 * (rate * (1.0 - rate) / reps) ** 0.5


@dataclass(frozen=True)
class ExperimentConfig:
    """A full Monte Carlo experiment description."""

    models: tuple[str, ...]
    tests: tuple[TestSpec, ...]
    kernel: KernelSpec
    bandwidth: BandwidthRule
    reps: int
    master_seed: int
    thetas: tuple[float, ...] = (0.0,)
    dists: tuple[str, ...] = ("normal",)
    ns: tuple[int, ...] = (100,)
    calibration: str = "bootstrap"
    b: int = 99
    boot_mode: str = "conditional"
    levels: tuple[float, ...] = (0.10, 0.05)
    delta_shape: str = "centered_quadratic"
    local_omega: float = 2.0 / 9.0
    truncation: str = "clip"

    def __post_init__(self) -> None:
        object.__setattr__(self, "models", tuple(parse_model(m) for m in self.models))
        if not self.models:
            raise DataFormatError("config needs at least one model")
        if not self.tests:
            raise DataFormatError("config needs at least one test")
        if not self.ns or any(n < 4 for n in self.ns):
            raise DataFormatError("each sample size must be at least 4")
        if self.reps < 1:
            raise DataFormatError("reps must be at least 1")
        if not self.levels or not all(0.0 < a < 1.0 for a in self.levels):
            raise DataFormatError("levels must lie strictly inside (0, 1)")
        if self.calibration not in ("asymptotic", "bootstrap"):
            raise DataFormatError("calibration must be 'asymptotic' or 'bootstrap'")
        if self.boot_mode not in MODES:
            raise DataFormatError(f"unknown bootstrap mode {self.boot_mode!r}")
        if self.b < 1:
            raise DataFormatError("bootstrap replication count b must be at least 1")
        if self.calibration == "asymptotic" and any(t.method == "f" for t in self.tests):
            raise DataFormatError(
                "the f statistic has no asymptotic calibration; use bootstrap"
            )
        if not self.thetas:
            raise DataFormatError("config needs at least one theta")

    def to_dict(self) -> dict:
        return {
            "models": list(self.models),
            "thetas": list(self.thetas),
            "dists": list(self.dists),
            "ns": list(self.ns),
            "tests": [t.label() for t in self.tests],
            "kernel": self.kernel.family,
            "support_halfwidth": self.kernel.support_halfwidth,
            # structural, not the %g label: omega = 2/9 must survive the trip
            "bandwidth": {
                "kind": self.bandwidth.kind,
                "h": self.bandwidth.h,
                "omega": self.bandwidth.omega,
                "c1": self.bandwidth.c1,
                "c2": self.bandwidth.c2,
                "grid": self.bandwidth.grid,
            },
            "calibration": self.calibration,
            "b": self.b,
            "boot_mode": self.boot_mode,
            "levels": list(self.levels),
            "reps": self.reps,
            "master_seed": self.master_seed,
            "delta_shape": self.delta_shape,
            "local_omega": self.local_omega,
            "truncation": self.truncation,
        }

    @staticmethod
    def from_dict(data: dict) -> "ExperimentConfig":
        try:
            return ExperimentConfig(
                models=tuple(data["models"]),
                thetas=tuple(float(t) for t in data["thetas"]),
                dists=tuple(data["dists"]),
                ns=tuple(int(n) for n in data["ns"]),
                tests=tuple(parse_test(t) for t in data["tests"]),
                kernel=KernelSpec(data["kernel"], data.get("support_halfwidth", 1.0)),
                bandwidth=(
                    BandwidthRule(**data["bandwidth"])
                    if isinstance(data["bandwidth"], dict)
                    else parse_bandwidth(data["bandwidth"])
                ),
                calibration=data["calibration"],
                b=int(data["b"]),
                boot_mode=data["boot_mode"],
                levels=tuple(float(a) for a in data["levels"]),
                reps=int(data["reps"]),
                master_seed=int(data["master_seed"]),
                delta_shape=data.get("delta_shape", "centered_quadratic"),
                local_omega=float(data.get("local_omega", 2.0 / 9.0)),
                truncation=data.get("truncation", "clip"),
            )
        except KeyError as exc:
            raise DataFormatError(f"config is missing key {exc.args[0]!r}") from None

    def config_hash(self) -> str:
        canonical = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()

    def cells(self) -> list[tuple[str, float, str, int]]:
        """Grid cells as (model, theta, dist, n); theta collapses to 0 for
        models that take none."""
        out = []
        for model in self.models:
            thetas = self.thetas if model in _THETA_MODELS else (0.0,)
            for theta in thetas:
                for dist in self.dists:
                    for n in self.ns:
                        out.append((model, theta, dist, n))
        return out


@dataclass(frozen=True)
class CellResult:
    """Rejection tally for one (cell, test, level) combination."""

    model: str
    theta: float
    dist: str
    n: int
    test: str
    level: float
    rejections: int
    valid_reps: int
    rate_pct: float
    mc_se_pct: float


@dataclass
class MCReport:
    """Results of one experiment plus enough provenance to reproduce it."""

    config: dict
    config_hash: str
    master_seed: int
    reps: int
    cells: list[CellResult]
    metadata: dict = field(default_factory=dict)
    schema_version: int = SCHEMA_VERSION

    def table_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(
            [
                "model",
                "theta",
                "dist",
                "n",
                "test",
                "level_pct",
                "rate_pct",
                "mc_se_pct",
                "rejections",
                "valid_reps",
            ]
        )
        for c in self.cells:
            writer.writerow(
                [
                    c.model,
                    repr(c.theta),
                    c.dist,
                    c.n,
                    c.test,
                    repr(100.0 * c.level),
                    repr(c.rate_pct),
                    repr(c.mc_se_pct),
                    c.rejections,
                    c.valid_reps,
                ]
            )
        return buf.getvalue()

    def rate(self, **criteria) -> float:
        """The rate_pct of the single cell matching the given field values."""
        matches = [
            c
            for c in self.cells
            if all(getattr(c, k) == v for k, v in criteria.items())
        ]
        if len(matches) != 1:
            raise KeyError(f"{len(matches)} cells match {criteria}")
        return matches[0].rate_pct


def _cell_key(model: str, theta: float, dist: str, n: int) -> int:
    return content_key(f"{model}|theta={theta!r}|{dist}|n={n}")


def _replication_rejections(
    config: ExperimentConfig, cell: tuple[str, float, str, int], r: int
) -> Optional[list[list[bool]]]:
    """Rejection indicators [test][level] for one replication, or None if
    the replication is numerically degenerate."""
    model, theta, dist, n = cell
    key = _cell_key(model, theta, dist, n)
    sample_seed = derive_key(config.master_seed, key, Tag.REPLICATION, r)
    sample = gen_sample(
        DGPSpec(
            model=model,
            n=n,
            seed=sample_seed,
            error_dist=dist,
            theta=theta,
            delta_shape=config.delta_shape,
            local_omega=config.local_omega,
            truncation=config.truncation,
        )
    )
    try:
        if config.calibration == "bootstrap":
            boot_seed = derive_key(config.master_seed, key, Tag.BOOTSTRAP, r)
            outcomes, _ = bootstrap_many(
                sample,
                config.kernel,
                config.bandwidth,
                config.tests,
                b=config.b,
                mode=config.boot_mode,
                seed=boot_seed,
            )
            return [
                [o.p_star < level for level in config.levels] for o in outcomes
            ]
        null = ols_fit(sample)
        bw = resolve_bandwidth(config.bandwidth, null.residuals, sample.x, config.kernel)
        fit = nw_fit(null.residuals, sample.x, config.kernel, bw.h)
        omega = estimate_omega(sample.x)
        constants = kernel_constants(config.kernel, p=sample.p)
        rows = []
        for test in config.tests:
            if test.method in ("loss_q", "loss_q0"):
                denominator = "ssr1" if test.method == "loss_q" else "ssr0"
                _, q = loss_statistic(fit, test.loss, denominator, ssr0=null.ssr0)
                outcome = asymptotic_calibration_q(
                    q, constants, loss_curvature(test.loss), omega, bw.h, test.method
                )
            else:
                lam = glr_statistic(null.ssr0, fit.ssr1, sample.n)
                outcome = asymptotic_calibration_glr(lam, constants, omega, bw.h)
            rows.append([outcome.p_value < level for level in config.levels])
        return rows
    except DegenerateSampleError:
        return None


def run_experiment(config: ExperimentConfig, jobs: int = 1) -> MCReport:
    """Run the full grid and tabulate rejection rates.

    `jobs` > 1 distributes replications over a process pool; results are
    identical to the serial run because every replication's streams are
    derived from its indices and the reduction is ordered.
    """
    start = time.time()
    cells_out: list[CellResult] = []
    for cell in config.cells():
        model, theta, dist, n = cell
        args = ((config, cell, r) for r in range(config.reps))
        if jobs > 1:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                outcomes = list(
                    pool.map(
                        _replication_rejections_star,
                        args,
                        chunksize=max(1, config.reps // (4 * jobs)),
                    )
                )
        else:
            outcomes = [_replication_rejections(*a) for a in args]

        degenerate = sum(1 for o in outcomes if o is None)
        if degenerate > 0.01 * config.reps:
            raise DegenerateSampleError(
                f"cell (model={model}, theta={theta:g}, dist={dist}, n={n}) had "
                f"{degenerate} of {config.reps} degenerate replications (>1%); "
                "check the bandwidth and sample size"
            )
        valid = config.reps - degenerate
        for i, test in enumerate(config.tests):
            for j, level in enumerate(config.levels):
                rejections = sum(int(o[i][j]) for o in outcomes if o is not None)
                rate = rejections / valid
                cells_out.append(
                    CellResult(
                        model=model,
                        theta=theta,
                        dist=dist,
                        n=n,
                        test=test.label(),
                        level=level,
                        rejections=rejections,
                        valid_reps=valid,
                        rate_pct=100.0 * rate,
                        mc_se_pct=mc_standard_error(rate, valid),
                    )
                )
    return MCReport(
        config=config.to_dict(),
        config_hash=config.config_hash(),
        master_seed=config.master_seed,
        reps=config.reps,
        cells=cells_out,
        metadata={
            "created_at": datetime.now(timezone.utc).isoformat(),
            "wall_seconds": time.time() - start,
            "package_version": _pkg_version,
            "backend": BACKEND,
        },
    )


def _replication_rejections_star(args):
    return _replication_rejections(*args)


def persist_report(report: MCReport, path: str) -> None:
    """Write the report as a single JSON document with an embedded CSV block."""
    doc = {
        "schema_version": report.schema_version,
        "config": report.config,
        "config_hash": report.config_hash,
        "master_seed": report.master_seed,
        "reps": report.reps,
        "cells": [vars(c) for c in report.cells],
        "table_csv": report.table_csv(),
        "metadata": report.metadata,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_report(path: str) -> MCReport:
    """Read a persisted report back, verifying schema and config hash."""
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise DataFormatError(
                f"malformed report {path}: {exc.msg} at line {exc.lineno} column {exc.colno}"
            ) from None
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise DataFormatError(
            f"unsupported report schema {doc.get('schema_version')!r}"
        )
    expected = ExperimentConfig.from_dict(doc["config"]).config_hash()
    if expected != doc["config_hash"]:
        raise DataFormatError("report config hash does not match its config")
    return MCReport(
        config=doc["config"],
        config_hash=doc["config_hash"],
        master_seed=doc["master_seed"],
        reps=doc["reps"],
        cells=[CellResult(**c) for c in doc["cells"]],
        metadata=doc["metadata"],
        schema_version=doc["schema_version"],
    )


def merge_reports(reports: Sequence[MCReport]) -> MCReport:
    """Combine disjoint reports produced under the identical configuration."""
    if not reports:
        raise DataFormatError("nothing to merge")
    head = reports[0]
    seen: set[tuple] = set()
    cells: list[CellResult] = []
    for rep in reports:
        if rep.config_hash != head.config_hash:
            raise DataFormatError("cannot merge reports with different config hashes")
        for c in rep.cells:
            key = (c.model, c.theta, c.dist, c.n, c.test, c.level)
            if key in seen:
                raise DataFormatError("cannot merge reports with overlapping cells")
            seen.add(key)
            cells.append(c)
    return MCReport(
        config=head.config,
        config_hash=head.config_hash,
        master_seed=head.master_seed,
        reps=head.reps,
        cells=cells,
        metadata={"merged_from": [rep.metadata for rep in reports]},
    )


_CONFIG_KEYS = {
    "models",
    "thetas",
    "dists",
    "ns",
    "tests",
    "kernel",
    "bandwidth",
    "calibration",
    "boot_mode",
    "levels",
    "reps",
    "seed",
    "delta_shape",
    "local_omega",
    "truncation",
}


def parse_config_text(text: str) -> ExperimentConfig:
    """Parse the flat key-value experiment config format.

    One `key = value` pair per line; blank lines and lines starting with
    `#` are ignored. List values are comma-separated except `tests`, which
    is semicolon-separated because loss grammars contain commas.
    Recognized keys: models, thetas, dists, ns, tests, kernel, bandwidth,
    calibration (asymptotic or bootstrap:<b>), boot_mode, levels, reps,
    seed, delta_shape, local_omega, truncation.
    """
    raw: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.strip()
        if not body or body.startswith("#"):
            continue
        if "=" not in body:
            raise DataFormatError(f"config line {lineno}: expected key = value")
        key, value = body.split("=", 1)
        key = key.strip().lower()
        if key not in _CONFIG_KEYS:
            raise DataFormatError(f"config line {lineno}: unknown key {key!r}")
        raw[key] = value.strip()

    def split_list(key: str, default: Optional[str] = None) -> Optional[list[str]]:
        value = raw.get(key, default)
        if value is None:
            return None
        return [part.strip() for part in value.split(",") if part.strip()]

    for required in ("models", "tests", "reps", "seed"):
        if required not in raw:
            raise DataFormatError(f"config is missing required key {required!r}")

    calibration_text = raw.get("calibration", "bootstrap:99").lower()
    if calibration_text == "asymptotic":
        calibration, b = "asymptotic", 99
    elif calibration_text.startswith("bootstrap"):
        calibration = "bootstrap"
        _, _, btext = calibration_text.partition(":")
        b = int(btext) if btext else 99
    else:
        raise DataFormatError(
            f"calibration must be 'asymptotic' or 'bootstrap:<b>', not {calibration_text!r}"
        )

    try:
        thetas = tuple(parse_ratio(t) for t in split_list("thetas", "0"))
        ns = tuple(int(n) for n in split_list("ns", "100"))
        levels = tuple(parse_ratio(a) for a in split_list("levels", "0.10, 0.05"))
        reps = int(raw["reps"])
        seed = int(raw["seed"])
    except ValueError as exc:
        raise DataFormatError(f"bad numeric value in config: {exc}") from None

    return ExperimentConfig(
        models=tuple(split_list("models")),
        thetas=thetas,
        dists=tuple(split_list("dists", "normal")),
        ns=ns,
        tests=tuple(
            parse_test(t.strip()) for t in raw["tests"].split(";") if t.strip()
        ),
        kernel=parse_kernel(raw.get("kernel", "uniform")),
        bandwidth=parse_bandwidth(raw.get("bandwidth", "rot:2/9")),
        calibration=calibration,
        b=b,
        boot_mode=raw.get("boot_mode", "conditional"),
        levels=levels,
        reps=reps,
        master_seed=seed,
        delta_shape=raw.get("delta_shape", "centered_quadratic"),
        local_omega=parse_ratio(raw.get("local_omega", "2/9")),
        truncation=raw.get("truncation", "clip"),
    )


# published-table grids at desk scale: one n by default, overridable
_LINEX_SET = "loss_q:linex:0,1; loss_q:linex:0.2,1; loss_q:linex:0.5,1; loss_q:linex:1,1"
_FULL_TESTS = (
    _LINEX_SET
    + "; "
    + _LINEX_SET.replace("loss_q:", "loss_q0:")
    + "; glr"
)

PRESETS = {
    "table2": {
        "models": ("s_null",),
        "dists": ("normal", "student_t5", "uniform01", "lognormal", "chisq1"),
        "calibration": "asymptotic",
    },
    "table3": {
        "models": ("s_null",),
        "dists": ("normal", "student_t5", "uniform01", "lognormal", "chisq1"),
        "calibration": "bootstrap",
    },
    "table4": {
        "models": ("p1_quadratic",),
        "thetas": (0.1, 0.2, 0.3, 0.5, 1.0),
        "calibration": "bootstrap",
    },
    "table5": {
        "models": ("p2_threshold",),
        "thetas": (-1.0, -0.5, -0.2, 0.2, 0.5, 1.0),
        "calibration": "bootstrap",
    },
    "table6": {
        "models": ("p3_smooth_transition",),
        "thetas": (-1.0, -0.5, 0.5, 1.0, 1.5),
        "calibration": "bootstrap",
    },
}


def preset_config(
    name: str,
    reps: int = 500,
    seed: int = 1,
    n: int = 100,
    b: int = 99,
) -> ExperimentConfig:
    """A published-table grid at desk scale: uniform kernel, h = S n^(-2/9),
    the four linex losses under both studentizations, and the glr test."""
    if name not in PRESETS:
        raise DataFormatError(
            f"unknown preset {name!r}; choose from {', '.join(sorted(PRESETS))}"
        )
    grid = PRESETS[name]
    return ExperimentConfig(
        models=grid["models"],
        thetas=grid.get("thetas", (0.0,)),
        dists=grid.get("dists", ("normal",)),
        ns=(n,),
        tests=tuple(parse_test(t.strip()) for t in _FULL_TESTS.split(";")),
        kernel=parse_kernel("uniform"),
        bandwidth=parse_bandwidth("rot:2/9"),
        calibration=grid["calibration"],
        b=b,
        boot_mode="conditional",
        levels=(0.10, 0.05),
        reps=reps,
        master_seed=seed,
    )
