"""Run configuration and report files.

Config and reports are JSON; bulk fields and metric tables are CSV; plot
files are two-column whitespace-separated text. Floats are written with
Python's shortest round-trip repr, which never depends on the locale.
"""
from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field
from pathlib import Path

from .grid import Field, field_to_csv, make_grid
from .kernel import KERNELS, discretize_kernel
from .model import MODELS, instantiate_model
from .scheme import SCHEMES
from .solver import SolveReport
from .sweep import METRIC_COLUMNS, SweepReport, default_schedule

DEFAULT_TOLERANCES = {"solve_tol": 1e-9, "c_tol": 1e-3, "gamma_tol": 1e-12}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    model: dict = field(default_factory=lambda: {"name": "quad-eikonal"})
    kernel: dict = field(default_factory=lambda: {"name": "affine-eta"})
    nx: int = 256
    n_xi: int = 32
    schedule: tuple = tuple(default_schedule())
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    output: str = "out"
    seed: int = 42
    scheme: str = "godunov"

    def to_dict(self) -> dict:
        return {"model": dict(self.model), "kernel": dict(self.kernel), "nx": self.nx,
                "n_xi": self.n_xi, "schedule": list(self.schedule),
                "tolerances": dict(self.tolerances), "output": self.output,
                "seed": self.seed, "scheme": self.scheme}

    def build(self):
        """Instantiate ``(grid, model, kernel)``."""
        grid = make_grid(self.nx, self.n_xi)
        model = instantiate_model(self.model["name"], grid, **_params(self.model))
        kernel = discretize_kernel(self.kernel["name"], grid, **_params(self.kernel))
        return grid, model, kernel


def _params(entry: dict) -> dict:
    return {k: v for k, v in entry.items() if k != "name"}


def _int(doc, key, default):
    val = doc.get(key, default)
    if isinstance(val, bool) or not isinstance(val, int):
        raise ConfigError(f"{key}: expected an integer, got {val!r}")
    return val


def _schedule(spec) -> tuple:
    if spec is None:
        return tuple(default_schedule())
    if isinstance(spec, list):
        try:
            alphas = [float(a) for a in spec]
        except (TypeError, ValueError):
            raise ConfigError("schedule: entries must be numbers") from None
        if len(alphas) < 1 or any(a <= 0 for a in alphas):
            raise ConfigError("schedule: entries must be positive")
        if any(b >= a for a, b in zip(alphas, alphas[1:])):
            raise ConfigError("schedule: must be strictly decreasing")
        return tuple(alphas)
    if isinstance(spec, dict):
        unknown = set(spec) - {"alpha0", "ratio", "count"}
        if unknown:
            raise ConfigError(f"schedule: unknown keys {sorted(unknown)}")
        alpha0 = float(spec.get("alpha0", 1.0))
        ratio = float(spec.get("ratio", 0.5))
        count = spec.get("count", 15)
        if not alpha0 > 0:
            raise ConfigError("schedule.alpha0: must be > 0")
        if not 0 < ratio < 1:
            raise ConfigError("schedule.ratio: must lie in (0, 1)")
        if isinstance(count, bool) or not isinstance(count, int) or count < 2:
            raise ConfigError("schedule.count: must be an integer >= 2")
        return tuple(default_schedule(alpha0, ratio, count))
    raise ConfigError("schedule: expected a list or {alpha0, ratio, count}")


def _named(doc, key, default, catalog) -> dict:
    entry = doc.get(key, {"name": default})
    if isinstance(entry, str):
        entry = {"name": entry}
    if not isinstance(entry, dict):
        raise ConfigError(f"{key}: expected an object")
    entry = dict(entry)
    entry.setdefault("name", default)
    if entry["name"] not in catalog:
        raise ConfigError(f"{key}.name: unknown {key} {entry['name']!r}")
    return entry


def parse_config(text: str) -> RunConfig:
    """Parse and validate a JSON run configuration, filling defaults."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed config: {exc}") from None
    if not isinstance(doc, dict):
        raise ConfigError("config: top level must be an object")
    known = {"model", "kernel", "nx", "n_xi", "schedule", "tolerances", "output", "seed", "scheme"}
    unknown = set(doc) - known
    if unknown:
        raise ConfigError(f"config: unknown keys {sorted(unknown)}")
    tolerances = dict(DEFAULT_TOLERANCES)
    tol_doc = doc.get("tolerances", {})
    if not isinstance(tol_doc, dict):
        raise ConfigError("tolerances: expected an object")
    for key, val in tol_doc.items():
        if key not in tolerances:
            raise ConfigError(f"tolerances.{key}: unknown tolerance")
        if isinstance(val, bool) or not isinstance(val, (int, float)) or not val > 0:
            raise ConfigError(f"tolerances.{key}: must be a positive number")
        tolerances[key] = float(val)
    scheme = doc.get("scheme", "godunov")
    if scheme not in SCHEMES:
        raise ConfigError(f"scheme: unknown scheme {scheme!r}")
    output = doc.get("output", "out")
    if not isinstance(output, str):
        raise ConfigError("output: expected a path string")
    config = RunConfig(
        model=_named(doc, "model", "quad-eikonal", MODELS),
        kernel=_named(doc, "kernel", "affine-eta", KERNELS),
        nx=_int(doc, "nx", 256),
        n_xi=_int(doc, "n_xi", 32),
        schedule=_schedule(doc.get("schedule")),
        tolerances=tolerances,
        output=output,
        seed=_int(doc, "seed", 42),
        scheme=scheme,
    )
    try:
        grid = make_grid(config.nx, config.n_xi)
    except ValueError as exc:
        raise ConfigError(f"nx/n_xi: {exc}") from None
    try:
        instantiate_model(config.model["name"], grid, **_params(config.model))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"model: {exc}") from None
    try:
        discretize_kernel(config.kernel["name"], grid, **_params(config.kernel))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"kernel: {exc}") from None
    return config


def load_config(path) -> RunConfig:
    return parse_config(Path(path).read_text())


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def _fmt(x) -> str:
    return "" if x is None else repr(float(x))


def metrics_csv(report: SweepReport) -> str:
    lines = [",".join(METRIC_COLUMNS)]
    for m in report.per_alpha:
        row = m.as_dict()
        lines.append(",".join(_fmt(row[c]) for c in METRIC_COLUMNS))
    return "\n".join(lines) + "\n"


def plot_data(report: SweepReport, metric: str) -> str:
    lines = [f"# alpha {metric}"]
    for m in report.per_alpha:
        val = m.as_dict()[metric]
        if val is not None:
            lines.append(f"{_fmt(m.alpha)} {_fmt(val)}")
    return "\n".join(lines) + "\n"


def _write(directory: Path, name: str, text: str, written: dict):
    path = directory / name
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write {path} in output directory {directory}: {exc}") from exc
    written[name] = text


def emit_reports(report, config: RunConfig, field_: Field | None = None) -> list[Path]:
    """Write the report files and ``manifest.json`` into ``config.output``.

    Returns the written paths. Repeated runs with the same config produce
    byte-identical files (run times are not written).
    """
    directory = Path(config.output)
    try:
        directory.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {directory}: {exc}") from exc
    if not os.access(directory, os.W_OK):
        raise OSError(f"output directory {directory} is not writable")
    written: dict[str, str] = {}
    echo = config.to_dict()
    if isinstance(report, SweepReport):
        _write(directory, "sweep_report.json", dumps({"config": echo, **report.to_dict()}), written)
        _write(directory, "metrics.csv", metrics_csv(report), written)
        _write(directory, "limit_field.csv", field_to_csv(report.limit_field), written)
        for metric in METRIC_COLUMNS[1:]:
            _write(directory, f"{metric}.dat", plot_data(report, metric), written)
    elif isinstance(report, SolveReport):
        _write(directory, "solve_report.json", dumps({"config": echo, **report.to_dict()}), written)
        if field_ is not None:
            _write(directory, "field.csv", field_to_csv(field_), written)
    else:
        raise TypeError(f"cannot emit {type(report).__name__}")
    manifest = {"artifacts": [
        {"path": name, "sha256": hashlib.sha256(text.encode()).hexdigest(),
         "bytes": len(text.encode())}
        for name, text in sorted(written.items())]}
    _write(directory, "manifest.json", dumps(manifest), {})
    return [directory / name for name in sorted(written)] + [directory / "manifest.json"]
