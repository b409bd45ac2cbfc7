"""Run configuration, check records and reports, with atomic file output."""

from __future__ import annotations

import configparser
import json
import math
import os
import tempfile
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional

from . import __version__

COMMANDS = ("dims", "stokes", "homology", "truncdim", "chg-verify", "chg-periods", "gm-check", "full-suite")
OUTPUT_ENV = "RDPERIODS_OUTPUT_DIR"

EXIT_OK, EXIT_CHECK, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3


class ConfigError(ValueError):
    exit_code = EXIT_CONFIG


class CheckFailure(AssertionError):
    exit_code = EXIT_CHECK


class NumericalNonConvergence(RuntimeError):
    exit_code = EXIT_NUMERIC


class VersionMismatch(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    options: Dict[str, Any] = field(default_factory=dict)
    seed: int = 0
    output: Optional[str] = None

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        for k, v in self.options.items():
            if ("tol" in k or k == "step") and v is not None and not (isinstance(v, (int, float)) and v > 0):
                raise ConfigError(f"{k} must be positive, got {v!r}")

    def output_dir(self) -> Path:
        return Path(self.output or os.environ.get(OUTPUT_ENV) or "rdperiods_runs")

    def to_json(self) -> dict:
        return {"command": self.command, "seed": self.seed, "options": jsonable(self.options),
                "output": str(self.output_dir())}


def read_config_file(path: str) -> Dict[str, str]:
    """``key = value`` lines; ``#`` starts a comment. Dashes in keys become underscores."""
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#",))
    try:
        with open(path) as fh:
            parser.read_string("[run]\n" + fh.read())
    except (OSError, configparser.Error) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return {k.replace("-", "_"): v for k, v in parser["run"].items()}


@dataclass
class CheckRecord:
    name: str
    inputs: Dict[str, Any]
    expected: Any
    source: str
    computed: Any
    passed: bool
    runtime: float = 0.0
    tolerance: Optional[float] = None

    def to_json(self) -> dict:
        return jsonable(asdict(self))


@dataclass
class RunReport:
    config: dict
    records: List[CheckRecord] = field(default_factory=list)
    result: dict = field(default_factory=dict)
    version: str = __version__

    def add(self, record: CheckRecord) -> CheckRecord:
        self.records.append(record)
        return record

    @property
    def verdict(self) -> bool:
        return all(r.passed for r in self.records)

    @property
    def exit_code(self) -> int:
        return EXIT_OK if self.verdict else EXIT_CHECK

    def to_json(self) -> dict:
        return {"version": self.version, "config": self.config, "seed": self.config.get("seed"),
                "result": jsonable(self.result), "records": [r.to_json() for r in self.records],
                "verdict": "pass" if self.verdict else "fail"}

    @classmethod
    def from_json(cls, data: dict) -> "RunReport":
        recs = [CheckRecord(**r) for r in data.get("records", [])]
        return cls(data["config"], recs, data.get("result", {}), data["version"])


class timed:
    """Context manager measuring wall time into ``.seconds``."""

    def __enter__(self):
        self._t = time.perf_counter()
        self.seconds = 0.0
        return self

    def __exit__(self, *exc):
        self.seconds = time.perf_counter() - self._t
        return False


def atomic_write(path: Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_report(report: RunReport, path: Path) -> None:
    atomic_write(path, json.dumps(report.to_json(), indent=2, sort_keys=True) + "\n")


# --------------------------------------------------------------------------
# comparison


def compare_reports(r1: RunReport, r2: RunReport) -> List[dict]:
    """Differences in computed values, ignoring runtimes and config echo.

    Numbers under a key containing ``err`` are error estimates and are
    compared exactly; other floats are compared against the record's
    tolerance (exactly when it has none).
    """
    if r1.version != r2.version:
        raise VersionMismatch(f"{r1.version} vs {r2.version}")
    if r1.config.get("command") != r2.config.get("command"):
        raise ValueError("reports are for different commands")
    diffs: List[dict] = []
    mine, theirs = _keyed(r1.records), _keyed(r2.records)
    for key, rec in mine.items():
        other = theirs.get(key)
        if other is None:
            diffs.append({"check": rec.name, "path": "", "a": "present", "b": "missing"})
            continue
        tol = max(rec.tolerance or 0.0, other.tolerance or 0.0)
        _diff(jsonable(rec.computed), jsonable(other.computed), rec.name, "", tol, diffs)
        if rec.passed != other.passed:
            diffs.append({"check": rec.name, "path": "passed", "a": rec.passed, "b": other.passed})
    for key in theirs.keys() - mine.keys():
        diffs.append({"check": theirs[key].name, "path": "", "a": "missing", "b": "present"})
    return diffs


def _keyed(records: List[CheckRecord]) -> Dict[tuple, CheckRecord]:
    """Records keyed by (name, occurrence), so repeated names pair up in order."""
    seen: Dict[str, int] = {}
    out = {}
    for r in records:
        n = seen.get(r.name, 0)
        seen[r.name] = n + 1
        out[(r.name, n)] = r
    return out


def _diff(a, b, check: str, path: str, tol: float, out: List[dict]) -> None:
    if isinstance(a, dict) and isinstance(b, dict):
        for k in sorted(set(a) | set(b), key=str):
            _diff(a.get(k), b.get(k), check, f"{path}/{k}", tol, out)
        return
    if isinstance(a, list) and isinstance(b, list) and len(a) == len(b):
        for i, (x, y) in enumerate(zip(a, b)):
            _diff(x, y, check, f"{path}/{i}", tol, out)
        return
    if isinstance(a, float) and isinstance(b, (int, float)) or isinstance(b, float) and isinstance(a, (int, float)):
        if "err" in path.lower():
            same = a == b
        else:
            same = math.isclose(a, b, rel_tol=tol, abs_tol=0.0) if tol else a == b
        if not same:
            out.append({"check": check, "path": path, "a": a, "b": b})
        return
    if a != b:
        out.append({"check": check, "path": path, "a": a, "b": b})


def jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, (bool, int, float, str)) or obj is None:
        return obj
    if hasattr(obj, "item"):
        return obj.item()
    return str(obj)
