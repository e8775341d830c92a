"""
Report assembly for the command line and the MCP tools.

Every runner returns a RunOutput; run_with_metadata wraps it with the tool
version, the resolved parameters and the wall time, and turns library
errors into an `error` entry instead of letting them escape.
"""

import dataclasses
import io
import json
import logging
import math
import time
from enum import Enum
from typing import Any, Callable, Optional

import numpy as np

from qdeform import __version__
from qdeform.fock_algebra import ResidualReport

logger = logging.getLogger(__name__)

TOOL_NAME = "qdeform"


@dataclasses.dataclass
class RunOutput:
    results: dict
    checks: list = dataclasses.field(default_factory=list)
    columns: Optional[str] = None


@dataclasses.dataclass
class Execution:
    report: dict
    columns: Optional[str] = None

    @property
    def passed(self) -> bool:
        return bool(self.report.get("passed"))


def check(name: str, passed: bool, value: Any = None, tolerance: Any = None, **detail) -> dict:
    """One entry of a report's check list."""
    entry = {"name": name, "passed": bool(passed), "value": value, "tolerance": tolerance}
    entry.update(detail)
    return entry


def check_from_residual(report: ResidualReport) -> dict:
    return check(
        report.identity,
        report.passed,
        value=report.relative_residual,
        tolerance=report.tolerance,
        max_abs_residual=report.max_abs_residual,
        scale=report.scale,
        interior_dimension=report.interior_dimension,
    )


def to_jsonable(obj: Any) -> Any:
    """
    Convert results into plain JSON types.

    numpy scalars and arrays become Python numbers and lists, non-finite
    floats become None, complex numbers become {"re", "im"} and dataclasses
    go through their to_dict() when they define one.
    """
    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, (int, np.integer)) and not isinstance(obj, np.bool_):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        return value if math.isfinite(value) else None
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": to_jsonable(obj.real), "im": to_jsonable(obj.imag)}
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()] if obj.ndim else to_jsonable(obj.item())
    if isinstance(obj, dict):
        return {str(k) if not isinstance(k, tuple) else ",".join(map(str, k)): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set)):
        return [to_jsonable(v) for v in obj]
    if dataclasses.is_dataclass(obj):
        if hasattr(obj, "to_dict"):
            return to_jsonable(obj.to_dict())
        return to_jsonable({f.name: getattr(obj, f.name) for f in dataclasses.fields(obj)})
    raise TypeError(f"Cannot serialize {type(obj).__name__} into a report")


def run_with_metadata(subcommand: str, runner: Callable[..., RunOutput], parameters: dict) -> dict:
    """
    Run a runner and return tool, version, parameters, results and checks in a unified dict.

    Args:
        subcommand (str): Subcommand or tool name recorded in the report.
        runner (callable): Function returning a RunOutput.
        parameters (dict): Keyword arguments for the runner.

    Returns:
        dict: {tool, version, subcommand, parameters, results, checks, passed, error, wall_time}
    """
    return execute(subcommand, runner, parameters).report


def execute(subcommand: str, runner: Callable[..., RunOutput], parameters: dict) -> Execution:
    """run_with_metadata plus the columns text produced by the runner."""
    started = time.perf_counter()
    error = None
    try:
        output = runner(**parameters)
    except Exception as e:
        logger.error("%s failed: %s: %s", subcommand, type(e).__name__, e)
        output = RunOutput(results={})
        error = {"name": type(e).__name__, "message": str(e)}
    checks = to_jsonable(output.checks)
    report = {
        "tool": TOOL_NAME,
        "version": __version__,
        "subcommand": subcommand,
        "parameters": to_jsonable(parameters),
        "results": to_jsonable(output.results),
        "checks": checks,
        "passed": error is None and all(c["passed"] for c in checks),
        "error": error,
        "wall_time": round(time.perf_counter() - started, 6),
    }
    failed = [c["name"] for c in checks if not c["passed"]]
    if failed:
        logger.warning("%s: %d of %d checks failed: %s", subcommand, len(failed), len(checks), failed)
    return Execution(report=report, columns=output.columns)


def dumps(report: dict) -> str:
    return json.dumps(report, indent=2, allow_nan=False) + "\n"


def checks_table(report: dict) -> str:
    """Plain pass/fail table of a report's checks."""
    buf = io.StringIO()
    buf.write("# status value tolerance name\n")
    for c in report["checks"]:
        value = "-" if c.get("value") is None else f"{c['value']:.3e}" if isinstance(c["value"], float) else str(c["value"])
        tol = "-" if c.get("tolerance") is None else f"{c['tolerance']:.1e}" if isinstance(c["tolerance"], float) else str(c["tolerance"])
        buf.write(f"{'PASS' if c['passed'] else 'FAIL'} {value} {tol} {c['name']}\n")
    if report.get("error"):
        buf.write(f"ERROR {report['error']['name']}: {report['error']['message']}\n")
    return buf.getvalue()


def render(execution: Execution, fmt: str = "json") -> str:
    if fmt == "json":
        return dumps(execution.report)
    if fmt == "columns":
        return execution.columns if execution.columns is not None else checks_table(execution.report)
    raise ValueError(f"Unknown output format: {fmt}")
