"""Deterministic report emission: one ``report.json`` plus a CSV per table."""
import json
import logging
from pathlib import Path
from typing import Any, Dict, Optional, Union

import numpy as np
import pandas as pd

log = logging.getLogger(__name__)

SCHEMA_VERSION = "v1"


def to_jsonable(obj: Any) -> Any:
    """Converts numpy values, tables and dataclass dicts to plain JSON types.

    Non-finite floats become ``None``.
    """
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, pd.DataFrame):
        return to_jsonable(obj.to_dict(orient="records"))
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj) if np.isfinite(obj) else None
    if isinstance(obj, Path):
        return str(obj)
    return obj


class ReportWriter:
    """Collects the tables and verdict of one command and writes them out.

    Args:
        command: The subcommand name.
        config: The resolved configuration, as a dict.
        out_dir (optional): The output directory; nothing is written without one.
    """

    def __init__(self, command: str, config: Dict[str, Any], out_dir: Optional[Union[str, Path]] = None):
        self.command = command
        self.config = config
        self.out_dir = Path(out_dir) if out_dir is not None else None
        self.tables: Dict[str, pd.DataFrame] = {}
        self.summary: Dict[str, Any] = {}
        self.disclaimer: Optional[str] = None
        self.passed: Optional[bool] = None

    def add_table(self, name: str, df: pd.DataFrame):
        self.tables[name] = df.reset_index(drop=True)

    def set_verdict(self, passed: bool, **summary):
        self.passed = bool(passed)
        self.summary.update(summary)

    def to_dict(self) -> Dict[str, Any]:
        report = {
            "schema": SCHEMA_VERSION,
            "command": self.command,
            "config": self.config,
            "passed": self.passed,
            "summary": self.summary,
            "tables": {name: df for name, df in self.tables.items()},
        }
        if self.disclaimer is not None:
            report["disclaimer"] = self.disclaimer
        return to_jsonable(report)

    def render(self) -> str:
        """A plain-text rendering of every table and the verdict."""
        parts = []
        for name, df in self.tables.items():
            parts.append(f"== {name} ==\n{df.to_string(index=False)}")
        if self.disclaimer:
            parts.append(f"note: {self.disclaimer}")
        verdict = "PASS" if self.passed else "FAIL"
        parts.append(f"{self.command}: {verdict}")
        return "\n\n".join(parts)

    def write(self) -> Optional[Path]:
        """Writes ``report.json`` and ``<table>.csv`` files; returns the report path."""
        if self.out_dir is None:
            return None
        self.out_dir.mkdir(parents=True, exist_ok=True)
        for name, df in self.tables.items():
            df.to_csv(self.out_dir / f"{name}.csv", index=False, lineterminator="\n")
        path = self.out_dir / "report.json"
        path.write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8")
        log.info(f"Saved report to Path: {path}")
        return path
