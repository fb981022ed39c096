# quasichaos/pipeline/artifacts.py

"""
Artifacts
CSV tables with a schema line, summary JSON and the run manifest. Files are
staged inside the output location and moved into place only on commit.

--out naming: a path ending in .csv names the primary table; the other
tables, the summary and the manifest become siblings `<stem>.<name>`.
Any other path is a directory holding `<table>.csv`, `summary.json` and
`manifest.json`.
"""

from __future__ import annotations

import json
import logging
import math
import shutil
import tempfile
from pathlib import Path
from typing import Any, Mapping, Optional

import numpy as np
import pandas as pd

from quasichaos.schemas.manifest import OutputFile, RunManifest

logger = logging.getLogger(__name__)

SCHEMA_VERSION = "v1"
FLOAT_FORMAT = "%.12g"


def schema_line(experiment: str, table: str, columns: list[str]) -> str:
    return f"# schema: quasichaos/{experiment}/{table} {SCHEMA_VERSION} columns={','.join(columns)}\n"


def write_table(df: pd.DataFrame, path: Path, experiment: str, table: str) -> int:
    """Write one table with its schema line; returns the data row count."""
    with path.open("w", encoding="utf-8", newline="") as f:
        f.write(schema_line(experiment, table, [str(c) for c in df.columns]))
        df.to_csv(f, index=False, float_format=FLOAT_FORMAT)
    return len(df)


def read_table(path: Path) -> pd.DataFrame:
    return pd.read_csv(path, comment="#")


def jsonable(value: Any) -> Any:
    """Convert numpy scalars/arrays and non-finite floats for JSON output."""
    if isinstance(value, Mapping):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [jsonable(v) for v in value.tolist()]
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, Path):
        return str(value)
    return value


def dump_json(payload: Any) -> str:
    return json.dumps(jsonable(payload), indent=2, sort_keys=True)


class ArtifactWriter:
    """Stages one experiment's outputs and commits them atomically per file."""

    def __init__(self, out: Path, experiment: str, extra_paths: Optional[dict[str, Path]] = None):
        out = Path(out)
        self.experiment = experiment
        self.extra_paths = {k: Path(v) for k, v in (extra_paths or {}).items()}
        if out.suffix.lower() == ".csv":
            self.directory = out.parent if str(out.parent) else Path(".")
            self.primary_name: Optional[str] = out.name
            self.stem: Optional[str] = out.stem
        else:
            self.directory = out
            self.primary_name = None
            self.stem = None
        self.directory.mkdir(parents=True, exist_ok=True)
        self.staging = Path(tempfile.mkdtemp(prefix=".staging-", dir=self.directory))
        self._pending: list[tuple[Path, Path]] = []
        self.outputs: list[OutputFile] = []
        self.summary_file: Optional[str] = None

    def _name(self, table: str, primary: bool) -> str:
        if self.stem is None:
            return f"{table}.csv"
        return self.primary_name if primary else f"{self.stem}.{table}.csv"

    def _sidecar(self, kind: str) -> str:
        return f"{kind}.json" if self.stem is None else f"{self.stem}.{kind}.json"

    def add_tables(self, tables: Mapping[str, pd.DataFrame]) -> None:
        """Stage every table; the first one is the primary table."""
        for position, (table, df) in enumerate(tables.items()):
            target = self.extra_paths.get(table)
            if target is None:
                target = self.directory / self._name(table, position == 0)
            staged = self.staging / f"{table}.csv"
            rows = write_table(df, staged, self.experiment, table)
            self._pending.append((staged, target))
            self.outputs.append(
                OutputFile(table=table, path=str(target), rows=rows, columns=[str(c) for c in df.columns])
            )

    def add_summary(self, summary: Mapping[str, Any]) -> None:
        staged = self.staging / "summary.json"
        staged.write_text(dump_json(summary) + "\n", encoding="utf-8")
        target = self.directory / self._sidecar("summary")
        self._pending.append((staged, target))
        self.summary_file = str(target)

    def manifest_path(self) -> Path:
        return self.directory / self._sidecar("manifest")

    def commit(self, manifest: RunManifest) -> Path:
        """Move staged files into place, then write the manifest last."""
        for staged, target in self._pending:
            target.parent.mkdir(parents=True, exist_ok=True)
            shutil.move(str(staged), str(target))
        shutil.rmtree(self.staging, ignore_errors=True)
        path = self.manifest_path()
        path.write_text(manifest.model_dump_json(indent=2) + "\n", encoding="utf-8")
        logger.info(f"Wrote {len(self._pending)} artifacts and manifest {path}")
        return path

    def abort(self) -> None:
        shutil.rmtree(self.staging, ignore_errors=True)
