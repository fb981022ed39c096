# quasichaos/schemas/manifest.py

"""
Pydantic schemas for the run manifest and the CLI error report.
"""

from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field


class OutputFile(BaseModel):
    """One artifact written by a run."""

    table: str = Field(..., description="Logical table name")
    path: str = Field(..., description="File name relative to the output location")
    rows: int = Field(..., description="Data rows (schema line and header excluded)", ge=0)
    columns: List[str] = Field(default_factory=list, description="Column names in file order")


class FailedPoint(BaseModel):
    """Sweep point whose evaluation raised."""

    index: int = Field(..., description="Grid index", ge=0)
    point: str = Field(..., description="Point parameters")
    error: str = Field(..., description="Error kind")
    message: str = Field(..., description="Error message")


class RunManifest(BaseModel):
    """Reproducibility record, written only after a run completed."""

    experiment: str = Field(..., description="Experiment name")
    version: str = Field(..., description="quasichaos version")
    preset: str = Field(..., description="Preset used for omitted sizes")
    seed: int = Field(..., description="Random seed", ge=0)
    workers: int = Field(..., description="Worker processes", ge=1)
    config: Dict[str, Any] = Field(..., description="Configuration with preset defaults resolved")
    config_path: Optional[str] = Field(None, description="Configuration file, if any")
    tolerances: Dict[str, float] = Field(default_factory=dict, description="Accuracy guards in force")
    defaults: Dict[str, Any] = Field(default_factory=dict, description="Algorithm defaults actually used")
    started_at: str = Field(..., description="UTC start time, ISO 8601")
    wall_clock_s: float = Field(..., description="Elapsed seconds", ge=0)
    outputs: List[OutputFile] = Field(default_factory=list)
    summary_file: Optional[str] = Field(None, description="Summary JSON file name")
    warnings: List[str] = Field(default_factory=list)
    failed_points: List[FailedPoint] = Field(default_factory=list)


class ErrorReport(BaseModel):
    """Machine-readable failure printed on stdout."""

    error: str = Field(..., description="Error kind")
    message: str = Field(..., description="Human-readable message")
    experiment: Optional[str] = Field(None, description="Experiment being run")
    exit_code: int = Field(..., description="Process exit code")
