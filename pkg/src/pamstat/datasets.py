"""CSV ingestion of measured force curves and CSV emission of inverse sweeps."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from os import PathLike
from pathlib import Path
from typing import Iterable

from .core import BAR, PamError
from .actuator import SweepRow

CURVE_HEADER = ("pressure_bar", "contraction_ratio", "force_N")
SWEEP_HEADER = (
    "stiffness_Nm_per_rad",
    "theta_deg",
    "p1_minus_p2_bar",
    "p1_plus_p2_bar",
    "p1_bar",
    "p2_bar",
    "feasible",
)


class DatasetError(PamError, ValueError):
    """Malformed curve file. ``problems`` lists every rejected row."""

    def __init__(self, message: str, problems: list[str] | None = None):
        self.problems = problems or []
        if self.problems:
            message = message + ":\n  " + "\n  ".join(self.problems)
        super().__init__(message)


@dataclass(frozen=True)
class ForceSample:
    pressure: float  # Pa
    eps: float
    force: float  # N
    row: int  # 1-based line number in the source file


@dataclass(frozen=True)
class ForceCurveDataset:
    muscle_id: str
    samples: tuple[ForceSample, ...]
    source_units: tuple[str, str, str] = ("bar", "1", "N")

    def __len__(self):
        return len(self.samples)


def load_curve_csv(path: str | PathLike, muscle_id: str | None = None) -> ForceCurveDataset:
    """Read ``pressure_bar,contraction_ratio,force_N`` rows; pressures become Pa."""
    path = Path(path)
    with path.open(encoding="utf-8-sig", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DatasetError(f"{path}: empty file, expected header {','.join(CURVE_HEADER)}") from None
        if tuple(header) != CURVE_HEADER:
            raise DatasetError(f"{path}: header must be exactly {','.join(CURVE_HEADER)}, got {','.join(header)}")

        samples: list[ForceSample] = []
        problems: list[str] = []
        seen: dict[tuple[float, float], int] = {}
        for row_no, cells in enumerate(reader, start=2):
            if not cells or all(not c.strip() for c in cells):
                continue
            if len(cells) != 3:
                problems.append(f"row {row_no}: expected 3 cells, got {len(cells)}")
                continue
            try:
                p_bar, eps, force = (float(c) for c in cells)
            except ValueError:
                problems.append(f"row {row_no}: non-numeric cell in {cells}")
                continue
            if not (math.isfinite(p_bar) and p_bar > 0):
                problems.append(f"row {row_no}: pressure must be > 0, got {p_bar!r}")
                continue
            if not (math.isfinite(eps) and eps >= 0):
                problems.append(f"row {row_no}: contraction ratio must be >= 0, got {eps!r}")
                continue
            if not math.isfinite(force):
                problems.append(f"row {row_no}: force must be finite, got {force!r}")
                continue
            key = (p_bar, eps)
            if key in seen:
                problems.append(f"row {row_no}: duplicate (pressure, contraction) of row {seen[key]}")
                continue
            seen[key] = row_no
            samples.append(ForceSample(p_bar * BAR, eps, force, row_no))

    if problems:
        raise DatasetError(f"{path}: {len(problems)} invalid row(s)", problems)
    if not samples:
        raise DatasetError(f"{path}: no data rows after the header")
    return ForceCurveDataset(muscle_id or path.stem, tuple(samples))


def _fmt(value: float) -> str:
    return "nan" if math.isnan(value) else f"{value:.9g}"


def sweep_csv_text(rows: Iterable[SweepRow]) -> str:
    """Sweep rows as CSV text, sorted K-major then theta; pressures in bar, angles in degrees."""
    ordered = sorted(rows, key=lambda r: (r.stiffness, r.theta))
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_HEADER)
    for r in ordered:
        writer.writerow(
            [
                _fmt(r.stiffness),
                _fmt(math.degrees(r.theta)),
                _fmt(r.diff / BAR),
                _fmt(r.total / BAR),
                _fmt(r.p1 / BAR),
                _fmt(r.p2 / BAR),
                "true" if r.feasible else "false",
            ]
        )
    return buf.getvalue()


def write_sweep_csv(rows: Iterable[SweepRow], path: str | PathLike) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        fh.write(sweep_csv_text(rows))


def read_sweep_csv(path: str | PathLike) -> list[dict[str, float | bool]]:
    """Parse a file written by :func:`write_sweep_csv` (values in file units)."""
    with Path(path).open(encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != SWEEP_HEADER:
            raise DatasetError(f"{path}: not a sweep file")
        out = []
        for rec in reader:
            row: dict[str, float | bool] = {k: float(rec[k]) for k in SWEEP_HEADER[:-1]}
            row["feasible"] = rec["feasible"] == "true"
            out.append(row)
    return out


__all__ = [
    "CURVE_HEADER",
    "SWEEP_HEADER",
    "DatasetError",
    "ForceCurveDataset",
    "ForceSample",
    "load_curve_csv",
    "read_sweep_csv",
    "sweep_csv_text",
    "write_sweep_csv",
]
