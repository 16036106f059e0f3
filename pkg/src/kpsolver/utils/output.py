"""
Result files and console tables.

Field files are CSV with '#' comment lines echoing the run parameters,
followed by an "x,y,value" header and one row per node, y outer and x inner.
Numbers are written with 17 significant digits so a file read back with
read_field_csv reproduces the values bit for bit.

Each field or report gets a JSON (or YAML) sidecar with its metadata.
Convergence reports print as prettytable tables.
"""

import csv
import enum
import json
import math
import os
from typing import Any, Dict, Iterable, List, Mapping, Optional

import numpy as np
import yaml
from prettytable import PrettyTable

from ..numerics.fields import Grid2D, Method, Quantity, SolutionField

REPORT_COLUMNS = (
    "M",
    "rms",
    "max_full",
    "max_mod",
    "max_mod2",
    "pointwise",
    "cpu_seconds",
    "flagged_cells",
    "absolute_rms",
    "absolute_max",
    "u_rms",
    "u_max",
)


def fmt_number(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    return f"{float(value):.17g}"


def to_plain(value: Any) -> Any:
    """Convert numpy scalars, enums, tuples and grids to JSON/YAML types."""
    if isinstance(value, enum.Enum):
        return value.value
    if isinstance(value, Grid2D):
        return value.describe()
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, Mapping):
        return {str(k): to_plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_plain(v) for v in value]
    return value


def dump_structured(data: Mapping[str, Any], format_type: str = "json") -> str:
    """
    Serialise to json or yaml text.

    Raises:
        ValueError: For any other format name
    """
    plain = to_plain(data)
    if format_type.lower() == "json":
        return json.dumps(plain, indent=2)
    if format_type.lower() == "yaml":
        return yaml.safe_dump(plain, default_flow_style=False, sort_keys=False)
    raise ValueError(f"Unsupported output format: {format_type}")


def write_metadata(
    path: str, data: Mapping[str, Any], format_type: str = "json"
) -> str:
    _ensure_dir(path)
    with open(path, "w") as f:
        f.write(dump_structured(data, format_type))
        f.write("\n")
    return path


def _ensure_dir(path: str) -> None:
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)


def _header_lines(header: Mapping[str, Any]) -> List[str]:
    lines = []
    for key, value in header.items():
        if isinstance(value, float):
            text = fmt_number(value)
        elif isinstance(value, (list, tuple)):
            text = ",".join(str(v) for v in value)
        else:
            text = str(to_plain(value))
        lines.append(f"# {key}={text}")
    return lines


def field_header(field: SolutionField) -> Dict[str, Any]:
    return {
        "quantity": field.quantity.value,
        "method": field.method.value,
        "t": float(field.t),
        "Lx": float(field.grid.Lx),
        "Ly": float(field.grid.Ly),
        "Nx": field.grid.Nx,
        "Ny": field.grid.Ny,
        "periodic": field.grid.periodic,
    }


def write_field_csv(
    field: SolutionField, path: str, config: Optional[Mapping[str, Any]] = None
) -> str:
    """
    Write a field as CSV.

    Args:
        field: The field to write
        path: Destination file
        config: Parameters echoed as "# config.<key>=<value>" lines

    Returns:
        The path written
    """
    _ensure_dir(path)
    header = field_header(field)
    for key, value in (config or {}).items():
        header[f"config.{key}"] = value
    xs = field.grid.x
    ys = field.grid.y
    with open(path, "w", newline="") as f:
        for line in _header_lines(header):
            f.write(line + "\n")
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["x", "y", "value"])
        for j, y in enumerate(ys):
            for i, x in enumerate(xs):
                writer.writerow(
                    [fmt_number(x), fmt_number(y), fmt_number(field.values[j, i])]
                )
    return path


def read_field_csv(path: str) -> SolutionField:
    """
    Read a file written by write_field_csv.

    Args:
        path: CSV file with "#" header lines followed by x,y,value rows

    Returns:
        Field rebuilt from the header (grid, quantity, method, t), with the
        echoed "config." entries as strings under metadata["config"]

    Raises:
        ValueError: If the header or the row count does not match the grid
    """
    header: Dict[str, str] = {}
    with open(path, newline="") as f:
        lines = f.read().splitlines()
    body_start = 0
    for body_start, line in enumerate(lines):
        if not line.startswith("#"):
            break
        key, _, value = line[1:].strip().partition("=")
        header[key] = value
    try:
        grid = Grid2D(
            Lx=float(header["Lx"]),
            Ly=float(header["Ly"]),
            Nx=int(header["Nx"]),
            Ny=int(header["Ny"]),
            periodic=header.get("periodic", "False") == "True",
        )
        quantity = Quantity(header["quantity"])
        method = Method(header["method"])
        t = float(header["t"])
    except KeyError as e:
        raise ValueError(f"{path}: missing header field {e}")

    rows = list(csv.reader(lines[body_start + 1 :]))
    if len(rows) != grid.Nx * grid.Ny:
        raise ValueError(
            f"{path}: expected {grid.Nx * grid.Ny} rows, found {len(rows)}"
        )
    values = np.array([float(r[2]) for r in rows]).reshape(grid.shape)
    config = {k[len("config."):]: v for k, v in header.items() if k.startswith("config.")}
    return SolutionField(grid, quantity, t, values, method, metadata={"config": config})


def write_report_csv(report: Any, path: str) -> str:
    """One row per M with the REPORT_COLUMNS of a ConvergenceReport."""
    _ensure_dir(path)
    header = {
        "method": report.method.value,
        "reference_M": report.reference_M,
        "t": float(report.t),
        "point": list(report.point),
    }
    if report.grid is not None:
        header.update(report.grid.describe())
    with open(path, "w", newline="") as f:
        for line in _header_lines(header):
            f.write(line + "\n")
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(REPORT_COLUMNS)
        for record in report.records:
            writer.writerow([fmt_number(getattr(record, c)) for c in REPORT_COLUMNS])
    return path


def _short(value: Any) -> str:
    if value is None:
        return "-"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    value = float(value)
    if math.isnan(value):
        return "nan"
    return f"{value:.3e}"


def report_table(
    reports: Iterable[Any], disable_header: bool = False, disable_border: bool = False
) -> PrettyTable:
    """Table with one row per (method, M)."""
    columns = ["method", "M", "rms", "max", "max x<=10.8", "max x<=0", "pointwise", "seconds"]
    table = PrettyTable(columns, header=not disable_header, border=not disable_border)
    table.align = "r"
    table.align["method"] = "l"
    for report in reports:
        for r in report.records:
            table.add_row(
                [
                    report.method.value,
                    r.M,
                    _short(r.rms),
                    _short(r.max_full),
                    _short(r.max_mod),
                    _short(r.max_mod2),
                    _short(r.pointwise),
                    f"{r.cpu_seconds:.2f}",
                ]
            )
    return table


def summary_table(
    rows: Mapping[str, Any], disable_header: bool = False, disable_border: bool = False
) -> PrettyTable:
    """Two-column key/value table for solve and evolve summaries."""
    table = PrettyTable(["item", "value"], header=not disable_header, border=not disable_border)
    table.align = "l"
    for key, value in rows.items():
        table.add_row([key, value if isinstance(value, str) else _short(value)])
    return table
