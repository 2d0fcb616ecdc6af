"""Result files: history CSV, legacy VTK field files, eigen CSV and JSON reports."""

from __future__ import annotations

import csv
import json
from collections.abc import Iterable, Mapping
from dataclasses import astuple, fields
from pathlib import Path
from typing import Any, TextIO

import numpy as np
import vtk
from numpy.typing import NDArray
from vtk.util.numpy_support import numpy_to_vtk, vtk_to_numpy

from micdam.errors import ParseError
from micdam.fem.solver import CoupledSystem
from micdam.logging import get_logger, log_event
from micdam.sim.postprocess import COMPONENTS, EigenFields, component, element_fields
from micdam.types import HistoryRecord

logger = get_logger("output")

HISTORY_COLUMNS = tuple(f.name for f in fields(HistoryRecord))
EIGEN_COLUMNS = (
    "element", "D1", "D2", "n1x", "n1y", "n1z", "n2x", "n2y", "n2z", "dominance",
)
_CELL_TYPES = {"Q4": vtk.VTK_QUAD, "H8": vtk.VTK_HEXAHEDRON}


def _cell(value: Any) -> str:
    return repr(float(value)) if isinstance(value, float | np.floating) else str(value)


class HistoryWriter:
    """Appends one CSV row per committed step and flushes it immediately."""

    def __init__(self, path: str | Path) -> None:
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._handle: TextIO = self.path.open("w", newline="", encoding="utf-8")
        self._writer = csv.writer(self._handle)
        self._writer.writerow(HISTORY_COLUMNS)
        self._handle.flush()

    def append(self, record: HistoryRecord) -> None:
        self._writer.writerow([_cell(v) for v in astuple(record)])
        self._handle.flush()

    def close(self) -> None:
        if not self._handle.closed:
            self._handle.close()

    def __enter__(self) -> HistoryWriter:
        return self

    def __exit__(self, *exc: object) -> None:
        self.close()


def write_history(records: Iterable[HistoryRecord], path: str | Path) -> Path:
    with HistoryWriter(path) as writer:
        for record in records:
            writer.append(record)
    return writer.path


def read_history(path: str | Path) -> list[HistoryRecord]:
    """Parse a history CSV back into records.

    Raises:
        ParseError: If the header or a row does not match the history columns.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as handle:
        rows = list(csv.reader(handle))
    if not rows or tuple(rows[0]) != HISTORY_COLUMNS:
        raise ParseError(f"{path}: header must be {','.join(HISTORY_COLUMNS)}", source="output",
                         details={"line": 1})
    kinds = [f.type for f in fields(HistoryRecord)]
    records = []
    for number, row in enumerate(rows[1:], start=2):
        if len(row) != len(HISTORY_COLUMNS):
            raise ParseError(f"{path}:{number}: expected {len(HISTORY_COLUMNS)} columns",
                             source="output", details={"line": number})
        try:
            values = [int(v) if kind in ("int", int) else float(v) for v, kind in zip(row, kinds)]
        except ValueError:
            raise ParseError(f"{path}:{number}: malformed row", source="output",
                             details={"line": number}) from None
        records.append(HistoryRecord(*values))
    return records


def _array(name: str, values: NDArray[np.float64]) -> vtk.vtkDataArray:
    array = numpy_to_vtk(np.ascontiguousarray(values, dtype=np.float64), deep=True)
    array.SetName(name)
    return array


def build_grid(system: CoupledSystem) -> vtk.vtkUnstructuredGrid:
    """Unstructured grid of the reference mesh with element-averaged state as cell data."""
    mesh = system.mesh
    grid = vtk.vtkUnstructuredGrid()
    points = vtk.vtkPoints()
    coords = np.zeros((mesh.n_nodes, 3))
    coords[:, : mesh.dim] = mesh.nodes
    points.SetData(_array("coordinates", coords))
    grid.SetPoints(points)
    grid.Allocate(mesh.n_elements)
    cell_type = _CELL_TYPES[mesh.element_type]
    for conn in mesh.elements:
        grid.InsertNextCell(cell_type, len(conn), [int(i) for i in conn])

    displacement = np.zeros((mesh.n_nodes, 3))
    displacement[:, : mesh.dim] = system.displacements()
    grid.GetPointData().SetVectors(_array("displacement", displacement))

    state = element_fields(system)
    cells = grid.GetCellData()
    for name in COMPONENTS:
        cells.AddArray(_array(f"D{name}", component(state.D, name)))
    for i in range(state.dbar.shape[1]):
        cells.AddArray(_array(f"dbar_{i + 1}", state.dbar[:, i]))
    cells.AddArray(_array("fd", state.fd))
    cells.AddArray(_array("xid", state.xi_d))
    return grid


def write_fields(system: CoupledSystem, path: str | Path, step: int) -> Path:
    """Write the committed state as a legacy ASCII VTK unstructured grid."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    writer = vtk.vtkUnstructuredGridWriter()
    writer.SetFileName(str(path))
    writer.SetInputData(build_grid(system))
    writer.SetFileTypeToASCII()
    writer.SetHeader(f"micdam step {step} u={system.control_value!r}")
    if not writer.Write():
        raise OSError(f"VTK writer failed for {path}")
    log_event(logger, "fields_written", step=step, path=str(path))
    return path


def read_fields(path: str | Path) -> dict[str, NDArray[np.float64]]:
    """Load the arrays of a field file (cell arrays plus ``displacement``)."""
    reader = vtk.vtkUnstructuredGridReader()
    reader.SetFileName(str(path))
    reader.ReadAllScalarsOn()
    reader.ReadAllVectorsOn()
    reader.ReadAllFieldsOn()
    reader.Update()
    grid = reader.GetOutput()
    arrays: dict[str, NDArray[np.float64]] = {}
    for data in (grid.GetCellData(), grid.GetPointData()):
        for i in range(data.GetNumberOfArrays()):
            array = data.GetArray(i)
            if array is not None:
                arrays[array.GetName()] = vtk_to_numpy(array)
    return arrays


def write_eigen_csv(eigen: EigenFields, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(EIGEN_COLUMNS)
        for e in range(eigen.D1.size):
            writer.writerow([
                e, *(_cell(float(v)) for v in (eigen.D1[e], eigen.D2[e], *eigen.n1[e],
                                                *eigen.n2[e], eigen.dominance[e]))
            ])
    return path


def write_json(data: Mapping[str, Any], path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(data, indent=2, default=_json_default) + "\n", encoding="utf-8")
    return path


def _json_default(value: Any) -> Any:
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, Path):
        return str(value)
    raise TypeError(f"not JSON serializable: {type(value).__name__}")
