"""Neutral line-oriented mesh file format.

    MICDAM-MESH 1
    DIM <2|3>
    NODES <n>
    <x> <y> [<z>]                    n lines
    ELEMENTS <Q4|H8> <m>
    <node ids>                       m lines
    SETS <k>
    SET <name> <count>
    <node ids>                       one line per set (may be empty)
    END

Blank lines and lines starting with ``#`` are ignored. Coordinates are
written with ``repr`` so a write/read cycle is lossless.
"""

from __future__ import annotations

from collections.abc import Iterator
from pathlib import Path

import numpy as np

from micdam.errors import ParseError
from micdam.fem.mesh import Mesh
from micdam.fem.shape import DIMENSION

MAGIC = "MICDAM-MESH"
FORMAT_VERSION = 1


def format_mesh(mesh: Mesh) -> str:
    lines = [f"{MAGIC} {FORMAT_VERSION}", f"DIM {mesh.dim}", f"NODES {mesh.n_nodes}"]
    lines += [" ".join(repr(float(v)) for v in row) for row in mesh.nodes]
    lines.append(f"ELEMENTS {mesh.element_type} {mesh.n_elements}")
    lines += [" ".join(str(int(v)) for v in row) for row in mesh.elements]
    lines.append(f"SETS {len(mesh.node_sets)}")
    for name, ids in mesh.node_sets.items():
        lines.append(f"SET {name} {ids.size}")
        lines.append(" ".join(str(int(v)) for v in ids))
    lines.append("END")
    return "\n".join(lines) + "\n"


def write_mesh(mesh: Mesh, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(format_mesh(mesh), encoding="utf-8")
    return path


class _Lines:
    """Numbered line cursor; set payload lines are kept even when empty."""

    def __init__(self, text: str, source: str) -> None:
        self._lines = text.splitlines()
        self._pos = 0
        self.source = source

    @property
    def number(self) -> int:
        return self._pos

    def error(self, message: str) -> ParseError:
        return ParseError(
            f"{self.source}:{self._pos}: {message}",
            source="meshfile",
            details={"line": self._pos, "file": self.source},
        )

    def raw(self, expecting: str) -> str:
        if self._pos >= len(self._lines):
            raise self.error(f"unexpected end of file, missing {expecting}")
        line = self._lines[self._pos]
        self._pos += 1
        return line.strip()

    def next(self, expecting: str) -> str:
        while True:
            line = self.raw(expecting)
            if line and not line.startswith("#"):
                return line

    def keyword(self, name: str, n_args: int) -> list[str]:
        tokens = self.next(f"{name} section").split()
        if tokens[0] != name or len(tokens) != n_args + 1:
            raise self.error(f"expected '{name}' with {n_args} argument(s), got {' '.join(tokens)!r}")
        return tokens[1:]

    def integer(self, token: str, what: str) -> int:
        try:
            value = int(token)
        except ValueError:
            raise self.error(f"{what} must be an integer, got {token!r}") from None
        if value < 0:
            raise self.error(f"{what} must be >= 0")
        return value


def _rows(cursor: _Lines, count: int, width: int, kind: type, what: str) -> Iterator[list]:
    for _ in range(count):
        tokens = cursor.next(f"{what} row")
        parts = tokens.split()
        if len(parts) != width:
            raise cursor.error(f"{what} row needs {width} values, got {len(parts)}")
        try:
            yield [kind(p) for p in parts]
        except ValueError:
            raise cursor.error(f"malformed {what} row {tokens!r}") from None


def _read_dimension(cursor: _Lines) -> int:
    header = cursor.next("header").split()
    if len(header) != 2 or header[0] != MAGIC:
        raise cursor.error(f"not a {MAGIC} file")
    if header[1] != str(FORMAT_VERSION):
        raise cursor.error(f"unsupported format version {header[1]}")

    (dim_token,) = cursor.keyword("DIM", 1)
    dim = cursor.integer(dim_token, "DIM")
    if dim not in (2, 3):
        raise cursor.error("DIM must be 2 or 3")
    return dim


def parse_mesh(text: str, source: str = "<mesh>") -> Mesh:
    """Parse the text format into a Mesh.

    Raises:
        ParseError: With the offending line number for any malformed or missing section.
    """
    cursor = _Lines(text, source)
    dim = _read_dimension(cursor)

    (n_token,) = cursor.keyword("NODES", 1)
    n_nodes = cursor.integer(n_token, "node count")
    nodes = np.array(list(_rows(cursor, n_nodes, dim, float, "node")), dtype=float).reshape(n_nodes, dim)

    elem_type, m_token = cursor.keyword("ELEMENTS", 2)
    if elem_type not in DIMENSION or DIMENSION[elem_type] != dim:  # type: ignore[index]
        raise cursor.error(f"element type {elem_type!r} does not match DIM {dim}")
    n_elements = cursor.integer(m_token, "element count")
    n_corner = 4 if elem_type == "Q4" else 8
    elements = np.array(
        list(_rows(cursor, n_elements, n_corner, int, "element")), dtype=np.int64
    ).reshape(n_elements, n_corner)
    if elements.size and (elements.min() < 0 or elements.max() >= n_nodes):
        raise cursor.error("element references a node outside the NODES section")

    (k_token,) = cursor.keyword("SETS", 1)
    sets: dict[str, np.ndarray] = {}
    for _ in range(cursor.integer(k_token, "set count")):
        name, count_token = cursor.keyword("SET", 2)
        count = cursor.integer(count_token, "set size")
        payload = cursor.raw(f"node ids of set {name!r}").split()
        if len(payload) != count:
            raise cursor.error(f"set {name!r} declares {count} ids, found {len(payload)}")
        try:
            ids = np.array([int(t) for t in payload], dtype=np.int64)
        except ValueError:
            raise cursor.error(f"malformed ids in set {name!r}") from None
        if ids.size and (ids.min() < 0 or ids.max() >= n_nodes):
            raise cursor.error(f"set {name!r} references a missing node")
        sets[name] = ids

    cursor.keyword("END", 0)
    return Mesh(nodes=nodes, elements=elements, element_type=elem_type,  # type: ignore[arg-type]
                node_sets=sets)


def read_mesh(path: str | Path) -> Mesh:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read mesh file {path}: {exc}", source="meshfile") from exc
    return parse_mesh(text, source=str(path))


def read_dimension(path: str | Path) -> int:
    """Spatial dimension declared in the header of a mesh file; the body is not parsed."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read mesh file {path}: {exc}", source="meshfile") from exc
    return _read_dimension(_Lines(text, str(path)))
