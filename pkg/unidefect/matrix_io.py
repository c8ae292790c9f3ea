"""Define the text and JSON matrix formats."""
from __future__ import annotations

import json
from pathlib import Path
from typing import TypedDict, Union

import numpy as np
import numpy.typing as npt

from .catalog import is_catalog_name, resolve
from .const import DEFAULT_INPUT_UNITARITY_TOL, LOGGER
from .errors import raise_source_error
from .matcore import ComplexMatrix, UnitaryMatrix

PathLike = Union[str, Path]


class MatrixDocumentType(TypedDict):
    """Define the JSON form of a matrix."""

    rows: int
    cols: int
    re: list[list[float]]
    im: list[list[float]]


def format_matrix_text(matrix: npt.ArrayLike) -> str:
    """Return "N M" followed by one line of interleaved re/im pairs per row."""
    array = np.atleast_2d(np.asarray(matrix, dtype=np.complex128))
    lines = [f"{array.shape[0]} {array.shape[1]}"]
    for row in array:
        lines.append(" ".join(f"{v.real:.17g} {v.imag:.17g}" for v in row))
    return "\n".join(lines) + "\n"


def parse_matrix_text(text: str) -> ComplexMatrix:
    """Return the matrix described by the text format."""
    lines = [line for line in text.splitlines() if line.strip()]
    if not lines:
        raise ValueError("Empty matrix file")
    n_rows, n_cols = (int(value) for value in lines[0].split())
    if len(lines) - 1 != n_rows:
        raise ValueError(f"Expected {n_rows} rows, found {len(lines) - 1}")

    values = np.array([line.split() for line in lines[1:]], dtype=np.float64)
    if values.shape != (n_rows, 2 * n_cols):
        raise ValueError(f"Expected {2 * n_cols} values per row")
    return values[:, 0::2] + 1j * values[:, 1::2]


def matrix_to_json(matrix: npt.ArrayLike) -> MatrixDocumentType:
    """Return the JSON form of a matrix."""
    array = np.atleast_2d(np.asarray(matrix, dtype=np.complex128))
    return {
        "rows": array.shape[0],
        "cols": array.shape[1],
        "re": array.real.tolist(),
        "im": array.imag.tolist(),
    }


def matrix_from_json(data: MatrixDocumentType) -> ComplexMatrix:
    """Return the matrix held by a JSON document."""
    shape = (int(data["rows"]), int(data["cols"]))
    real = np.array(data["re"], dtype=np.float64)
    imag = np.array(data["im"], dtype=np.float64)
    if real.shape != shape or imag.shape != shape:
        raise ValueError(f"re/im arrays do not match the declared shape {shape}")
    return real + 1j * imag


def read_matrix(path: PathLike) -> ComplexMatrix:
    """Read a matrix from a .json file or a text file."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
        if path.suffix == ".json":
            matrix = matrix_from_json(json.loads(text))
        else:
            matrix = parse_matrix_text(text)
    except (KeyError, OSError, TypeError, ValueError) as err:
        raise_source_error(str(path), err)

    LOGGER.debug("Read %s matrix from %s", matrix.shape, path)
    return matrix


def write_matrix(path: PathLike, matrix: npt.ArrayLike) -> None:
    """Write a matrix, choosing the format from the file suffix."""
    path = Path(path)
    if path.suffix == ".json":
        path.write_text(json.dumps(matrix_to_json(matrix)), encoding="utf-8")
    else:
        path.write_text(format_matrix_text(matrix), encoding="utf-8")
    LOGGER.debug("Wrote matrix to %s", path)


def load_unitary(
    source: str, *, tol: float = DEFAULT_INPUT_UNITARITY_TOL
) -> UnitaryMatrix:
    """Return the unitary matrix behind a catalog name or a file path."""
    if is_catalog_name(source):
        entry = resolve(source)
        if isinstance(entry, UnitaryMatrix):
            return entry
        return UnitaryMatrix.from_array(entry, tol=tol)
    return UnitaryMatrix.from_array(read_matrix(source), tol=tol)
