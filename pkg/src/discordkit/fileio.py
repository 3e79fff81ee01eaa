"""JSON state and observable files.

A state file holds ``dims`` (list of subsystem dimensions) and the real and
imaginary parts of the density matrix as nested lists under ``re`` and
``im``. An observable file holds ``eigenvalues`` and either
``projectors`` (a list of ``{"re", "im"}`` matrices) or ``eigenvectors``
(``{"re", "im"}`` with one vector per row, complete observables only).

Numbers are written with 17 significant digits so a write-read round trip
is exact.
"""

from __future__ import annotations

import json
from typing import Any

import numpy as np

from .errors import DimensionMismatch, DiscordKitError
from .states import BipartiteState, Observable, TripartiteState


class FileFormatError(DiscordKitError, ValueError):
    """Problem with a file's contents; ``path`` names the offending field."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


class ParseError(FileFormatError):
    pass


class ValidationError(FileFormatError):
    pass


# -- writing ---------------------------------------------------------------

def format_number(x: float) -> str:
    x = float(x)
    if not np.isfinite(x):
        raise ValueError(f"cannot serialize non-finite number {x}")
    return "%.17g" % x


def _grid(m: np.ndarray) -> str:
    rows = (", ".join(format_number(v) for v in row) for row in m)
    return "[" + ",\n    ".join("[" + r + "]" for r in rows) + "]"


def _matrix_fields(m: np.ndarray, indent: str = "  ") -> str:
    m = np.asarray(m, dtype=complex)
    return f'{indent}"re": {_grid(m.real)},\n{indent}"im": {_grid(m.imag)}'


def dumps_state(matrix, dims) -> str:
    dims_txt = ", ".join(str(int(d)) for d in dims)
    return "{\n" + f'  "dims": [{dims_txt}],\n' + _matrix_fields(np.asarray(matrix)) + "\n}\n"


def dumps_observable(obs: Observable) -> str:
    vals = ", ".join(format_number(a) for a in obs.eigenvalues)
    projs = ",\n".join("  {\n" + _matrix_fields(p, "    ") + "\n  }" for p in obs.projectors)
    return "{\n" + f'  "eigenvalues": [{vals}],\n  "projectors": [\n{projs}\n  ]\n' + "}\n"


def write_state(path: str, matrix, dims) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_state(matrix, dims))


def write_observable(path: str, obs: Observable) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_observable(obs))


# -- reading ---------------------------------------------------------------

def _load(path: str) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError("<root>", f"invalid JSON in {path}: {exc}") from None
    except OSError as exc:
        raise ParseError("<root>", f"cannot read {path}: {exc.strerror}") from None


def _real_grid(value: Any, path: str) -> np.ndarray:
    if not isinstance(value, list) or not value or not all(isinstance(r, list) for r in value):
        raise ParseError(path, "expected a nonempty list of rows")
    width = len(value[0])
    for i, row in enumerate(value):
        if len(row) != width:
            raise ParseError(f"{path}[{i}]", f"row has {len(row)} entries, expected {width}")
        for j, x in enumerate(row):
            if isinstance(x, bool) or not isinstance(x, (int, float)):
                raise ParseError(f"{path}[{i}][{j}]", f"expected a number, got {x!r}")
    return np.array(value, dtype=float)


def _complex_matrix(obj: Any, path: str) -> np.ndarray:
    if not isinstance(obj, dict):
        raise ParseError(path, "expected an object with 're' and 'im'")
    for key in ("re", "im"):
        if key not in obj:
            raise ParseError(f"{path}.{key}", "missing")
    re = _real_grid(obj["re"], f"{path}.re")
    im = _real_grid(obj["im"], f"{path}.im")
    if re.shape != im.shape:
        raise ParseError(f"{path}.im", f"shape {im.shape} differs from re shape {re.shape}")
    return re + 1j * im


def _dims(value: Any) -> list[int]:
    if not isinstance(value, list) or not value:
        raise ParseError("dims", "expected a nonempty list of positive integers")
    for i, d in enumerate(value):
        if isinstance(d, bool) or not isinstance(d, int) or d < 1:
            raise ParseError(f"dims[{i}]", f"expected a positive integer, got {d!r}")
    return list(value)


def parse_state(obj: Any):
    """Build a bipartite or tripartite state from a decoded state file."""
    if not isinstance(obj, dict):
        raise ParseError("<root>", "expected a JSON object")
    if "dims" not in obj:
        raise ParseError("dims", "missing")
    dims = _dims(obj["dims"])
    m = _complex_matrix(obj, "<root>")
    total = int(np.prod(dims))
    if m.shape != (total, total):
        raise DimensionMismatch(f"dims: product {total} does not match matrix shape {m.shape}")
    try:
        if len(dims) == 2:
            return BipartiteState(m, *dims)
        if len(dims) == 3:
            return TripartiteState(m, *dims)
    except DiscordKitError as exc:
        raise ValidationError("re", str(exc)) from None
    raise ParseError("dims", f"expected 2 or 3 subsystems, got {len(dims)}")


def parse_observable(obj: Any) -> Observable:
    if not isinstance(obj, dict):
        raise ParseError("<root>", "expected a JSON object")
    vals = obj.get("eigenvalues")
    if not isinstance(vals, list) or not vals:
        raise ParseError("eigenvalues", "expected a nonempty list of numbers")
    for i, v in enumerate(vals):
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ParseError(f"eigenvalues[{i}]", f"expected a number, got {v!r}")
    if "projectors" in obj:
        raw = obj["projectors"]
        if not isinstance(raw, list):
            raise ParseError("projectors", "expected a list")
        projs = [_complex_matrix(p, f"projectors[{i}]") for i, p in enumerate(raw)]
        if len(projs) != len(vals):
            raise ValidationError("projectors", f"{len(projs)} projectors for {len(vals)} eigenvalues")
        field = "projectors"
    elif "eigenvectors" in obj:
        rows = _complex_matrix(obj["eigenvectors"], "eigenvectors")
        if rows.shape[0] != len(vals):
            raise ValidationError("eigenvectors", f"{rows.shape[0]} vectors for {len(vals)} eigenvalues")
        projs = [np.outer(r, r.conj()) for r in rows]
        field = "eigenvectors"
    else:
        raise ParseError("projectors", "missing (give 'projectors' or 'eigenvectors')")
    try:
        return Observable(tuple(vals), tuple(projs))
    except DiscordKitError as exc:
        raise ValidationError(field, str(exc)) from None


def read_state(path: str):
    return parse_state(_load(path))


def read_observable(path: str) -> Observable:
    return parse_observable(_load(path))
