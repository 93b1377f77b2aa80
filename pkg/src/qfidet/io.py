"""Instance files: a small JSON schema for states, observables and functions.

Schema: {"dim": n, "state": [[[re, im], ...], ...], "observables": [matrix, ...],
"functions": ["sld", "wyd:0.3"], "pairs": [["sld", "wy"]]}.  Every matrix entry
is a two-element [re, im] list.  Validation failures name the offending field
and quote the measured value.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .monotone import CatalogError, parse_function_spec
from .states import DensityMatrix, density, observable


class InstanceFormatError(ValueError):
    pass


@dataclass(frozen=True)
class LoadedInstance:
    state: DensityMatrix
    observables: tuple[np.ndarray, ...]
    functions: tuple[str, ...]
    pairs: tuple[tuple[str, str], ...]


def _complex_matrix(raw, dim: int, field: str) -> np.ndarray:
    try:
        arr = np.asarray(raw, dtype=float)
    except (TypeError, ValueError):
        raise InstanceFormatError(f"{field}: entries must be numeric [re, im] pairs") from None
    if arr.shape != (dim, dim, 2):
        raise InstanceFormatError(
            f"{field}: expected shape {dim}x{dim} of [re, im] pairs, got array shape {arr.shape}"
        )
    return arr[..., 0] + 1j * arr[..., 1]


def _encode_matrix(m: np.ndarray) -> list:
    m = np.asarray(m, dtype=complex)
    return np.stack([m.real, m.imag], axis=-1).tolist()


def _checked_spec(spec: str, field: str) -> str:
    try:
        parse_function_spec(spec)
    except CatalogError as exc:
        raise InstanceFormatError(f"{field}: {exc}") from None
    return spec


def load_instance(path: str | Path) -> LoadedInstance:
    try:
        payload = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise InstanceFormatError(f"not valid JSON: {exc}") from None
    if not isinstance(payload, dict):
        raise InstanceFormatError("top level: expected a JSON object")

    if "dim" not in payload:
        raise InstanceFormatError("dim: missing")
    try:
        dim = int(payload["dim"])
    except (TypeError, ValueError):
        raise InstanceFormatError(f"dim: not an integer ({payload['dim']!r})") from None
    if dim < 2:
        raise InstanceFormatError(f"dim: must be at least 2, got {dim}")

    if "state" not in payload:
        raise InstanceFormatError("state: missing")
    try:
        state = density(_complex_matrix(payload["state"], dim, "state"))
    except ValueError as exc:
        if isinstance(exc, InstanceFormatError):
            raise
        raise InstanceFormatError(f"state: {exc}") from None

    raw_obs = payload.get("observables") or []
    if not raw_obs:
        raise InstanceFormatError("observables: need at least one matrix")
    checked = []
    for k, raw in enumerate(raw_obs):
        name = f"observables[{k}]"
        try:
            checked.append(observable(_complex_matrix(raw, dim, name)))
        except ValueError as exc:
            if isinstance(exc, InstanceFormatError):
                raise
            raise InstanceFormatError(f"{name}: {exc}") from None

    functions = tuple(
        _checked_spec(str(s), f"functions[{k}]") for k, s in enumerate(payload.get("functions", ["sld"]))
    )
    pairs = []
    for k, raw_pair in enumerate(payload.get("pairs", [])):
        if not isinstance(raw_pair, (list, tuple)) or len(raw_pair) != 2:
            raise InstanceFormatError(f"pairs[{k}]: expected a two-element [f, g] list, got {raw_pair!r}")
        pairs.append(
            (
                _checked_spec(str(raw_pair[0]), f"pairs[{k}]"),
                _checked_spec(str(raw_pair[1]), f"pairs[{k}]"),
            )
        )
    return LoadedInstance(state, tuple(checked), functions, tuple(pairs))


def save_instance(
    path: str | Path,
    state: DensityMatrix,
    observables: Sequence[np.ndarray],
    functions: Sequence[str] = ("sld",),
    pairs: Sequence[tuple[str, str]] = (),
) -> None:
    payload = {
        "dim": state.dim,
        "state": _encode_matrix(state.matrix),
        "observables": [_encode_matrix(a) for a in observables],
        "functions": list(functions),
        "pairs": [list(p) for p in pairs],
    }
    Path(path).write_text(json.dumps(payload, indent=2) + "\n")
