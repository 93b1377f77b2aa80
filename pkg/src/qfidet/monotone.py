"""Catalogue of normalized symmetric operator monotone functions.

Every member f maps (0, inf) to (0, inf), satisfies f(1) = 1 and the symmetry
f(x) = x f(1/x), and extends continuously to x = 0.  Members with f(0) > 0
are called regular; they admit the companion transform

    transformed(x) = ((x + 1) - (x - 1)^2 f(0) / f(x)) / 2

which lands back in the catalogue's nonregular class.  The induced mean
m_f(x, y) = x f(y/x) interpolates between the harmonic and arithmetic means.

Functions are validated on a fixed logarithmic grid; the grid check is a
necessary condition only, so user-supplied evaluators are accepted but never
certified as operator monotone.  A sampled matrix-order check is available
for stronger evidence.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np

from .linalg import apply_scalar_function, min_eigenvalue

__all__ = [
    "CatalogError",
    "MonotoneFunction",
    "DominanceReport",
    "OrderCheckReport",
    "STANDARD_GRID",
    "CATALOG_NAMES",
    "make_function",
    "parse_function_spec",
    "custom_function",
    "mean",
    "tilde",
    "dominates",
    "check_operator_monotone",
    "catalog_families",
]

STANDARD_GRID = np.logspace(-4.0, 4.0, 41)

# window around the removable singularity at x = 1 where series expansions
# replace the closed forms
SERIES_WINDOW = 1e-6


class CatalogError(ValueError):
    """A function failed validation or was used outside its contract."""


@dataclass(frozen=True)
class MonotoneFunction:
    """A normalized symmetric function with its value at zero pinned analytically."""

    name: str
    evaluator: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    value_at_zero: float
    regular: bool
    params: tuple[float, ...] = ()

    @property
    def label(self) -> str:
        if not self.params:
            return self.name
        return self.name + ":" + ",".join(f"{p:g}" for p in self.params)

    def __call__(self, x):
        arr = np.asarray(x, dtype=float)
        if np.any(arr < 0.0) or np.any(np.isnan(arr)):
            raise ValueError(f"{self.label}: arguments must be nonnegative, got {x!r}")
        scalar = arr.ndim == 0
        arr = np.atleast_1d(arr)
        out = np.empty_like(arr)
        pos = arr > 0.0
        if pos.any():
            out[pos] = self.evaluator(arr[pos])
        out[~pos] = self.value_at_zero
        return float(out[0]) if scalar else out


def _km_core(x: np.ndarray) -> np.ndarray:
    """(x - 1)/log(x) with a series branch through the x = 1 window."""
    u = x - 1.0
    near = np.abs(u) < SERIES_WINDOW
    safe = np.where(near, 2.0, x)
    direct = (safe - 1.0) / np.log(safe)
    series = 1.0 + u * (0.5 + u * (-1.0 / 12.0 + u / 24.0))
    return np.where(near, series, direct)


def _sld_eval(x):
    return 0.5 * (1.0 + x)


def _harmonic_eval(x):
    return 2.0 * x / (1.0 + x)


def _log_square_eval(x):
    return _km_core(x) ** 2 * 2.0 / (1.0 + x)


def _sqrt_log_eval(x):
    return _km_core(x) * 2.0 * np.sqrt(x) / (1.0 + x)


def _wy_eval(x):
    return 0.25 * (np.sqrt(x) + 1.0) ** 2


def _alpha_eval(a: float):
    def ev(x):
        return 2.0 * x ** (a + 0.5) / (1.0 + x ** (2.0 * a))

    return ev


def _wyd_eval(b: float):
    m = b * (1.0 - b)

    def ev(x):
        u = x - 1.0
        near = np.abs(u) < SERIES_WINDOW
        safe = np.where(near, 2.0, x)
        lx = np.log(safe)
        direct = m * (safe - 1.0) ** 2 / (np.expm1(b * lx) * np.expm1((1.0 - b) * lx))
        series = 1.0 + u * 0.5 - (1.0 - m) * u**2 / 12.0
        return np.where(near, series, direct)

    return ev


def _validate_grid(f: MonotoneFunction, grid: np.ndarray = STANDARD_GRID) -> None:
    vals = f(grid)
    if not np.all(np.isfinite(vals)) or np.any(vals <= 0.0):
        raise CatalogError(f"{f.label}: not strictly positive and finite on the grid")
    one = float(f(np.array(1.0)))
    if abs(one - 1.0) > 1e-12:
        raise CatalogError(f"{f.label}: f(1) = {one!r}, expected 1 within 1e-12")
    swapped = grid * f(1.0 / grid)
    sym = np.abs(vals - swapped) / np.abs(vals)
    if sym.max() > 1e-10:
        k = int(np.argmax(sym))
        raise CatalogError(
            f"{f.label}: symmetry f(x) = x f(1/x) violated at x = {grid[k]:g} "
            f"(relative gap {sym.max():.3e})"
        )
    drops = np.diff(vals)
    if np.any(drops < -1e-12 * np.abs(vals).max()):
        raise CatalogError(f"{f.label}: not nondecreasing on the grid")
    if f.regular != (abs(f.value_at_zero) > 1e-12):
        raise CatalogError(
            f"{f.label}: regularity flag {f.regular} inconsistent with "
            f"f(0) = {f.value_at_zero!r}"
        )


_PARAMETRIC = {"alpha", "wyd"}
CATALOG_NAMES = ("sld", "harmonic", "kubo-mori", "log-square", "sqrt-log", "alpha", "wyd", "wy")


@lru_cache(maxsize=None)
def _build(name: str, param: float | None, allow_unvalidated_range: bool) -> MonotoneFunction:
    if name in _PARAMETRIC and param is None:
        raise CatalogError(f"{name}: a parameter is required (e.g. '{name}:0.3')")
    if name not in _PARAMETRIC and param is not None:
        raise CatalogError(f"{name}: does not take a parameter")
    if name == "sld":
        f = MonotoneFunction("sld", _sld_eval, 0.5, True)
    elif name == "harmonic":
        f = MonotoneFunction("harmonic", _harmonic_eval, 0.0, False)
    elif name == "kubo-mori":
        f = MonotoneFunction("kubo-mori", _km_core, 0.0, False)
    elif name == "log-square":
        f = MonotoneFunction("log-square", _log_square_eval, 0.0, False)
    elif name == "sqrt-log":
        f = MonotoneFunction("sqrt-log", _sqrt_log_eval, 0.0, False)
    elif name == "wy":
        f = MonotoneFunction("wy", _wy_eval, 0.25, True)
    elif name == "alpha":
        if not 0.0 <= param <= 0.5:
            raise CatalogError(f"alpha: parameter must lie in [0, 1/2], got {param!r}")
        f = MonotoneFunction("alpha", _alpha_eval(param), 0.0, False, params=(param,))
    elif name == "wyd":
        in_default = 0.0 < abs(param) < 1.0
        in_wide = -1.0 <= param <= 2.0 and param not in (0.0, 1.0)
        if not in_default and not (allow_unvalidated_range and in_wide):
            hint = (
                "; pass allow_unvalidated_range=True for the wider [-1, 2] range"
                if in_wide
                else ""
            )
            raise CatalogError(f"wyd: parameter must satisfy 0 < |beta| < 1, got {param!r}{hint}")
        f0 = param * (1.0 - param) if 0.0 < param < 1.0 else 0.0
        f = MonotoneFunction("wyd", _wyd_eval(param), f0, f0 > 0.0, params=(param,))
    else:
        raise CatalogError(f"unknown function name {name!r} (choose from {CATALOG_NAMES})")
    _validate_grid(f)
    return f


def make_function(
    name: str,
    param: float | None = None,
    *,
    allow_unvalidated_range: bool = False,
) -> MonotoneFunction:
    """Build a catalogue member by name, e.g. make_function('wyd', 0.3)."""
    return _build(name, None if param is None else float(param), allow_unvalidated_range)


def parse_function_spec(spec: str) -> MonotoneFunction:
    """Parse 'name' or 'name:param' strings as used on the command line."""
    name, sep, rest = spec.partition(":")
    name = name.strip()
    if not sep:
        return make_function(name)
    try:
        param = float(rest)
    except ValueError:
        raise CatalogError(f"{spec!r}: parameter {rest!r} is not a number") from None
    return make_function(name, param)


def custom_function(
    name: str,
    evaluator: Callable[[np.ndarray], np.ndarray],
    value_at_zero: float,
) -> MonotoneFunction:
    """Wrap a user evaluator.  Grid-checked only, never certified."""
    f = MonotoneFunction(name, evaluator, float(value_at_zero), abs(value_at_zero) > 1e-12)
    _validate_grid(f)
    return f


def mean(f: MonotoneFunction, x, y):
    """The induced mean m_f(x, y) = x f(y/x), extended symmetrically to zero.

    Evaluated as max * f(min/max), which makes the symmetry m(x, y) = m(y, x)
    exact and keeps the evaluator argument in [0, 1].
    """
    ax = np.asarray(x, dtype=float)
    ay = np.asarray(y, dtype=float)
    if np.any(ax < 0.0) or np.any(ay < 0.0) or np.any(np.isnan(ax)) or np.any(np.isnan(ay)):
        raise ValueError("mean: arguments must be nonnegative")
    hi = np.maximum(ax, ay)
    lo = np.minimum(ax, ay)
    ratio = np.divide(lo, np.where(hi > 0.0, hi, 1.0))
    out = hi * f(ratio)
    if out.ndim == 0:
        return float(out)
    return out


@lru_cache(maxsize=None)
def tilde(f: MonotoneFunction) -> MonotoneFunction:
    """Companion transform of a regular member; always nonregular.

    For the two closed-form regular members: sld maps to 2x/(1+x) and wy
    maps to sqrt(x).
    """
    if not f.regular:
        raise CatalogError(
            f"{f.label}: the transform needs a regular function (f(0) > 0); "
            f"with f(0) = 0 it would collapse to (x+1)/2"
        )
    f0 = f.value_at_zero
    ev = f.evaluator

    def transformed(x):
        return 0.5 * ((x + 1.0) - (x - 1.0) ** 2 * (f0 / ev(x)))

    out = MonotoneFunction(f"tilde({f.label})", transformed, 0.0, False)
    _validate_grid(out)
    return out


@dataclass(frozen=True)
class DominanceReport:
    """Grid comparison of the ratios f(0)/f(t) against g(0)/g(t)."""

    f_label: str
    g_label: str
    grid: np.ndarray = field(repr=False)
    margins: np.ndarray = field(repr=False)
    strict: bool
    weak: bool
    min_margin: float
    min_margin_at: float

    @property
    def classification(self) -> str:
        if self.strict:
            return "strict"
        if self.weak:
            return "weak"
        return "neither"


def dominates(
    f: MonotoneFunction,
    g: MonotoneFunction,
    grid: np.ndarray | None = None,
    strictness_floor: float = 1e-12,
) -> DominanceReport:
    """Compare f(0)/f against g(0)/g pointwise on a grid (both must be regular)."""
    for h in (f, g):
        if not h.regular:
            raise CatalogError(f"{h.label}: dominance is defined for regular functions only")
    pts = STANDARD_GRID if grid is None else np.asarray(grid, dtype=float)
    margins = f.value_at_zero / f(pts) - g.value_at_zero / g(pts)
    k = int(np.argmin(margins))
    return DominanceReport(
        f_label=f.label,
        g_label=g.label,
        grid=pts,
        margins=margins,
        strict=bool(np.all(margins > strictness_floor)),
        weak=bool(np.all(margins >= -strictness_floor)),
        min_margin=float(margins[k]),
        min_margin_at=float(pts[k]),
    )


@dataclass(frozen=True)
class OrderCheckReport:
    """Sampled matrix-order check: does A <= B imply f(A) <= f(B)?"""

    label: str
    dim: int
    trials: int
    violations: tuple[tuple[int, float], ...]
    worst_margin: float

    @property
    def passed(self) -> bool:
        return not self.violations


def check_operator_monotone(
    f: MonotoneFunction,
    dim: int = 3,
    trials: int = 200,
    seed: int = 0,
    threshold: float = -1e-9,
) -> OrderCheckReport:
    """Sample random pairs 0 < A <= B and test min eig of f(B) - f(A).

    Evidence only: passing certifies nothing, a failure is disqualifying.
    """
    if not 1 <= dim <= 3:
        raise ValueError(f"dim must be 1, 2 or 3, got {dim}")
    if trials < 1:
        raise ValueError(f"trials must be positive, got {trials}")
    rng = np.random.default_rng(seed)
    violations = []
    worst = math.inf
    for k in range(trials):
        g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        a = g @ g.conj().T / dim + 0.05 * np.eye(dim)
        h = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        b = a + rng.uniform(0.0, 1.0) * (h @ h.conj().T) / dim
        gap = apply_scalar_function(b, f) - apply_scalar_function(a, f)
        m = min_eigenvalue(gap)
        worst = min(worst, m)
        if m < threshold:
            violations.append((k, m))
    return OrderCheckReport(
        label=f.label,
        dim=dim,
        trials=trials,
        violations=tuple(violations),
        worst_margin=worst,
    )


def catalog_families() -> list[dict]:
    """Static listing of the built-in families."""
    return [
        {
            "name": "sld",
            "formula": "(1 + x)/2",
            "parameter": None,
            "value_at_zero": "1/2",
            "class": "regular",
            "transform": "2x/(1 + x)",
        },
        {
            "name": "harmonic",
            "formula": "2x/(1 + x)",
            "parameter": None,
            "value_at_zero": "0",
            "class": "nonregular",
            "transform": None,
        },
        {
            "name": "kubo-mori",
            "formula": "(x - 1)/log x",
            "parameter": None,
            "value_at_zero": "0",
            "class": "nonregular",
            "transform": None,
        },
        {
            "name": "log-square",
            "formula": "2(x - 1)^2/((1 + x) log^2 x)",
            "parameter": None,
            "value_at_zero": "0",
            "class": "nonregular",
            "transform": None,
        },
        {
            "name": "sqrt-log",
            "formula": "2(x - 1) sqrt(x)/((1 + x) log x)",
            "parameter": None,
            "value_at_zero": "0",
            "class": "nonregular",
            "transform": None,
        },
        {
            "name": "alpha",
            "formula": "2 x^(a + 1/2)/(1 + x^(2a))",
            "parameter": "a in [0, 1/2]",
            "value_at_zero": "0",
            "class": "nonregular",
            "transform": None,
        },
        {
            "name": "wyd",
            "formula": "b(1 - b)(x - 1)^2/((x^b - 1)(x^(1-b) - 1))",
            "parameter": "0 < |b| < 1 (wider [-1, 2] behind allow_unvalidated_range)",
            "value_at_zero": "b(1 - b) for 0 < b < 1, else 0",
            "class": "regular for 0 < b < 1, else nonregular",
            "transform": "defined for 0 < b < 1 (no simple closed form)",
        },
        {
            "name": "wy",
            "formula": "(sqrt(x) + 1)^2/4",
            "parameter": None,
            "value_at_zero": "1/4",
            "class": "regular",
            "transform": "sqrt(x)",
        },
    ]
