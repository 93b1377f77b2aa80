"""Dense Hermitian linear algebra at desk scale (n <= 16 or so).

Matrices are plain complex128 ndarrays.  The eigensolver is a cyclic Jacobi
iteration written here so that the sweep order can be shuffled (useful for
probing basis freedom inside degenerate eigenspaces) and so that determinants
of near-singular symmetric matrices come from an eigenvalue product rather
than an LU factorization.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "ConvergenceError",
    "EigenDecomposition",
    "as_complex_matrix",
    "hermitian_part",
    "require_hermitian",
    "frobenius",
    "hermitian_eigen",
    "commutator",
    "apply_scalar_function",
    "real_symmetric_eigenvalues",
    "det_real_symmetric",
    "det_antisymmetric",
    "min_eigenvalue",
    "numeric_rank",
]

MAX_SWEEPS = 100
OFFDIAG_THRESHOLD = 1e-14  # times the Frobenius norm of the input


class ConvergenceError(RuntimeError):
    """The Jacobi iteration did not reach its off-diagonal threshold."""


def as_complex_matrix(a, label: str = "matrix") -> np.ndarray:
    """Coerce to a square complex128 array."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"{label}: expected a square matrix, got shape {m.shape}")
    return m


def hermitian_part(a) -> np.ndarray:
    """(A + A^dagger) / 2."""
    m = as_complex_matrix(a)
    return 0.5 * (m + m.conj().T)


def frobenius(a) -> float:
    return float(np.linalg.norm(a))


def require_hermitian(m: np.ndarray, tol: float = 1e-12, label: str = "matrix") -> None:
    """Raise with the offending entry if m deviates from m^dagger."""
    delta = np.abs(m - m.conj().T)
    scale = max(1.0, float(np.abs(m).max(initial=0.0)))
    if delta.max(initial=0.0) > tol * scale:
        h, j = np.unravel_index(int(np.argmax(delta)), delta.shape)
        raise ValueError(
            f"{label}: not Hermitian, entry ({h},{j}) = {m[h, j]} vs "
            f"conjugate of ({j},{h}) = {np.conj(m[j, h])}"
        )


@dataclass(frozen=True)
class EigenDecomposition:
    """Ascending real eigenvalues and a unitary whose columns are eigenvectors."""

    eigenvalues: np.ndarray
    unitary: np.ndarray

    def reconstruct(self) -> np.ndarray:
        u = self.unitary
        return (u * self.eigenvalues) @ u.conj().T

    def unitarity_residual(self) -> float:
        u = self.unitary
        return frobenius(u.conj().T @ u - np.eye(u.shape[0]))


def _offdiag_norm_sq(a: np.ndarray) -> float:
    sq = np.abs(a) ** 2
    np.fill_diagonal(sq, 0.0)
    return float(sq.sum())


def hermitian_eigen(
    h,
    *,
    sweep_seed: int | None = None,
    max_sweeps: int = MAX_SWEEPS,
) -> EigenDecomposition:
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.

    ``sweep_seed`` shuffles the rotation order of each sweep; any seed gives a
    valid decomposition, but degenerate eigenspaces may come out in a
    different internal basis.  Convergence is declared when the off-diagonal
    Frobenius norm drops below 1e-14 times the input norm.
    """
    a = as_complex_matrix(h).copy()
    require_hermitian(a)
    n = a.shape[0]
    if n == 1:
        return EigenDecomposition(
            eigenvalues=np.array([a[0, 0].real]),
            unitary=np.eye(1, dtype=complex),
        )
    norm = frobenius(a)
    threshold = OFFDIAG_THRESHOLD * norm
    # rotations on entries already below this cutoff cannot matter for the
    # sweep-level stopping rule
    skip = threshold / math.sqrt(max(n * (n - 1), 1))
    u = np.eye(n, dtype=complex)
    pairs = [(p, q) for p in range(n - 1) for q in range(p + 1, n)]
    rng = np.random.default_rng(sweep_seed) if sweep_seed is not None else None

    converged = _offdiag_norm_sq(a) <= threshold**2
    for _ in range(max_sweeps):
        if converged:
            break
        order = pairs if rng is None else [pairs[i] for i in rng.permutation(len(pairs))]
        for p, q in order:
            apq = a[p, q]
            r = abs(apq)
            if r <= skip:
                continue
            app = a[p, p].real
            aqq = a[q, q].real
            phase = apq / r
            theta = 0.5 * math.atan2(2.0 * r, aqq - app)
            c = math.cos(theta)
            s = math.sin(theta)
            v = np.array([[c * phase, s * phase], [-s, c]], dtype=complex)
            a[:, [p, q]] = a[:, [p, q]] @ v
            a[[p, q], :] = v.conj().T @ a[[p, q], :]
            a[p, q] = 0.0
            a[q, p] = 0.0
            u[:, [p, q]] = u[:, [p, q]] @ v
        converged = _offdiag_norm_sq(a) <= threshold**2
    else:
        if not converged:
            raise ConvergenceError(
                f"Jacobi iteration did not converge in {max_sweeps} sweeps "
                f"(off-diagonal norm {math.sqrt(_offdiag_norm_sq(a)):.3e}, "
                f"threshold {threshold:.3e})"
            )
    values = np.diagonal(a).real.copy()
    idx = np.argsort(values, kind="stable")
    return EigenDecomposition(eigenvalues=values[idx], unitary=u[:, idx])


def commutator(a, b) -> np.ndarray:
    """AB - BA."""
    ma = as_complex_matrix(a, "left operand")
    mb = as_complex_matrix(b, "right operand")
    if ma.shape != mb.shape:
        raise ValueError(f"commutator: shape mismatch {ma.shape} vs {mb.shape}")
    return ma @ mb - mb @ ma


def apply_scalar_function(
    h,
    phi: Callable[[np.ndarray], np.ndarray],
    domain: tuple[float, float] | None = None,
) -> np.ndarray:
    """phi applied to a Hermitian matrix through its eigenvalues."""
    eig = hermitian_eigen(h)
    vals = eig.eigenvalues
    if domain is not None:
        lo, hi = domain
        if vals[0] < lo or vals[-1] > hi:
            bad = vals[0] if vals[0] < lo else vals[-1]
            raise ValueError(
                f"eigenvalue {bad!r} outside the function domain [{lo}, {hi}]"
            )
    try:
        w = np.asarray(phi(vals), dtype=float)
        if w.shape != vals.shape:
            raise TypeError
    except TypeError:
        w = np.array([float(phi(v)) for v in vals])
    u = eig.unitary
    return hermitian_part((u * w) @ u.conj().T)


def _det3(m: np.ndarray) -> float:
    return float(
        m[0, 0] * (m[1, 1] * m[2, 2] - m[1, 2] * m[2, 1])
        - m[0, 1] * (m[1, 0] * m[2, 2] - m[1, 2] * m[2, 0])
        + m[0, 2] * (m[1, 0] * m[2, 1] - m[1, 1] * m[2, 0])
    )


def real_symmetric_eigenvalues(m: np.ndarray) -> np.ndarray:
    """Ascending eigenvalues of a real symmetric matrix.

    Closed forms for n <= 3, Jacobi above that.
    """
    n = m.shape[0]
    if n == 1:
        return np.array([float(m[0, 0])])
    if n == 2:
        half = 0.5 * (float(m[0, 0]) + float(m[1, 1]))
        spread = math.hypot(0.5 * (float(m[0, 0]) - float(m[1, 1])), float(m[0, 1]))
        return np.array([half - spread, half + spread])
    if n == 3:
        p1 = float(m[0, 1]) ** 2 + float(m[0, 2]) ** 2 + float(m[1, 2]) ** 2
        diag = np.diagonal(m).astype(float)
        if p1 == 0.0:
            return np.sort(diag)
        q = float(diag.sum()) / 3.0
        p2 = float(((diag - q) ** 2).sum()) + 2.0 * p1
        p = math.sqrt(p2 / 6.0)
        b = (np.asarray(m, dtype=float) - q * np.eye(3)) / p
        r = _det3(b) / 2.0
        r = min(1.0, max(-1.0, r))
        phi = math.acos(r) / 3.0
        big = q + 2.0 * p * math.cos(phi)
        small = q + 2.0 * p * math.cos(phi + 2.0 * math.pi / 3.0)
        mid = 3.0 * q - big - small
        return np.array(sorted((small, mid, big)))
    sym = 0.5 * (np.asarray(m, dtype=float) + np.asarray(m, dtype=float).T)
    return hermitian_eigen(sym).eigenvalues


def det_real_symmetric(m, tol: float = 1e-12) -> float:
    """Determinant of a real symmetric matrix as the product of its eigenvalues."""
    a = np.asarray(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    scale = max(1.0, float(np.abs(a).max(initial=0.0)))
    asym = float(np.abs(a - a.T).max(initial=0.0))
    if asym > tol * scale:
        raise ValueError(f"matrix is not symmetric (max |M - M^T| = {asym:.3e})")
    vals = real_symmetric_eigenvalues(a)
    return float(np.prod(vals))


def det_antisymmetric(k, tol: float = 1e-12) -> float:
    """Determinant of a real antisymmetric matrix via the Hermitian matrix iK.

    Eigenvalues of K are -i times those of iK, so det K = (-i)^n prod(mu);
    the imaginary residue vanishes and odd sizes land on zero.
    """
    a = np.asarray(k, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    scale = max(1.0, float(np.abs(a).max(initial=0.0)))
    asym = float(np.abs(a + a.T).max(initial=0.0))
    if asym > tol * scale:
        raise ValueError(f"matrix is not antisymmetric (max |M + M^T| = {asym:.3e})")
    n = a.shape[0]
    if n % 2 == 1:
        return 0.0
    mu = hermitian_eigen(1j * a).eigenvalues
    return float((((-1j) ** n) * np.prod(mu)).real)


def min_eigenvalue(m) -> float:
    """Smallest eigenvalue of a Hermitian (or real symmetric) matrix."""
    a = np.asarray(m)
    if np.isrealobj(a):
        af = np.asarray(a, dtype=float)
        if af.ndim != 2 or af.shape[0] != af.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {af.shape}")
        scale = max(1.0, float(np.abs(af).max(initial=0.0)))
        if float(np.abs(af - af.T).max(initial=0.0)) <= 1e-11 * scale:
            return float(real_symmetric_eigenvalues(0.5 * (af + af.T))[0])
    return float(hermitian_eigen(a).eigenvalues[0])


def numeric_rank(
    vectors: Sequence[np.ndarray] | np.ndarray, tol: float = 1e-9, floor: float = 0.0
) -> int:
    """Number of singular values above tol times the largest one.

    A purely relative threshold calls a stack of rounding-noise rows full
    rank, since the noise is compared only against itself.  Callers that
    know the scale the rows were produced at can pass ``floor`` (an absolute
    singular value below which a direction counts as zero).
    """
    if tol <= 0:
        raise ValueError(f"tolerance must be positive, got {tol}")
    if floor < 0:
        raise ValueError(f"floor must be nonnegative, got {floor}")
    rows = np.atleast_2d(np.asarray(vectors, dtype=float))
    if rows.size == 0:
        return 0
    s = np.linalg.svd(rows, compute_uv=False)
    if s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > max(tol * s[0], floor)))
