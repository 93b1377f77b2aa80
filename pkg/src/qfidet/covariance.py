"""Classical covariance, monotone-metric inner products, and quantum covariance.

Every scalar here is computed by two genuinely different routes that the test
suite forces to agree:

* ``cov`` works directly with traces of matrix products, while ``cov_frame``
  evaluates the eigenbasis double sum with arithmetic-mean weights
  (lambda_h + lambda_j)/2.
* ``qov`` follows its definition, f(0)/2 times the metric inner product of
  i[D, A] and i[D, B], where the metric divides by the matrix mean
  m_f(lambda_h, lambda_j).  ``qov_frame`` instead sums the coefficients
  alpha_hj = (lambda_h + lambda_j)/2 - m_tilde(lambda_h, lambda_j) against
  the frame matrices; the mean subtraction never sees a commutator or a
  division, so agreement is informative.

Matrix assemblers exist in both flavours as well.  The frame versions are the
fast path (one einsum per matrix); the entrywise versions stay close to the
definitions and are what the assemblers are tested against.
"""
from __future__ import annotations

import numpy as np

from .linalg import commutator, frobenius, hermitian_part, require_hermitian
from .monotone import MonotoneFunction, mean, tilde
from .states import DensityMatrix, EigenFrame

__all__ = [
    "cov",
    "cov_frame",
    "metric_inner",
    "qov",
    "qov_frame",
    "alpha_coefficients",
    "pair_means",
    "cov_matrix",
    "qov_matrix",
    "cov_matrix_frame",
    "qov_matrix_frame",
    "robertson_matrix",
    "observable_scale",
]


def cov(d: DensityMatrix, a: np.ndarray, b: np.ndarray) -> float:
    """Symmetrized covariance Tr(D(AB+BA))/2 - Tr(DA)Tr(DB)."""
    if a.shape != d.matrix.shape or b.shape != d.matrix.shape:
        raise ValueError("observable shape does not match the state")
    dm = d.matrix
    mean_a = float(np.trace(dm @ a).real)
    mean_b = float(np.trace(dm @ b).real)
    sym = 0.5 * float(np.trace(dm @ (a @ b + b @ a)).real)
    return sym - mean_a * mean_b


def _check_index(frame: EigenFrame, idx: int) -> np.ndarray:
    if not 0 <= idx < frame.size:
        raise IndexError(f"observable index {idx} out of range for frame of size {frame.size}")
    return frame.observables[idx]


def pair_means(lambdas: np.ndarray, f: MonotoneFunction) -> np.ndarray:
    """Matrix of m_f(lambda_h, lambda_j) over all eigenvalue pairs."""
    return mean(f, lambdas[:, None], lambdas[None, :])


def cov_frame(frame: EigenFrame, a: int, b: int) -> float:
    """Eigenbasis double sum with weights (lambda_h + lambda_j)/2."""
    am = _check_index(frame, a)
    bm = _check_index(frame, b)
    lam = frame.lambdas
    weights = 0.5 * (lam[:, None] + lam[None, :])
    return float(np.sum(weights * am * bm.T).real)


def metric_inner(d: DensityMatrix, f: MonotoneFunction, x: np.ndarray, y: np.ndarray) -> float:
    """Scalar product sum conj(X_hj) Y_hj / m_f(lambda_h, lambda_j) in D's eigenbasis.

    Defined for arbitrary Hermitian tangents; positivity of the state keeps
    every matrix mean strictly positive.
    """
    for label, t in (("x", x), ("y", y)):
        if t.shape != d.matrix.shape:
            raise ValueError(f"tangent {label} shape {t.shape} does not match the state")
        require_hermitian(t, label=f"tangent {label}")
    u = d.eigen.unitary
    xr = u.conj().T @ x @ u
    yr = u.conj().T @ y @ u
    means = pair_means(d.eigenvalues, f)
    if not np.all(means > 0.0):
        raise ValueError(f"matrix mean underflow for {f.label}: min {means.min():.3e}")
    return float(np.sum(xr.conj() * yr / means).real)


def qov(
    d: DensityMatrix,
    f: MonotoneFunction,
    a: np.ndarray,
    b: np.ndarray,
    *,
    allow_nonregular: bool = False,
) -> float:
    """Quantum covariance f(0)/2 * <i[D,A], i[D,B]>_{D,f}.

    Nonregular f (f(0) = 0) is rejected by default: the factor f(0) makes
    the value identically zero, which silently erases the quantity the
    caller probably wanted.  Pass allow_nonregular=True to accept the exact
    zero (the degenerate member that some of the determinant bounds use).
    """
    if not f.regular:
        if allow_nonregular:
            return 0.0
        raise ValueError(
            f"{f.label} is not regular (f(0) = 0), so its quantum covariance "
            "is identically zero; pass allow_nonregular=True to accept that"
        )
    ca = hermitian_part(1j * commutator(d.matrix, a))
    cb = hermitian_part(1j * commutator(d.matrix, b))
    return 0.5 * f.value_at_zero * metric_inner(d, f, ca, cb)


def alpha_coefficients(lambdas: np.ndarray, f: MonotoneFunction) -> np.ndarray:
    """Coefficients (lambda_h + lambda_j)/2 - m_tilde(lambda_h, lambda_j).

    Zero on the diagonal, strictly positive off it (for distinct eigenvalues);
    equal to f(0)(lambda_h - lambda_j)^2 / (2 m_f) by the transform identity,
    which the tests check but this route never uses.
    """
    lam = np.asarray(lambdas, dtype=float)
    arithmetic = 0.5 * (lam[:, None] + lam[None, :])
    return arithmetic - pair_means(lam, tilde(f))


def qov_frame(frame: EigenFrame, f: MonotoneFunction, a: int, b: int) -> float:
    """Eigenbasis double sum with the alpha coefficients of ``f``."""
    am = _check_index(frame, a)
    bm = _check_index(frame, b)
    weights = alpha_coefficients(frame.lambdas, f)
    return float(np.sum(weights * am * bm.T).real)


def _entrywise(obs_count: int, entry) -> np.ndarray:
    out = np.empty((obs_count, obs_count), dtype=float)
    for i in range(obs_count):
        for j in range(i, obs_count):
            out[i, j] = out[j, i] = entry(i, j)
    return out


def cov_matrix(d: DensityMatrix, obs) -> np.ndarray:
    """N x N matrix of pairwise covariances, entrywise from the trace formula."""
    obs = list(obs)
    return _entrywise(len(obs), lambda i, j: cov(d, obs[i], obs[j]))


def qov_matrix(
    d: DensityMatrix,
    f: MonotoneFunction,
    obs,
    *,
    allow_nonregular: bool = False,
) -> np.ndarray:
    """N x N matrix of pairwise quantum covariances, entrywise from the definition."""
    obs = list(obs)
    return _entrywise(
        len(obs), lambda i, j: qov(d, f, obs[i], obs[j], allow_nonregular=allow_nonregular)
    )


def _frame_quadratic(frame: EigenFrame, weights: np.ndarray) -> np.ndarray:
    stack = np.stack(frame.observables)
    raw = np.einsum("hj,khj,ljh->kl", weights, stack, stack).real
    return 0.5 * (raw + raw.T)


def cov_matrix_frame(frame: EigenFrame) -> np.ndarray:
    """Same matrix as cov_matrix, assembled in one pass from the frame."""
    lam = frame.lambdas
    return _frame_quadratic(frame, 0.5 * (lam[:, None] + lam[None, :]))


def qov_matrix_frame(
    frame: EigenFrame,
    f: MonotoneFunction,
    *,
    allow_nonregular: bool = False,
) -> np.ndarray:
    """Same matrix as qov_matrix, assembled in one pass from the frame."""
    if not f.regular:
        if allow_nonregular:
            return np.zeros((frame.size, frame.size))
        raise ValueError(
            f"{f.label} is not regular (f(0) = 0); pass allow_nonregular=True "
            "for the identically-zero matrix"
        )
    return _frame_quadratic(frame, alpha_coefficients(frame.lambdas, f))


def robertson_matrix(d: DensityMatrix, obs) -> np.ndarray:
    """Antisymmetric matrix with entries -(i/2) Tr(D [A_h, A_j])."""
    obs = list(obs)
    n = len(obs)
    out = np.zeros((n, n), dtype=float)
    for i in range(n):
        if obs[i].shape != d.matrix.shape:
            raise ValueError(f"observable {i} shape {obs[i].shape} does not match the state")
        for j in range(i + 1, n):
            t = complex(np.trace(d.matrix @ commutator(obs[i], obs[j])))
            out[i, j] = 0.5 * t.imag
            out[j, i] = -out[i, j]
    return out


def observable_scale(obs) -> float:
    """Tolerance scale max(1, sum of squared Frobenius norms)."""
    return max(1.0, sum(frobenius(a) ** 2 for a in obs))
