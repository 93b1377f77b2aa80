"""Determinant inequality verifiers.

The bounds all compare determinants of N x N matrices built from one state
and N observables: the covariance matrix, the quantum covariance matrices of
one or two monotone functions, their differences, and binomial cross terms
(the Minkowski/Firey machinery).  A PreparedInstance carries the shared
eigenframe and memoizes every matrix and determinant, so that a campaign can
run the whole battery of checks on an instance for the price of computing
each ingredient once.

Pass/fail is always margin >= -tol * scale with scale = max(1, sum of squared
Frobenius norms of the observables).  Hypothesis failures (a function pair
without strict dominance) are flagged on the report instead of being folded
into the inequality verdict, so a vacuous pass can never masquerade as a
verified theorem.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .covariance import (
    cov_matrix_frame,
    metric_inner,
    observable_scale,
    qov_matrix_frame,
)
from .linalg import det_antisymmetric, det_real_symmetric, min_eigenvalue, numeric_rank
from .monotone import MonotoneFunction, dominates
from .states import (
    DensityMatrix,
    density,
    derive_seed,
    eigenframe,
    observable,
    offdiagonal_dependence,
    pinching,
    random_density,
    random_observable,
)

__all__ = [
    "DEFAULT_TOL",
    "InequalityReport",
    "EqualityClassification",
    "PreparedInstance",
    "prepare",
    "prepare_random",
    "remainder",
    "remainder_t",
    "check_main",
    "check_conj1",
    "check_conj2",
    "check_firey",
    "check_robertson",
    "classify_equality",
    "minkowski_firey_selftest",
    "check_metric_contraction",
]

DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class InequalityReport:
    """Outcome of one inequality check on one instance."""

    name: str
    lhs: float
    rhs: float
    margin: float
    scale: float
    tol: float
    passed: bool
    hypothesis_ok: bool
    clamps: int
    components: dict
    digest: str

    @property
    def violated(self) -> bool:
        """True only for a real counterexample: hypothesis held, margin failed."""
        return self.hypothesis_ok and not self.passed


def _clamp(value: float, window: float, what: str) -> tuple[float, int]:
    """Zero out roundoff-negative determinants; refuse genuinely negative ones."""
    if value >= 0.0:
        return value, 0
    if value >= -window:
        return 0.0, 1
    raise ArithmeticError(
        f"{what} = {value:.6e} is below the clamp window -{window:.1e}; "
        "a positivity invariant has failed beyond tolerance"
    )


def remainder(det_q: float, det_diff: float, n_obs: int) -> float:
    """Binomial cross-term sum between the N-th roots of two determinants.

    Equals ((det_q)^{1/N} + (det_diff)^{1/N})^N minus the two pure terms;
    zero for N = 1 and whenever either determinant vanishes.
    """
    if n_obs < 1:
        raise ValueError(f"observable count must be >= 1, got {n_obs}")
    values = []
    for name, v in (("det_q", det_q), ("det_diff", det_diff)):
        if v < -1e-12:
            raise ValueError(f"{name} = {v!r} is negative beyond roundoff")
        values.append(max(v, 0.0))
    q, c = values
    if q == 0.0 or c == 0.0 or n_obs == 1:
        return 0.0
    qr = q ** (1.0 / n_obs)
    cr = c ** (1.0 / n_obs)
    return float(
        sum(math.comb(n_obs, k) * qr**k * cr ** (n_obs - k) for k in range(1, n_obs))
    )


def remainder_t(det_q: float, det_diff: float, n_obs: int, t: float) -> float:
    """Weighted cross terms ((1-t) q^{1/N})^k (t c^{1/N})^{N-k}, k = 1..N-1.

    At t = 1/2 this is exactly 2^{-N} times ``remainder``.
    """
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"t must lie in [0, 1], got {t!r}")
    if n_obs < 1:
        raise ValueError(f"observable count must be >= 1, got {n_obs}")
    for name, v in (("det_q", det_q), ("det_diff", det_diff)):
        if v < -1e-12:
            raise ValueError(f"{name} = {v!r} is negative beyond roundoff")
    q = max(det_q, 0.0) ** (1.0 / n_obs) * (1.0 - t)
    c = max(det_diff, 0.0) ** (1.0 / n_obs) * t
    if q == 0.0 or c == 0.0 or n_obs == 1:
        return 0.0
    return float(sum(math.comb(n_obs, k) * q**k * c ** (n_obs - k) for k in range(1, n_obs)))


class PreparedInstance:
    """One (state, observables) pair with every derived matrix memoized.

    Quantum covariance matrices are produced for nonregular functions too:
    they are exactly zero there (the f(0) factor), which is the degenerate
    reading that keeps the determinant bounds meaningful for the whole
    catalogue.
    """

    def __init__(self, d: DensityMatrix, obs: Sequence[np.ndarray], digest: str = "custom"):
        checked = tuple(observable(a) for a in obs)
        self.state = d
        self.observables = checked
        self.frame = eigenframe(d, checked)
        self.scale = observable_scale(checked)
        self.digest = digest
        self._qov: dict[MonotoneFunction, np.ndarray] = {}
        self._det: dict = {}
        self._cov_matrix: np.ndarray | None = None
        self._robertson: np.ndarray | None = None

    @property
    def size(self) -> int:
        return self.frame.size

    @property
    def cov(self) -> np.ndarray:
        if self._cov_matrix is None:
            self._cov_matrix = cov_matrix_frame(self.frame)
        return self._cov_matrix

    def qov(self, f: MonotoneFunction) -> np.ndarray:
        got = self._qov.get(f)
        if got is None:
            got = self._qov[f] = qov_matrix_frame(self.frame, f, allow_nonregular=True)
        return got

    @property
    def det_cov(self) -> float:
        if "cov" not in self._det:
            self._det["cov"] = det_real_symmetric(self.cov)
        return self._det["cov"]

    def det_qov(self, f: MonotoneFunction) -> float:
        key = ("qov", f)
        if key not in self._det:
            self._det[key] = det_real_symmetric(self.qov(f))
        return self._det[key]

    def det_diff(self, f: MonotoneFunction) -> float:
        key = ("diff", f)
        if key not in self._det:
            self._det[key] = det_real_symmetric(self.cov - self.qov(f))
        return self._det[key]

    def det_pair_diff(self, f: MonotoneFunction, g: MonotoneFunction) -> float:
        key = ("pair", f, g)
        if key not in self._det:
            self._det[key] = det_real_symmetric(self.qov(f) - self.qov(g))
        return self._det[key]

    @property
    def robertson(self) -> np.ndarray:
        """Commutator bound matrix Im(S), S_kl = sum_h lambda_h A^k_hj A^l_jh."""
        if self._robertson is None:
            stack = np.stack(self.frame.observables)
            s = np.einsum("h,khj,ljh->kl", self.frame.lambdas, stack, stack)
            r = s.imag
            self._robertson = 0.5 * (r - r.T)
        return self._robertson

    @property
    def det_robertson(self) -> float:
        if "robertson" not in self._det:
            self._det["robertson"] = det_antisymmetric(self.robertson)
        return self._det["robertson"]


def prepare(d: DensityMatrix, obs: Sequence[np.ndarray], digest: str = "custom") -> PreparedInstance:
    return PreparedInstance(d, obs, digest)


def prepare_random(n: int, n_obs: int, seed: int, kind: str = "generic") -> PreparedInstance:
    """Instance from derived seeds; reproducible from the digest alone."""
    d = random_density(n, seed, kind)
    obs = [random_observable(n, derive_seed("obs", seed, k)) for k in range(n_obs)]
    return PreparedInstance(d, obs, digest=f"n={n},N={n_obs},kind={kind},seed={seed}")


def _report(name, inst, lhs, rhs, tol, components, clamps=0, hypothesis_ok=True):
    margin = lhs - rhs
    return InequalityReport(
        name=name,
        lhs=lhs,
        rhs=rhs,
        margin=margin,
        scale=inst.scale,
        tol=tol,
        passed=bool(margin >= -tol * inst.scale),
        hypothesis_ok=hypothesis_ok,
        clamps=clamps,
        components=components,
        digest=inst.digest,
    )


def check_main(inst: PreparedInstance, f: MonotoneFunction, tol: float = DEFAULT_TOL) -> InequalityReport:
    """det Cov >= det Qov_f."""
    lhs = inst.det_cov
    rhs = inst.det_qov(f)
    return _report("main", inst, lhs, rhs, tol, {"det_cov": lhs, "det_qov": rhs, "f": f.label})


def check_conj1(inst: PreparedInstance, f: MonotoneFunction, tol: float = DEFAULT_TOL) -> InequalityReport:
    """det Cov >= det Qov + det(Cov - Qov) + cross terms."""
    window = tol * inst.scale
    q, c1 = _clamp(inst.det_qov(f), window, "det Qov")
    dd, c2 = _clamp(inst.det_diff(f), window, "det(Cov - Qov)")
    rem = remainder(q, dd, inst.size)
    rhs = q + dd + rem
    if rhs < q:
        raise AssertionError("cross terms made the bound weaker than det Qov")
    components = {"det_cov": inst.det_cov, "det_qov": q, "det_diff": dd, "remainder": rem, "f": f.label}
    return _report("conj1", inst, inst.det_cov, rhs, tol, components, clamps=c1 + c2)


def _pair_hypothesis(f: MonotoneFunction, g: MonotoneFunction) -> bool:
    """Strict dominance f(0)/f > g(0)/g, extended to nonregular g (ratio 0)."""
    if f.regular and g.regular:
        return dominates(f, g).strict
    return f.regular and not g.regular


def check_conj2(
    inst: PreparedInstance,
    f: MonotoneFunction,
    g: MonotoneFunction,
    tol: float = DEFAULT_TOL,
) -> InequalityReport:
    """det Qov_f >= det Qov_g + det(Qov_f - Qov_g) + cross terms."""
    hypothesis_ok = _pair_hypothesis(f, g)
    window = tol * inst.scale
    lhs = inst.det_qov(f)
    qg, c1 = _clamp(inst.det_qov(g), window, "det Qov_g")
    dd, c2 = _clamp(inst.det_pair_diff(f, g), window, "det(Qov_f - Qov_g)")
    rem = remainder(qg, dd, inst.size)
    components = {
        "det_qov_f": lhs,
        "det_qov_g": qg,
        "det_diff_fg": dd,
        "remainder": rem,
        "f": f.label,
        "g": g.label,
    }
    return _report(
        "conj2", inst, lhs, qg + dd + rem, tol, components, clamps=c1 + c2, hypothesis_ok=hypothesis_ok
    )


def check_firey(
    inst: PreparedInstance,
    f: MonotoneFunction,
    t: float,
    g: MonotoneFunction | None = None,
    tol: float = DEFAULT_TOL,
) -> InequalityReport:
    """det(t K_big + (1-2t) K_small) >= (1-t)^N det K_small + t^N det(K_big - K_small) + cross terms.

    With g omitted the pair is (Cov, Qov_f); with g it is (Qov_f, Qov_g).
    Note t K_big + (1-2t) K_small = (1-t) K_small + t (K_big - K_small), so
    this is the Firey combination of the two summands on the right.
    """
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"t must lie in [0, 1], got {t!r}")
    window = tol * inst.scale
    if g is None:
        big, small = inst.cov, inst.qov(f)
        q, c1 = _clamp(inst.det_qov(f), window, "det Qov")
        dd, c2 = _clamp(inst.det_diff(f), window, "det(Cov - Qov)")
        hypothesis_ok = True
        labels = {"f": f.label}
    else:
        big, small = inst.qov(f), inst.qov(g)
        q, c1 = _clamp(inst.det_qov(g), window, "det Qov_g")
        dd, c2 = _clamp(inst.det_pair_diff(f, g), window, "det(Qov_f - Qov_g)")
        hypothesis_ok = _pair_hypothesis(f, g)
        labels = {"f": f.label, "g": g.label}
    mix = t * big + (1.0 - 2.0 * t) * small
    lhs = det_real_symmetric(mix)
    rem = remainder_t(q, dd, inst.size, t)
    rhs = (1.0 - t) ** inst.size * q + t**inst.size * dd + rem
    components = {"det_mix": lhs, "det_small": q, "det_diff": dd, "remainder_t": rem, "t": t, **labels}
    return _report(
        "firey", inst, lhs, rhs, tol, components, clamps=c1 + c2, hypothesis_ok=hypothesis_ok
    )


def check_robertson(inst: PreparedInstance, tol: float = DEFAULT_TOL) -> InequalityReport:
    """det Cov >= det of the commutator bound matrix (exactly 0 for odd N)."""
    lhs = inst.det_cov
    rhs = inst.det_robertson
    return _report("robertson", inst, lhs, rhs, tol, {"det_cov": lhs, "det_commutator": rhs})


@dataclass(frozen=True)
class EqualityClassification:
    """Which equality conditions hold, plus the structural facts behind them.

    condition_a: det Cov = det Qov_f.  condition_c: the centered observables
    are linearly dependent over the reals.  These two are equivalent.
    condition_b: det Qov_f = det Qov_g; this one is equivalent to offdiagonal
    dependence, which is strictly weaker than condition_c (a single
    observable diagonal in the state's eigenbasis has b without a or c).

    Only one direction of each equivalence is numerically decidable:
    dependence forces the determinant equality exactly, while independence
    guarantees a gap that can still sit below the tolerance window near the
    boundary of the state space.  Nearly degenerate spectra collapse the
    Qov gap of condition b (at the maximally mixed state the commutator
    metric vanishes for every observable), and nearly singular states
    collapse the Cov - Qov gap of condition a (at a pure state the two
    matrices coincide).  An equality that fired without its structural
    counterpart is reported as unresolved, not as a contradiction.
    """

    det_cov: float
    det_qov_f: float
    det_qov_g: float | None
    condition_a: bool
    condition_b: bool | None
    condition_c: bool
    linearly_dependent: bool
    offdiag_dependent: bool
    rank: int

    @property
    def verdict(self) -> str:
        held = [name for name, ok in (("a", self.condition_a), ("b", self.condition_b), ("c", self.condition_c)) if ok]
        return ",".join(held) if held else "none"

    @property
    def resolved(self) -> bool:
        """False when a determinant equality fired without the dependence
        that would explain it; such an instance cannot corroborate the
        equivalence either way."""
        if self.condition_a and not self.linearly_dependent:
            return False
        if self.condition_b is not None and self.condition_b and not self.offdiag_dependent:
            return False
        return True

    @property
    def consistent(self) -> bool:
        """No decidable direction was contradicted: a dependent family must
        show its determinant equality."""
        if self.linearly_dependent and not (self.condition_a and self.condition_c):
            return False
        if self.condition_b is not None and self.offdiag_dependent and not self.condition_b:
            return False
        return True


def classify_equality(
    inst: PreparedInstance,
    f: MonotoneFunction,
    g: MonotoneFunction | None = None,
    tol: float = DEFAULT_TOL,
) -> EqualityClassification:
    window = tol * inst.scale
    det_cov = inst.det_cov
    det_qf = inst.det_qov(f)
    det_qg = None if g is None else inst.det_qov(g)

    n = inst.frame.dim
    vectors = np.empty((inst.size, 2 * n * n), dtype=float)
    for k, a in enumerate(inst.frame.observables):
        vectors[k, : n * n] = a.real.ravel()
        vectors[k, n * n :] = a.imag.ravel()
    # Centering an observable proportional to the identity leaves only
    # rounding noise behind; a floor at the raw observables' scale keeps
    # such a row from counting as an independent direction.
    obs_scale = max([1.0] + [float(np.linalg.norm(a)) for a in inst.observables])
    rank = numeric_rank(vectors, tol=1e-9, floor=1e-9 * obs_scale)
    dependent = rank < inst.size
    offdiag = offdiagonal_dependence(inst.frame).dependent

    return EqualityClassification(
        det_cov=det_cov,
        det_qov_f=det_qf,
        det_qov_g=det_qg,
        condition_a=bool(abs(det_cov - det_qf) <= window),
        condition_b=None if det_qg is None else bool(abs(det_qf - det_qg) <= window),
        condition_c=dependent,
        linearly_dependent=dependent,
        offdiag_dependent=offdiag,
        rank=rank,
    )


def minkowski_firey_selftest(
    k: np.ndarray,
    l: np.ndarray,
    t: float,
    tol: float = DEFAULT_TOL,
) -> InequalityReport:
    """det((1-t)K + tL)^{1/N} >= (1-t) det(K)^{1/N} + t det(L)^{1/N} for PSD K, L.

    Standalone check of the classical inequality the main bounds reduce to;
    takes plain matrices, no quantum structure.
    """
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"t must lie in [0, 1], got {t!r}")
    k = np.asarray(k, dtype=float)
    l = np.asarray(l, dtype=float)
    if k.shape != l.shape or k.ndim != 2 or k.shape[0] != k.shape[1]:
        raise ValueError(f"need two equal square matrices, got {k.shape} and {l.shape}")
    n = k.shape[0]
    scale = max(1.0, float(np.abs(k).max()), float(np.abs(l).max()))
    for name, m in (("K", k), ("L", l)):
        if np.abs(m - m.T).max() > 1e-11 * scale:
            raise ValueError(f"{name} is not symmetric")
        if min_eigenvalue(m.astype(complex)) < -1e-10 * scale:
            raise ValueError(f"{name} is not positive semidefinite")
    window = tol * scale**n
    det_k, c1 = _clamp(det_real_symmetric(k), window, "det K")
    det_l, c2 = _clamp(det_real_symmetric(l), window, "det L")
    det_mix, c3 = _clamp(det_real_symmetric((1.0 - t) * k + t * l), window, "det mix")
    lhs = det_mix ** (1.0 / n)
    rhs = (1.0 - t) * det_k ** (1.0 / n) + t * det_l ** (1.0 / n)
    margin = lhs - rhs
    return InequalityReport(
        name="minkowski-firey",
        lhs=lhs,
        rhs=rhs,
        margin=margin,
        scale=scale,
        tol=tol,
        passed=bool(margin >= -tol * scale),
        hypothesis_ok=True,
        clamps=c1 + c2 + c3,
        components={"det_k": det_k, "det_l": det_l, "det_mix": det_mix, "t": t},
        digest=f"selftest[{n}x{n}]",
    )


def check_metric_contraction(
    d: DensityMatrix,
    x: np.ndarray,
    f: MonotoneFunction,
    partition: Sequence,
    tol: float = DEFAULT_TOL,
) -> InequalityReport:
    """Metric monotonicity under pinching: K_T(D)(T(X), T(X)) <= K_D(X, X).

    X is projected onto the traceless part first (tangent vectors of the
    state space); pinching commutes with that projection.
    """
    x = observable(x)
    n = d.dim
    x0 = x - (np.trace(x).real / n) * np.eye(n)
    before = metric_inner(d, f, x0, x0)
    pinched_state = density(pinching(d.matrix, partition))
    after = metric_inner(pinched_state, f, pinching(x0, partition), pinching(x0, partition))
    margin = before - after
    scale = max(1.0, before)
    # Metric weights near a tiny eigenvalue lam are 1/lam-sized, and storing
    # the pinched matrix in doubles already limits lam to roughly
    # eps*||D||/lam relative accuracy, so the achievable precision of the
    # two sides degrades by that factor.  Widen the window accordingly;
    # for healthy spectra the extra term is far below tol*scale.
    lam_floor = float(min(d.eigenvalues[0], pinched_state.eigenvalues[0]))
    window = tol * scale + 4.0 * n * np.finfo(float).eps / lam_floor * before
    return InequalityReport(
        name="contraction",
        lhs=before,
        rhs=after,
        margin=margin,
        scale=scale,
        tol=tol,
        passed=bool(margin >= -window),
        hypothesis_ok=True,
        clamps=0,
        components={
            "before": before,
            "after": after,
            "window": window,
            "blocks": len(list(partition)),
            "f": f.label,
        },
        digest=f"contraction[n={n}]",
    )
