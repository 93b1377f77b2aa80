from __future__ import annotations

import math

import numpy as np
import pytest

from qfidet.covariance import robertson_matrix
from qfidet.inequalities import (
    EqualityClassification,
    check_conj1,
    check_conj2,
    check_firey,
    check_main,
    check_metric_contraction,
    check_robertson,
    classify_equality,
    minkowski_firey_selftest,
    prepare,
    prepare_random,
    remainder,
    remainder_t,
)
from qfidet.monotone import make_function
from qfidet.states import density, random_density, random_observable, random_partition

from conftest import PAULI_X, PAULI_Y, PAULI_Z

SLD = make_function("sld")
WY = make_function("wy")
WYD = make_function("wyd", 0.3)
KM = make_function("kubo-mori")


@pytest.fixture
def tight():
    d = density(np.diag([0.75, 0.25]).astype(complex))
    return prepare(d, [PAULI_X, PAULI_Y], digest="qubit-tight")


def test_remainder_examples():
    assert remainder(1.0 / 16.0, 9.0 / 16.0, 2) == pytest.approx(3.0 / 8.0, abs=1e-15)
    assert remainder(0.3, 0.7, 1) == 0.0
    assert remainder(0.0, 0.7, 5) == 0.0
    assert remainder(0.7, 0.0, 5) == 0.0
    assert remainder(-1e-13, 0.5, 3) == 0.0  # roundoff clamp
    with pytest.raises(ValueError, match="negative"):
        remainder(-1e-9, 0.5, 2)
    with pytest.raises(ValueError, match="count"):
        remainder(0.5, 0.5, 0)


def test_remainder_closes_the_binomial(rng):
    for _ in range(200):
        q = float(rng.uniform(0.0, 2.0))
        c = float(rng.uniform(0.0, 2.0))
        n = int(rng.integers(1, 6))
        full = (q ** (1.0 / n) + c ** (1.0 / n)) ** n
        assert remainder(q, c, n) == pytest.approx(full - q - c, rel=1e-12, abs=1e-13)


def test_remainder_t_examples():
    assert remainder_t(1.0 / 16.0, 9.0 / 16.0, 2, 0.5) == pytest.approx(3.0 / 32.0, abs=1e-15)
    assert remainder_t(0.3, 0.7, 4, 0.0) == 0.0
    assert remainder_t(0.3, 0.7, 4, 1.0) == 0.0
    with pytest.raises(ValueError, match="t must"):
        remainder_t(0.3, 0.7, 4, 1.5)


def test_remainder_t_halving(rng):
    for _ in range(200):
        q = float(rng.uniform(0.0, 3.0))
        c = float(rng.uniform(0.0, 3.0))
        n = int(rng.integers(1, 6))
        assert remainder_t(q, c, n, 0.5) == pytest.approx(
            remainder(q, c, n) / 2**n, rel=1e-12, abs=1e-15
        )


def test_tight_witness_components(tight):
    assert tight.det_cov == pytest.approx(1.0, abs=1e-12)
    assert tight.det_qov(SLD) == pytest.approx(1.0 / 16.0, abs=1e-12)
    assert tight.det_diff(SLD) == pytest.approx(9.0 / 16.0, abs=1e-12)
    rep = check_conj1(tight, SLD)
    assert rep.components["remainder"] == pytest.approx(3.0 / 8.0, abs=1e-12)
    assert abs(rep.margin) <= 1e-12
    assert rep.passed and rep.clamps == 0
    assert rep.rhs == pytest.approx(1.0, abs=1e-12)


def test_tight_witness_firey_half(tight):
    rep = check_firey(tight, SLD, 0.5)
    assert rep.lhs == pytest.approx(0.25, abs=1e-12)
    assert rep.components["det_small"] * 0.25 == pytest.approx(1.0 / 64.0, abs=1e-12)
    assert rep.components["det_diff"] * 0.25 == pytest.approx(9.0 / 64.0, abs=1e-12)
    assert rep.components["remainder_t"] == pytest.approx(6.0 / 64.0, abs=1e-12)
    assert abs(rep.margin) <= 1e-12


def test_main_examples(tight):
    d = density(np.diag([0.75, 0.25]).astype(complex))
    single = prepare(d, [PAULI_X])
    rep = check_main(single, SLD)
    assert rep.lhs == pytest.approx(1.0, abs=1e-13)
    assert rep.rhs == pytest.approx(0.25, abs=1e-13)
    assert rep.passed and rep.margin == pytest.approx(0.75, abs=1e-12)

    mixed = prepare(density(np.eye(2, dtype=complex) / 2), [PAULI_X, PAULI_Y])
    rep2 = check_main(mixed, SLD)
    assert abs(rep2.rhs) <= 1e-13 and rep2.passed

    both = check_main(tight, SLD)
    assert both.lhs == pytest.approx(1.0, abs=1e-12)
    assert both.rhs == pytest.approx(1.0 / 16.0, abs=1e-12)


def test_conj1_single_observable_is_an_identity():
    for seed in range(10):
        inst = prepare_random(3, 1, seed)
        for f in (SLD, WY, WYD):
            rep = check_conj1(inst, f)
            assert abs(rep.margin) <= 1e-14
            assert rep.rhs >= rep.components["det_qov"]


def test_conj1_beats_main(rng):
    for seed in range(30):
        inst = prepare_random(int(rng.integers(2, 5)), int(rng.integers(1, 4)), 100 + seed)
        for f in (SLD, WY):
            conj1 = check_conj1(inst, f)
            main = check_main(inst, f)
            assert conj1.rhs >= main.rhs - 1e-13 * inst.scale
            assert conj1.passed and main.passed


def test_conj2_hand_values():
    d = density(np.diag([0.75, 0.25]).astype(complex))
    q_wy = (2.0 - math.sqrt(3.0)) / 2.0

    single = prepare(d, [PAULI_X])
    rep = check_conj2(single, SLD, WY)
    assert rep.hypothesis_ok
    assert rep.lhs == pytest.approx(0.25, abs=1e-13)
    assert rep.components["det_qov_g"] == pytest.approx(q_wy, abs=1e-13)
    assert abs(rep.margin) <= 1e-13

    pair = prepare(d, [PAULI_X, PAULI_Y])
    rep2 = check_conj2(pair, SLD, WY)
    assert rep2.lhs == pytest.approx(1.0 / 16.0, abs=1e-13)
    assert rep2.components["det_qov_g"] == pytest.approx(q_wy**2, abs=1e-13)
    assert rep2.components["det_diff_fg"] == pytest.approx((0.25 - q_wy) ** 2, abs=1e-13)
    assert rep2.components["remainder"] == pytest.approx(2.0 * q_wy * (0.25 - q_wy), abs=1e-13)
    assert abs(rep2.margin) <= 1e-13  # proportional matrices are tight


def test_conj2_hypothesis_flag():
    inst = prepare_random(3, 2, 7)
    backwards = check_conj2(inst, WY, SLD)
    assert not backwards.hypothesis_ok
    assert not backwards.violated  # hypothesis failures are not counterexamples

    degenerate = check_conj2(inst, SLD, KM)
    assert degenerate.hypothesis_ok  # positive ratio strictly dominates the zero one
    assert degenerate.components["det_qov_g"] == 0.0
    assert degenerate.passed and abs(degenerate.margin) <= 1e-13 * inst.scale

    nonregular_f = check_conj2(inst, KM, SLD)
    assert not nonregular_f.hypothesis_ok


def test_firey_endpoints_and_range(rng):
    inst = prepare_random(3, 2, 11)
    for f in (SLD, WY):
        assert abs(check_firey(inst, f, 0.0).margin) <= 1e-12 * inst.scale
        assert abs(check_firey(inst, f, 1.0).margin) <= 1e-12 * inst.scale
    with pytest.raises(ValueError, match="t must"):
        check_firey(inst, SLD, -0.1)


def test_firey_half_recovers_conj1(rng):
    for seed in range(20):
        inst = prepare_random(int(rng.integers(2, 5)), int(rng.integers(1, 4)), 500 + seed)
        n = inst.size
        for f in (SLD, WYD):
            half = check_firey(inst, f, 0.5)
            full = check_conj1(inst, f)
            assert half.lhs == pytest.approx(full.lhs / 2**n, rel=1e-11, abs=1e-13)
            assert half.components["remainder_t"] == pytest.approx(
                full.components["remainder"] / 2**n, rel=1e-11, abs=1e-13
            )
            assert half.margin == pytest.approx(full.margin / 2**n, rel=1e-9, abs=1e-12)


def test_firey_pair_form(rng):
    inst = prepare_random(3, 2, 21)
    rep = check_firey(inst, SLD, 0.3, g=WY)
    assert rep.hypothesis_ok and rep.passed
    rep_bad = check_firey(inst, WY, 0.3, g=SLD)
    assert not rep_bad.hypothesis_ok


def test_firey_grid_passes(rng):
    grid = np.linspace(0.0, 1.0, 11)
    for seed in range(12):
        inst = prepare_random(int(rng.integers(2, 5)), int(rng.integers(1, 4)), 900 + seed)
        for t in grid:
            assert check_firey(inst, SLD, float(t)).passed
            assert check_firey(inst, SLD, float(t), g=WY).passed


def test_robertson_hand_values(tight):
    rep = check_robertson(tight)
    assert rep.lhs == pytest.approx(1.0, abs=1e-12)
    assert rep.rhs == pytest.approx(0.25, abs=1e-12)
    assert rep.passed

    mixed = prepare(density(np.eye(2, dtype=complex) / 2), [PAULI_X, PAULI_Y])
    assert abs(check_robertson(mixed).rhs) <= 1e-14


def test_robertson_odd_count_is_zero():
    inst = prepare_random(3, 3, 33)
    rep = check_robertson(inst)
    assert rep.rhs == 0.0
    assert rep.passed


def test_robertson_frame_route_matches_trace_route(rng):
    for seed in range(15):
        inst = prepare_random(int(rng.integers(2, 5)), int(rng.integers(2, 4)), 40 + seed)
        direct = robertson_matrix(inst.state, list(inst.observables))
        assert np.abs(direct - inst.robertson).max() <= 1e-12


def test_robertson_passes_randomly(rng):
    for seed in range(40):
        inst = prepare_random(int(rng.integers(2, 5)), int(rng.integers(1, 5)), 70 + seed)
        assert check_robertson(inst).passed


def test_classify_collapsed_pair():
    d = density(np.diag([0.75, 0.25]).astype(complex))
    inst = prepare(d, [PAULI_X, PAULI_X + np.eye(2)])
    got = classify_equality(inst, SLD, WY)
    assert got.condition_a and got.condition_b and got.condition_c
    assert got.linearly_dependent and got.offdiag_dependent
    assert got.verdict == "a,b,c" and got.consistent
    assert got.det_cov <= 1e-10 and got.det_qov_f <= 1e-10


def test_classify_identity_multiple_is_dependent():
    # Centering wipes out an observable proportional to the identity, so the
    # leftover rounding noise must not be counted as an independent direction.
    inst = prepare(random_density(2, 77), [PAULI_X, 2.5 * np.eye(2, dtype=complex)])
    got = classify_equality(inst, SLD, WY)
    assert got.linearly_dependent and got.rank == 1
    assert got.condition_a and got.condition_c and got.consistent


def test_classify_independent_pair(tight):
    got = classify_equality(tight, SLD, WY)
    assert got.verdict == "none"
    assert not got.linearly_dependent and not got.offdiag_dependent
    assert got.consistent
    assert got.rank == 2


def test_classify_single_diagonal_observable():
    # offdiagonal dependence without linear dependence: b holds, a and c fail
    d = density(np.diag([0.75, 0.25]).astype(complex))
    inst = prepare(d, [PAULI_Z])
    got = classify_equality(inst, SLD, WY)
    assert got.condition_b and not got.condition_a and not got.condition_c
    assert got.offdiag_dependent and not got.linearly_dependent
    assert got.verdict == "b" and got.consistent and got.resolved
    assert got.det_cov > 0.5  # variance of sigma_z at p = 3/4


def test_classify_without_second_function(tight):
    got = classify_equality(tight, SLD)
    assert got.condition_b is None and got.det_qov_g is None
    assert got.verdict == "none" and got.consistent


def test_classify_no_false_equalities(rng):
    # generic states: a and c never fire, and b tracks offdiagonal dependence
    # exactly (for n = 2 a third observable is offdiagonally dependent by
    # dimension count, and its Qov determinant genuinely vanishes)
    for seed in range(60):
        inst = prepare_random(int(rng.integers(2, 5)), int(rng.integers(1, 4)), 1500 + seed)
        got = classify_equality(inst, SLD, WY)
        assert not got.condition_a and not got.condition_c
        assert got.condition_b == got.offdiag_dependent
        assert got.resolved and got.consistent


def test_classify_near_pure_state_is_flagged_not_failed():
    # n = 2 near-singular states are nearly pure, where Cov -> Qov_sld and the
    # condition-a determinant gap shrinks to the order of the smallest
    # eigenvalue; when it lands inside the window the instance is unresolved
    from qfidet.states import derive_seed

    inst = prepare_random(2, 2, derive_seed(2026, 2, 2, "near-singular", 0), "near-singular")
    got = classify_equality(inst, SLD, WY)
    assert got.condition_a and not got.linearly_dependent
    assert not got.resolved
    assert got.consistent


def test_classify_degenerate_spectrum_is_flagged_not_failed():
    # at the maximally mixed state every commutator vanishes, so both Qov
    # determinants are exactly zero for independent observables: condition b
    # fires but cannot count against the equivalence
    inst = prepare(density(np.eye(2, dtype=complex) / 2), [PAULI_X, PAULI_Y])
    got = classify_equality(inst, SLD, WY)
    assert got.det_qov_f == 0.0 and got.det_qov_g == 0.0
    assert got.condition_b and not got.offdiag_dependent
    assert not got.condition_a and not got.condition_c
    assert not got.resolved
    assert got.consistent


def test_minkowski_selftest_hand_value():
    rep = minkowski_firey_selftest(np.eye(2), np.diag([1.0, 4.0]), 0.5)
    assert rep.lhs == pytest.approx(math.sqrt(2.5), abs=1e-13)
    assert rep.rhs == pytest.approx(1.5, abs=1e-13)
    assert rep.margin == pytest.approx(math.sqrt(2.5) - 1.5, abs=1e-12)
    assert rep.passed


def test_minkowski_selftest_equalities():
    k = np.array([[2.0, 0.5], [0.5, 1.0]])
    assert abs(minkowski_firey_selftest(k, k, 0.5).margin) <= 1e-12
    l = np.diag([3.0, 0.1])
    assert abs(minkowski_firey_selftest(k, l, 0.0).margin) <= 1e-12
    assert abs(minkowski_firey_selftest(k, l, 1.0).margin) <= 1e-12


def test_minkowski_selftest_validation():
    k = np.eye(2)
    with pytest.raises(ValueError, match="t must"):
        minkowski_firey_selftest(k, k, 2.0)
    with pytest.raises(ValueError, match="symmetric"):
        minkowski_firey_selftest(np.array([[1.0, 1.0], [0.0, 1.0]]), k, 0.5)
    with pytest.raises(ValueError, match="positive semidefinite"):
        minkowski_firey_selftest(np.diag([1.0, -1.0]), k, 0.5)
    with pytest.raises(ValueError, match="square"):
        minkowski_firey_selftest(np.eye(2), np.eye(3), 0.5)


def test_contraction_identity_partition_is_equality():
    d = random_density(3, 5)
    x = random_observable(3, 6)
    rep = check_metric_contraction(d, x, WY, [range(3)])
    assert abs(rep.margin) <= 1e-10 * rep.scale
    assert rep.passed


def test_contraction_kills_offdiagonal_tangent():
    d = density(np.diag([0.25, 0.75]).astype(complex))
    rep = check_metric_contraction(d, PAULI_X, SLD, [[0], [1]])
    assert rep.rhs == pytest.approx(0.0, abs=1e-13)
    assert rep.lhs > 0.0 and rep.passed


@pytest.mark.parametrize("spec", ["sld", "wy", "kubo-mori", "harmonic", "wyd:0.3"])
def test_contraction_random_draws(spec, rng):
    from qfidet.monotone import parse_function_spec

    f = parse_function_spec(spec)
    for trial in range(30):
        n = int(rng.integers(2, 6))
        d = random_density(n, 3000 + trial)
        x = random_observable(n, 4000 + trial)
        part = random_partition(n, 5000 + trial)
        rep = check_metric_contraction(d, x, f, part)
        assert rep.passed, (spec, trial, rep.margin)


def test_battery_over_random_instances(rng):
    # one pass of everything on a spread of kinds and sizes
    kinds = ("generic", "degenerate", "near-singular")
    for trial in range(36):
        n = (2, 3, 4)[trial % 3]
        n_obs = (1, 2, 3)[(trial // 3) % 3]
        inst = prepare_random(n, n_obs, 7000 + trial, kinds[trial % len(kinds)])
        for f in (SLD, WY, WYD, KM):
            assert not check_main(inst, f).violated
            assert not check_conj1(inst, f).violated
        for t in (0.0, 0.3, 0.7, 1.0):
            assert not check_firey(inst, SLD, t).violated
            assert not check_firey(inst, SLD, t, g=WYD).violated
        assert not check_conj2(inst, SLD, WY).violated
        assert not check_robertson(inst).violated
        assert classify_equality(inst, SLD, WY).consistent


def test_prepared_instance_caches(tight):
    first = tight.qov(SLD)
    assert tight.qov(SLD) is first
    assert tight.det_qov(SLD) == tight.det_qov(SLD)
    inst = prepare_random(3, 2, 123, "degenerate")
    assert inst.digest == "n=3,N=2,kind=degenerate,seed=123"


def test_report_shape(tight):
    rep = check_conj1(tight, SLD)
    assert rep.name == "conj1"
    assert rep.digest == "qubit-tight"
    assert rep.margin == rep.lhs - rep.rhs
    assert rep.components["f"] == "sld"
