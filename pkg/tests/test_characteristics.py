import numpy as np
import pytest

from carlab.characteristics import (
    MatrixSequence,
    ScalarSequence,
    a2_characteristic,
    c2_conditioning,
    carleson_equivalents,
    carleson_intensity,
    wcet_testing_constant,
)
from carlab.constructions import epsilon_family, necessity_probe, random_instance
from carlab.dyadic import DyadicIndex, ROOT, StepField, cubes
from carlab.errors import DimensionMismatchError, SingularMatrixError

from oracles import brute_matrix_intensity, brute_scalar_a2, brute_scalar_intensity


def test_sequence_validation():
    with pytest.raises(DimensionMismatchError):
        ScalarSequence(2, {ROOT: -0.5})
    with pytest.raises(SingularMatrixError):
        MatrixSequence(2, 2, {ROOT: np.diag([1.0, -1.0])})
    # zero entries are dropped (sparse default-zero storage)
    assert len(ScalarSequence(2, {ROOT: 0.0})) == 0


def test_intensity_identity_at_root():
    seq = MatrixSequence(3, 2, {ROOT: np.eye(2)})
    assert carleson_intensity(seq) == pytest.approx(1.0, abs=1e-14)


def test_intensity_empty():
    assert carleson_intensity(ScalarSequence(3)) == 0.0
    assert carleson_intensity(MatrixSequence(3, 2)) == 0.0


def test_intensity_measure_sequence_depth2():
    # alpha_Q = |Q| on the 7-cube tree: each K contributes one per level
    entries = {q: q.measure for q in cubes(2)}
    seq = ScalarSequence(2, entries)
    assert carleson_intensity(seq) == pytest.approx(3.0, abs=1e-14)
    assert brute_scalar_intensity(entries, 2) == pytest.approx(3.0, abs=1e-14)


def test_intensity_matches_brute_force():
    rng = np.random.default_rng(21)
    for depth in (2, 3, 4):
        entries = {}
        for q in cubes(depth):
            if rng.uniform() < 0.4:
                entries[q] = float(rng.uniform(0.0, 2.0))
        seq = ScalarSequence(depth, entries)
        assert carleson_intensity(seq) == pytest.approx(
            brute_scalar_intensity(entries, depth), rel=1e-12
        )
        mentries = {}
        for q in cubes(depth):
            if rng.uniform() < 0.4:
                v = rng.standard_normal(2)
                mentries[q] = np.outer(v, v)
        mseq = MatrixSequence(depth, 2, mentries)
        assert carleson_intensity(mseq) == pytest.approx(
            brute_matrix_intensity(mentries, depth, 2), rel=1e-12
        )


def test_scalar_embedding_matches_scalar_intensity():
    rng = np.random.default_rng(22)
    entries = {q: float(rng.uniform(0, 1)) for q in cubes(3) if rng.uniform() < 0.5}
    sseq = ScalarSequence(3, entries)
    mseq = MatrixSequence(3, 3, {q: v * np.eye(3) for q, v in entries.items()})
    assert carleson_intensity(mseq) == pytest.approx(carleson_intensity(sseq), rel=1e-14)


def test_carleson_equivalents_examples():
    assert carleson_equivalents(MatrixSequence(2, 2, {ROOT: np.eye(2)})) == (1.0, 2.0)
    proj = np.array([[1.0, 0.0], [0.0, 0.0]])
    op, tr = carleson_equivalents(MatrixSequence(2, 2, {ROOT: proj}))
    assert op == pytest.approx(1.0) and tr == pytest.approx(1.0)
    assert carleson_equivalents(MatrixSequence(2, 2)) == (0.0, 0.0)


def test_carleson_equivalents_chain():
    # matrix <= op <= trace <= d * matrix, with dimensional constants
    rng = np.random.default_rng(23)
    for _ in range(20):
        d = int(rng.integers(1, 4))
        entries = {}
        for q in cubes(3):
            if rng.uniform() < 0.5:
                v = rng.standard_normal(d)
                entries[q] = np.outer(v, v)
        seq = MatrixSequence(3, d, entries)
        if not len(seq):
            continue
        mat = carleson_intensity(seq)
        op, tr = carleson_equivalents(seq)
        tol = 1e-10 * max(1.0, tr)
        assert mat <= op + tol
        assert op <= tr + tol
        assert tr <= d * mat + tol


def test_wcet_identity_weight_reduces_to_intensity():
    rng = np.random.default_rng(24)
    entries = {q: np.abs(rng.standard_normal()) * np.eye(2) for q in cubes(3) if rng.uniform() < 0.5}
    seq = MatrixSequence(3, 2, entries)
    w = StepField.constant(3, np.eye(2))
    assert wcet_testing_constant(w, seq) == pytest.approx(carleson_intensity(seq), rel=1e-10)


def test_wcet_constant_weight_family():
    inst = epsilon_family(0.1, 0.0, depth=3)
    # constant weight commutes: sandwich collapses to <W> with lambda_max 1
    assert wcet_testing_constant(inst.w, inst.seq_norm) == pytest.approx(1.0, abs=1e-12)


def test_wcet_zero_sequence():
    w = StepField.constant(2, np.eye(2))
    assert wcet_testing_constant(w, MatrixSequence(2, 2)) == 0.0


def test_wcet_scalar_sequence_matches_identity_embedding():
    inst = random_instance(4, 2, seed=3, cond_cap=1e3)
    embedded = MatrixSequence(4, 2, {q: v * np.eye(2) for q, v in inst.sseq.items()})
    assert wcet_testing_constant(inst.w, inst.sseq) == pytest.approx(
        wcet_testing_constant(inst.w, embedded), rel=1e-12
    )


def test_a2_constant_weight_is_one():
    inst = epsilon_family(0.01, 0.3, depth=3)
    assert a2_characteristic(inst.w) == pytest.approx(1.0, abs=1e-12)
    w = StepField.constant(2, np.array([[3.0, 1.0], [1.0, 2.0]]))
    assert a2_characteristic(w) == pytest.approx(1.0, abs=1e-12)


def test_a2_scalar_matches_classical_formula():
    # d = 1, leaves (1, 3): <w> <w^-1> at the root = 2 * (2/3) = 4/3
    w = StepField(np.array([1.0, 3.0]))
    assert a2_characteristic(w) == pytest.approx(4.0 / 3.0, rel=1e-12)
    assert brute_scalar_a2([1.0, 3.0]) == pytest.approx(4.0 / 3.0)


def test_a2_scalar_matches_brute_force_random():
    rng = np.random.default_rng(25)
    for depth in (2, 3, 4):
        leaves = rng.uniform(0.2, 5.0, size=1 << depth)
        w = StepField(leaves)
        assert a2_characteristic(w) == pytest.approx(
            brute_scalar_a2(list(leaves)), rel=1e-10
        )


def test_a2_at_least_one():
    for seed in range(8):
        inst = random_instance(3, 3, seed=seed, cond_cap=1e4)
        assert a2_characteristic(inst.w) >= 1.0 - 1e-12
        assert c2_conditioning(inst.w) >= 1.0 - 1e-12


def test_c2_examples():
    inst = epsilon_family(0.1, 0.0, depth=2)
    assert c2_conditioning(inst.w) == pytest.approx(100.0, rel=1e-12)
    assert c2_conditioning(StepField.constant(2, np.eye(3))) == pytest.approx(1.0)


def test_c2_is_pointwise_condition_number():
    # per the definition, kappa is evaluated pointwise before the sup:
    # a scalar weight (each leaf a 1x1 matrix) always has c2 = 1
    w = StepField(np.array([1.0, 3.0]))
    assert c2_conditioning(w) == pytest.approx(1.0)
    # two leaves with different eccentricity: sup of the per-leaf ratios
    leaves = np.stack([np.diag([1.0, 0.5]), np.diag([4.0, 0.1])])
    assert c2_conditioning(StepField(leaves)) == pytest.approx(40.0, rel=1e-12)


def test_c2_rejects_singular_leaf():
    leaves = np.stack([np.eye(2), np.diag([1.0, 0.0])])
    with pytest.raises(SingularMatrixError):
        c2_conditioning(StepField(leaves))


def test_necessity_identity_sampled():
    rng = np.random.default_rng(26)
    for seed in range(10):
        inst = random_instance(4, 2, seed=seed, cond_cap=1e4)
        testing = wcet_testing_constant(inst.w, inst.mseq)
        sampled = 0.0
        for q in cubes(4):
            for _ in range(10):
                e = rng.standard_normal(2)
                e /= np.linalg.norm(e)
                sampled = max(sampled, necessity_probe(inst.w, inst.mseq, q, e))
        assert sampled <= testing + 1e-9
