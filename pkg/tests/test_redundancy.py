import numpy as np
import pytest

from carlab.characteristics import MatrixSequence, ScalarSequence, carleson_intensity
from carlab.constructions import random_instance
from carlab.dyadic import DyadicIndex, ROOT, StepField
from carlab.errors import DimensionMismatchError, PreconditionError
from carlab.matrices import spd_apply_power, spd_power
from carlab.redundancy import red_constants, red_quadratic_form, sred_constant


def test_sred_identity_weight_unit_mass():
    w = StepField.constant(2, np.eye(2))
    alpha = ScalarSequence(2, {ROOT: 1.0})
    assert sred_constant(w, alpha) == pytest.approx(1.0, abs=1e-12)


def test_sred_scalar_example():
    # d = 1, leaves (1, 3): <w^-1>^-1 / <w> = (3/2) / 2 = 3/4
    w = StepField(np.array([1.0, 3.0]))
    alpha = ScalarSequence(1, {ROOT: 1.0})
    assert sred_constant(w, alpha) == pytest.approx(0.75, rel=1e-12)


def test_sred_requires_unit_intensity():
    w = StepField.constant(1, np.eye(2))
    with pytest.raises(PreconditionError):
        sred_constant(w, ScalarSequence(1, {ROOT: 2.0}))
    with pytest.raises(DimensionMismatchError):
        sred_constant(w, MatrixSequence(1, 2, {ROOT: np.eye(2)}))


def test_sred_bounded_by_four_random():
    for seed in range(40):
        inst = random_instance(5, 1 + seed % 4, seed=seed, cond_cap=1e4)
        assert sred_constant(inst.w, inst.sseq) <= 4.0


def test_sred_empty_sequence():
    w = StepField.constant(2, np.eye(2))
    assert sred_constant(w, ScalarSequence(2)) == 0.0


def test_red_identity_example():
    w = StepField.constant(2, np.eye(2))
    bseq = MatrixSequence(2, 2, {ROOT: np.eye(2)})
    c1, c2, c3 = red_constants(w, bseq)
    assert c1 == pytest.approx(1.0, abs=1e-12)
    assert c2 == pytest.approx(1.0, abs=1e-12)
    assert c3 == pytest.approx(1.0, abs=1e-12)


def test_red_scalar_embedding_reduces_to_sred():
    inst = random_instance(4, 3, seed=11, cond_cap=1e4)
    embedded = MatrixSequence(4, 3, {q: v * np.eye(3) for q, v in inst.sseq.items()})
    _, _, c3 = red_constants(inst.w, embedded)
    assert c3 == pytest.approx(sred_constant(inst.w, inst.sseq), rel=1e-10)


def test_red_bounded_by_4d_random():
    for seed in range(30):
        d = 1 + seed % 4
        inst = random_instance(4, d, seed=seed, cond_cap=1e4)
        c1, c2, c3 = red_constants(inst.w, inst.mseq)
        assert max(c1, c2, c3) <= 4.0 * d


def test_red_c2_equals_c3():
    # the substitution identity in operator form
    for seed in range(10):
        inst = random_instance(4, 2, seed=seed, cond_cap=1e4)
        _, c2, c3 = red_constants(inst.w, inst.mseq)
        assert c2 == pytest.approx(c3, rel=1e-10)


def test_monotonicity_under_operator_norm_domination():
    # replacing B_Q by |B_Q|_op * identity never decreases the constants
    from carlab.matrices import operator_norm

    for seed in range(10):
        d = 1 + seed % 3
        inst = random_instance(4, d, seed=seed, cond_cap=1e4)
        c = red_constants(inst.w, inst.mseq)
        dominated = MatrixSequence(
            4, d, {q: operator_norm(m) * np.eye(d) for q, m in inst.mseq.items()}
        )
        intensity = carleson_intensity(dominated)
        k = red_constants(inst.w, dominated.scaled(1.0 / intensity))
        k = tuple(v * intensity for v in k)
        assert all(kv >= cv - 1e-8 for kv, cv in zip(k, c))


def test_trace_cycling_identity():
    rng = np.random.default_rng(41)
    for seed in range(10):
        inst = random_instance(4, 3, seed=seed, cond_cap=1e4)
        w = inst.w.as_matrix()
        wavg = w.pyramid()
        vavg = w.inverse().pyramid()
        for q, m in inst.mseq.items():
            b_q = float(np.linalg.eigvalsh(m)[-1])
            k = DyadicIndex(0, 0)
            r_k = spd_power(wavg[0][0], -0.5)
            p_q = spd_power(vavg[q.level][q.position], -0.5)
            scalar = b_q * np.eye(3)
            t1 = float(np.trace(r_k @ p_q @ scalar @ p_q @ r_k))
            t2 = float(np.trace(p_q @ r_k @ scalar @ r_k @ p_q))
            assert t1 == pytest.approx(t2, rel=1e-10)


def test_substitution_identity():
    # e = <W>_K^1/2 f turns the second testing form into the corollary form
    rng = np.random.default_rng(42)
    checked = 0
    for seed in range(20):
        inst = random_instance(4, 2, seed=seed, cond_cap=1e4)
        w = inst.w.as_matrix()
        wavg = w.pyramid()
        for _ in range(5):
            level = int(rng.integers(0, 5))
            k = DyadicIndex(level, int(rng.integers(0, 1 << level)))
            e = rng.standard_normal(2)
            e /= np.linalg.norm(e)
            second = red_quadratic_form(w, inst.mseq, k, e, order="second")
            wk = wavg[k.level][k.position]
            f = spd_apply_power(wk, -0.5, e)
            corollary = red_quadratic_form(w, inst.mseq, k, f, order="corollary")
            scale = max(second, corollary, 1e-30)
            assert abs(second - corollary) / scale <= 1e-10
            # and the right-hand sides transform the same way
            assert float(e @ e) == pytest.approx(float(f @ (wk @ f)), rel=1e-10)
            checked += 1
    assert checked == 100


def test_scalar_redundancy_implication_both_orientations():
    # d = 1: both classical conditions follow with constant <= 4, read off
    # as the corollary specialization under the w <-> w^-1 swap
    for seed in range(10):
        inst = random_instance(5, 1, seed=seed, cond_cap=1e4)
        assert sred_constant(inst.w, inst.sseq) <= 4.0
        w_inv = StepField(1.0 / inst.w.values)
        assert sred_constant(w_inv, inst.sseq) <= 4.0


def test_red_empty_sequence():
    w = StepField.constant(2, np.eye(2))
    assert red_constants(w, MatrixSequence(2, 2)) == (0.0, 0.0, 0.0)
