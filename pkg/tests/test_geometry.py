import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from monozero.geometry import (
    lemma4_residual,
    lemma5_residual,
    lemma6_residual,
    lemma9_table,
    phi_bounds_check,
    phi_p,
    phi_p_terms,
    phi_p_verbatim,
    v_p,
)
from monozero.lp_space import SpaceSpec, dual_norm, duality_map, inverse_duality_map, norm

H2 = SpaceSpec(2, 2, 2)


def test_phi_examples():
    sp = SpaceSpec(3, 3, 3)
    x = np.array([0.3, -1.0, 2.0])
    assert abs(phi_p(sp, x, x)) < 1e-12
    assert phi_p(H2, [1, 0], [0, 1]) == pytest.approx(2.0)
    assert phi_p(SpaceSpec(1, 3, 3), [2.0], [1.0]) == pytest.approx(4.0)


def test_phi_terms_sum():
    t = phi_p_terms(SpaceSpec(1, 3, 3), [2.0], [1.0])
    assert t.components == pytest.approx((8.0, -6.0, 2.0))
    assert t.value == pytest.approx(4.0)


def test_verbatim_form_off_diagonal_defect():
    # the printed form does not vanish on the diagonal once p != 2
    sp = SpaceSpec(1, 3, 3)
    assert abs(phi_p_verbatim(sp, [2.0], [2.0])) > 1.0
    assert phi_p_verbatim(H2, [1.0, 2.0], [1.0, 2.0]) == pytest.approx(0.0, abs=1e-12)


def test_v_p_examples():
    sp = SpaceSpec(2, 3, 4)
    x = np.array([1.0, -0.5])
    assert abs(v_p(sp, x, duality_map(sp, x))) < 1e-12
    assert v_p(H2, [1, 0], [0, 1]) == pytest.approx(2.0)
    f = np.array([0.7, -2.0])
    assert v_p(sp, [0, 0], f) == pytest.approx(sp.p / sp.q * dual_norm(sp, f) ** sp.q)


def test_lemma4_examples():
    assert lemma4_residual(H2, [0.4, 1.0], [1.0, 2.0], [0, 0]) == pytest.approx(0.0, abs=1e-12)
    assert lemma4_residual(H2, [0, 0], [1, 0], [0, 1]) == pytest.approx(1.0)


def test_lemma5_examples():
    sp = SpaceSpec(2, 3, 3)
    assert lemma5_residual(sp, [0, 0], [1.0, -2.0]) == pytest.approx(0.0, abs=1e-12)
    assert lemma5_residual(H2, [1, 0], [0, 1]) == pytest.approx(1.0)


def test_lemma6_examples():
    sp = SpaceSpec(1, 3, 3)
    assert lemma6_residual(sp, [2.0], [0.0], [1.0]) == pytest.approx(5.0)
    s2 = SpaceSpec(2, 3, 3)
    assert lemma6_residual(s2, [1.0, 2.0], [0.5, 0.5], [1.0, 2.0]) == pytest.approx(0.0, abs=1e-12)


def test_bounds_examples():
    sp = SpaceSpec(2, 3, 3)
    lo, hi = phi_bounds_check(sp, [1.0, 2.0], [1.0, 2.0])
    assert lo and hi
    rng = np.random.default_rng(0)
    lo, hi = phi_bounds_check(H2, rng.normal(size=(1000, 2)), rng.normal(size=(1000, 2)))
    assert lo.all() and hi.all()


def test_upper_bound_counterexample_for_p_above_two():
    # phi_p(0, y) = (p - 1)||y||^p exceeds (0 + ||y||)^p once p > 2
    for p in (3.0, 4.0):
        sp = SpaceSpec(1, p, p)
        assert phi_p(sp, [0.0], [1.0]) == pytest.approx(p - 1)
        lo, hi = phi_bounds_check(sp, [0.0], [1.0])
        assert lo and not hi


def test_bounds_reject_small_p():
    with pytest.raises(ValueError):
        phi_bounds_check(SpaceSpec(2, 1.5, 1.5), [1, 0], [0, 1])


def test_lemma9_table_monotone(rng):
    sp = SpaceSpec(3, 3, 3)
    x = rng.normal(size=(20000, 3))
    y = x + rng.normal(size=(20000, 3)) * np.exp(rng.uniform(-8, 1, size=(20000, 1)))
    rows = lemma9_table(sp, x, y, [1.0, 1e-1, 1e-2, 1e-3, 1e-4])
    maxima = [r[2] for r in rows]
    assert all(r[1] > 0 for r in rows)
    assert all(a >= b for a, b in zip(maxima, maxima[1:]))
    assert maxima[-1] < maxima[0]


exps = st.sampled_from([1.5, 2.0, 3.0, 4.0])
vec = arrays(np.float64, 3, elements=st.floats(-50, 50, allow_nan=False))


@given(vec, vec, exps)
def test_phi_nonnegative(x, y, p):
    sp = SpaceSpec(3, p, p)
    scale = 1 + norm(sp, x) ** p + norm(sp, y) ** p
    assert phi_p(sp, x, y) >= -1e-10 * scale


@given(vec, vec, exps)
def test_route_agreement(x, f, p):
    sp = SpaceSpec(3, p, p)
    a = v_p(sp, x, f)
    b = phi_p(sp, x, inverse_duality_map(sp, f))
    scale = 1 + norm(sp, x) ** p + dual_norm(sp, f) ** sp.q
    assert abs(a - b) <= 1e-10 * scale


@given(vec, vec)
def test_hilbert_degeneration(x, y):
    sp = SpaceSpec(3, 2, 2)
    d = float(np.sum((x - y) ** 2))
    assert abs(phi_p(sp, x, y) - d) <= 1e-12 * (1 + np.sum(x**2) + np.sum(y**2))


@given(vec, vec, vec, st.sampled_from([2.0, 3.0]))
def test_lemma_residuals_property(x, y, z, p):
    sp = SpaceSpec(3, p, p)
    for res, scale in (
        lemma4_residual(sp, x, y, z, with_scale=True),
        lemma5_residual(sp, x, y, with_scale=True),
        lemma6_residual(sp, x, y, z, with_scale=True),
    ):
        assert res >= -1e-9 * scale
