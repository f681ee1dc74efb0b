import numpy as np
import pytest

from monozero.harness.oracles import OracleFailure, oracle_vi, oracle_zero
from monozero.lp_space import SpaceSpec
from monozero.operators import MonotoneOperator, example16_operator, linear_map, power_map
from monozero.projections import ConvexSetSpec

H2 = SpaceSpec.hilbert(2)


def test_oracle_zero_linear_example():
    sol = oracle_zero(example16_operator())
    assert np.linalg.norm(sol.point) <= 1e-10
    assert sol.residual <= sol.tolerance


@pytest.mark.parametrize("p", [2.0, 3.0, 4.0])
def test_oracle_zero_power_map(p):
    sol = oracle_zero(power_map(SpaceSpec(3, p, p)))
    assert np.linalg.norm(sol.point) <= 1e-3


def test_oracle_zero_shifted_identity():
    c = np.array([0.5, -3.0, 2.0])
    sol = oracle_zero(linear_map(SpaceSpec.hilbert(3), np.eye(3), c))
    np.testing.assert_allclose(sol.point, c, atol=1e-10)


def test_oracle_zero_failure():
    const = MonotoneOperator(lambda x: np.ones(2), H2, 2.0, 0.0, "const")
    with pytest.raises(OracleFailure):
        oracle_zero(const)


def test_oracle_vi_examples():
    box = ConvexSetSpec.box(H2, [0, 0], [1, 1])
    sol = oracle_vi(linear_map(H2, np.eye(2), [2, 2]), [box])
    np.testing.assert_allclose(sol.point, [1, 1], atol=1e-8)
    inner = oracle_vi(linear_map(H2, np.eye(2), [0.3, 0.6]), [box])
    np.testing.assert_allclose(inner.point, [0.3, 0.6], atol=1e-8)
    sol = oracle_vi(linear_map(H2, np.eye(2)), [ConvexSetSpec.box(H2, [1, 1], [2, 2])])
    np.testing.assert_allclose(sol.point, [1, 1], atol=1e-8)
    assert sol.method == "projected_gradient"


def test_oracle_vi_rejects_banach():
    sp = SpaceSpec(2, 3, 3)
    with pytest.raises((OracleFailure, ValueError)):
        oracle_vi(power_map(sp), [ConvexSetSpec.box(sp, [0, 0], [1, 1])])
