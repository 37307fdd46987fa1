import numpy as np
import pytest

from switchplan import (
    HoldingCostSpec,
    ParameterError,
    RegimeParameters,
    build_grid,
    eval_holding_cost,
    validate_params,
)

BASE = dict(a1=0.6, a2=0.5, alpha1=0.3, alpha2=0.3, sigma1=1.0, sigma2=0.7, M1=1.0, M2=1.0, R=20.0)


def test_valid_parameters_pass():
    p = RegimeParameters(**BASE)
    assert validate_params(p, HoldingCostSpec(1.0, 1.0)) is p


@pytest.mark.parametrize("name", list(BASE))
@pytest.mark.parametrize("bad", [0.0, -1.0])
def test_non_positive_parameter_rejected(name, bad):
    p = RegimeParameters(**{**BASE, name: bad})
    with pytest.raises(ParameterError, match=f"{name} must be > 0"):
        validate_params(p, HoldingCostSpec(1.0, 1.0))


def test_cost_above_cap_rejected():
    with pytest.raises(ParameterError, match="c1 exceeds M1"):
        validate_params(RegimeParameters(**BASE), HoldingCostSpec(2.0, 1.0))


def test_non_positive_cost_rejected():
    with pytest.raises(ParameterError, match="c2 must be > 0"):
        validate_params(RegimeParameters(**BASE), HoldingCostSpec(1.0, 0.0))


def test_unknown_cost_kind_rejected():
    with pytest.raises(ParameterError):
        validate_params(RegimeParameters(**BASE), HoldingCostSpec(1.0, 1.0, kind="cubic"))


def test_regime_slice():
    p = RegimeParameters(**BASE)
    assert p.regime(1) == (0.6, 0.3, 1.0, 1.0)
    assert p.regime(2) == (0.5, 0.3, 0.7, 1.0)
    with pytest.raises(ValueError):
        p.regime(3)


def test_grid_three_points():
    g = build_grid(2.0, 3)
    assert list(g.x) == [-2.0, 0.0, 2.0]
    assert g.dx == 2.0


@pytest.mark.parametrize("n", [3, 4, 100, 101, 397])
def test_grid_is_exactly_symmetric(n):
    g = build_grid(20.0, n)
    assert g.x[0] == -20.0 and g.x[-1] == 20.0
    assert np.array_equal(g.x, -g.x[::-1])
    assert np.all(np.diff(g.x) > 0)
    np.testing.assert_allclose(np.diff(g.x), g.dx, rtol=1e-12)


def test_grid_is_read_only():
    g = build_grid(1.0, 5)
    with pytest.raises(ValueError):
        g.x[0] = 3.0


@pytest.mark.parametrize("R,n", [(0.0, 10), (-1.0, 10), (1.0, 2)])
def test_grid_rejects_bad_input(R, n):
    with pytest.raises(ValueError):
        build_grid(R, n)


def test_holding_cost_values():
    x = np.array([-2.0, 0.0, 3.0])
    np.testing.assert_array_equal(eval_holding_cost(HoldingCostSpec(5.0, 1.0), 1, x), [20.0, 0.0, 45.0])
    np.testing.assert_array_equal(eval_holding_cost(HoldingCostSpec(5.0, 1.0), 2, x), [4.0, 0.0, 9.0])
