import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from nhrg.core import (
    Coupling,
    SystemConfig,
    coupling_prefactor,
    flow_time,
    from_dimensionless,
    from_parts,
    lambda_at,
    loss_part,
    surface_area,
    to_dimensionless,
)

finite = st.floats(-1e3, 1e3, allow_nan=False)


@pytest.mark.parametrize("d, area", [(1, 2.0), (2, 2 * math.pi), (3, 4 * math.pi)])
def test_surface_area(d, area):
    assert surface_area(d) == pytest.approx(area, rel=1e-15)


@pytest.mark.parametrize(
    "d, factor",
    [(1, 2.0 / math.pi), (2, 1.0 / math.pi), (3, 1.0 / math.pi**2)],
)
def test_prefactor_per_dimension(d, factor):
    # U = factor * mu * g * Lambda^(d-2)
    assert coupling_prefactor(d) == pytest.approx(factor, rel=1e-15)


def test_d3_conversion_example():
    cfg = SystemConfig(3, mu=0.5, lambda0=2.0)
    g = -3.0 + 0.25j
    assert to_dimensionless(g, cfg) == pytest.approx(0.5 * g * 2.0 / math.pi**2)


@given(finite, finite, st.sampled_from([1, 2, 3]), st.floats(0.01, 100), st.floats(0.01, 100))
def test_conversion_round_trip(gr, gi, d, mu, lam):
    cfg = SystemConfig(d, mu, lam)
    g = complex(gr, gi)
    back = from_dimensionless(to_dimensionless(g, cfg), cfg)
    assert abs(back - g) <= 1e-13 * max(1.0, abs(g))


def test_loss_convention():
    U = from_parts(-0.3, 0.2)
    assert U == complex(-0.3, -0.2)
    assert loss_part(U) == 0.2
    c = Coupling(U, 1.0)
    assert c.real_part == -0.3 and c.loss_part == 0.2 and c.is_lossy


def test_coupling_representations():
    cfg = SystemConfig(2, 1.0, 1.0)
    c = Coupling(-0.5, 1.0)
    g = c.as_dimensionful(cfg)
    assert not g.dimensionless
    assert g.as_dimensionless(cfg).value == pytest.approx(-0.5)
    with pytest.raises(ValueError):
        Coupling(1.0, 0.0)


def test_scale_and_time():
    cfg = SystemConfig(3, 1.0, 4.0)
    assert lambda_at(0.0, cfg) == 4.0
    assert lambda_at(math.log(2), cfg) == pytest.approx(2.0)
    assert flow_time(1.0, cfg) == pytest.approx(math.log(4.0))
    with pytest.raises(ValueError):
        lambda_at(-0.1, cfg)
    with pytest.raises(ValueError):
        flow_time(5.0, cfg)


@pytest.mark.parametrize("kwargs", [dict(d=4), dict(d=0), dict(mu=0.0), dict(lambda0=-1.0), dict(mu=math.inf)])
def test_config_validation(kwargs):
    with pytest.raises(ValueError):
        SystemConfig(**kwargs)


def test_energy_unit():
    assert SystemConfig(2, 0.5, 3.0).energy_unit == 9.0
