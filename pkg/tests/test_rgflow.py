import io
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nhrg.core import FlowDivergence, SystemConfig
from nhrg.rgflow import (
    FlowTrajectory,
    Stability,
    analytic_flow,
    beta,
    beta_components,
    characteristic_scale,
    fixed_points,
    integrate_flow,
    momentum_subtraction_cutoff,
    momentum_subtraction_endpoint,
    momentum_subtraction_exact,
    momentum_subtraction_flow,
    momentum_subtraction_t_matrix,
)

coupling = st.complex_numbers(max_magnitude=3.0, allow_nan=False, allow_infinity=False)


@given(coupling, st.sampled_from([1, 2, 3]))
def test_components_match_complex_beta(U, d):
    dr, di = beta_components(U.real, -U.imag, d)
    b = beta(U, d)
    assert dr == pytest.approx(b.real, abs=1e-12)
    assert di == pytest.approx(-b.imag, abs=1e-12)


def test_imaginary_part_generates_real_attraction():
    # a purely lossy coupling pushes U_r upward via the +U_i^2 term
    dr, di = beta_components(0.0, 0.5, 2)
    assert dr == pytest.approx(0.25)
    assert di == 0.0


def test_fixed_point_stability():
    kinds = {d: {p.U_star.real: p.stability for p in fixed_points(d)} for d in (1, 2, 3)}
    assert kinds[1] == {0.0: Stability.REPULSIVE, 1.0: Stability.ATTRACTIVE}
    assert kinds[2] == {0.0: Stability.DEGENERATE}
    assert kinds[3] == {-1.0: Stability.REPULSIVE, 0.0: Stability.ATTRACTIVE}


@settings(max_examples=60)
@given(st.complex_numbers(min_magnitude=0.05, max_magnitude=2.0), st.sampled_from([1, 2, 3]), st.floats(0.0, 2.0))
def test_analytic_flow_solves_the_ode(U0, d, t):
    U0 = complex(U0.real, -abs(U0.imag))
    h = 1e-6
    try:
        u_m = analytic_flow(U0, d, t)
        u_p = analytic_flow(U0, d, t + 2 * h)
        u_c = analytic_flow(U0, d, t + h)
    except FlowDivergence:
        return
    if abs(u_c) > 50:
        return
    deriv = (u_p - u_m) / (2 * h)
    assert abs(deriv - beta(u_c, d)) <= 1e-8 * max(1.0, abs(u_c) ** 2)


def test_analytic_flow_initial_value_and_zero():
    assert analytic_flow(-0.3 - 0.2j, 3, 0.0) == pytest.approx(-0.3 - 0.2j)
    assert analytic_flow(0.0, 2, 5.0) == 0


def test_attractive_real_flow_diverges():
    with pytest.raises(FlowDivergence) as info:
        analytic_flow(-0.5, 2, 3.0)
    assert info.value.t == pytest.approx(2.0)
    traj = integrate_flow(-0.5, 2, 3.0)
    assert traj.diverged
    assert traj.t[-1] == pytest.approx(2.0, abs=1e-6)


def test_d2_loop_returns_to_origin():
    traj = integrate_flow(-0.3 - 0.2j, 2, 50.0)
    assert not traj.diverged
    assert traj.U.real.max() > 0  # crosses U_r = 0
    assert abs(traj.final) < 0.03


def test_d1_flows_to_attractive_point():
    traj = integrate_flow(0.5, 1, 20.0)
    assert traj.final == pytest.approx(1.0, abs=1e-8)


def test_t_eval_lands_exactly():
    ts = np.linspace(0, 2, 11)[1:]
    traj = integrate_flow(-0.2 - 0.1j, 3, 2.0, t_eval=ts)
    assert np.array_equal(traj.t[1:], ts)


def test_trajectory_csv_format():
    traj = integrate_flow(-0.2 - 0.1j, 3, 0.5, t_eval=[0.25, 0.5])
    text = traj.to_csv()
    lines = text.splitlines()
    assert lines[0].startswith("# d=3 scheme=cutoff")
    assert lines[1] == "t,U_r,U_i"
    assert len(lines) == 5
    assert float(lines[2].split(",")[2]) == 0.1  # U_i column is -Im(U)
    buf = io.StringIO()
    traj.to_csv(buf)
    assert buf.getvalue() == text


def test_trajectory_rejects_unsorted_times():
    with pytest.raises(ValueError):
        FlowTrajectory([0.0, 1.0, 0.5], [0, 0, 0])


def test_invalid_arguments():
    with pytest.raises(ValueError):
        integrate_flow(0.1, 4, 1.0)
    with pytest.raises(ValueError):
        integrate_flow(0.1, 3, -1.0)
    with pytest.raises(ValueError):
        analytic_flow(0.1, 3, -1.0)


def test_characteristic_scale():
    cfg = SystemConfig(2, 1.0, 1.0)
    cs = characteristic_scale(-0.3 - 0.2j, cfg)
    assert cs.E_c == pytest.approx(0.5 * math.exp(2 * -0.3 / 0.13))
    assert cs.t_c == pytest.approx(0.3 / 0.13)
    # the flow crosses U_r = 0 at t_c
    assert analytic_flow(-0.3 - 0.2j, 2, cs.t_c).real == pytest.approx(0.0, abs=1e-12)
    assert not characteristic_scale(0.3 - 0.2j, cfg).crosses
    with pytest.raises(ValueError):
        characteristic_scale(-0.3, SystemConfig(3))
    with pytest.raises(ValueError):
        characteristic_scale(0.0, cfg)


class TestMomentumSubtraction:
    mu, M, lam = 0.5, 2.0, 1.0

    def test_matches_exact_solution(self):
        g0 = -3.0 - 1.0j
        traj = momentum_subtraction_flow(g0, self.mu, self.M, 2.0, t_eval=np.linspace(0, 2, 21)[1:])
        exact = momentum_subtraction_exact(g0, self.mu, self.M, traj.t)
        assert np.max(np.abs(traj.U - exact)) < 1e-10

    def test_t_matrix_is_invariant(self):
        g0 = -3.0 - 1.0j
        traj = momentum_subtraction_flow(g0, self.mu, self.M, 2.0, lambda0=self.lam)
        ref = 1.0 / (1.0 / g0 + self.mu * self.lam / math.pi**2)
        cut = traj.meta["effective_cutoff"]
        for P, g, lt in zip(traj.t, traj.U, cut):
            T = momentum_subtraction_t_matrix(P, g, self.mu, self.M, self.lam)
            assert abs(T - ref) <= 1e-9 * abs(ref)
            assert T == pytest.approx(1.0 / (1.0 / g + self.mu * lt / math.pi**2), rel=1e-12)

    def test_t_matrix_matches_d3_propagator(self):
        from nhrg.scattering import t_matrix

        cfg = SystemConfig(3, self.mu, self.lam)
        g, P, E = -2.0 - 0.5j, 0.7, -0.05
        T = momentum_subtraction_t_matrix(P, g, self.mu, self.M, self.lam, E=E)
        assert T == pytest.approx(t_matrix(E - P * P / (2 * self.M), g, cfg), rel=1e-13)

    def test_endpoint_clipping(self):
        P_end = momentum_subtraction_endpoint(self.mu, self.M, self.lam)
        assert momentum_subtraction_cutoff(P_end, self.mu, self.M, self.lam) == pytest.approx(0.0, abs=1e-15)
        traj = momentum_subtraction_flow(-1.0, self.mu, self.M, 10 * P_end, lambda0=self.lam)
        assert traj.t[-1] == pytest.approx(P_end)
        assert traj.meta["clipped"]
        assert traj.meta["effective_cutoff"][0] == self.lam

    def test_divergence(self):
        # 1/g0 + rate P = 0 at P = 1, so the flow blows up there
        rate = self.mu / (2 * math.pi) * math.sqrt(self.mu / self.M)
        with pytest.raises(FlowDivergence):
            momentum_subtraction_flow(-1.0 / rate, self.mu, self.M, 2.0)
