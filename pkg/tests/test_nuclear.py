import hashlib
import io
import math

import numpy as np
import pytest
from scipy.optimize import brentq, minimize_scalar

from nhrg.nuclear import (
    DATA_ENV_VAR,
    DineutronParams,
    DineutronRegime,
    NucleusRecord,
    TableError,
    default_table_path,
    dineutron_coupling,
    dineutron_critical_x,
    dineutron_critical_x_closed_form,
    dineutron_gamma_peak,
    dineutron_solve,
    estimate_ai_from_cross_section,
    load_nucleus_table,
    parse_nucleus_table,
    phase_diagram_points,
    semicircle_polyline,
)
from nhrg.observables import Region, scattering_length_from_g

BUNDLED_SHA256 = "47a7a60b9647da903020bbd5dd642a0f46fc2e47e8a7e1dc98ed76a1d17c5384"


def test_bundled_table_checksum(monkeypatch):
    monkeypatch.delenv(DATA_ENV_VAR, raising=False)
    data = default_table_path().read_bytes()
    assert hashlib.sha256(data).hexdigest() == BUNDLED_SHA256


def test_bundled_table_contents(monkeypatch):
    monkeypatch.delenv(DATA_ENV_VAR, raising=False)
    recs = load_nucleus_table()
    assert [r.isotope for r in recs] == ["155Gd", "157Gd", "168Yb", "196Hg"]
    assert recs[1].a == complex(-1.14, -72)


def test_env_var_overrides_location(tmp_path, monkeypatch):
    (tmp_path / "table_i.csv").write_text("isotope,a_r_fm,a_i_fm\nX,1.0,-2.0\n")
    monkeypatch.setenv(DATA_ENV_VAR, str(tmp_path))
    assert [r.isotope for r in load_nucleus_table()] == ["X"]


def test_cross_section_columns_fill_ai():
    text = "isotope,a_r_fm,a_i_fm,k_fm_inv,sigma_abs_fm2\nA,1.0,,0.5,8.0\nB,2.0,-3.0,,\n"
    a, b = parse_nucleus_table(text)
    assert a.a_i == pytest.approx(-0.5 * 8.0 / (4 * math.pi))
    assert a.k == 0.5 and b.k is None
    assert b.a_i == -3.0


def test_comments_and_blank_lines_are_skipped():
    recs = parse_nucleus_table("# source: evaluated data\nisotope,a_r_fm,a_i_fm\n\nA,1,-1\n")
    assert len(recs) == 1


@pytest.mark.parametrize(
    "text, fragment",
    [
        ("", "empty"),
        ("isotope,a_r_fm\nA,1\n", "lacks"),
        ("isotope,a_r_fm,a_i_fm,spin\nA,1,-1,0\n", "unknown"),
        ("isotope,a_r_fm,a_i_fm\nA,1,-1\nB,x,-1\n", "row 3"),
        ("isotope,a_r_fm,a_i_fm\nA,1\n", "row 2"),
        ("isotope,a_r_fm,a_i_fm\nA,1,0.5\n", "positive"),
        ("isotope,a_r_fm,a_i_fm\n,1,-1\n", "isotope"),
        ("isotope,a_r_fm,a_i_fm\nA,nan,-1\n", "finite"),
        ("isotope,a_r_fm,a_i_fm\nA,1,\n", "a_i_fm missing"),
        ("isotope,a_r_fm,a_i_fm,k_fm_inv,sigma_abs_fm2\nA,1,,0,2\n", "k must be positive"),
        ("isotope,a_r_fm,a_i_fm\n", "no data rows"),
    ],
)
def test_table_errors(text, fragment):
    with pytest.raises(TableError, match=fragment):
        parse_nucleus_table(text)


def test_load_errors_name_the_file(tmp_path):
    bad = tmp_path / "t.csv"
    bad.write_text("isotope,a_r_fm,a_i_fm\nA,?,-1\n")
    with pytest.raises(TableError, match="t.csv: row 2"):
        load_nucleus_table(bad)
    with pytest.raises(OSError, match="cannot read"):
        load_nucleus_table(tmp_path / "missing.csv")
    assert load_nucleus_table(io.StringIO("isotope,a_r_fm,a_i_fm\nA,1,-1\n"))[0].isotope == "A"


def test_record_and_estimate_validation():
    with pytest.raises(ValueError):
        NucleusRecord("X", 1.0, 0.1)
    with pytest.raises(ValueError):
        estimate_ai_from_cross_section(1.0, -1.0)


def test_phase_diagram_classifications():
    recs = load_nucleus_table(default_table_path())
    pts = {(p.isotope, p.lambda_t): p for p in phase_diagram_points(recs, [0.1, 1.0])}
    assert pts["157Gd", 0.1].classification is Region.INSIDE
    assert pts["168Yb", 1.0].classification is Region.INSIDE
    assert pts["155Gd", 0.1].classification is Region.OUTSIDE
    assert pts["196Hg", 1.0].classification is Region.OUTSIDE
    row = pts["157Gd", 1.0].as_row()
    assert row["U_i"] >= 0 and set(row) == {"isotope", "lambda_t", "U_r", "U_i", "classification", "boundary_distance"}
    with pytest.raises(ValueError):
        phase_diagram_points(recs, [0.0])


def test_ytterbium_stays_inside():
    yb = [r for r in load_nucleus_table(default_table_path()) if r.isotope == "168Yb"]
    pts = phase_diagram_points(yb, np.linspace(0.05, 2.0, 50))
    assert all(p.classification is Region.INSIDE for p in pts)


def test_polyline_lies_on_circle():
    pts = semicircle_polyline(11)
    assert pts[0] == (0.0, 0.0) and pts[-1][0] == pytest.approx(-1.0)
    for ur, ui in pts:
        assert (ur + 0.5) ** 2 + ui**2 == pytest.approx(0.25)
        assert ui >= 0


def test_coupling_reproduces_scattering_length():
    p = DineutronParams()
    g = dineutron_coupling(p)
    assert g < 0
    assert scattering_length_from_g(g, p.mu, p.lambda_nn).a.real == pytest.approx(p.a_nn, rel=1e-12)


@pytest.mark.parametrize("x", [0.0, 0.1, 0.42, 1.0, 3.0, 50.0])
def test_coupling_route_matches_closed_form(x):
    p = DineutronParams(x=x)
    a = dineutron_solve(p)
    b = dineutron_solve(p, via_coupling=True)
    assert b.a_eff == pytest.approx(a.a_eff, rel=1e-12)
    assert b.energy_dimless == pytest.approx(a.energy_dimless, rel=1e-12, abs=1e-14)


def test_vacuum_limit():
    r = dineutron_solve(DineutronParams())
    assert r.a_eff == pytest.approx(-18.5)
    assert r.energy_dimless == pytest.approx(-1.0)
    assert r.regime is DineutronRegime.VIRTUAL


def test_critical_point():
    p = DineutronParams()
    xc = dineutron_critical_x(p)
    assert xc == pytest.approx(dineutron_critical_x_closed_form(p), abs=1e-10)
    oracle = brentq(lambda x: dineutron_solve(p.at(x)).a_eff.real, 0.1, 1.0, xtol=1e-14)
    assert xc == pytest.approx(oracle, abs=1e-10)
    assert dineutron_solve(p.at(xc * 0.99)).regime is DineutronRegime.VIRTUAL
    assert dineutron_solve(p.at(xc * 1.01)).regime is DineutronRegime.RESONANT
    with pytest.raises(ValueError):
        dineutron_critical_x(p, lo=1.0, hi=2.0)


def test_hypothetical_c_equal_two():
    p = DineutronParams(r_nn=8 * 18.5 / math.pi**2)
    assert p.c == pytest.approx(2.0)
    assert dineutron_critical_x(p) == pytest.approx(1.0, abs=1e-10)


def test_width_sign_on_each_side():
    # below the critical point the width is negative: a growing mode
    p = DineutronParams()
    assert dineutron_solve(p.at(0.2)).gamma_dimless < 0
    assert dineutron_solve(p.at(1.0)).gamma_dimless > 0


def test_gamma_peak():
    p = DineutronParams()
    x, g = dineutron_gamma_peak(p)
    res = minimize_scalar(lambda t: dineutron_solve(p.at(t)).energy_dimless.imag, bounds=(0.5, 10), method="bounded",
                          options={"xatol": 1e-10})
    assert x == pytest.approx(res.x, rel=1e-6)
    assert g == pytest.approx(-res.fun, rel=1e-10)
    assert x == pytest.approx(1.8678, abs=1e-4)


def test_strong_absorption_limit():
    r = dineutron_solve(DineutronParams(x=1e6))
    c = DineutronParams().c
    assert r.energy_dimless.real == pytest.approx(-((c - 1) ** 2), rel=1e-6)
    assert r.xi_r == pytest.approx(18.5 / (c - 1), rel=1e-6)


@pytest.mark.parametrize("kw", [{"a_nn": 1.0}, {"r_nn": 0.0}, {"M_n": -1.0}, {"x": -0.1}])
def test_param_validation(kw):
    with pytest.raises(ValueError):
        DineutronParams(**kw)
