import math

import pytest

import shiftlab


def test_w_sequence_matches_product_formula():
    form = shiftlab.PantographForm.constant(1.0, 2.0, 0.0, 3.0, 60)
    w = shiftlab.w_sequence(form, 1.0, 60)
    oracle = shiftlab.closed_form_oracle_simple(1.0, 2.0, 3.0, 1.0, 60)
    assert w == pytest.approx(oracle, rel=1e-10)


def test_polynomial_solution_is_analytic():
    v = shiftlab.classify_point(-2.0, 1.0, 0.0, 2.0, 1.0)
    assert v["verdict"] == "AnalyticCandidate"
    assert v["series"][:2] == pytest.approx([1.0, -1.0])
    assert all(c == 0.0 for c in v["series"][2:])


def test_degenerate_leading_coefficient_raises():
    form = shiftlab.PantographForm([0.0] * 8, [0.0, 1.0] + [0.0] * 6, [0.0] * 8, 2.0)
    with pytest.raises(shiftlab.ShiftlabError) as info:
        shiftlab.w_sequence(form, 1.0, 5)
    assert info.value.code == "DegenerateLeadingCoefficient"


def test_koenigs_sine_family():
    lam = 7.0
    sigma, residual = shiftlab.koenigs("sine", lam, 0.0, 30)
    assert residual <= 1e-9
    assert sigma[3] == pytest.approx(-1.0 / (6 * lam * (lam + 1)), abs=1e-12)
    assert shiftlab.zeta_iteration(100.0, 20, 200)[:5] == pytest.approx(
        shiftlab.koenigs("sine", 100.0, 0.0, 20)[0][:5], abs=1e-12
    )


def test_constant_delay_eigenvalue():
    kappa, x, residual = shiftlab.eigen_constant_delay(1.5, G=512)
    assert kappa == pytest.approx(1.5, abs=1e-6)
    assert min(x) == pytest.approx(max(x), rel=1e-6)
    assert residual <= 1e-8


def test_coexistence_report():
    r = shiftlab.run_coexistence()
    assert r["expansive"]["multiplier"] == pytest.approx(7.4, abs=1e-10)
    t00 = math.pi / 2 + math.acos(2 * math.pi / 6.4)
    assert r["contractive"]["t"] == pytest.approx(t00, abs=1e-8)
    assert r["bound_satisfied"] and r["pq_satisfied"]
    assert r["nonvanishing"] == "empirical"


def test_infeasible_config():
    with pytest.raises(shiftlab.ShiftlabError) as info:
        shiftlab.run_coexistence(m=1)
    assert info.value.code == "ConfigInfeasible"


def test_matched_steps_solution():
    form = shiftlab.PantographForm.constant(-0.5, 0.3, 0.0, 2.0, 12)
    r = shiftlab.match_initial(form, 0.4, 1.0)
    assert r["residual"] <= 1e-8
    assert r["gronwall"]
    for n, fitted, formal in r["jets"]:
        assert fitted == pytest.approx(formal, abs=1e-4)


def test_rotation_and_pn():
    assert shiftlab.rotation_number("rigid", 1.0 / 3.0, 1.0, n_iter=10000) == pytest.approx(1 / 3, abs=1e-4)
    assert shiftlab.rotation_number("sine", 1.5, 2 * math.pi) == 0.0
    assert shiftlab.pn(1) == "z10 + z00*z01"


def test_series_roundtrip():
    s = shiftlab.TruncatedSeries(0.0, [0.0, 2.0, 1.0, 0.5])
    inv = shiftlab.revert(s)
    ident = shiftlab.compose(s, inv)
    assert ident.coeffs == pytest.approx([0.0, 1.0, 0.0, 0.0], abs=1e-14)
