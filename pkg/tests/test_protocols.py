import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from entit import gaussian as g
from entit import protocols as p

Q = math.pi / 4
KAPPA_TWB_07 = 0.12329848197080324
COSH14_HALF = 1.0754492326965703
EF_TWB_05 = 0.6594529591680364


def test_beam_splitter_pair_transmissivities():
    bs = p.BeamSplitterPair(math.pi / 3, 0.0)
    assert bs.t14 == pytest.approx(0.25)
    assert bs.t23 == 1
    assert p.BeamSplitterPair.balanced().t14 == pytest.approx(0.5)


@given(st.floats(0, 1))
def test_loss_channel_angle(gamma):
    ch = p.LossChannel(gamma)
    assert math.cos(ch.angle) ** 2 == pytest.approx(1 - gamma, abs=1e-12)
    assert 0 <= ch.pair().t14 <= 1


def test_loss_channel_identity_and_range():
    assert p.LossChannel(0).angle == 0
    for bad in (-0.1, 1.1):
        with pytest.raises(ValueError):
            p.LossChannel(bad)


def test_coefficients_examples():
    assert p.output_twb_coefficients(0.3, -0.2, 0, 0).as_tuple() == (0.3, -0.2, 0, 0)
    np.testing.assert_allclose(p.output_twb_coefficients(0.4, 0.4, Q, Q).as_tuple(), (0.4, 0.4, 0, 0), atol=1e-15)
    np.testing.assert_allclose(p.output_twb_coefficients(0.4, -0.4, Q, Q).as_tuple(), (0, 0, 0.4, 0.4), atol=1e-15)
    c = p.output_twb_coefficients(0.7, 0.2, 0.6, 0.6)
    assert c.c13 == pytest.approx((0.7 - 0.2) * math.cos(0.6) * math.sin(0.6))
    assert c.c24 == pytest.approx(c.c13)


@given(st.floats(-1, 1), st.floats(-1, 1), st.floats(-3, 3), st.floats(-3, 3))
@settings(max_examples=60)
def test_coefficients_reproduce_evolved_covariance(r, s, phi, psi):
    from_coeffs = p.covariance_from_coefficients(p.output_twb_coefficients(r, s, phi, psi))
    assert np.max(np.abs(from_coeffs.matrix - p.output_covariance(r, s, phi, psi).matrix)) < 1e-10


@given(st.floats(-1, 1), st.floats(-1, 1), st.floats(0.05, math.pi / 2 - 0.05))
def test_no_perfect_swap_at_equal_angles(r, s, phi):
    c = p.output_twb_coefficients(r, s, phi, phi)
    zero = abs(c.c13) < 1e-12 and abs(c.c24) < 1e-12
    assert zero == (abs(r - s) < 1e-12 / (math.sin(phi) * math.cos(phi)))


def test_scan_endpoints():
    t = p.separability_scan(0.7, [-1.0, 1.0])
    assert t.shape == (2, 3)
    assert t[1, 1] == pytest.approx(KAPPA_TWB_07, abs=1e-9)
    # modes 1 and 3 are uncorrelated but each is thermal, so kappa = cosh(1.4)/2, not 1/2
    assert t[1, 2] == pytest.approx(COSH14_HALF, abs=1e-9)
    assert t[0, 1] == pytest.approx(COSH14_HALF, abs=1e-9)
    assert t[0, 2] == pytest.approx(KAPPA_TWB_07, abs=1e-9)


def test_scan_has_jointly_entangled_interval():
    t = p.separability_scan(0.7)
    assert len(t) == 81
    lo, hi = p.entangled_everywhere_interval(t)
    assert lo < hi
    inside = t[(t[:, 0] >= lo) & (t[:, 0] <= hi)]
    assert np.all(inside[:, 1:] < 0.5)


@given(st.floats(0.05, 1.2))
@settings(max_examples=20)
def test_scan_mirror_symmetry(r):
    x = np.linspace(-1, 1, 21)
    t = p.separability_scan(r, x)
    np.testing.assert_allclose(t[:, 1], t[::-1, 2], atol=1e-10)


def test_scan_rejects_nonpositive_r():
    with pytest.raises(ValueError):
        p.separability_scan(0.0)


def test_scan_order_independent_of_workers(monkeypatch):
    x = np.linspace(-1, 1, 17)
    monkeypatch.setenv(p.WORKERS_ENV, "1")
    serial = p.separability_scan(0.6, x)
    monkeypatch.setenv(p.WORKERS_ENV, "8")
    parallel = p.separability_scan(0.6, x)
    assert np.array_equal(serial, parallel)


def test_expansion_trivial_cases():
    assert p.fidelity_expansion_sq(0.4, 0.4, 0.3) == 1
    assert p.fidelity_expansion_sq(0.4, 0.5, 0.0) == pytest.approx(1 - 1.5 * 0.01)
    assert p.fidelity_expansion_bs(0.7, 0.3, 0.5, 0.5) == p.equal_angle_fidelity(0.7, 0.3, 0.5)
    assert p.fidelity_expansion_bs(0.4, 0.4, 0.2, 0.9) == 1


@given(st.floats(-1, 1), st.floats(-1, 1), st.floats(0, math.pi / 2))
@settings(max_examples=40)
def test_equal_angle_fidelity_closed_form(r, s, phi):
    assert p.exact_fidelity(r, s, phi, phi) == pytest.approx(p.equal_angle_fidelity(r, s, phi), abs=1e-10)


def test_squeezing_expansion_bracketed_coefficient_is_second_order():
    # the bracketed quadratic coefficient disagrees with the exact one, so the error is O(eps^2)
    eps = (1e-1, 1e-2, 1e-3)
    assert p.loglog_slope(eps, p.expansion_errors_sq(eps=eps)) == pytest.approx(2.0, abs=0.05)


def test_squeezing_expansion_corrected_is_fourth_order():
    # the exact fidelity is even in s - r, so the cubic term vanishes
    eps = (1e-1, 1e-2, 1e-3)
    errs = p.expansion_errors_sq(eps=eps, expansion=p.fidelity_expansion_sq_corrected)
    assert p.loglog_slope(eps, errs) == pytest.approx(4.0, abs=0.1)


def test_transmissivity_expansion_order():
    d = (1e-1, 1e-2, 1e-3)
    assert p.loglog_slope(d, p.expansion_errors_bs(deltas=d)) == pytest.approx(2.0, abs=0.2)


def test_recovery_endpoint():
    for gamma in (0.0, 0.01, 0.05, 0.1, 0.7):
        row = p.bath_recovery_curve(0.5, gamma, [0.5])[0]
        assert row[1] == pytest.approx(EF_TWB_05, abs=1e-9)
        assert row[2] == pytest.approx(1, abs=1e-9)


def test_recovery_identity_channel_flat():
    t = p.bath_recovery_curve(0.5, 0.0)
    np.testing.assert_allclose(t[:, 1], EF_TWB_05, atol=1e-12)


def test_recovery_degrades_with_loss():
    s = np.linspace(0, 0.45, 10)
    curves = [p.bath_recovery_curve(0.5, gm, s) for gm in (0.01, 0.05, 0.1)]
    for hi, lo in zip(curves, curves[1:]):
        assert np.all(hi[:, 1] > lo[:, 1])
    assert curves[1][0, 1] < EF_TWB_05
    assert curves[1][0, 2] < 1


@given(st.floats(0.1, 1.0), st.floats(0.001, 0.9))
@settings(max_examples=25)
def test_recovery_monotone_up_to_r(r, gamma):
    t = p.bath_recovery_curve(r, gamma, np.linspace(0, r, 15))
    assert np.all(np.diff(t[:, 1]) >= -1e-12)
    assert np.all(np.diff(t[:, 2]) >= -1e-12)


def test_recovery_rejects_bad_gamma():
    with pytest.raises(ValueError):
        p.bath_recovery_curve(0.5, 1.5)


def test_default_grids():
    s = p.default_s_grid(0.5)
    assert len(s) == 51 and s[0] == 0 and s[-1] == pytest.approx(0.75)
    x = p.default_x_grid()
    assert len(x) == 81 and x[0] == -1 and x[-1] == 1


def test_report_transparent():
    rep = p.entit_report(0.5, 0.5, p.BeamSplitterPair(Q, Q), 16)
    assert rep.classification == "transparent"
    assert rep.cm_roundtrip_error < 1e-8 and rep.eigen_residual < 1e-8
    assert rep.overlap_in == pytest.approx(1, abs=1e-8)
    assert rep.ok


def test_report_swapped():
    rep = p.entit_report(0.5, -0.5, p.BeamSplitterPair(Q, Q), 16)
    assert rep.classification == "swapped"
    assert rep.overlap_swap == pytest.approx(1, abs=1e-8)
    assert rep.ok


def test_report_generic():
    rep = p.entit_report(0.5, 0.2, p.BeamSplitterPair(Q, Q), 16)
    assert rep.classification == "generic"
    assert rep.fidelity < 1
    assert abs(rep.fidelity - rep.fidelity_fock) < 1e-6
    assert any("classification" in line for line in rep.lines())


@pytest.mark.parametrize("phi", np.linspace(0.05, math.pi / 2 - 0.05, 20))
def test_report_angle_independent(phi):
    rep = p.entit_report(0.5, 0.5, p.BeamSplitterPair(phi, phi), 16)
    assert rep.classification == "transparent"
    assert rep.eigen_residual < 1e-8 and rep.cm_roundtrip_error < 1e-8


def test_write_table_roundtrip(tmp_path):
    t = p.separability_scan(0.7, [-1.0, 0.0, 1.0])
    path = tmp_path / "t.csv"
    p.write_table(path, p.SCAN_HEADER, t)
    lines = path.read_text().splitlines()
    assert lines[0] == "x,kappa12,kappa13"
    back = np.loadtxt(path, delimiter=",", skiprows=1)
    assert np.array_equal(back, t)


def test_reduced_recovery_state_is_symmetric():
    red = g.reduce(p.output_covariance(0.5, 0.1, 0.3, 0.3), (1, 2)).matrix
    np.testing.assert_allclose(red[:2, :2], red[2:, 2:], atol=1e-12)
