from __future__ import annotations

import json
import math

import numpy as np
import pytest

from dnlw.core import c0_bound, cubic_reaction, make_params, scale_to_kpp
from dnlw.errors import AnchorError, BracketError, DeltaTooSmall, DomainError, SpeedTooLow
from dnlw.phase_plane import integrate_Tc
from dnlw.wave_finder import (
    ProfileKind, WaveProfile, _search_options, change_sign_tw, critical_delta, darcy_exponent,
    explicit_cstar_gamma0_cprime, find_cstar, increasing_a_to_1_tw, reconstruct_profile,
    speed_side, tail_fit_gamma0, write_profile_csv, write_result_json, zero_to_a_tw,
)

A = 0.3
BISTABLE = cubic_reaction("C", A)
MONOSTABLE = cubic_reaction("Cprime", A)


@pytest.fixture(scope="module")
def crit22():
    return find_cstar(make_params(2, 2), BISTABLE, tol=1e-7)


@pytest.fixture(scope="module")
def classical():
    return find_cstar(make_params(1, 2), BISTABLE, tol=1e-7)


def test_classical_speed(classical):
    assert classical.c_star == pytest.approx((1 - 2 * A) / math.sqrt(2), abs=1e-6)
    lo, hi = classical.bracket
    assert lo < classical.c_star < hi


def test_classical_profile_matches_exact(classical):
    prof = classical.profile
    assert prof(0.0) == pytest.approx(0.5, abs=1e-12)
    assert prof(math.sqrt(2) * math.log(3)) == pytest.approx(0.25, abs=1e-3)
    xi = np.linspace(-8, 8, 33)
    np.testing.assert_allclose(prof(xi), 1 / (1 + np.exp(xi / math.sqrt(2))), atol=2e-4)
    assert prof.kind is ProfileKind.Positive


def test_explicit_gamma0_monostable_speed():
    res = find_cstar(make_params(1, 2), MONOSTABLE, tol=1e-6, with_profile=False)
    assert res.c_star == pytest.approx(2 * math.sqrt(0.3), abs=1e-3)


def test_explicit_formula_examples():
    c, lam = explicit_cstar_gamma0_cprime(make_params(1, 2), MONOSTABLE)
    assert c == pytest.approx(1.0954451, rel=1e-6)
    assert lam == pytest.approx(0.5477226, rel=1e-6)
    c3, _ = explicit_cstar_gamma0_cprime(make_params(0.5, 3), MONOSTABLE)
    assert c3 == pytest.approx(3 * 0.075 ** (2 / 3), rel=1e-12)
    kpp, _ = scale_to_kpp(cubic_reaction("Cprime", 0.5), make_params(1, 2))
    kpp = kpp.scaled(1 / float(kpp.fprime(0.0)))
    assert explicit_cstar_gamma0_cprime(make_params(1, 2), kpp)[0] == pytest.approx(2.0)
    with pytest.raises(DomainError):
        explicit_cstar_gamma0_cprime(make_params(2, 2), MONOSTABLE)
    with pytest.raises(DomainError):
        explicit_cstar_gamma0_cprime(make_params(1, 2), BISTABLE)


def test_symmetric_cubic_has_no_bracket():
    with pytest.raises(BracketError):
        find_cstar(make_params(1, 2), cubic_reaction("C", 0.5))


def test_tol_floor():
    with pytest.raises(DomainError):
        find_cstar(make_params(2, 2), BISTABLE, tol=1e-12)


@pytest.mark.parametrize("m,p", [(1, 2), (2, 2), (1, 3), (3, 2)])
def test_below_c0(m, p):
    params = make_params(m, p)
    res = find_cstar(params, BISTABLE, tol=1e-5, with_profile=False)
    assert res.c_star < c0_bound(params, BISTABLE)


def test_single_crossing(crit22):
    params = make_params(2, 2)
    opts = _search_options(params, BISTABLE, 1e-5)
    cs = np.linspace(0.02, c0_bound(params, BISTABLE) * 0.98, 20)
    sides = [speed_side(params, BISTABLE, c, opts)[0] for c in cs]
    changes = sum(1 for s0, s1 in zip(sides, sides[1:]) if s0 != s1)
    assert changes == 1
    assert sides[0] == 1 and sides[-1] == -1


def test_c_hint_gives_same_speed(crit22):
    res = find_cstar(make_params(2, 2), BISTABLE, tol=1e-7, c_hint=0.4, with_profile=False)
    assert res.c_star == pytest.approx(crit22.c_star, abs=2e-7)


def test_finite_profile(crit22):
    prof = crit22.profile
    assert prof.kind is ProfileKind.FiniteFB
    xi0 = prof.fb[0]
    assert math.isfinite(xi0)
    beyond = np.linspace(xi0, xi0 + 20, 50)
    assert np.all(prof(beyond) == 0.0)
    assert np.all(np.diff(prof.phi) <= 1e-9)
    assert prof(0.0) == pytest.approx(0.5, abs=1e-12)


def test_kind_matches_gamma():
    pos = find_cstar(make_params(0.5, 3), BISTABLE, tol=1e-5)
    assert pos.profile.kind is ProfileKind.Positive
    assert pos.profile.fb is None or pos.profile.fb[0] is None
    fin = find_cstar(make_params(3, 2), BISTABLE, tol=1e-5)
    assert fin.profile.kind is ProfileKind.FiniteFB


@pytest.mark.parametrize("m,p", [(2, 2), (1, 3), (3, 2)])
def test_darcy_exponent(m, p):
    params = make_params(m, p)
    res = find_cstar(params, BISTABLE, tol=1e-6)
    assert darcy_exponent(res.profile) == pytest.approx((p - 1) / params.gamma, rel=0.05)


def test_anchor(crit22):
    params = make_params(2, 2)
    tr = integrate_Tc(params, BISTABLE, crit22.c_star)
    prof = reconstruct_profile(tr, (1.5, 0.7))
    assert prof(1.5) == pytest.approx(0.7, abs=1e-12)
    with pytest.raises(AnchorError):
        reconstruct_profile(tr, (0.0, 1.5))
    res = find_cstar(params, BISTABLE, tol=1e-6, anchor=0.4)
    assert res.profile(0.0) == pytest.approx(0.4, abs=1e-12)


def test_tail_fit_gamma0():
    res = find_cstar(make_params(1, 2), MONOSTABLE, tol=1e-7)
    rate, power = tail_fit_gamma0(res.profile, MONOSTABLE, make_params(1, 2))
    assert power == 1.0
    assert rate == pytest.approx(math.sqrt(0.3), rel=0.05)


def test_tail_fit_kpp():
    kpp, _ = scale_to_kpp(cubic_reaction("Cprime", 0.5), make_params(1, 2))
    kpp = kpp.scaled(1 / float(kpp.fprime(0.0)))
    params = make_params(1, 2)
    res = find_cstar(params, kpp, tol=1e-7)
    assert res.c_star == pytest.approx(2.0, abs=1e-3)
    rate, _ = tail_fit_gamma0(res.profile, kpp, params)
    assert rate == pytest.approx(1.0, rel=0.05)


def test_tail_fit_rejects_gamma_positive(crit22):
    with pytest.raises(DomainError):
        tail_fit_gamma0(crit22.profile, BISTABLE, make_params(2, 2))


def test_scaling_transfer():
    params = make_params(2, 2)
    kpp, factor = scale_to_kpp(MONOSTABLE, params)
    direct = find_cstar(params, MONOSTABLE, tol=1e-7, with_profile=False).c_star
    scaled = find_cstar(params, kpp, tol=1e-7, with_profile=False).c_star
    assert direct == pytest.approx(factor * scaled, abs=2e-6)


def test_cs_wave_symmetric_at_c0():
    params = make_params(1, 2)
    d0 = critical_delta(params, BISTABLE, 0.0)
    prof = change_sign_tw(params, BISTABLE, 0.0, d0 + 0.05)
    xi0, xi1 = prof.fb
    assert xi1 == pytest.approx(-xi0, rel=1e-6)
    assert prof.peak == (0.0, pytest.approx(A + d0 + 0.05))
    assert prof(xi0) == 0.0 and prof(xi1) == 0.0


def test_critical_delta_at_c0_matches_integral_threshold():
    # at c = 0 the flanks reach zero exactly when int_0^peak u^(m-1) f du > 0
    from scipy.optimize import brentq
    from dnlw.core import weighted_integral
    for m in (1.0, 2.0):
        params = make_params(m, 2)
        oracle = brentq(lambda d: weighted_integral(BISTABLE, m, A + d), 0.01, 0.69)
        assert critical_delta(params, BISTABLE, 0.0) == pytest.approx(oracle, abs=1e-4)


def test_cs_wave_unimodal(crit22):
    params = make_params(2, 2)
    c = 0.5 * crit22.c_star
    d = critical_delta(params, BISTABLE, c)
    prof = change_sign_tw(params, BISTABLE, c, d + 0.5 * (1 - A - d))
    k = int(np.argmax(prof.phi))
    assert np.all(np.diff(prof.phi[:k + 1]) >= -1e-12)
    assert np.all(np.diff(prof.phi[k:]) <= 1e-12)


def test_cs_wave_absent_above_cstar(crit22):
    params = make_params(2, 2)
    with pytest.raises(DeltaTooSmall):
        critical_delta(params, BISTABLE, 1.1 * crit22.c_star)
    with pytest.raises(DeltaTooSmall):
        change_sign_tw(params, BISTABLE, 1.1 * crit22.c_star, 0.6)


def test_zero_to_a(crit22):
    params = make_params(2, 2)
    c = crit22.c_star
    prof = zero_to_a_tw(params, BISTABLE, c, eps=1e-3, c_star=c)
    assert prof(0.0) == pytest.approx(1 - 1e-3, abs=1e-12)
    assert float(np.max(prof.phi)) == pytest.approx(1 - 1e-3, abs=1e-12)
    assert prof(prof.xi[-1]) == pytest.approx(A, abs=1e-3)
    refl = zero_to_a_tw(params, BISTABLE, c, eps=1e-3, c_star=c, reflect=True)
    xs = np.linspace(-20, 20, 81)
    np.testing.assert_allclose(refl(xs), prof(-xs), atol=1e-12)
    with pytest.raises(SpeedTooLow):
        zero_to_a_tw(params, BISTABLE, 0.9 * c, c_star=c)


def test_a_to_1():
    prof = increasing_a_to_1_tw(make_params(2, 2), MONOSTABLE, 1.0)
    assert np.all(np.diff(prof.phi) >= 0)
    assert prof.phi[0] == pytest.approx(A, abs=1e-3)
    assert prof.phi[-1] == 1.0
    assert math.isfinite(prof.xi[-1])


def test_a_to_1_fails_when_saddle_is_a_node():
    # for p = 2 and c >= 2 sqrt(f_mp'(1)) the trajectory settles onto S(1, 0)
    with pytest.raises(DomainError, match="settles onto"):
        increasing_a_to_1_tw(make_params(2, 2), MONOSTABLE, 3.0)


def test_profile_outside_grid_is_end_value():
    prof = WaveProfile(np.array([0.0, 1.0, 2.0]), np.array([1.0, 0.5, 0.0]), 0.1,
                       ProfileKind.FiniteFB)
    assert prof(-5.0) == 1.0 and prof(5.0) == 0.0
    with pytest.raises(ValueError):
        WaveProfile(np.array([0.0, 0.0]), np.array([1.0, 0.5]), 0.1, ProfileKind.FiniteFB)


def test_exports(tmp_path, crit22):
    write_result_json(crit22, tmp_path / "r.json")
    data = json.loads((tmp_path / "r.json").read_text())
    assert set(data) == {"m", "p", "gamma", "kind", "a", "c_star", "bracket", "iterations", "fb"}
    assert data["c_star"] == crit22.c_star
    write_profile_csv(crit22.profile, tmp_path / "p.csv")
    lines = (tmp_path / "p.csv").read_text().splitlines()
    assert lines[0] == "xi,phi"
    assert float(lines[1].split(",")[0]) == crit22.profile.xi[0]
