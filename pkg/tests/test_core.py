from __future__ import annotations

import math

import numpy as np
import pytest

from dnlw.core import (
    ReactionKind, c0_bound, cubic_reaction, f_mp, f_mp_at_zero, make_params, scale_to_kpp,
    tabulated_reaction, weighted_integral,
)
from dnlw.errors import DomainError


@pytest.mark.parametrize("m,p,gamma", [(2, 2, 1.0), (1, 2, 0.0), (0.5, 3, 0.0), (1, 3, 1.0)])
def test_make_params_gamma(m, p, gamma):
    params = make_params(m, p)
    assert params.gamma == pytest.approx(gamma, abs=1e-15)
    assert params.pseudo_linear == (gamma == 0.0)


@pytest.mark.parametrize("m,p", [(1, 1.5), (0.5, 2), (0.0, 2), (1, 1.0), (-1, 3)])
def test_make_params_rejects(m, p):
    with pytest.raises(DomainError):
        make_params(m, p)


def test_fast_diffusion_message():
    with pytest.raises(DomainError, match="fast-diffusion range unsupported"):
        make_params(1, 1.5)


def test_gamma_is_derived():
    params = make_params(1.7, 2.3)
    assert params.gamma == 1.7 * (2.3 - 1) - 1


def test_cubic_values():
    r = cubic_reaction("C", 0.3)
    assert r.f(0.3) == 0.0
    assert r.f(0.5) == pytest.approx(0.05, abs=1e-15)
    rp = cubic_reaction(ReactionKind.TypeCPrime, 0.3)
    assert rp.fprime(0.0) == pytest.approx(0.3, abs=1e-15)


def test_cubic_derivative_matches_finite_difference():
    for kind in ("C", "Cprime"):
        r = cubic_reaction(kind, 0.37)
        u = np.linspace(0.01, 0.99, 50)
        h = 1e-6
        fd = (r.f(u + h) - r.f(u - h)) / (2 * h)
        np.testing.assert_allclose(r.fprime(u), fd, atol=1e-8)


@pytest.mark.parametrize("a", [0.0, 1.0, -0.2, 1.5])
def test_cubic_rejects_a(a):
    with pytest.raises(DomainError):
        cubic_reaction("C", a)


@pytest.mark.parametrize("kind", ["C", "Cprime"])
def test_sign_pattern(kind):
    r = cubic_reaction(kind, 0.3)
    u = np.linspace(0, 1, 1000)[1:-1]
    u = u[np.abs(u - 0.3) > 1e-9]
    s = 1 if kind == "C" else -1
    assert np.all(np.sign(r.f(u)) == np.where(u < 0.3, -s, s))


def test_tabulated_reaction_and_validation():
    u = np.linspace(0, 1, 11)
    f = u * (1 - u) * (u - 0.3)
    r = tabulated_reaction("C", u, f)
    assert r.a == pytest.approx(0.3)
    assert r.f(0.55) == pytest.approx(0.55 * 0.45 * 0.25, rel=0.05)
    with pytest.raises(DomainError):
        tabulated_reaction("Cprime", u, f)


def test_f_mp_examples():
    r = cubic_reaction("C", 0.3)
    assert f_mp(make_params(2, 2), r, 0.5) == pytest.approx(0.1, abs=1e-15)
    assert f_mp(make_params(2, 2), r, 0.3) == 0.0
    assert f_mp(make_params(1, 3), r, 0.5) == pytest.approx(0.5 ** -0.5 * 0.05, rel=1e-12)
    with pytest.raises(DomainError):
        f_mp(make_params(1, 3), r, 0.0)


def test_f_mp_limits_at_zero():
    r = cubic_reaction("Cprime", 0.3)
    assert f_mp_at_zero(make_params(1, 2), r) == pytest.approx(0.3)
    assert f_mp_at_zero(make_params(2, 2), r) == 0.0


def test_f_mp_preserves_sign():
    r = cubic_reaction("C", 0.3)
    X = np.linspace(0.001, 0.999, 500)
    for m, p in [(1, 2), (2, 2), (1, 3), (3, 1.5)]:
        assert np.all(np.sign(f_mp(make_params(m, p), r, X)) == np.sign(r.f(X)))


@pytest.mark.parametrize("a,expected", [(0.3, 1 / 30), (0.5, 0.0), (0.7, -1 / 30)])
def test_weighted_integral_m1(a, expected):
    assert weighted_integral(cubic_reaction("C", a), 1.0, 1.0) == pytest.approx(expected, abs=1e-14)


def test_weighted_integral_sign_change_at_half():
    for a in np.linspace(0.05, 0.95, 19):
        v = weighted_integral(cubic_reaction("C", a), 1.0, 1.0)
        if a < 0.5 - 1e-9:
            assert v > 0
        elif a > 0.5 + 1e-9:
            assert v < 0


@pytest.mark.parametrize("m", [0.5, 1.0, 2.0, 3.5])
def test_weighted_integral_quadrature_matches_closed_form(m):
    cubic = cubic_reaction("C", 0.3)
    u = np.linspace(0, 1, 41)
    tab = tabulated_reaction("C", u, cubic.f(u))
    # the interpolant differs slightly from the cubic; compare both to scipy on the cubic
    from scipy.integrate import quad
    ref, _ = quad(lambda x: x ** (m - 1) * cubic.f(x), 0, 0.8, limit=200)
    assert weighted_integral(cubic, m, 0.8) == pytest.approx(ref, rel=1e-9, abs=1e-12)
    assert weighted_integral(tab, m, 0.8) == pytest.approx(ref, rel=2e-3, abs=1e-5)


def test_c0_examples():
    r = cubic_reaction("C", 0.3)
    # for (1, 2) f_mp = (1 - X)(X - a), whose maximum ((1 - a)/2)^2 gives c0 = 1 - a
    assert c0_bound(make_params(1, 2), r) == pytest.approx(0.7, rel=1e-10)
    u = (2.6 + math.sqrt(3.16)) / 6  # root of f'(u) = 0 in (a, 1)
    assert c0_bound(make_params(2, 2), r) == pytest.approx(2 * math.sqrt(2 * r.f(u)), rel=1e-10)


@pytest.mark.parametrize("m,p", [(1, 2), (2, 2), (1, 3)])
def test_c0_homogeneity(m, p):
    r = cubic_reaction("C", 0.3)
    params = make_params(m, p)
    s = 3.7
    ratio = c0_bound(params, r.scaled(s)) / c0_bound(params, r)
    assert ratio == pytest.approx(s ** ((p - 1) / p), rel=1e-9)


def test_scale_to_kpp():
    r = cubic_reaction("Cprime", 0.5)
    kpp, factor = scale_to_kpp(r, make_params(1, 2))
    assert factor == 1.0
    assert kpp.kind is ReactionKind.KPP
    assert kpp.f(1.0) == pytest.approx(0.0, abs=1e-15)
    r3 = cubic_reaction("Cprime", 0.3)
    kpp3, factor3 = scale_to_kpp(r3, make_params(2, 2))
    assert factor3 == pytest.approx(math.sqrt(0.3), rel=1e-12)
    w = np.linspace(0, 1, 101)
    np.testing.assert_allclose(kpp3.f(w), r3.f(0.3 * w) / 0.3, atol=1e-15)


def test_scale_to_kpp_rejects_bistable():
    with pytest.raises(DomainError):
        scale_to_kpp(cubic_reaction("C", 0.3), make_params(2, 2))
