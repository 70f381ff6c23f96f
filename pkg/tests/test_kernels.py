"""Reproducing kernels: series evaluation, closed forms, and normalizations."""

import math

import numpy as np
import pytest

from bhl.errors import DomainError
from bhl.kernels import (binomial_log_coefficients, kernel_norm_bracket,
                         kernel_norm_sq, kernel_outer, kernel_value,
                         kernel_values, normalized_kernel,
                         normalized_kernel_coefficients,
                         normalized_kernel_norm, normalized_kernel_norm_sq_many,
                         standard_kernel)
from bhl.quadrature import disc_rule
from bhl.weights import RadialWeight
from conftest import disc_points


def _pair_sample(count, seed):
    rng = np.random.default_rng(seed)
    z = 0.95 * np.sqrt(rng.random(count)) * np.exp(2j * np.pi * rng.random(count))
    zeta = 0.95 * np.sqrt(rng.random(count)) * np.exp(2j * np.pi * rng.random(count))
    keep = np.abs(np.conj(z) * zeta) <= 0.9
    return z[keep], zeta[keep]


@pytest.mark.parametrize("eta", [0.0, 1.0])
def test_series_matches_standard_closed_form(eta):
    w = RadialWeight.standard(eta)
    z, zeta = _pair_sample(300, seed=int(eta) + 1)
    series = np.array([kernel_value(w, a, b) for a, b in zip(z, zeta)])
    closed = standard_kernel(eta + 2.0, z, zeta)
    np.testing.assert_allclose(series, closed, rtol=1e-10)


def test_kernel_values_on_product_axis(st0):
    x = np.linspace(-0.9, 0.9, 21)
    np.testing.assert_allclose(
        kernel_values(st0, x), (1.0 - x) ** -2.0, rtol=1e-10)


def test_kernel_rejects_products_near_one(st0):
    with pytest.raises(DomainError):
        kernel_value(st0, 0.99999, 0.99999999)


def test_kernel_norm_sq_closed_form(st0):
    # ||B_z||^2 = B_z(z) = (1-|z|^2)^(-2) for the unweighted disc
    for a in (0.0, 0.31622776601683794, 0.9):  # |z|^2 = 0, 0.1, 0.81
        assert kernel_norm_sq(st0, a) == pytest.approx(
            (1.0 - a * a) ** -2.0, rel=1e-10)


def test_reproducing_property_by_quadrature(st0, st1):
    # <z^m, B_zeta> recovers zeta^m through the full quadrature pipeline
    rule = disc_rule(96, 192)
    nodes, weights = rule.nodes(), rule.weights()
    for w in (st0, st1):
        dens = w.density(np.abs(nodes))
        for zeta in (0.5, -0.3 + 0.7j):
            kvals = np.array(
                [kernel_value(w, zeta, nd) for nd in nodes])  # B_zeta(node)
            for m in (0, 1, 4):
                got = np.sum(nodes ** m * np.conj(kvals) * dens * weights)
                assert got == pytest.approx(zeta ** m, abs=1e-9)


def test_kernel_outer_matches_pointwise(st0):
    u = disc_points(5, r_max=0.8, seed=4)
    zeta = disc_points(7, r_max=0.8, seed=5)
    mat = kernel_outer(st0, u, zeta)
    for i, a in enumerate(u):
        for j, b in enumerate(zeta):
            assert mat[i, j] == pytest.approx(kernel_value(st0, a, b), rel=1e-10)


def test_binomial_log_coefficients():
    # (1-x)^(-2) has coefficients n+1
    ld = binomial_log_coefficients(2.0, 12)
    np.testing.assert_allclose(np.exp(ld), np.arange(1, 13), rtol=1e-12)


def test_normalized_kernel_norm_sq_many_standard(st0):
    # eta = 0 gives back the reproducing kernel: norm^2 = (1-|z|^2)^(-2)
    abs_sq = np.array([0.0, 0.25, 0.81])
    got = normalized_kernel_norm_sq_many(st0, 0.0, abs_sq)
    np.testing.assert_allclose(got, (1.0 - abs_sq) ** -2.0, rtol=1e-10)


def test_normalized_kernel_unit_norm(st0, logpow):
    rule = disc_rule(96, 128).rim()
    nodes, weights = rule.nodes(), rule.weights()
    for w, z in ((st0, 0.6), (logpow, 0.3 - 0.5j)):
        dens = w.density(np.abs(nodes))
        vals = normalized_kernel(w, 4.0, z, nodes)
        mass = np.sum(np.abs(vals) ** 2 * dens * weights)
        assert mass == pytest.approx(1.0, rel=1e-8)


def test_normalized_kernel_coefficients_reconstruct(st1):
    z = 0.45 - 0.2j
    coeffs = normalized_kernel_coefficients(st1, 4.0, z)
    zeta = disc_points(6, r_max=0.9, seed=6)
    series = sum(c * zeta ** n for n, c in enumerate(coeffs))
    direct = normalized_kernel(st1, 4.0, z, zeta)
    np.testing.assert_allclose(series, direct, rtol=1e-7)


def test_normalized_kernel_coefficients_at_origin(st0):
    coeffs = normalized_kernel_coefficients(st0, 4.0, 0.0)
    assert len(coeffs) == 1
    # the constant normalized kernel is 1/||1|| = 1 for unit-mass weights
    assert coeffs[0] == pytest.approx(1.0 / math.sqrt(2.0 * st0.moment(1.0)))


def test_norm_ratio_brackets_finite(st0, st1):
    for w in (st0, st1):
        bracket = kernel_norm_bracket(w, 0.5)
        assert bracket.finite
        lo, hi = bracket.kernel_vs_disc
        assert 0 < lo <= hi < math.inf


def test_normalized_kernel_norm_scalar_consistency(st0):
    many = normalized_kernel_norm_sq_many(st0, 4.0, np.array([0.49]))
    one = normalized_kernel_norm(st0, 4.0, 0.7)
    assert one == pytest.approx(math.sqrt(float(many[0])), rel=1e-12)
