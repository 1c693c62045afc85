"""Regularized zero products: baselines, identities, derivatives, guards."""

import math

import numpy as np
import pytest

from trispectral.basis import cosine_like, sine_like
from trispectral.entire_products import BaselineKind, EntireProduct
from trispectral.errors import (
    EvaluationAtZeroError,
    IndexOutOfTruncationError,
    PoleAtBaselineZeroError,
)

A = math.pi
Z_GRID = np.linspace(-5.0, 200.0, 83)


def _slots(kind: BaselineKind, n: int) -> np.ndarray:
    ks = np.arange(1, n + 1, dtype=float)
    if kind is BaselineKind.FULL_DD:
        return ks**2
    if kind is BaselineKind.HALF_DD:
        return (2.0 * ks) ** 2
    return (2.0 * ks - 1.0) ** 2


def _baseline_value(kind: BaselineKind, z: np.ndarray) -> np.ndarray:
    if kind is BaselineKind.FULL_DD:
        return sine_like(z, A)
    if kind is BaselineKind.HALF_DD:
        return sine_like(z, A / 2.0)
    return cosine_like(z, A / 2.0)


class TestBaselineReproduction:
    @pytest.mark.parametrize("kind", list(BaselineKind))
    def test_slot_zeros_reproduce_baseline(self, kind):
        prod = EntireProduct.build(kind, A, _slots(kind, 200), tail_shift=0.0)
        got = prod.eval(Z_GRID)
        want = _baseline_value(kind, Z_GRID)
        scale = np.maximum(1.0, np.abs(want))
        assert np.max(np.abs(got - want) / scale) < 1e-12

    def test_auto_shift_absorbs_constant_drift(self):
        c = 1.3
        zeros = _slots(BaselineKind.FULL_DD, 120) + c
        prod = EntireProduct.build(BaselineKind.FULL_DD, A, zeros)
        assert prod.tail_shift == pytest.approx(c, abs=1e-6)
        got = prod.eval(Z_GRID)
        want = _baseline_value(BaselineKind.FULL_DD, Z_GRID - c)
        scale = np.maximum(1.0, np.abs(want))
        assert np.max(np.abs(got - want) / scale) < 1e-9


class TestSineTypeBounds:
    def test_bounded_above_and_below_on_real_axis(self):
        n = 60
        ks = np.arange(1, n + 1, dtype=float)
        zeros = _slots(BaselineKind.FULL_DD, n) + 0.3 + ((-1.0) ** ks) / ks
        prod = EntireProduct.build(BaselineKind.FULL_DD, A, zeros)
        mids = 0.5 * (zeros[:-1] + zeros[1:])
        vals_mid = np.array([prod.eval(float(m)) for m in mids[:40]])
        # lambda * f(lambda) is the sine-type normalization in z >= 1
        scaled = np.sqrt(mids[:40]) * np.abs(vals_mid)
        assert np.all(scaled > 1e-3)
        assert np.all(scaled < 1e3)


class TestMixedProductIdentity:
    def test_zero_swap_factorization(self):
        n = 80
        nu = _slots(BaselineKind.HALF_DD, n) + 0.4
        mu = _slots(BaselineKind.HALF_DN, n) + 1.1
        swapped_ks = (1, 3)
        zeros = nu.copy()
        for k in swapped_ks:
            zeros[k - 1] = mu[k - 1]
        shift = 0.4
        phi = EntireProduct.build(BaselineKind.HALF_DD, A, zeros, tail_shift=shift)
        s1 = EntireProduct.build(BaselineKind.HALF_DD, A, nu, tail_shift=shift)
        zs = np.linspace(-4.0, 150.0, 67)
        lhs = phi.eval(zs)
        rhs = s1.eval(zs)
        for k in swapped_ks:
            lhs = lhs * (nu[k - 1] - zs)
            rhs = rhs * (mu[k - 1] - zs)
        scale = np.maximum(1.0, np.abs(rhs))
        assert np.max(np.abs(lhs - rhs) / scale) < 1e-8


class TestDerivatives:
    def _fixture(self):
        n = 50
        ks = np.arange(1, n + 1, dtype=float)
        zeros = _slots(BaselineKind.HALF_DN, n) + 0.9 + 0.4 / ks
        return EntireProduct.build(BaselineKind.HALF_DN, A, zeros)

    def test_dz_at_zero_matches_difference_quotient(self):
        prod = self._fixture()
        for k in (1, 2, 7, 20):
            z0 = prod.zeros[k - 1]
            h = 1e-6 * max(1.0, abs(z0))
            want = (prod.eval(z0 + h) - prod.eval(z0 - h)) / (2.0 * h)
            assert prod.dz_at_zero(k) == pytest.approx(want, rel=1e-6)

    def test_lambda_log_derivative_matches_difference_quotient(self):
        prod = self._fixture()
        for z in (5.3, 44.4, 120.7):
            lam = math.sqrt(z)
            h = 1e-6 * lam
            want = (
                math.log(abs(prod.eval((lam + h) ** 2)))
                - math.log(abs(prod.eval((lam - h) ** 2)))
            ) / (2.0 * h)
            assert prod.eval_log_derivative(z) == pytest.approx(want, rel=1e-5)

    def test_derivative_at_zero_uses_chain_rule(self):
        prod = self._fixture()
        k = 4
        assert prod.derivative_at_zero(k) == pytest.approx(
            2.0 * prod.zeros[k - 1] * prod.dz_at_zero(k)
        )


class TestGuards:
    def test_zero_index_beyond_truncation(self):
        prod = EntireProduct.build(BaselineKind.FULL_DD, A, _slots(BaselineKind.FULL_DD, 10), tail_shift=0.0)
        with pytest.raises(IndexOutOfTruncationError):
            prod.dz_at_zero(11)

    def test_uncancelled_baseline_zero_is_reported(self):
        shift = 2.0
        prod = EntireProduct.build(
            BaselineKind.FULL_DD, A, _slots(BaselineKind.FULL_DD, 10) + shift, tail_shift=shift
        )
        beyond = 20.0**2 + shift  # slot 20 lies past the truncation order
        with pytest.raises(PoleAtBaselineZeroError):
            prod.eval(beyond)

    def test_log_derivative_refuses_zero_point(self):
        prod = EntireProduct.build(BaselineKind.FULL_DD, A, _slots(BaselineKind.FULL_DD, 10), tail_shift=0.0)
        with pytest.raises(EvaluationAtZeroError):
            prod.eval_log_derivative(4.0)
