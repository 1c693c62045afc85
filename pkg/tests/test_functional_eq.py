"""Completion of the half-interval spectra from the functional identity.

The fixture is a two-level step potential (0.4 on the left half, 1.1 on the
right half of [0, pi]).  Its half-interval spectra have closed forms, and the
full-interval Dirichlet squares solve a scalar matching equation that a
bisection-free brentq handles to machine precision, so every input square is
known independently of the package's own forward solver.
"""

import math

import numpy as np
import pytest
from scipy.optimize import brentq

from trispectral.errors import (
    NearCoincidentSpectraError,
    ShiftRequiredError,
    ValidationError,
)
from trispectral.functional_eq import (
    build_products,
    complete_three_spectra,
    node_values,
    phi2_zero_table,
    reconstruct_X,
    tau_eval,
)
from trispectral.spectral_data import (
    Branch,
    SpectraBundle,
    SpectralSequence,
    ThreeSpectraInput,
)

A = math.pi
ELL = A / 2.0
C_LEFT = 0.4
C_RIGHT = 1.1
K_FULL = 60

KS = np.arange(1, K_FULL + 1)
NU1_TRUE = (2.0 * KS) ** 2 + C_LEFT
NU2_TRUE = (2.0 * KS) ** 2 + C_RIGHT
MU1_TRUE = (2.0 * KS - 1.0) ** 2 + C_LEFT
MU2_TRUE = (2.0 * KS - 1.0) ** 2 + C_RIGHT


def _sin_over(d: float) -> float:
    # sin(sqrt(d) ell)/sqrt(d), continued through d <= 0
    if d > 0.0:
        r = math.sqrt(d)
        return math.sin(r * ELL) / r
    if d < 0.0:
        r = math.sqrt(-d)
        return math.sinh(r * ELL) / r
    return ELL


def _cos_at(d: float) -> float:
    if d >= 0.0:
        return math.cos(math.sqrt(d) * ELL)
    return math.cosh(math.sqrt(-d) * ELL)


def _matching(z: float) -> float:
    d1 = z - C_LEFT
    d2 = z - C_RIGHT
    return _sin_over(d1) * _cos_at(d2) + _cos_at(d1) * _sin_over(d2)


def _full_spectrum(count: int) -> np.ndarray:
    ts = np.linspace(0.3, count + 1.0, 40 * (count + 1))
    vals = np.array([_matching(t * t) for t in ts])
    roots = []
    for i in np.flatnonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0):
        roots.append(brentq(_matching, ts[i] ** 2, ts[i + 1] ** 2, xtol=1e-14, rtol=1e-15))
    lam = np.array(sorted(roots)[:count])
    assert lam.size == count
    ks = np.arange(1, count + 1)
    # pointwise bounds c_left <= q <= c_right squeeze every eigenvalue
    assert np.all(lam > ks**2 + C_LEFT - 1e-10)
    assert np.all(lam < ks**2 + C_RIGHT + 1e-10)
    return lam


def _step_bundle(count: int = K_FULL) -> SpectraBundle:
    n = count
    return SpectraBundle(
        a=A,
        lam=SpectralSequence(Branch.FULL_DD, A, _full_spectrum(n)),
        nu1=SpectralSequence(Branch.HALF_DD_LEFT, A, NU1_TRUE[:n]),
        nu2=SpectralSequence(Branch.HALF_DD_RIGHT, A, NU2_TRUE[:n]),
        mu1=SpectralSequence(Branch.HALF_DN_LEFT, A, MU1_TRUE[:n]),
        mu2=SpectralSequence(Branch.HALF_DN_RIGHT, A, MU2_TRUE[:n]),
    )


@pytest.fixture(scope="module")
def step_bundle():
    return _step_bundle()


@pytest.fixture(scope="module")
def step_completion(step_bundle):
    inp = step_bundle.withhold((1,), (2,))
    completed, report, X, Y = complete_three_spectra(inp)
    return inp, completed, report, X, Y


@pytest.fixture(scope="module")
def step_problem(step_bundle):
    inp = step_bundle.withhold((), ())
    omega, phi1, phi2 = build_products(inp)
    lam_max = float(inp.lambda_sq[-1])
    table, _ = phi2_zero_table(inp)
    n_use = int(np.searchsorted(table, 0.9 * lam_max, side="right"))
    prob = node_values(inp, omega, phi1, n_use)
    return inp, omega, phi1, phi2, prob


class TestCompletion:
    def test_full_data_run_matches_closed_forms(self, step_bundle):
        inp = step_bundle.withhold((), ())
        completed, report, _, _ = complete_three_spectra(inp)
        n = report.n_out
        assert n >= 15
        np.testing.assert_allclose(completed.mu1.values, MU1_TRUE[:n], atol=2e-5)
        np.testing.assert_allclose(completed.mu2.values, MU2_TRUE[:n], atol=2e-5)
        # known Dirichlet squares pass through untouched
        assert np.array_equal(completed.nu1.values, NU1_TRUE)
        assert np.array_equal(completed.nu2.values, NU2_TRUE)
        assert completed.recovered_nu1 == {}
        assert completed.recovered_nu2 == {}

    def test_withheld_squares_recovered(self, step_completion):
        _, completed, _, _, _ = step_completion
        assert set(completed.recovered_nu1) == {1}
        assert set(completed.recovered_nu2) == {2}
        assert abs(completed.recovered_nu1[1] - NU1_TRUE[0]) < 2e-5
        assert abs(completed.recovered_nu2[2] - NU2_TRUE[1]) < 2e-5
        # and the merged sequences carry the recovered entries in place
        assert completed.nu1.values[0] == completed.recovered_nu1[1]
        assert completed.nu2.values[1] == completed.recovered_nu2[2]

    def test_substituted_dn_squares_pass_through(self, step_completion):
        inp, completed, _, _, _ = step_completion
        assert completed.mu2.values[0] == inp.subst_mu2[1]
        assert completed.mu1.values[1] == inp.subst_mu1[2]

    def test_residual_report(self, step_completion):
        _, _, report, X, Y = step_completion
        assert report.rel_max < 1e-5
        assert report.shift == 0.0
        assert report.z_grid[0] < 0 < report.z_grid[-1]
        assert report.n_nodes_left >= report.n_out
        assert abs(report.mean_left - C_LEFT * ELL / 2.0) < 1e-3
        assert abs(report.mean_right - C_RIGHT * ELL / 2.0) < 1e-3
        d = report.to_dict()
        assert d["rel_max"] == report.rel_max
        csv = report.to_csv()
        assert csv.splitlines()[0] == "z,residual,relative"
        assert len(csv.splitlines()) == report.z_grid.size + 1

    def test_negative_squares_trigger_automatic_shift(self, step_bundle, step_completion):
        _, base, _, _, _ = step_completion
        inp = step_bundle.withhold((1,), (2,)).shifted(-5.0)
        completed, report, _, _ = complete_three_spectra(inp)
        assert report.shift > 0
        assert completed.shift == report.shift
        # outputs come back in the caller's frame
        assert abs(completed.recovered_nu1[1] - (NU1_TRUE[0] - 5.0)) < 2e-5
        n = min(len(base.mu1), len(completed.mu1))
        np.testing.assert_allclose(
            completed.mu1.values[:n] + 5.0, base.mu1.values[:n], atol=1e-4
        )


class TestInterpolation:
    def test_node_values_reproduced_exactly(self, step_problem):
        _, omega, phi1, phi2, prob = step_problem
        X = reconstruct_X(prob, phi2)
        table = prob.positive_nodes**2
        got = X.at_sq(table)
        # at a node of phi2 the identity pins X to omega/phi1
        expected = np.asarray(omega.eval(table)) / np.asarray(phi1.eval(table))
        np.testing.assert_allclose(got, expected, rtol=1e-9, atol=1e-9)
        z0 = float(prob.positive_nodes[2] ** 2)
        assert X(math.sqrt(z0)) == pytest.approx(X.at_sq(z0), rel=1e-12)
        assert isinstance(X.at_sq(z0), float)

    def test_remainder_odd_and_zero_at_origin(self, step_problem):
        _, _, _, phi2, prob = step_problem
        assert tau_eval(prob, phi2, 0.0) == 0.0
        lams = np.linspace(0.5, 0.95 * prob.positive_nodes[-1], 40)
        np.testing.assert_allclose(
            tau_eval(prob, phi2, -lams), -tau_eval(prob, phi2, lams), rtol=1e-12
        )

    def test_tail_coefficient_moves_only_between_nodes(self, step_problem):
        _, _, _, phi2, prob = step_problem
        X = reconstruct_X(prob, phi2)
        X2 = X.with_tail(X.tail_coeff + 0.37)
        at_nodes = prob.positive_nodes**2
        np.testing.assert_allclose(X2.at_sq(at_nodes), X.at_sq(at_nodes), atol=1e-9)
        mids = 0.5 * (at_nodes[:-1] + at_nodes[1:])
        assert np.max(np.abs(X2.at_sq(mids) - X.at_sq(mids))) > 1e-4
        sens = X.tail_sensitivity(at_nodes)
        assert np.max(np.abs(sens)) < 1e-9
        assert np.max(np.abs(X.tail_sensitivity(mids))) > 1e-4

    def test_labels_mark_substituted_nodes(self, step_bundle):
        inp = step_bundle.withhold((), (2,))
        omega, phi1, _ = build_products(inp)
        prob = node_values(inp, omega, phi1, 10)
        assert prob.labels[1] == ("mu1", 2)
        assert all(lab == ("nu2", k + 1) for k, lab in enumerate(prob.labels) if k != 1)


class TestGuards:
    def test_unshifted_negative_nodes_rejected(self, step_bundle):
        inp = step_bundle.withhold((), ())
        omega, phi1, _ = build_products(inp)
        with pytest.raises(ShiftRequiredError):
            node_values(inp.shifted(-(NU2_TRUE[0] + 1.0)), omega, phi1, 10)

    def test_nodes_beyond_full_coverage_rejected(self, step_bundle):
        inp = step_bundle.withhold((), ())
        omega, phi1, _ = build_products(inp)
        with pytest.raises(ValidationError, match="coverage"):
            node_values(inp, omega, phi1, K_FULL)

    def test_output_count_capped_by_coverage(self, step_bundle):
        with pytest.raises(ValidationError, match="node coverage"):
            complete_three_spectra(step_bundle.withhold((), ()), n_out=K_FULL)

    def test_short_full_spectrum_rejected(self):
        with pytest.raises(ValidationError, match="too short"):
            complete_three_spectra(_step_bundle(3).withhold((), ()))

    def test_near_coincident_halves_blow_up_node_values(self, step_bundle):
        lam = step_bundle.lam.values
        crafted = ThreeSpectraInput(
            a=A,
            lambda_sq=lam,
            nu1_ks=KS,
            nu1_sq=NU2_TRUE + 1e-13,
            nu2_ks=KS,
            nu2_sq=NU2_TRUE,
        )
        omega, phi1, _ = build_products(crafted)
        with pytest.raises(NearCoincidentSpectraError):
            node_values(crafted, omega, phi1, 10)
