"""Shared fixtures: reference potentials and their spectra.

The expensive forward solves are session-scoped so the acceptance gate and
the module tests share one set of spectra.  Everything is seeded; reruns
see identical data.
"""

from __future__ import annotations

import math

import numpy as np
import pytest

from trispectral.direct_solver import PotentialGrid, forward_all

A_FULL = math.pi
ELL = A_FULL / 2.0


def linear_potential(cells: int = 6000) -> PotentialGrid:
    return PotentialGrid.from_callable(lambda x: x, 0.0, A_FULL, cells)


def random_smooth_potential(rng: np.random.Generator, cells: int = 600, modes: int = 4) -> PotentialGrid:
    """Low-pass random potential with a random slope to break symmetry."""
    xs = np.linspace(0.0, A_FULL, cells + 1)
    vals = rng.normal(0.0, 0.8) + rng.normal(0.0, 0.6) * (xs / A_FULL - 0.5)
    for m in range(1, modes + 1):
        c, s = rng.normal(size=2)
        vals = vals + (c * np.cos(m * np.pi * xs / A_FULL) + s * np.sin(m * np.pi * xs / A_FULL)) / m
    return PotentialGrid(0.0, A_FULL, vals)


@pytest.fixture(scope="session")
def qx_bundle():
    """Five spectra of q(x) = x on [0, pi], K = 100."""
    return forward_all(linear_potential(), 100)


@pytest.fixture(scope="session")
def qx_completed(qx_bundle):
    """Completion of the linear fixture with one withheld entry per half."""
    from trispectral.functional_eq import complete_three_spectra

    inp = qx_bundle.withhold((1,), (2,))
    completed, report, X, Y = complete_three_spectra(inp)
    return inp, completed, report, X, Y


@pytest.fixture(scope="session")
def random_bundles():
    """Twenty seeded smooth potentials with their five spectra, K = 30."""
    rng = np.random.default_rng(20260819)
    out = []
    for _ in range(20):
        q = random_smooth_potential(rng)
        out.append((q, forward_all(q, 30, tol_root=1e-10)))
    return out
