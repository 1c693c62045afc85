"""Two-spectrum inverse problem on a half interval.

Given the Dirichlet squares nu_k and the Dirichlet-Neumann squares mu_k of
the same potential on [0, l], the norming constants follow from the two
spectral products, the input kernel F from the norming constants, and the
potential from the diagonal of the transformation kernel K solving the
integral equation

    K(x, t) + F(x, t) + int_0^x K(x, s) F(s, t) ds = 0,   0 <= t <= x,

via q(x) = 2 d/dx K(x, x).  The F series is never truncated outright: the
data tail beyond the supplied terms is modeled by the constant-potential
asymptotics (squares at slot + mean drift, norming at the free value) and
that model tail is summed in closed form through sawtooth and Bernoulli
Fourier identities.  A hard truncation would converge non-uniformly near
the far endpoint (every sine basis function vanishes there), poisoning the
kernel diagonal; the analytic tail keeps F on its continuous branch all the
way into the corner.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .basis import sine_like
from .direct_solver import PotentialGrid
from .entire_products import BaselineKind, EntireProduct
from .errors import IllConditionedGLError, NonPositiveNormingError, ValidationError
_COND_LIMIT = 1e12


def tail_drift(nu_sq, ks, ell: float) -> float:
    """Limit of nu_k - (pi k / l)^2, the mean of the potential.

    The gap has no 1/k term, so one Richardson step against 1/k^2 leaves
    only fast-decaying oscillatory remainders; the last quarter of the
    extrapolants is averaged.  Exact for constant potentials.
    """
    nu = np.asarray(nu_sq, dtype=float)
    k = np.asarray(ks, dtype=float)
    if nu.size != k.size or nu.size < 2:
        raise ValidationError("need at least two Dirichlet squares with indices")
    d = nu - (math.pi * k / ell) ** 2
    w = k**2
    e = (w[1:] * d[1:] - w[:-1] * d[:-1]) / (w[1:] - w[:-1])
    m = max(3, e.size // 4)
    return float(np.mean(e[-m:]))


def _quadratic_coeff(res: np.ndarray, ks: np.ndarray) -> float:
    """Limit of k^2 res_k for a residual decaying like p/k^2 + O(1/k^4).

    Pairwise averaging suppresses decaying oscillatory parts, a k^2
    Richardson step the smooth next order.  Returns 0 when fewer than six
    entries are available (the model then stays constant-potential only).
    """
    b = np.asarray(ks, dtype=float) ** 2 * np.asarray(res, dtype=float)
    if b.size < 6:
        return 0.0
    bp = 0.5 * (b[1:] + b[:-1])
    kp = 0.5 * (np.asarray(ks, dtype=float)[1:] + np.asarray(ks, dtype=float)[:-1])
    w = kp**2
    rich = (w[1:] * bp[1:] - w[:-1] * bp[:-1]) / (w[1:] - w[:-1])
    m = max(3, rich.size // 4)
    return float(np.mean(rich[-m:]))


@dataclass(frozen=True)
class NormingConstants:
    """Dirichlet squares with the L2 norms of the first-kind eigenfunctions.

    ``model_from`` is the count of data-driven leading entries; anything
    beyond that index came from the constant-potential tail model.
    """

    ell: float
    squares: np.ndarray
    values: np.ndarray
    model_from: int | None = None

    def __post_init__(self):
        squares = np.asarray(self.squares, dtype=float)
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "squares", squares)
        object.__setattr__(self, "values", values)
        if squares.size != values.size:
            raise ValidationError("need one norming constant per Dirichlet square")
        if np.any(values <= 0):
            k = int(np.flatnonzero(values <= 0)[0]) + 1
            raise NonPositiveNormingError(
                f"norming constant {k} is {values[k - 1]!r}; spectra are inconsistent"
            )

    @property
    def count(self) -> int:
        return int(self.squares.size)


def norming_constants(nu_sq, mu_sq, ell: float) -> NormingConstants:
    """Norming constants from interlacing Dirichlet and DN squares.

    alpha_k equals the DN characteristic function evaluated at the k-th
    Dirichlet square times the z-derivative of the Dirichlet product there;
    both factors come from the regularized products over the given data.
    """
    nu = np.asarray(nu_sq, dtype=float)
    mu = np.asarray(mu_sq, dtype=float)
    n = min(nu.size, mu.size)
    if n < 2:
        raise ValidationError("need at least two eigenvalues of each kind")
    nu = nu[:n]
    mu = mu[:n]
    ok = np.all(mu < nu) and np.all(nu[:-1] < mu[1:])
    if not ok:
        raise ValidationError(
            "Dirichlet and Dirichlet-Neumann squares must strictly interlace "
            "(mu_k < nu_k < mu_k+1)"
        )
    a = 2.0 * ell
    s_prod = EntireProduct.build(BaselineKind.HALF_DD, a, nu)
    sp_prod = EntireProduct.build(BaselineKind.HALF_DN, a, mu)
    dz = np.array([s_prod.dz_at_zero(k) for k in range(1, n + 1)])
    alpha = np.asarray(sp_prod.eval(nu), dtype=float) * dz
    return NormingConstants(ell=ell, squares=nu, values=alpha, model_from=n)


def extend_norming_tail(
    nc: NormingConstants,
    total: int,
    drift: float,
    p_nu: float = 0.0,
    p_alpha: float = 0.0,
) -> NormingConstants:
    """Append model entries up to ``total`` terms.

    The model is the constant-potential tail plus optional 1/k^2 corrections
    (which carry the boundary values of the potential; without them the
    reconstruction's endpoints are pulled toward the mean).
    """
    if total <= nc.count:
        return nc
    ks = np.arange(nc.count + 1, total + 1, dtype=float)
    slots = (math.pi * ks / nc.ell) ** 2
    squares = np.concatenate([nc.squares, slots + drift + p_nu / ks**2])
    values = np.concatenate([nc.values, nc.ell / (2.0 * slots) * (1.0 + p_alpha / ks**2)])
    base = nc.model_from if nc.model_from is not None else nc.count
    return NormingConstants(ell=nc.ell, squares=squares, values=values, model_from=base)


def _tail_sums(theta: np.ndarray, k0: int):
    """(sum sin/k, sum cos/k^2, sum sin/k^3, sum cos/k^4) over k >= k0.

    Valid for |theta| <= 2 pi.  Computed as the closed form of the full sum
    minus the explicit partial sum below k0.  The first sum is the sawtooth
    series: its closed form is the continuous branch, which is exactly what
    the input kernel needs at the resonant corner theta = 2 pi.
    """
    at = np.abs(theta)
    sg = np.sign(theta)
    s1 = sg * 0.5 * (math.pi - at)
    c2 = math.pi**2 / 6.0 - 0.5 * math.pi * at + 0.25 * theta * theta
    s3 = sg * (math.pi**2 * at / 6.0 - 0.25 * math.pi * at * at + at**3 / 12.0)
    c4 = math.pi**4 / 90.0 - math.pi**2 * theta * theta / 12.0 + math.pi * at**3 / 12.0 - at**4 / 48.0
    for k in range(1, k0):
        kt = k * theta
        sk = np.sin(kt)
        ck = np.cos(kt)
        s1 -= sk / k
        c2 -= ck / k**2
        s3 -= sk / k**3
        c4 -= ck / k**4
    return s1, c2, s3, c4


def _tail_D(
    w: np.ndarray,
    theta: np.ndarray,
    c: float,
    L: float,
    k0: int,
    p_nu: float = 0.0,
    p_alpha: float = 0.0,
) -> np.ndarray:
    """sum over k >= k0 of  (model weight) cos(w sqrt(nu_k)) - cos(w k/L),
    expanded through fourth order in 1/omega_k (omega_k = k/L).

    The model squares are slot + c + p_nu/k^2 and the norming constants
    carry the relative correction p_alpha/k^2; both enter at third and
    fourth order.
    """
    a1 = 0.5 * c
    a3 = -c * c / 8.0 + 0.5 * p_nu / (L * L)
    chat = c + p_alpha / (L * L)
    ehat = chat * chat - (c * p_alpha + p_nu) / (L * L)
    s1, c2, s3, c4 = _tail_sums(theta, k0)
    w2 = w * w
    return (
        -(a1 * w) * L * s1
        - (chat + 0.5 * a1 * a1 * w2) * L * L * c2
        + (a1**3 * w * w2 / 6.0 - a3 * w + chat * a1 * w) * L**3 * s3
        + (ehat + 0.5 * chat * a1 * a1 * w2 - a1 * a3 * w2 + a1**4 * w2 * w2 / 24.0) * L**4 * c4
    )


def _f_tail(
    nc: NormingConstants,
    x: np.ndarray,
    t: np.ndarray,
    drift: float,
    p_nu: float = 0.0,
    p_alpha: float = 0.0,
) -> np.ndarray:
    """Closed-form model tail of F over all indices beyond the stored ones."""
    if drift == 0.0 and p_nu == 0.0 and p_alpha == 0.0:
        return np.zeros(np.broadcast(x, t).shape)
    L = nc.ell / math.pi
    k0 = nc.count + 1
    u = x - t
    v = x + t
    du = _tail_D(u, u / L, drift, L, k0, p_nu, p_alpha)
    dv = _tail_D(v, v / L, drift, L, k0, p_nu, p_alpha)
    return (du - dv) / nc.ell


def build_F(
    nc: NormingConstants,
    x: float,
    t: float,
    drift: float = 0.0,
    p_nu: float = 0.0,
    p_alpha: float = 0.0,
) -> float:
    """The input kernel: norming-weighted sine series minus its free twin.

    The series is completed beyond the stored terms by the closed-form model
    tail (drift = mean of the potential; p_nu, p_alpha the 1/k^2 correction
    coefficients of the squares and norming constants).
    """
    ell = nc.ell
    ks = np.arange(1, nc.count + 1, dtype=float)
    z0 = (math.pi * ks / ell) ** 2
    data = sine_like(nc.squares, x) * sine_like(nc.squares, t) / nc.values
    free = sine_like(z0, x) * sine_like(z0, t) * (2.0 * z0 / ell)
    head = float(np.sum(data - free))
    tail = _f_tail(nc, np.asarray(x, dtype=float), np.asarray(t, dtype=float), drift, p_nu, p_alpha)
    return head + float(tail)


def _sine_table(z: np.ndarray, xs: np.ndarray) -> np.ndarray:
    return np.stack([np.asarray(sine_like(z, float(x))) for x in xs], axis=1)


def _f_matrix(
    nc: NormingConstants,
    xs: np.ndarray,
    drift: float = 0.0,
    p_nu: float = 0.0,
    p_alpha: float = 0.0,
) -> np.ndarray:
    ell = nc.ell
    ks = np.arange(1, nc.count + 1, dtype=float)
    z0 = (math.pi * ks / ell) ** 2
    s = _sine_table(nc.squares, xs)
    s0 = _sine_table(z0, xs)
    head = s.T @ (s / nc.values[:, None]) - s0.T @ (s0 * (2.0 * z0 / ell)[:, None])
    return head + _f_tail(nc, xs[:, None], xs[None, :], drift, p_nu, p_alpha)


@dataclass(frozen=True)
class GLKernel:
    """Transformation kernel values K(x_i, t_j) on the lower triangle."""

    xs: np.ndarray
    values: np.ndarray
    ell: float

    def diagonal(self) -> np.ndarray:
        return np.diagonal(self.values).copy()


def solve_gl(
    nc: NormingConstants,
    cells: int = 200,
    cond_limit: float = _COND_LIMIT,
    drift: float = 0.0,
    p_nu: float = 0.0,
    p_alpha: float = 0.0,
) -> GLKernel:
    """Solve the kernel integral equation row by row with trapezoid weights."""
    if cells < 16:
        raise ValidationError("need at least 16 cells for the kernel grid")
    xs = np.linspace(0.0, nc.ell, cells + 1)
    h = nc.ell / cells
    F = _f_matrix(nc, xs, drift, p_nu, p_alpha)
    K = np.zeros((cells + 1, cells + 1))
    K[0, 0] = -F[0, 0]
    check_at = {cells // 4, cells // 2, (3 * cells) // 4, cells}
    for i in range(1, cells + 1):
        n = i + 1
        w = np.full(n, h)
        w[0] = w[-1] = 0.5 * h
        A = np.eye(n) + F[:n, :n] * w[None, :]
        if i in check_at:
            cond = float(np.linalg.cond(A))
            if not np.isfinite(cond) or cond > cond_limit:
                raise IllConditionedGLError(xs[i], cond)
        K[i, :n] = np.linalg.solve(A, -F[i, :n])
    return GLKernel(xs=xs, values=K, ell=nc.ell)


def potential_from_kernel(kern: GLKernel) -> PotentialGrid:
    """q = 2 d/dx of the kernel diagonal, via five-point differences."""
    d = kern.diagonal()
    h = kern.ell / (d.size - 1)
    dd = np.empty_like(d)
    dd[2:-2] = (-d[4:] + 8.0 * d[3:-1] - 8.0 * d[1:-3] + d[:-4]) / (12.0 * h)
    dd[0] = (-11.0 * d[0] + 18.0 * d[1] - 9.0 * d[2] + 2.0 * d[3]) / (6.0 * h)
    dd[1] = (-2.0 * d[0] - 3.0 * d[1] + 6.0 * d[2] - d[3]) / (6.0 * h)
    dd[-2] = (2.0 * d[-1] + 3.0 * d[-2] - 6.0 * d[-3] + d[-4]) / (6.0 * h)
    dd[-1] = (11.0 * d[-1] - 18.0 * d[-2] + 9.0 * d[-3] - 2.0 * d[-4]) / (6.0 * h)
    return PotentialGrid(0.0, kern.ell, 2.0 * dd)


def reconstruct_potential_two_spectra(
    nu_sq,
    mu_sq,
    ell: float,
    cells: int = 200,
    terms: int | None = None,
    extend_to: int | None = None,
    cond_limit: float = _COND_LIMIT,
) -> tuple[PotentialGrid, NormingConstants]:
    """Potential on [0, l] from its Dirichlet and DN squares.

    ``terms`` caps how many data pairs are used.  The series tail beyond the
    data is the closed-form constant model; ``extend_to`` optionally inserts
    explicit model entries first, which matters only when very few terms are
    supplied (the inverse-frequency expansion behind the closed form wants
    the tail to start at a reasonably large index).
    """
    nu = np.asarray(nu_sq, dtype=float)
    mu = np.asarray(mu_sq, dtype=float)
    n = min(nu.size, mu.size) if terms is None else int(terms)
    if n < 2:
        raise ValidationError("need at least two eigenvalues of each kind")
    nc = norming_constants(nu[:n], mu[:n], ell)
    ks = np.arange(1, n + 1)
    drift = tail_drift(nu[:n], ks, ell)
    slots = (math.pi * ks / ell) ** 2
    p_nu = _quadratic_coeff(nu[:n] - slots - drift, ks)
    p_alpha = _quadratic_coeff(nc.values * (2.0 * slots / ell) - 1.0, ks)
    # explicit model entries push the closed-form tail's starting index up,
    # which shrinks the inverse-frequency expansion error near the corner
    explicit = max(2 * n, 200) if extend_to is None else int(extend_to)
    nc = extend_norming_tail(nc, explicit, drift, p_nu, p_alpha)
    kern = solve_gl(nc, cells=cells, cond_limit=cond_limit, drift=drift, p_nu=p_nu, p_alpha=p_alpha)
    return potential_from_kernel(kern), nc
