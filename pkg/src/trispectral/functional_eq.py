"""Completion of depleted half-interval spectra via a functional identity.

With omega, phi1, phi2 the product representations of the full-interval
characteristic function and the two (partially substituted) half-interval
Dirichlet products, the unknown Dirichlet-Neumann characteristic functions
X and Y tie them together:

    X(lambda) phi1(lambda) + Y(lambda) phi2(lambda) = omega(lambda).

X has the cosine-type form cos(lambda l) + A sin(lambda l)/lambda +
tau(lambda)/lambda with l = a/2, A the mean coefficient of its half, and tau
an odd square-summable remainder.  Sampling the identity at the zeros of
phi2 kills the Y term and yields tau's values there; a sine-type Lagrange
series then rebuilds tau, and with it X, everywhere.  The zeros of X are the
right-half Dirichlet-Neumann squares at the non-substituted indices together
with the withheld left Dirichlet squares; the two kinds are told apart by
their slot asymptotics.  Y is the same construction with the halves swapped.

The node samples of tau decay only like (-1)^k/k (boundary terms of the
half potential plus, when squares were substituted, the rational factor they
introduce), so the raw series truncates with an O(1/n) error.  That slow
part has the universal shape B cos(lambda l)/lambda, captured exactly by the
entire model B lambda cos(lambda l)/(lambda^2 - beta^2) with beta = pi/(2l);
the series is applied only to the fast-decaying remainder.  B is estimated
from the node tail and then polished, jointly for X and Y, by a regularized
least-squares fit of the identity residual.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from .basis import cosine_like, sine_like
from .entire_products import BaselineKind, EntireProduct, assemble_zero_table
from .errors import (
    AmbiguousGapError,
    ExtraZeroError,
    NearCoincidentSpectraError,
    ShiftRequiredError,
    ValidationError,
    ZeroNotFoundError,
)
from .spectral_data import (
    Branch,
    SpectralSequence,
    ThreeSpectraInput,
    extrapolate_mean,
)

# |X(node)| beyond this is taken as proof of (near-)coincident half spectra
_NODE_VALUE_LIMIT = 1e5


def phi2_zero_table(inp: ThreeSpectraInput):
    """Zero table of phi2: right Dirichlet squares with substituted left DN."""
    return assemble_zero_table(inp.nu2_ks, inp.nu2_sq, inp.subst_mu1)


def phi1_zero_table(inp: ThreeSpectraInput):
    """Zero table of phi1: left Dirichlet squares with substituted right DN."""
    return assemble_zero_table(inp.nu1_ks, inp.nu1_sq, inp.subst_mu2)


def build_products(inp: ThreeSpectraInput, lam_count: int | None = None):
    """(omega, phi1, phi2) products from one reconstruction input."""
    lam = inp.lambda_sq if lam_count is None else inp.lambda_sq[:lam_count]
    omega = EntireProduct.build(BaselineKind.FULL_DD, inp.a, lam)
    z1, rep1 = phi1_zero_table(inp)
    z2, rep2 = phi2_zero_table(inp)
    phi1 = EntireProduct.build(BaselineKind.HALF_DD, inp.a, z1, replaced=rep1)
    phi2 = EntireProduct.build(BaselineKind.HALF_DD, inp.a, z2, replaced=rep2)
    return omega, phi1, phi2


@dataclass(frozen=True)
class InterpolationProblem:
    """Node data for the sine-type reconstruction of one remainder tau.

    ``nodes`` are lambda-values: 0 first (with value 0), then the positive
    roots of the sampled squares.  ``labels`` records where each positive
    node came from, e.g. ("nu2", 3) or ("mu1", 2).
    """

    ell: float
    mean_coeff: float
    nodes: np.ndarray
    values: np.ndarray
    labels: tuple[tuple[str, int], ...]
    shift: float = 0.0

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "values", values)
        if nodes.size != values.size or nodes.size < 2:
            raise ValidationError("need matching node and value arrays with at least one positive node")
        if nodes[0] != 0.0 or values[0] != 0.0:
            raise ValidationError("node 0 with value 0 must come first")
        if np.any(np.diff(nodes) <= 0):
            raise ValidationError("nodes must be strictly increasing")
        if nodes.size != len(self.labels) + 1:
            raise ValidationError("need one label per positive node")

    @property
    def positive_nodes(self) -> np.ndarray:
        return self.nodes[1:]

    @property
    def positive_values(self) -> np.ndarray:
        return self.values[1:]


def node_values(
    inp: ThreeSpectraInput,
    omega: EntireProduct,
    phi1: EntireProduct,
    n_nodes: int | None = None,
) -> InterpolationProblem:
    """Sample the functional identity at the zeros of phi2.

    There Y drops out, X(node) = omega(node)/phi1(node), and the remainder
    value is tau = lambda (X - cos(lambda l)) - A sin(lambda l) with A the
    mean coefficient extrapolated from the available right-half Dirichlet
    squares.  Nodes must have positive squares; apply a spectral shift first
    otherwise (ShiftRequiredError).
    """
    table, replaced = phi2_zero_table(inp)
    if n_nodes is not None:
        table = table[:n_nodes]
    ell = 0.5 * inp.a
    if np.any(table <= 0):
        raise ShiftRequiredError(
            f"node square {float(np.min(table))!r} is not positive; shift the spectra first"
        )
    lam_max = inp.lambda_sq[-1]
    if float(table[-1]) > lam_max:
        raise ValidationError(
            "node squares reach beyond the full-spectrum coverage; "
            "supply more full-interval eigenvalues or fewer nodes"
        )

    mean_coeff, _ = extrapolate_mean(inp.nu2_ks, inp.nu2_sq, Branch.HALF_DD_RIGHT, inp.a)

    lam_nodes = np.sqrt(table)
    num = omega.eval(table)
    den = phi1.eval(table)
    with np.errstate(divide="ignore", invalid="ignore"):
        xval = num / den
    bad = ~np.isfinite(xval) | (np.abs(xval) > _NODE_VALUE_LIMIT)
    if np.any(bad):
        k_bad = int(np.flatnonzero(bad)[0]) + 1
        raise NearCoincidentSpectraError(
            f"X blows up at node {k_bad} (z={table[k_bad - 1]!r}): the half-interval "
            "Dirichlet spectra are too close to coincident"
        )
    tau = lam_nodes * (xval - cosine_like(table, ell)) - mean_coeff * lam_nodes * sine_like(table, ell)

    replaced_ks = {r[0] for r in replaced}
    labels = tuple(
        ("mu1", k) if k in replaced_ks else ("nu2", k) for k in range(1, table.size + 1)
    )
    nodes = np.concatenate([[0.0], lam_nodes])
    values = np.concatenate([[0.0], tau])
    return InterpolationProblem(ell, float(mean_coeff), nodes, values, labels)


def _node_weights(prob: InterpolationProblem, phi2: EntireProduct) -> np.ndarray:
    """Coefficients c_k = 2 nu_k tau_k / d/dlambda[lambda phi2] at node k."""
    K = prob.positive_nodes.size
    derivs = np.array([phi2.derivative_at_zero(k) for k in range(1, K + 1)])
    return 2.0 * prob.positive_nodes * prob.positive_values / derivs


def _model_over_lambda(z, ell: float):
    """cos(lambda l)/(lambda^2 - beta^2) with beta = pi/(2l), as a function of z.

    Entire: the pole sits at the first cosine zero.  Near beta^2 the ratio is
    evaluated through the midpoint derivative of the cosine.
    """
    zv = np.atleast_1d(np.asarray(z, dtype=float))
    beta_sq = (math.pi / (2.0 * ell)) ** 2
    w = zv - beta_sq
    out = np.empty_like(zv)
    near = np.abs(w) < 1e-4 * beta_sq
    far = ~near
    out[far] = cosine_like(zv[far], ell) / w[far]
    if np.any(near):
        zm = 0.5 * (zv[near] + beta_sq)
        lm = np.sqrt(zm)
        out[near] = -ell * np.sin(lm * ell) / (2.0 * lm)
    return out


def _tail_node_model(prob: InterpolationProblem) -> np.ndarray:
    """Values of the slow-tail model lambda cos(lambda l)/(lambda^2-beta^2) at the nodes."""
    zk = prob.positive_nodes**2
    return prob.positive_nodes * _model_over_lambda(zk, prob.ell)


_TAIL_MIN_NODES = 6


def _tail_coefficient_prior(prob: InterpolationProblem, g_nodes: np.ndarray) -> float:
    """Estimate the slow-tail coefficient as the limit of tau_k/g_k.

    Only the trailing run of Dirichlet-type nodes enters (substituted nodes
    sit near cosine zeros where the ratio is ill-conditioned).  Pairwise
    averaging suppresses the alternating part of the correction, one
    Richardson step in k^2 the smooth part; the last quarter is averaged.
    Zero when too few nodes are available.
    """
    start = 0
    for i, (kind, _) in enumerate(prob.labels):
        if kind.startswith("mu"):
            start = i + 1
    g = g_nodes[start:]
    tau = prob.positive_values[start:]
    ks = np.arange(start + 1.0, prob.positive_nodes.size + 1.0)
    ok = np.abs(g) > 1e-12
    if int(np.sum(ok)) < _TAIL_MIN_NODES:
        return 0.0
    g, tau, ks = g[ok], tau[ok], ks[ok]
    bk = tau / g
    bp = 0.5 * (bk[1:] + bk[:-1])
    kp = 0.5 * (ks[1:] + ks[:-1])
    w = kp**2
    rich = (w[1:] * bp[1:] - w[:-1] * bp[:-1]) / (w[1:] - w[:-1])
    m = max(3, rich.size // 4)
    return float(np.mean(rich[-m:]))


def _tau_over_lambda(
    prob: InterpolationProblem,
    phi2: EntireProduct,
    z,
    weights: np.ndarray | None = None,
) -> np.ndarray:
    """tau(lambda)/lambda as an even entire function of z = lambda**2.

    The Lagrange series over symmetric node pairs collapses to
    phi2(z) * sum_k c_k/(z - z_k); the term of the node nearest to z is
    rewritten through the deflated product so evaluation is stable on and
    near the nodes.  The synthetic node at 0 carries value 0 and drops out.
    """
    z_in = np.asarray(z, dtype=float)
    zv = np.atleast_1d(z_in).astype(float)
    zk = prob.positive_nodes**2
    if weights is None:
        weights = _node_weights(prob, phi2)
    gaps = np.diff(zk)
    local = np.empty_like(zk)
    if gaps.size:
        local[:-1] = gaps
        local[-1] = gaps[-1]
        local[1:] = np.minimum(local[1:], gaps)
    else:
        local[:] = np.maximum(1.0, np.abs(zk))

    diff = zv[:, None] - zk[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = weights[None, :] / diff
    jmin = np.argmin(np.abs(diff) / local[None, :], axis=1)
    rel = np.abs(diff[np.arange(zv.size), jmin]) / local[jmin]
    phi_vals = np.asarray(phi2.eval(zv), dtype=float).reshape(zv.shape)
    with np.errstate(invalid="ignore"):
        out = phi_vals * np.sum(terms, axis=1)
    near = rel < 1e-4
    for i in np.flatnonzero(near):
        j = int(jmin[i])
        rest = phi_vals[i] * float(np.sum(np.delete(terms[i], j)))
        g_z = phi2.eval_deflated(j + 1, zv[i])
        g_node = phi2.eval_deflated(j + 1, zk[j])
        # c_j/(z - z_j) * phi2(z) == (tau_j/nu_j) * g_j(z)/g_j(z_j)
        out[i] = rest + prob.positive_values[j] / prob.positive_nodes[j] * (g_z / g_node)
    return float(out[0]) if z_in.ndim == 0 else out


def tau_eval(prob: InterpolationProblem, phi2: EntireProduct, lam) -> np.ndarray:
    """The interpolated odd remainder tau at real lambda (scalar or array)."""
    lam_in = np.asarray(lam, dtype=float)
    lv = np.atleast_1d(lam_in).astype(float)
    out = lv * np.asarray(_tau_over_lambda(prob, phi2, lv * lv)).reshape(lv.shape)
    return float(out[0]) if lam_in.ndim == 0 else out


@dataclass(frozen=True)
class CharacteristicEvaluator:
    """Reconstructed cosine-type characteristic function X (or Y).

    Holds the slow-tail split: ``tail_coeff`` times the cosine model plus the
    Lagrange series of the fast remainder.  Evaluate at squares with
    ``at_sq`` (valid for any real z) or at real lambda by calling the object.
    """

    prob: InterpolationProblem
    phi2: EntireProduct
    tau_weights: np.ndarray
    g_weights: np.ndarray
    g_nodes: np.ndarray
    tail_coeff: float

    @property
    def ell(self) -> float:
        return self.prob.ell

    def _remainder_prob(self) -> InterpolationProblem:
        sigma = self.prob.positive_values - self.tail_coeff * self.g_nodes
        return dataclasses.replace(self.prob, values=np.concatenate([[0.0], sigma]))

    def at_sq(self, z):
        z_in = np.asarray(z, dtype=float)
        zv = np.atleast_1d(z_in).astype(float)
        ell = self.prob.ell
        w_sigma = self.tau_weights - self.tail_coeff * self.g_weights
        out = (
            cosine_like(zv, ell)
            + self.prob.mean_coeff * sine_like(zv, ell)
            + self.tail_coeff * np.asarray(_model_over_lambda(zv, ell)).reshape(zv.shape)
            + np.asarray(
                _tau_over_lambda(self._remainder_prob(), self.phi2, zv, w_sigma)
            ).reshape(zv.shape)
        )
        return float(out[0]) if z_in.ndim == 0 else out

    def tail_sensitivity(self, z):
        """d(at_sq)/d(tail_coeff): the model minus its own interpolation.

        Vanishes at every node; between nodes it spans exactly the direction
        the node data leaves free.
        """
        z_in = np.asarray(z, dtype=float)
        zv = np.atleast_1d(z_in).astype(float)
        p_g = dataclasses.replace(self.prob, values=np.concatenate([[0.0], self.g_nodes]))
        out = np.asarray(_model_over_lambda(zv, self.prob.ell)).reshape(zv.shape) - np.asarray(
            _tau_over_lambda(p_g, self.phi2, zv, self.g_weights)
        ).reshape(zv.shape)
        return float(out[0]) if z_in.ndim == 0 else out

    def with_tail(self, tail_coeff: float) -> "CharacteristicEvaluator":
        return CharacteristicEvaluator(
            self.prob, self.phi2, self.tau_weights, self.g_weights, self.g_nodes, float(tail_coeff)
        )

    def __call__(self, lam):
        lam_in = np.asarray(lam, dtype=float)
        return self.at_sq(lam_in * lam_in)


def reconstruct_X(
    prob: InterpolationProblem,
    phi2: EntireProduct,
    tail_coeff: float | None = None,
) -> CharacteristicEvaluator:
    """Assemble the evaluator for X from node data and the node product.

    With ``tail_coeff`` omitted the slow-tail coefficient is estimated from
    the node values themselves.
    """
    g_nodes = _tail_node_model(prob)
    if tail_coeff is None:
        tail_coeff = _tail_coefficient_prior(prob, g_nodes)
    tau_w = _node_weights(prob, phi2)
    p_g = dataclasses.replace(prob, values=np.concatenate([[0.0], g_nodes]))
    g_w = _node_weights(p_g, phi2)
    return CharacteristicEvaluator(prob, phi2, tau_w, g_w, g_nodes, float(tail_coeff))


def _polish_tail_pair(
    X: CharacteristicEvaluator,
    Y: CharacteristicEvaluator,
    omega: EntireProduct,
    phi1: EntireProduct,
    phi2: EntireProduct,
    z_lo: float,
    z_hi: float,
    n_points: int = 900,
    strength: float = 3e-2,
) -> tuple[CharacteristicEvaluator, CharacteristicEvaluator]:
    """Joint correction of both tail coefficients from the identity residual.

    The residual is linear in the two coefficients; their sensitivities share
    the factor phi1 phi2 and are nearly collinear, so the fit is regularized
    toward the node-tail priors already folded into X and Y.  The
    well-determined combination is set by the identity, the nearly free one
    stays at its prior.
    """
    zg = np.linspace(z_lo, z_hi, n_points)
    p1 = np.asarray(phi1.eval(zg), dtype=float)
    p2 = np.asarray(phi2.eval(zg), dtype=float)
    om = np.asarray(omega.eval(zg), dtype=float)
    r0 = X.at_sq(zg) * p1 + Y.at_sq(zg) * p2 - om
    wgt = 1.0 / np.maximum(1.0, np.abs(om))
    cols = np.stack([X.tail_sensitivity(zg) * p1 * wgt, Y.tail_sensitivity(zg) * p2 * wgt], axis=1)
    norms = np.linalg.norm(cols, axis=0)
    if np.any(norms <= 1e-300):
        return X, Y
    alpha = strength * norms
    a_aug = np.vstack([cols, np.diag(alpha)])
    r_aug = np.concatenate([-r0 * wgt, np.zeros(2)])
    delta, *_ = np.linalg.lstsq(a_aug, r_aug, rcond=None)
    return X.with_tail(X.tail_coeff + float(delta[0])), Y.with_tail(Y.tail_coeff + float(delta[1]))


# ---------------------------------------------------------------------------
# zero extraction


def _refine_root(f, lo: float, hi: float, tol: float = 1e-13) -> float:
    flo = f(lo)
    fhi = f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if math.copysign(1.0, flo) == math.copysign(1.0, fhi):
        raise ZeroNotFoundError(f"no sign change on [{lo!r}, {hi!r}]")
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0:
            return mid
        if math.copysign(1.0, fm) == math.copysign(1.0, flo):
            lo, flo = mid, fm
        else:
            hi, fhi = mid, fm
        if hi - lo <= tol * max(1.0, abs(mid)):
            break
    mid = 0.5 * (lo + hi)
    dz = 1e-7 * max(1.0, abs(mid))
    der = (f(mid + dz) - f(mid - dz)) / (2.0 * dz)
    if der != 0.0:
        newton = mid - f(mid) / der
        if lo < newton < hi:
            return newton
    return mid


def _zeros_in_window_presampled(f, zs: np.ndarray) -> list[float]:
    fv = np.asarray(f(zs))
    roots = []
    sign = np.sign(fv)
    for i in np.flatnonzero(sign[:-1] * sign[1:] < 0):
        roots.append(_refine_root(f, float(zs[i]), float(zs[i + 1])))
    for i in np.flatnonzero(fv == 0.0):
        roots.append(float(zs[i]))
    return sorted(roots)


def _zeros_in_window(f, lo: float, hi: float, n_samples: int) -> list[float]:
    return _zeros_in_window_presampled(f, np.linspace(lo, hi, n_samples))


@dataclass(frozen=True)
class CompletedSpectra:
    """All four half-interval sequences after completion (original shift)."""

    a: float
    nu1: SpectralSequence
    nu2: SpectralSequence
    mu1: SpectralSequence
    mu2: SpectralSequence
    recovered_nu1: dict[int, float]
    recovered_nu2: dict[int, float]
    shift: float

    def to_dict(self) -> dict:
        return {
            "a": float(self.a),
            "sequences": [
                self.nu1.to_dict(),
                self.nu2.to_dict(),
                self.mu1.to_dict(),
                self.mu2.to_dict(),
            ],
            "recovered": {
                "nu1": {str(k): float(v) for k, v in sorted(self.recovered_nu1.items())},
                "nu2": {str(k): float(v) for k, v in sorted(self.recovered_nu2.items())},
            },
            "shift": float(self.shift),
        }


def _extract_side(
    X: CharacteristicEvaluator,
    inp: ThreeSpectraInput,
    n_out: int,
    drift_nu: float,
    drift_mu: float,
) -> tuple[dict[int, float], dict[int, float]]:
    """Zeros of X: the missing left Dirichlet squares plus the right DN
    squares at the non-substituted indices.

    All zeros below the output window's top are collected in one scan and
    assigned to their labels in sorted order against the slot-plus-drift
    expectations.  This stays correct when a withheld Dirichlet square does
    not share its full-spectrum gap with the substituted DN partner (the
    regular-interval pairing can be offset in index).

    Returns (recovered_nu1, mu2_by_index) in the evaluator's shift frame.
    """
    a = inp.a
    missing = set(inp.missing_nu1)
    subst = inp.subst_mu2

    # expected zero positions: DN slots except the substituted indices
    # (those values are inputs, not zeros), Dirichlet slots at the withheld
    # indices
    unit = (math.pi / a) ** 2
    targets: list[tuple[str, int, float]] = []
    for m in range(1, n_out + 1):
        if m not in missing:
            targets.append(("mu", m, unit * (2.0 * m - 1.0) ** 2 + drift_mu))
    for k in sorted(missing):
        targets.append(("nu", k, unit * (2.0 * k) ** 2 + drift_nu))
    targets.sort(key=lambda p: p[2])
    expected = np.array([p[2] for p in targets])
    seps = np.diff(expected)
    if seps.size and float(np.min(seps)) < 1.5 * unit:
        i = int(np.argmin(seps))
        raise AmbiguousGapError(
            f"expected zeros for {targets[i][0]}_{targets[i][1]} and "
            f"{targets[i + 1][0]}_{targets[i + 1][1]} nearly coincide "
            f"({expected[i]:.9g} vs {expected[i + 1]:.9g}); labels would not be trustworthy"
        )

    # the first excluded zero above the window is the next DN square
    next_mu = unit * (2.0 * n_out + 1.0) ** 2 + drift_mu
    top = 0.5 * (float(expected[-1]) + next_mu)
    spacing = 8.0 * unit

    roots: list[float] = []
    floor = float(expected[0]) - spacing
    for _ in range(3):
        t_lo = math.copysign(math.sqrt(abs(floor)), floor)
        t_hi = math.sqrt(max(top, 0.0))
        n_samp = max(64, int(math.ceil((t_hi - t_lo) / ((2.0 * math.pi / a) / 16.0))))
        t = np.linspace(t_lo, t_hi, n_samp)
        zs = np.sign(t) * t * t
        roots = _zeros_in_window_presampled(X.at_sq, zs)
        if len(roots) >= len(targets):
            break
        floor -= 2.0 * spacing
    if len(roots) != len(targets):
        raise (ZeroNotFoundError if len(roots) < len(targets) else ExtraZeroError)(
            f"found {len(roots)} zeros for {len(targets)} expected "
            f"(scan window [{floor:.6g}, {top:.6g}])"
        )

    recovered: dict[int, float] = {}
    mu: dict[int, float] = {}
    fences = np.concatenate([[expected[0] - spacing], expected, [next_mu]])
    for i, ((label, idx, exp), r) in enumerate(zip(targets, roots)):
        local = min(exp - fences[i], fences[i + 2] - exp)
        if abs(r - exp) > 0.6 * local:
            raise ExtraZeroError(
                f"zero {r:.9g} assigned to {label}_{idx} sits far from its "
                f"expected position {exp:.9g}"
            )
        if label == "nu":
            recovered[idx] = r
        else:
            mu[idx] = r
    for k in sorted(missing):
        if k <= n_out:
            mu[k] = subst[k]
    return recovered, mu


def complete_spectra(
    X: CharacteristicEvaluator,
    Y: CharacteristicEvaluator,
    inp: ThreeSpectraInput,
    n_out: int,
    shift: float = 0.0,
) -> CompletedSpectra:
    """Recover the withheld Dirichlet squares and both DN spectra.

    ``inp`` must be in the same (shifted) frame as the evaluators; ``shift``
    records how much was added so the output can be returned in the original
    frame.
    """
    drift2 = 4.0 * _problem_mean(X) / inp.a
    drift1 = 4.0 * _problem_mean(Y) / inp.a
    rec1, mu2 = _extract_side(X, inp, n_out, drift_nu=drift1, drift_mu=drift2)
    rec2, mu1 = _extract_side(Y, inp.swapped(), n_out, drift_nu=drift2, drift_mu=drift1)

    a = inp.a
    nu1_full = _merge_full(inp.nu1_ks, inp.nu1_sq, rec1)
    nu2_full = _merge_full(inp.nu2_ks, inp.nu2_sq, rec2)
    mu1_seq = np.array([mu1[m] for m in sorted(mu1)])
    mu2_seq = np.array([mu2[m] for m in sorted(mu2)])

    def seq(branch, vals):
        return SpectralSequence(branch, a, np.asarray(vals) - shift)

    return CompletedSpectra(
        a=a,
        nu1=seq(Branch.HALF_DD_LEFT, nu1_full),
        nu2=seq(Branch.HALF_DD_RIGHT, nu2_full),
        mu1=seq(Branch.HALF_DN_LEFT, mu1_seq),
        mu2=seq(Branch.HALF_DN_RIGHT, mu2_seq),
        recovered_nu1={k: v - shift for k, v in rec1.items()},
        recovered_nu2={k: v - shift for k, v in rec2.items()},
        shift=shift,
    )


def _problem_mean(ev: CharacteristicEvaluator) -> float:
    return ev.prob.mean_coeff


@dataclass(frozen=True)
class FunctionalEquationReport:
    """Residual diagnostics for one completion run (original shift frame).

    ``denominator`` is max(1, |omega|) on the grid, so ``rel_max`` bounds the
    identity residual relative to the size of the full-interval product.
    """

    z_grid: np.ndarray
    residual: np.ndarray
    denominator: np.ndarray
    rel_max: float
    shift: float
    mean_left: float
    mean_right: float
    n_nodes_left: int
    n_nodes_right: int
    n_out: int

    def to_csv(self) -> str:
        lines = ["z,residual,relative"]
        for z, r, d in zip(self.z_grid, self.residual, self.denominator):
            lines.append(f"{z!r},{r!r},{(abs(r) / d)!r}")
        return "\n".join(lines) + "\n"

    def to_dict(self) -> dict:
        return {
            "rel_max": float(self.rel_max),
            "shift": float(self.shift),
            "mean_left": float(self.mean_left),
            "mean_right": float(self.mean_right),
            "n_nodes_left": int(self.n_nodes_left),
            "n_nodes_right": int(self.n_nodes_right),
            "n_out": int(self.n_out),
        }


_SHIFT_TOL_FACTOR = 1e-6
_NODE_COVERAGE = 0.9


def _usable_nodes(table: np.ndarray, lam_max: float) -> int:
    return int(np.searchsorted(table, _NODE_COVERAGE * lam_max, side="right"))


def complete_three_spectra(
    inp: ThreeSpectraInput,
    n_out: int | None = None,
    tol_coincidence: float = 1e-9,
    residual_points: int = 320,
):
    """Full completion pipeline: validate, shift if needed, build products,
    interpolate both DN characteristic functions, and extract their zeros.

    Returns (CompletedSpectra, FunctionalEquationReport, X, Y) with the
    spectra unshifted; the evaluators live in the shifted frame recorded in
    the report.
    """
    inp.validate(tol_coincidence)

    all_sq = np.concatenate(
        [
            inp.lambda_sq,
            inp.nu1_sq,
            inp.nu2_sq,
            np.array(sorted(inp.subst_mu1.values()), dtype=float),
            np.array(sorted(inp.subst_mu2.values()), dtype=float),
        ]
    )
    min_sq = float(np.min(all_sq))
    tol_shift = _SHIFT_TOL_FACTOR * (math.pi / inp.a) ** 2
    c = 1.0 + abs(min_sq) if min_sq <= tol_shift else 0.0
    work = inp.shifted(c) if c else inp

    omega, phi1, phi2 = build_products(work)
    lam_max = float(work.lambda_sq[-1])
    table1, _ = phi1_zero_table(work)
    table2, _ = phi2_zero_table(work)
    n1_use = _usable_nodes(table1, lam_max)
    n2_use = _usable_nodes(table2, lam_max)
    if n1_use < 2 or n2_use < 2:
        raise ValidationError(
            "full spectrum too short to cover the half-interval data; "
            f"usable node counts are {n1_use} and {n2_use}"
        )

    prob_x = node_values(work, omega, phi1, n2_use)
    prob_y = node_values(work.swapped(), omega, phi2, n1_use)
    X = reconstruct_X(prob_x, phi2)
    Y = reconstruct_X(prob_y, phi1)

    z_hi = _NODE_COVERAGE * min(float(table1[n1_use - 1]), float(table2[n2_use - 1]))
    z_lo = min(-((math.pi / inp.a) ** 2), min_sq + c)
    X, Y = _polish_tail_pair(X, Y, omega, phi1, phi2, z_lo, z_hi)

    cap = int(0.92 * min(n1_use, n2_use))
    need = max([1, *work.missing_nu1, *work.missing_nu2])
    if n_out is None:
        n_out = max(need, int(0.8 * min(n1_use, n2_use)))
    if n_out > cap:
        raise ValidationError(
            f"requested {n_out} output eigenvalues per DN sequence but the node "
            f"coverage supports at most {cap}"
        )

    completed = complete_spectra(X, Y, work, n_out, shift=c)

    grid = np.linspace(z_lo, z_hi, residual_points)
    xv = X.at_sq(grid)
    yv = Y.at_sq(grid)
    p1 = phi1.eval(grid)
    p2 = phi2.eval(grid)
    om = omega.eval(grid)
    resid = xv * p1 + yv * p2 - om
    denom = np.maximum(1.0, np.abs(om))
    report = FunctionalEquationReport(
        z_grid=grid - c,
        residual=resid,
        denominator=denom,
        rel_max=float(np.max(np.abs(resid) / denom)),
        shift=c,
        mean_left=prob_y.mean_coeff,
        mean_right=prob_x.mean_coeff,
        n_nodes_left=n1_use,
        n_nodes_right=n2_use,
        n_out=n_out,
    )
    return completed, report, X, Y


def _merge_full(ks: np.ndarray, vals: np.ndarray, recovered: dict[int, float]) -> np.ndarray:
    table = {int(k): float(v) for k, v in zip(ks, vals)}
    table.update({int(k): float(v) for k, v in recovered.items()})
    keys = sorted(table)
    if keys != list(range(1, len(keys) + 1)):
        raise ValidationError(f"completed Dirichlet index set has holes: {keys[:8]}...")
    full = np.array([table[k] for k in keys])
    if np.any(np.diff(full) <= 0):
        raise ValidationError("completed Dirichlet sequence is not increasing; data inconsistent")
    return full
