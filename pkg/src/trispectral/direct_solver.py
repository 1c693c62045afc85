"""Forward eigenvalue solver by transfer-matrix shooting.

The solution normalized by y(x0) = 0, y'(x0) = 1 is propagated cell by cell
with the exact constant-potential transfer matrix, the potential frozen at
its cell average.  The scheme has O(h^2) global error for smooth potentials
and is exact (to roundoff) when the potential is constant, which pins the
constant-potential spectra used as anchors elsewhere.

Eigenvalues are zeros of the endpoint value (Dirichlet) or endpoint
derivative (Neumann) as functions of z = lambda**2.  They are isolated by a
sign-change scan over a window derived from the asymptotic slots and the
potential's range (min-max bounds make the window certain to contain the
k-th eigenvalue), then polished by bisection and one Newton step.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from .basis import cosine_like, sine_like
from .errors import (
    MismatchedLengthError,
    MissedEigenvalueError,
    ReconstructionError,
    ShootOverflowError,
    ValidationError,
)
from .spectral_data import Branch, SpectraBundle, SpectralSequence

_OVERFLOW_LIMIT = 1e200


@dataclass(frozen=True)
class PotentialGrid:
    """Uniformly sampled potential on [x0, x1] (samples at both endpoints)."""

    x0: float
    x1: float
    samples: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "samples", np.asarray(self.samples, dtype=float))
        if not self.x1 > self.x0:
            raise ValidationError("potential grid needs x1 > x0")
        if self.samples.ndim != 1 or self.samples.size < 17:
            raise ValidationError("potential grid needs at least 17 samples (16 cells)")
        if not np.all(np.isfinite(self.samples)):
            raise ValidationError("potential samples must be finite")

    @property
    def cells(self) -> int:
        return self.samples.size - 1

    @property
    def h(self) -> float:
        return (self.x1 - self.x0) / self.cells

    @property
    def length(self) -> float:
        return self.x1 - self.x0

    @property
    def x(self) -> np.ndarray:
        return np.linspace(self.x0, self.x1, self.samples.size)

    def mean(self) -> float:
        return float(np.trapezoid(self.samples, dx=self.h) / self.length)

    @classmethod
    def from_callable(cls, f, x0: float, x1: float, cells: int) -> "PotentialGrid":
        x = np.linspace(x0, x1, cells + 1)
        return cls(x0, x1, np.asarray([f(xi) for xi in x], dtype=float))

    def left_half(self) -> "PotentialGrid":
        if self.cells % 2:
            raise ValidationError("halving the grid needs an even cell count")
        m = self.cells // 2
        return PotentialGrid(0.0, self.length / 2.0, self.samples[: m + 1])

    def right_half_reflected(self) -> "PotentialGrid":
        """Right half in reflected coordinates: q(x1 - t) for t in [0, len/2]."""
        if self.cells % 2:
            raise ValidationError("halving the grid needs an even cell count")
        m = self.cells // 2
        return PotentialGrid(0.0, self.length / 2.0, self.samples[::-1][: m + 1])

    def to_dict(self) -> dict:
        return {
            "x0": float(self.x0),
            "x1": float(self.x1),
            "samples": [float(v) for v in self.samples],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PotentialGrid":
        return cls(float(d["x0"]), float(d["x1"]), np.asarray(d["samples"], dtype=float))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "q"])
        for xi, qi in zip(self.x, self.samples):
            w.writerow([repr(float(xi)), repr(float(qi))])
        return buf.getvalue()


@dataclass(frozen=True)
class ShootingResult:
    """Endpoint data of the Dirichlet-normalized solution."""

    value: float
    derivative: float


def shoot_many(q: PotentialGrid, zs) -> tuple[np.ndarray, np.ndarray]:
    """Propagate y(x0)=0, y'(x0)=1 to x1 for an array of spectral squares.

    Returns (values, derivatives) at x1, one entry per z.  Raises
    ShootOverflowError if the hyperbolic branch overflows (z far below the
    potential range).
    """
    zs = np.atleast_1d(np.asarray(zs, dtype=float))
    h = q.h
    qbar = 0.5 * (q.samples[:-1] + q.samples[1:])
    y = np.zeros_like(zs)
    yp = np.ones_like(zs)
    # overflow in the hyperbolic branch is caught by the periodic check below
    with np.errstate(over="ignore", invalid="ignore"):
        for i, qb in enumerate(qbar):
            w = zs - qb
            c = cosine_like(w, h)
            s = sine_like(w, h)
            y, yp = c * y + s * yp, -w * s * y + c * yp
            if i % 64 == 63:
                m = np.abs(y) + np.abs(yp)
                if not np.all(m < _OVERFLOW_LIMIT):
                    bad = int(np.argmax(m))
                    raise ShootOverflowError(float(zs[bad]))
    m = np.abs(y) + np.abs(yp)
    if not np.all(np.isfinite(y) & np.isfinite(yp)) or not np.all(m < np.inf):
        bad = int(np.argmax(~np.isfinite(y + yp)))
        raise ShootOverflowError(float(zs[bad]))
    return y, yp


def shoot(q: PotentialGrid, z: float) -> ShootingResult:
    """Endpoint value and derivative of the Dirichlet-normalized solution."""
    v, d = shoot_many(q, [z])
    return ShootingResult(float(v[0]), float(d[0]))


def _endpoint_function(q: PotentialGrid, bc: str):
    if bc == "dd":
        return lambda zs: shoot_many(q, zs)[0]
    if bc == "dn":
        return lambda zs: shoot_many(q, zs)[1]
    raise ValidationError(f"unknown boundary condition {bc!r} (want 'dd' or 'dn')")


def _slot_roots_for(bc: str, L: float, K: int) -> np.ndarray:
    k = np.arange(1, K + 1, dtype=float)
    return math.pi * (k - 0.5) / L if bc == "dn" else math.pi * k / L


def _signed_sqrt(z: float) -> float:
    return math.copysign(math.sqrt(abs(z)), z)


def find_spectrum(q: PotentialGrid, bc: str, K: int, tol_root: float = 1e-12) -> np.ndarray:
    """First K eigenvalue squares of the problem with the given endpoint pair.

    ``bc`` is "dd" (Dirichlet at both ends) or "dn" (Dirichlet at x0, Neumann
    at x1).  ``tol_root`` is relative to max(1, |z|).  Raises
    MissedEigenvalueError if the scan cannot assign exactly one root per
    asymptotic slot window.
    """
    if K < 1:
        raise ValidationError("K must be positive")
    f = _endpoint_function(q, bc)
    L = q.length
    slots = _slot_roots_for(bc, L, K) ** 2
    qmin, qmax = float(np.min(q.samples)), float(np.max(q.samples))
    span = qmax - qmin
    tiny = 1e-9 * max(1.0, abs(slots[-1]))
    z_lo = slots[0] + qmin - max(1e-6, 1e-3 * span) - tiny
    z_hi = slots[-1] + qmax + tiny

    # sample densely in signed-sqrt coordinates: roots are near-uniform there
    dt = (math.pi / L) / 12.0
    t_lo, t_hi = _signed_sqrt(z_lo), math.sqrt(max(z_hi, 0.0))
    n = int(math.ceil((t_hi - t_lo) / dt)) + 2
    t = np.linspace(t_lo, t_hi, n)
    zs = np.sign(t) * t * t
    fv = f(zs)

    flips = np.flatnonzero(np.sign(fv[:-1]) * np.sign(fv[1:]) < 0)
    exact = np.flatnonzero(fv == 0.0)
    lo = zs[flips].copy()
    hi = zs[flips + 1].copy()
    roots = _bisect_newton(f, lo, hi, tol_root)
    if exact.size:
        roots = np.sort(np.concatenate([roots, zs[exact]]))

    if roots.size < K:
        raise MissedEigenvalueError(
            f"found {roots.size} roots, expected at least {K} (bc={bc}, scan [{z_lo:.6g}, {z_hi:.6g}])"
        )
    roots = roots[:K]
    # each root must stay inside the min-max window of its own slot
    pad = max(1e-6, 1e-3 * span) + 2 * tiny
    ok = (roots >= slots + qmin - pad) & (roots <= slots + qmax + pad)
    if not np.all(ok):
        k_bad = int(np.flatnonzero(~ok)[0]) + 1
        raise MissedEigenvalueError(
            f"root {roots[k_bad - 1]:.9g} escaped the slot window for k={k_bad} (bc={bc})"
        )
    return roots


def _bisect_newton(f, lo: np.ndarray, hi: np.ndarray, tol_root: float) -> np.ndarray:
    """Vectorized bisection to near-convergence, then one Newton polish."""
    if lo.size == 0:
        return lo
    flo = f(lo)
    for _ in range(46):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        left = np.sign(fm) == np.sign(flo)
        lo = np.where(left, mid, lo)
        flo = np.where(left, fm, flo)
        hi = np.where(left, hi, mid)
        if np.all(hi - lo <= tol_root * np.maximum(1.0, np.abs(mid))):
            break
    mid = 0.5 * (lo + hi)
    dz = 1e-7 * np.maximum(1.0, np.abs(mid))
    deriv = (f(mid + dz) - f(mid - dz)) / (2.0 * dz)
    fm = f(mid)
    step = np.where(deriv != 0.0, fm / np.where(deriv == 0.0, 1.0, deriv), 0.0)
    polished = mid - step
    # keep the Newton step only when it stays inside the bracket
    inside = (polished > lo) & (polished < hi)
    return np.sort(np.where(inside, polished, mid))


def forward_all(q: PotentialGrid, K: int, tol_root: float = 1e-12, omega_rtol: float = 1e-6) -> SpectraBundle:
    """All five spectra of a full-interval potential.

    The full-interval grid must have an even cell count so it can be halved.
    After solving, every full-interval eigenvalue is checked against the
    half-interval endpoint data via the transmission identity
    s1*s2' + s2*s1' = 0; disagreement beyond ``omega_rtol`` (relative to the
    term sizes) signals an inconsistent solve and raises.
    """
    if q.x0 != 0.0:
        raise ValidationError("forward_all expects the interval to start at 0")
    left = q.left_half()
    right = q.right_half_reflected()
    a = q.length

    lam = find_spectrum(q, "dd", K, tol_root)
    nu1 = find_spectrum(left, "dd", K, tol_root)
    mu1 = find_spectrum(left, "dn", K, tol_root)
    nu2 = find_spectrum(right, "dd", K, tol_root)
    mu2 = find_spectrum(right, "dn", K, tol_root)

    s1, s1p = shoot_many(left, lam)
    s2, s2p = shoot_many(right, lam)
    omega = s1 * s2p + s2 * s1p
    # normalize by the solution amplitudes, not the (possibly individually
    # vanishing) products: s scales like 1/sqrt(z), s' like 1
    r = np.sqrt(np.maximum(np.abs(lam), 1.0))
    scale = np.hypot(s1 * r, s1p) * np.hypot(s2 * r, s2p) / r + 1e-300
    worst = float(np.max(np.abs(omega) / scale))
    if worst > omega_rtol:
        k_bad = int(np.argmax(np.abs(omega) / scale)) + 1
        raise ReconstructionError(
            f"transmission identity fails at full eigenvalue k={k_bad}: relative residual {worst:.3g}"
        )

    return SpectraBundle(
        a=a,
        lam=SpectralSequence(Branch.FULL_DD, a, lam),
        nu1=SpectralSequence(Branch.HALF_DD_LEFT, a, nu1),
        nu2=SpectralSequence(Branch.HALF_DD_RIGHT, a, nu2),
        mu1=SpectralSequence(Branch.HALF_DN_LEFT, a, mu1),
        mu2=SpectralSequence(Branch.HALF_DN_RIGHT, a, mu2),
    )
