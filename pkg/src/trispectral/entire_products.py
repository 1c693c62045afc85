"""Entire functions represented by their zero sequences.

A truncated spectral sequence {z_k} determines an entire function of
z = lambda**2 through a regularized product: the closed-form function with
the corresponding free zero slots (a sine or cosine type baseline) times the
finite ratio prod (z_k - z)/(slot_k - z).  Beyond the truncation order the
zeros are modeled by slot_k + tail_shift, which absorbs the mean drift of
the data and is realized by evaluating the baseline at z - tail_shift.  The
neglected remainder is then driven by the square-summable part of the zero
perturbations rather than by their O(1) mean, so modest truncation orders
already give tight values.

Cancellations where the shifted baseline and a denominator factor vanish
together (removable by construction) are handled with local Taylor data of
the baseline, so evaluation is stable arbitrarily close to the slots.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .basis import (
    cosine_like,
    cosine_like_dz,
    cosine_like_dz2,
    sine_like,
    sine_like_dz,
    sine_like_dz2,
)
from .errors import (
    EvaluationAtZeroError,
    IndexOutOfTruncationError,
    PoleAtBaselineZeroError,
    ValidationError,
)
from .spectral_data import Branch, SpectralSequence

# relative (to local slot spacing) distance below which the removable
# baseline/denominator cancellation switches to Taylor form
_DEFLATE_CUT = 1e-6
# relative distance to an uncancelled baseline zero that counts as a hit
_POLE_CUT = 1e-8


class BaselineKind(str, Enum):
    """Closed-form comparison function carrying the product's tail."""

    FULL_DD = "full_dd"  # sin(lambda a)/lambda, slots (pi k / a)^2
    HALF_DD = "half_dd"  # sin(lambda a/2)/lambda, slots (2 pi k / a)^2
    HALF_DN = "half_dn"  # cos(lambda a/2), slots (pi (2k-1) / a)^2


_BRANCH_TO_BASELINE = {
    Branch.FULL_DD: BaselineKind.FULL_DD,
    Branch.HALF_DD_LEFT: BaselineKind.HALF_DD,
    Branch.HALF_DD_RIGHT: BaselineKind.HALF_DD,
    Branch.HALF_DN_LEFT: BaselineKind.HALF_DN,
    Branch.HALF_DN_RIGHT: BaselineKind.HALF_DN,
}


@dataclass(frozen=True)
class EntireProduct:
    """Regularized zero-product representation of an entire function of z.

    ``zeros[k-1]`` pairs with the k-th baseline slot; for mixed products a
    few entries are replacements from another sequence, recorded in
    ``replaced`` as (index, original_or_nan, replacement).
    """

    kind: BaselineKind
    a: float
    zeros: np.ndarray
    tail_shift: float = 0.0
    replaced: tuple[tuple[int, float, float], ...] = ()

    def __post_init__(self):
        zeros = np.asarray(self.zeros, dtype=float)
        object.__setattr__(self, "zeros", zeros)
        if self.a <= 0:
            raise ValidationError("interval length must be positive")
        if zeros.ndim != 1 or zeros.size == 0:
            raise ValidationError("need a non-empty zero sequence")
        if not np.all(np.isfinite(zeros)):
            raise ValidationError("zeros must be finite")

    # -- construction -----------------------------------------------------

    @classmethod
    def build(
        cls,
        kind: BaselineKind,
        a: float,
        zeros,
        tail_shift: float | str = "auto",
        replaced: tuple[tuple[int, float, float], ...] = (),
    ) -> "EntireProduct":
        zeros = np.asarray(zeros, dtype=float)
        if isinstance(tail_shift, str):
            if tail_shift != "auto":
                raise ValidationError(f"unknown tail_shift mode {tail_shift!r}")
            tail_shift = _auto_shift(kind, a, zeros, {r[0] for r in replaced})
        return cls(kind, a, zeros, float(tail_shift), tuple(replaced))

    @classmethod
    def from_sequence(cls, seq: SpectralSequence, tail_shift: float | str = "auto") -> "EntireProduct":
        return cls.build(_BRANCH_TO_BASELINE[seq.branch], seq.a, seq.values, tail_shift)

    @property
    def order(self) -> int:
        return self.zeros.size

    # -- baseline geometry -------------------------------------------------

    @property
    def _arg_length(self) -> float:
        return self.a if self.kind is BaselineKind.FULL_DD else 0.5 * self.a

    def slot(self, ks) -> np.ndarray:
        ks = np.asarray(ks, dtype=float)
        if self.kind is BaselineKind.FULL_DD:
            r = math.pi * ks / self.a
        elif self.kind is BaselineKind.HALF_DD:
            r = 2.0 * math.pi * ks / self.a
        else:
            r = math.pi * (2.0 * ks - 1.0) / self.a
        return r * r

    def slots(self) -> np.ndarray:
        return self.slot(np.arange(1, self.order + 1))

    def _slot_spacing(self) -> np.ndarray:
        s = np.concatenate([self.slots(), [self.slot(self.order + 1)]])
        gaps = np.diff(s)
        left = np.concatenate([[gaps[0]], gaps[:-1]])
        return np.minimum(left, gaps)

    def _baseline(self, w):
        L = self._arg_length
        if self.kind is BaselineKind.HALF_DN:
            return cosine_like(w, L)
        return sine_like(w, L)

    def _baseline_dz(self, w):
        L = self._arg_length
        if self.kind is BaselineKind.HALF_DN:
            return cosine_like_dz(w, L)
        return sine_like_dz(w, L)

    def _baseline_dz2(self, w):
        L = self._arg_length
        if self.kind is BaselineKind.HALF_DN:
            return cosine_like_dz2(w, L)
        return sine_like_dz2(w, L)

    def _deflated_baseline(self, w: float, j: int) -> float:
        """B(w)/(slot_j - w), stable across the removable cancellation."""
        sj = float(self.slot(j + 1))
        eps = w - sj
        spacing = float(self._slot_spacing()[j])
        if abs(eps) < _DEFLATE_CUT * spacing:
            return -(float(self._baseline_dz(sj)) + 0.5 * float(self._baseline_dz2(sj)) * eps)
        return float(self._baseline(w)) / (sj - w)

    def _guard_uncancelled_pole(self, w: np.ndarray) -> None:
        s_top = float(self.slot(self.order))
        beyond = np.asarray(w, dtype=float)
        beyond = beyond[beyond > s_top]
        if beyond.size == 0:
            return
        for m in range(self.order + 1, self.order + 64):
            sm = float(self.slot(m))
            gap = sm - float(self.slot(m - 1))
            hit = np.abs(beyond - sm) < _POLE_CUT * gap
            if np.any(hit):
                raise PoleAtBaselineZeroError(
                    f"z = {float(beyond[hit][0]) + self.tail_shift!r} hits baseline zero "
                    f"index {m} beyond truncation order {self.order}; increase the order"
                )
            if sm > float(np.max(beyond)) + gap:
                return

    # -- evaluation ---------------------------------------------------------

    def eval(self, z):
        """Value of the represented entire function at z (scalar or array)."""
        z_in = np.asarray(z, dtype=float)
        zv = np.atleast_1d(z_in).astype(float)
        w = zv - self.tail_shift
        self._guard_uncancelled_pole(w)
        s = self.slots()
        spacing = self._slot_spacing()
        numer = self.zeros[None, :] - zv[:, None]
        denom = s[None, :] - w[:, None]
        rel = np.abs(denom) / spacing[None, :]
        jmin = np.argmin(rel, axis=1)
        hit = rel[np.arange(zv.size), jmin] < _DEFLATE_CUT
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = numer / denom
        out = np.asarray(self._baseline(w)) * _row_products(ratio)
        for i in np.flatnonzero(hit):
            j = int(jmin[i])
            fact = self._deflated_baseline(float(w[i]), j)
            others = float(np.prod(np.delete(ratio[i], j)))
            out[i] = fact * (self.zeros[j] - zv[i]) * others
        return float(out[0]) if z_in.ndim == 0 else out

    def eval_deflated(self, k: int, z) -> float:
        """f(z)/(zeros_k - z): the product with the k-th zero factor removed."""
        self._check_index(k)
        j = k - 1
        zf = float(z)
        w = zf - self.tail_shift
        self._guard_uncancelled_pole(np.asarray([w]))
        s = self.slots()
        spacing = self._slot_spacing()
        dist = np.abs(s - w) / spacing
        i = int(np.argmin(dist))
        numer = self.zeros - zf
        denom = s - w
        if dist[i] < _DEFLATE_CUT:
            fact = self._deflated_baseline(w, i)
            if i == j:
                keep = np.delete(np.arange(self.order), j)
                return fact * float(np.prod(numer[keep] / denom[keep]))
            keep = np.delete(np.arange(self.order), [min(i, j), max(i, j)])
            return (
                fact
                * numer[i]
                / denom[j]
                * float(np.prod(numer[keep] / denom[keep]))
            )
        keep = np.delete(np.arange(self.order), j)
        return float(self._baseline(w)) / denom[j] * float(np.prod(numer[keep] / denom[keep]))

    def dz_at_zero(self, k: int) -> float:
        """d/dz of the function at its k-th zero (any real zero)."""
        self._check_index(k)
        return -self.eval_deflated(k, self.zeros[k - 1])

    def derivative_at_zero(self, k: int) -> float:
        """d/dlambda of lambda * f(lambda) at lambda = sqrt(zeros_k).

        The k-th zero square must be positive (shift the data otherwise).
        """
        self._check_index(k)
        zk = self.zeros[k - 1]
        if zk <= 0:
            raise ValidationError(
                f"zero {k} has square {zk!r} <= 0; apply a spectral shift before differentiating in lambda"
            )
        return 2.0 * zk * self.dz_at_zero(k)

    def eval_log_derivative(self, z: float) -> float:
        """d/dlambda log f at lambda = sqrt(z), for z > 0 away from zeros."""
        zf = float(z)
        if zf <= 0:
            raise ValidationError("lambda-logarithmic derivative needs z > 0")
        scale = np.maximum(1.0, np.abs(self.zeros))
        if np.any(np.abs(self.zeros - zf) <= 1e-9 * scale):
            raise EvaluationAtZeroError(f"z = {zf!r} is a zero of the product")
        w = zf - self.tail_shift
        self._guard_uncancelled_pole(np.asarray([w]))
        s = self.slots()
        spacing = self._slot_spacing()
        dist = np.abs(s - w) / spacing
        i = int(np.argmin(dist))
        zero_part = float(np.sum(1.0 / (self.zeros - zf)))
        if dist[i] < 1e-5:
            si = float(s[i])
            b1 = float(self._baseline_dz(si))
            b2 = float(self._baseline_dz2(si))
            reg = b2 / (2.0 * b1)
            rest = float(np.sum(1.0 / np.delete(s - w, i)))
            dlog_dz = reg + rest - zero_part
        else:
            bw = float(self._baseline(w))
            dlog_dz = float(self._baseline_dz(w)) / bw + float(np.sum(1.0 / (s - w))) - zero_part
        return 2.0 * math.sqrt(zf) * dlog_dz

    def _check_index(self, k: int) -> None:
        if not 1 <= k <= self.order:
            raise IndexOutOfTruncationError(
                f"zero index {k} outside truncation order {self.order}"
            )


def _row_products(ratio: np.ndarray) -> np.ndarray:
    with np.errstate(invalid="ignore", over="ignore"):
        return np.prod(ratio, axis=1)


def _auto_shift(kind: BaselineKind, a: float, zeros: np.ndarray, replaced_ks: set[int]) -> float:
    probe = EntireProduct(kind, a, zeros, 0.0)
    diffs = zeros - probe.slots()
    keep = np.array([k not in replaced_ks for k in range(1, zeros.size + 1)])
    diffs = diffs[keep]
    if diffs.size == 0:
        return 0.0
    m = max(3, diffs.size // 4)
    return float(np.mean(diffs[-m:]))


def assemble_zero_table(
    present_ks,
    present_values,
    replacements: dict[int, float],
    originals: dict[int, float] | None = None,
):
    """Merge a partial sequence with per-index replacements into a full table.

    Returns (zeros, replaced) ready for EntireProduct.build: index k takes
    the present value when available, else replacements[k].
    """
    present = dict(zip((int(k) for k in present_ks), (float(v) for v in present_values)))
    overlap = set(present) & set(replacements)
    if overlap:
        raise ValidationError(f"indices {sorted(overlap)} both present and replaced")
    total = len(present) + len(replacements)
    table = np.empty(total)
    replaced = []
    for k in range(1, total + 1):
        if k in present:
            table[k - 1] = present[k]
        elif k in replacements:
            orig = (originals or {}).get(k, math.nan)
            table[k - 1] = replacements[k]
            replaced.append((k, float(orig), float(replacements[k])))
        else:
            raise ValidationError(f"no value for index {k} in zero table")
    return table, tuple(replaced)
