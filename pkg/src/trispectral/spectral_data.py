"""Containers and consistency checks for eigenvalue-square sequences.

The package works with five interrelated spectra of one potential q on
[0, a]: the Dirichlet spectrum of the whole interval, plus Dirichlet and
Dirichlet-Neumann spectra of each half.  The right half is always expressed
in reflected coordinates (potential q(a - x) on [0, a/2]), so both halves
share the same slot asymptotics.

Everything is stored as squares z = lambda**2 in increasing order.  Indexing
is 1-based throughout to match the slot formulas.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from .errors import (
    AmbiguousGapError,
    MismatchedLengthError,
    NearCoincidentSpectraError,
    NegativeSquareTailError,
    NoRegularIntervalsError,
    ValidationError,
)


class Branch(str, Enum):
    """Which boundary-value problem a sequence belongs to."""

    FULL_DD = "full_dd"
    HALF_DD_LEFT = "half_dd_left"
    HALF_DD_RIGHT = "half_dd_right"
    HALF_DN_LEFT = "half_dn_left"
    HALF_DN_RIGHT = "half_dn_right"

    @property
    def is_half(self) -> bool:
        return self is not Branch.FULL_DD

    @property
    def is_neumann(self) -> bool:
        return self in (Branch.HALF_DN_LEFT, Branch.HALF_DN_RIGHT)


def slot_roots(branch: Branch, a: float, ks) -> np.ndarray:
    """Asymptotic sqrt-eigenvalue positions for 1-based indices ``ks``."""
    ks = np.asarray(ks, dtype=float)
    if branch is Branch.FULL_DD:
        return math.pi * ks / a
    if branch.is_neumann:
        return math.pi * (2.0 * ks - 1.0) / a
    return 2.0 * math.pi * ks / a


@dataclass(frozen=True)
class SpectralSequence:
    """A finite increasing prefix of one spectrum, stored as squares."""

    branch: Branch
    a: float
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", vals)
        if self.a <= 0:
            raise ValidationError(f"interval length must be positive, got {self.a}")
        if vals.ndim != 1:
            raise ValidationError("sequence values must be one-dimensional")
        if not np.all(np.isfinite(vals)):
            raise ValidationError("sequence contains non-finite squares")
        if vals.size > 1 and not np.all(np.diff(vals) > 0):
            raise ValidationError(f"{self.branch.value} squares are not strictly increasing")

    def __len__(self) -> int:
        return self.values.size

    @property
    def ks(self) -> np.ndarray:
        return np.arange(1, self.values.size + 1)

    def slot_roots(self) -> np.ndarray:
        return slot_roots(self.branch, self.a, self.ks)

    def slots(self) -> np.ndarray:
        return self.slot_roots() ** 2

    def prefix(self, n: int) -> "SpectralSequence":
        return replace(self, values=self.values[:n])

    def shifted(self, c: float) -> "SpectralSequence":
        return replace(self, values=self.values + c)

    def to_dict(self) -> dict:
        return {"branch": self.branch.value, "squares": [float(v) for v in self.values]}

    @classmethod
    def from_dict(cls, d: dict, a: float) -> "SpectralSequence":
        return cls(Branch(d["branch"]), a, np.asarray(d["squares"], dtype=float))


# ---------------------------------------------------------------------------
# interlacing checks


@dataclass(frozen=True)
class Violation:
    check: str
    index: int
    lhs: float
    rhs: float
    detail: str


@dataclass(frozen=True)
class InterlacingReport:
    violations: tuple[Violation, ...]
    checks_run: int

    @property
    def ok(self) -> bool:
        return not self.violations

    def summary(self) -> str:
        if self.ok:
            return f"interlacing ok ({self.checks_run} comparisons)"
        lines = [f"{len(self.violations)} interlacing violations:"]
        lines += [
            f"  [{v.check}] k={v.index}: {v.lhs:.12g} !< {v.rhs:.12g} ({v.detail})"
            for v in self.violations
        ]
        return "\n".join(lines)

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "checks_run": self.checks_run,
            "violations": [
                {"check": v.check, "index": v.index, "lhs": v.lhs, "rhs": v.rhs, "detail": v.detail}
                for v in self.violations
            ],
        }


def _merged_prefix(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Merge two increasing prefixes, keeping only the trustworthy range.

    Values above min(max(x), max(y)) could be displaced by unseen members of
    the shorter sequence, so the merge is truncated there.
    """
    cover = min(x[-1], y[-1])
    merged = np.sort(np.concatenate([x, y]))
    return merged[merged <= cover]


def validate_interlacing(
    lam: np.ndarray,
    nu1: np.ndarray,
    nu2: np.ndarray,
    mu1: np.ndarray,
    mu2: np.ndarray,
    tol: float = 1e-9,
) -> InterlacingReport:
    """Check the interlacing laws tying the five sequences together.

    ``lam`` is the full-interval Dirichlet spectrum; ``nu``/``mu`` are the
    half-interval Dirichlet and Dirichlet-Neumann spectra (squares, full
    prefixes).  Records a violation whenever an inequality fails by more than
    ``tol`` times the local scale; returns a report rather than raising so
    callers can decide severity.
    """
    seqs = {"lambda": lam, "nu1": nu1, "nu2": nu2, "mu1": mu1, "mu2": mu2}
    for name, s in seqs.items():
        if np.asarray(s).size == 0:
            raise MismatchedLengthError(f"sequence {name} is empty")
    lam, nu1, nu2, mu1, mu2 = (np.asarray(s, dtype=float) for s in (lam, nu1, nu2, mu1, mu2))
    if lam.size < 2:
        raise MismatchedLengthError("need at least two full-interval eigenvalues")

    violations: list[Violation] = []
    checks = 0

    def expect_less(check, idx, lhs, rhs, detail, strict=True):
        nonlocal checks
        checks += 1
        slack = tol * max(1.0, abs(lhs), abs(rhs))
        bad = (lhs >= rhs + slack) if strict else (lhs > rhs + slack)
        if bad:
            violations.append(Violation(check, idx, float(lhs), float(rhs), detail))

    # Dirichlet-Neumann alternation within each half
    for name, nu, mu in (("left", nu1, mu1), ("right", nu2, mu2)):
        n = min(nu.size, mu.size)
        for k in range(n):
            expect_less(f"alternation_{name}", k + 1, mu[k], nu[k], "mu_k < nu_k")
            if k + 1 < mu.size and k < nu.size:
                expect_less(f"alternation_{name}", k + 1, nu[k], mu[k + 1], "nu_k < mu_(k+1)")

    # merged half-Dirichlet points fill the full-spectrum gaps one per gap
    theta = _merged_prefix(nu1, nu2)
    if theta.size:
        expect_less("theta_gaps", 1, lam[0], theta[0], "lambda_1 < theta_1")
        n = min(theta.size - 1, lam.size - 1)
        for k in range(n):
            expect_less("theta_gaps", k + 1, theta[k], lam[k + 1], "theta_k <= lambda_(k+1)", strict=False)
            expect_less("theta_gaps", k + 2, lam[k + 1], theta[k + 1], "lambda_(k+1) <= theta_(k+1)", strict=False)

    # merged Dirichlet-Neumann points interlace from below
    tau = _merged_prefix(mu1, mu2)
    if tau.size:
        expect_less("tau_gaps", 1, tau[0], lam[0], "tau_1 <= lambda_1", strict=False)
        n = min(tau.size - 1, lam.size)
        for k in range(n):
            expect_less("tau_gaps", k + 1, lam[k], tau[k + 1], "lambda_k <= tau_(k+1)", strict=False)
            if k + 1 < lam.size:
                expect_less("tau_gaps", k + 2, tau[k + 1], lam[k + 1], "tau_(k+1) <= lambda_(k+1)", strict=False)

    if checks == 0:
        raise MismatchedLengthError("sequences too short to compare")
    return InterlacingReport(tuple(violations), checks)


# ---------------------------------------------------------------------------
# gap classification


@dataclass(frozen=True)
class GapInfo:
    """One gap between consecutive full-interval eigenvalue squares."""

    index: int
    lo: float
    hi: float
    points: tuple[tuple[str, int, float], ...]  # (label, 1-based index, square)
    regular: bool
    case: str | None

    def count(self, label: str) -> int:
        return sum(1 for p in self.points if p[0] == label)


@dataclass(frozen=True)
class RegularIntervalMap:
    """Classification of every full-spectrum gap by what it contains."""

    gaps: tuple[GapInfo, ...]

    def gap_containing(self, value: float) -> GapInfo | None:
        for g in self.gaps:
            if g.lo < value < g.hi:
                return g
        return None

    @property
    def regular_count(self) -> int:
        return sum(1 for g in self.gaps if g.regular)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["gap", "z_lo", "z_hi", "n_nu1", "n_nu2", "n_mu1", "n_mu2", "regular", "case"])
        for g in self.gaps:
            w.writerow(
                [
                    g.index,
                    repr(g.lo),
                    repr(g.hi),
                    g.count("nu1"),
                    g.count("nu2"),
                    g.count("mu1"),
                    g.count("mu2"),
                    int(g.regular),
                    g.case or "",
                ]
            )
        return buf.getvalue()


def classify_gaps(lam: np.ndarray, labeled: dict[str, list[tuple[int, float]]], tol: float = 1e-9) -> RegularIntervalMap:
    """Classify gaps of ``lam`` given labeled points with explicit indices.

    ``labeled`` maps a label ("nu1", "mu2", ...) to (index, square) pairs;
    partial sequences are fine.  A point within ``tol`` (times local scale)
    of a gap endpoint raises AmbiguousGapError, since its gap assignment
    would not be trustworthy.
    """
    lam = np.asarray(lam, dtype=float)
    if lam.size < 2:
        raise MismatchedLengthError("need at least two full-interval eigenvalues to form gaps")
    # gap 0 is the half line below the first eigenvalue
    bounds = np.concatenate([[-np.inf], lam])
    gaps = []
    for g in range(bounds.size - 1):
        lo, hi = bounds[g], bounds[g + 1]
        pts = []
        for label, pairs in labeled.items():
            for k, v in pairs:
                scale = max(1.0, abs(hi), abs(lo) if np.isfinite(lo) else 0.0)
                near_lo = np.isfinite(lo) and abs(v - lo) <= tol * scale
                if near_lo or abs(v - hi) <= tol * scale:
                    raise AmbiguousGapError(
                        f"{label}_{k} = {v!r} sits on a gap endpoint of ({lo!r}, {hi!r})"
                    )
                if lo < v < hi:
                    pts.append((label, k, float(v)))
        pts.sort(key=lambda p: p[2])
        case = None
        if len(pts) == 2:
            labels = sorted(p[0] for p in pts)
            if labels == ["mu1", "nu2"]:
                case = "mu1_nu2"
            elif labels == ["mu2", "nu1"]:
                case = "mu2_nu1"
        gaps.append(GapInfo(g, float(lo), float(hi), tuple(pts), case is not None, case))
    return RegularIntervalMap(tuple(gaps))


def classify_regular_intervals(
    lam: np.ndarray,
    nu1: np.ndarray,
    nu2: np.ndarray,
    mu1: np.ndarray,
    mu2: np.ndarray,
    tol: float = 1e-9,
) -> RegularIntervalMap:
    """Classify the gaps of the full spectrum using full half-spectra prefixes."""
    labeled = {
        name: [(i + 1, float(v)) for i, v in enumerate(np.asarray(seq, dtype=float))]
        for name, seq in (("nu1", nu1), ("nu2", nu2), ("mu1", mu1), ("mu2", mu2))
    }
    return classify_gaps(lam, labeled, tol)


# ---------------------------------------------------------------------------
# mean-potential extrapolation


def extrapolate_mean(ks: np.ndarray, values: np.ndarray, branch: Branch, a: float):
    """Extrapolate the half-integral of the potential from square asymptotics.

    For indices k with positive squares forms a_k = pi k (sqrt(z_k) - slot_k),
    which tends to the half-integral A of the potential over the problem's
    interval.  The extrapolation runs in slot-index space (k for Dirichlet
    slots, k - 1/2 for DN slots), where the error expansion starts at the
    inverse square; one weighted Richardson step removes that term and the
    tail of the extrapolants is averaged to damp oscillatory remainders.

    Returns (A, residuals) where residuals are a_k - A over the used indices.
    """
    ks = np.asarray(ks, dtype=int)
    values = np.asarray(values, dtype=float)
    if ks.size != values.size or ks.size == 0:
        raise MismatchedLengthError("need matching non-empty index and value arrays")
    bad = (values <= 0) & (ks > 3)
    if np.any(bad):
        raise NegativeSquareTailError(
            f"non-positive squares at indices {ks[bad].tolist()} (only the first few may dip below zero)"
        )
    keep = values > 0
    ks, values = ks[keep], values[keep]
    if ks.size == 0:
        raise NegativeSquareTailError("no positive squares to extrapolate from")

    roots = np.sqrt(values)
    slots = slot_roots(branch, a, ks)
    a_k = math.pi * ks * (roots - slots)

    # extrapolate in slot-index space, where the leading correction is
    # 1/kappa^2 for every branch; one weighted Richardson step kills it
    L = float(a) if branch is Branch.FULL_DD else 0.5 * float(a)
    kappa = slots * L / math.pi
    b_k = math.pi * kappa * (roots - slots)
    if b_k.size >= 2:
        w = kappa**2
        rich = (w[1:] * b_k[1:] - w[:-1] * b_k[:-1]) / (w[1:] - w[:-1])
        m = max(3, rich.size // 4)
        est = float(np.mean(rich[-m:]))
    else:
        est = float(b_k[-1])
    return est, a_k - est


def estimate_mean_potential(seq: SpectralSequence):
    """Mean-potential extrapolation for a full sequence prefix.

    Returns (A, residuals) with A approximating half the integral of the
    potential over the sequence's interval.
    """
    return extrapolate_mean(seq.ks, seq.values, seq.branch, seq.a)


# ---------------------------------------------------------------------------
# input bundles


def _as_int_tuple(xs) -> tuple[int, ...]:
    return tuple(sorted(int(x) for x in xs))


@dataclass(frozen=True)
class ThreeSpectraInput:
    """Reconstruction input: full spectrum plus depleted half data.

    ``nu1_ks``/``nu1_sq`` hold the surviving left half-Dirichlet entries (the
    indices in ``missing_nu1`` were withheld); for each withheld index the
    right Dirichlet-Neumann square at the same index is supplied in
    ``subst_mu2``.  Mirror conventions apply on the other side.
    """

    a: float
    lambda_sq: np.ndarray
    nu1_ks: np.ndarray
    nu1_sq: np.ndarray
    nu2_ks: np.ndarray
    nu2_sq: np.ndarray
    missing_nu1: tuple[int, ...] = ()
    missing_nu2: tuple[int, ...] = ()
    subst_mu2: dict[int, float] = field(default_factory=dict)
    subst_mu1: dict[int, float] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "lambda_sq", np.asarray(self.lambda_sq, dtype=float))
        object.__setattr__(self, "nu1_ks", np.asarray(self.nu1_ks, dtype=int))
        object.__setattr__(self, "nu1_sq", np.asarray(self.nu1_sq, dtype=float))
        object.__setattr__(self, "nu2_ks", np.asarray(self.nu2_ks, dtype=int))
        object.__setattr__(self, "nu2_sq", np.asarray(self.nu2_sq, dtype=float))
        object.__setattr__(self, "missing_nu1", _as_int_tuple(self.missing_nu1))
        object.__setattr__(self, "missing_nu2", _as_int_tuple(self.missing_nu2))
        object.__setattr__(self, "subst_mu2", {int(k): float(v) for k, v in self.subst_mu2.items()})
        object.__setattr__(self, "subst_mu1", {int(k): float(v) for k, v in self.subst_mu1.items()})
        if set(self.subst_mu2) != set(self.missing_nu1):
            raise MismatchedLengthError("substituted right DN indices must match missing_nu1")
        if set(self.subst_mu1) != set(self.missing_nu2):
            raise MismatchedLengthError("substituted left DN indices must match missing_nu2")
        for ks, sq, miss, name in (
            (self.nu1_ks, self.nu1_sq, self.missing_nu1, "nu1"),
            (self.nu2_ks, self.nu2_sq, self.missing_nu2, "nu2"),
        ):
            if ks.size != sq.size:
                raise MismatchedLengthError(f"{name}: index and square arrays differ in length")
            if set(ks.tolist()) & set(miss):
                raise MismatchedLengthError(f"{name}: an index is both present and missing")

    @property
    def k1_total(self) -> int:
        return self.nu1_ks.size + len(self.missing_nu1)

    @property
    def k2_total(self) -> int:
        return self.nu2_ks.size + len(self.missing_nu2)

    def shifted(self, c: float) -> "ThreeSpectraInput":
        return ThreeSpectraInput(
            a=self.a,
            lambda_sq=self.lambda_sq + c,
            nu1_ks=self.nu1_ks,
            nu1_sq=self.nu1_sq + c,
            nu2_ks=self.nu2_ks,
            nu2_sq=self.nu2_sq + c,
            missing_nu1=self.missing_nu1,
            missing_nu2=self.missing_nu2,
            subst_mu2={k: v + c for k, v in self.subst_mu2.items()},
            subst_mu1={k: v + c for k, v in self.subst_mu1.items()},
        )

    def swapped(self) -> "ThreeSpectraInput":
        """Relabel the halves (left <-> right); the full spectrum is shared."""
        return ThreeSpectraInput(
            a=self.a,
            lambda_sq=self.lambda_sq,
            nu1_ks=self.nu2_ks,
            nu1_sq=self.nu2_sq,
            nu2_ks=self.nu1_ks,
            nu2_sq=self.nu1_sq,
            missing_nu1=self.missing_nu2,
            missing_nu2=self.missing_nu1,
            subst_mu2=dict(self.subst_mu1),
            subst_mu1=dict(self.subst_mu2),
        )

    def validate(self, tol: float = 1e-9) -> None:
        """Raise on data that cannot belong to one reconstruction problem."""
        min_gap = np.inf
        both = np.concatenate([self.nu1_sq, self.nu2_sq])
        if both.size >= 2:
            s = np.sort(both)
            min_gap = float(np.min(np.diff(s)))
            scale = max(1.0, float(np.max(np.abs(s))))
            if min_gap <= tol * scale:
                raise NearCoincidentSpectraError(
                    f"half-Dirichlet spectra nearly coincide (gap {min_gap:.3g}); "
                    "the two halves must have disjoint Dirichlet spectra"
                )
        labeled = {
            "nu1": list(zip(self.nu1_ks.tolist(), self.nu1_sq.tolist())),
            "nu2": list(zip(self.nu2_ks.tolist(), self.nu2_sq.tolist())),
            "mu1": list(self.subst_mu1.items()),
            "mu2": list(self.subst_mu2.items()),
        }
        rim = classify_gaps(self.lambda_sq, labeled, tol)
        # each substituted DN square must sit in a regular-compatible gap:
        # no Dirichlet square of its own half, at most one of the other
        # half, and no second substituted value
        for label, subst in (("mu2", self.subst_mu2), ("mu1", self.subst_mu1)):
            own_nu = "nu2" if label == "mu2" else "nu1"
            for k, v in subst.items():
                g = rim.gap_containing(v)
                if g is None:
                    raise NoRegularIntervalsError(
                        f"substituted {label}_{k} = {v!r} lies outside every full-spectrum gap"
                    )
                if g.index == 0:
                    raise NoRegularIntervalsError(
                        f"substituted {label}_{k} = {v!r} lies below the first full-interval "
                        "eigenvalue; no such gap can host the withheld Dirichlet square"
                    )
                own = [p for p in g.points if p[0] == own_nu]
                if own:
                    raise NoRegularIntervalsError(
                        f"gap {g.index} hosting substituted {label}_{k} contains the "
                        f"same-half Dirichlet square {own_nu}_{own[0][1]}; the gap is not regular"
                    )
                other_mu = [
                    p for p in g.points if p[0] in ("mu1", "mu2") and (p[0], p[1]) != (label, k)
                ]
                if other_mu:
                    raise NoRegularIntervalsError(
                        f"gap {g.index} hosts two substituted DN squares "
                        f"({label}_{k} and {other_mu[0][0]}_{other_mu[0][1]}); "
                        "a full-spectrum gap carries at most one DN square"
                    )
                partner = "nu1" if label == "mu2" else "nu2"
                partners = [p for p in g.points if p[0] == partner]
                if len(partners) > 1:
                    raise NoRegularIntervalsError(
                        f"gap {g.index} hosting substituted {label}_{k} contains "
                        f"{len(partners)} squares of {partner}; interlacing allows one"
                    )

    def to_dict(self) -> dict:
        return {
            "a": float(self.a),
            "sequences": [
                {"branch": Branch.FULL_DD.value, "squares": [float(v) for v in self.lambda_sq]},
                {"branch": Branch.HALF_DD_LEFT.value, "squares": [float(v) for v in self.nu1_sq]},
                {"branch": Branch.HALF_DD_RIGHT.value, "squares": [float(v) for v in self.nu2_sq]},
            ],
            "missing_indices": {
                "nu1": list(self.missing_nu1),
                "nu2": list(self.missing_nu2),
            },
            "substituted": {
                "mu2": {str(k): float(v) for k, v in sorted(self.subst_mu2.items())},
                "mu1": {str(k): float(v) for k, v in sorted(self.subst_mu1.items())},
            },
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ThreeSpectraInput":
        a = float(d["a"])
        seqs = {s["branch"]: np.asarray(s["squares"], dtype=float) for s in d["sequences"]}
        for needed in (Branch.FULL_DD.value, Branch.HALF_DD_LEFT.value, Branch.HALF_DD_RIGHT.value):
            if needed not in seqs:
                raise MismatchedLengthError(f"input lacks required sequence {needed}")
        missing = d.get("missing_indices", {})
        n1 = _as_int_tuple(missing.get("nu1", ()))
        n2 = _as_int_tuple(missing.get("nu2", ()))
        subst = d.get("substituted", {})
        mu2 = {int(k): float(v) for k, v in subst.get("mu2", {}).items()}
        mu1 = {int(k): float(v) for k, v in subst.get("mu1", {}).items()}
        nu1_sq = seqs[Branch.HALF_DD_LEFT.value]
        nu2_sq = seqs[Branch.HALF_DD_RIGHT.value]
        nu1_ks = _present_indices(nu1_sq.size, n1)
        nu2_ks = _present_indices(nu2_sq.size, n2)
        return cls(
            a=a,
            lambda_sq=seqs[Branch.FULL_DD.value],
            nu1_ks=nu1_ks,
            nu1_sq=nu1_sq,
            nu2_ks=nu2_ks,
            nu2_sq=nu2_sq,
            missing_nu1=n1,
            missing_nu2=n2,
            subst_mu2=mu2,
            subst_mu1=mu1,
        )


def _present_indices(n_present: int, missing: tuple[int, ...]) -> np.ndarray:
    total = n_present + len(missing)
    if missing and (min(missing) < 1 or max(missing) > total):
        raise MismatchedLengthError(f"missing indices {missing} exceed total count {total}")
    return np.array([k for k in range(1, total + 1) if k not in set(missing)], dtype=int)


@dataclass(frozen=True)
class SpectraBundle:
    """All five sequences of one potential, as produced by the forward solver."""

    a: float
    lam: SpectralSequence
    nu1: SpectralSequence
    nu2: SpectralSequence
    mu1: SpectralSequence
    mu2: SpectralSequence

    def validate(self, tol: float = 1e-9) -> InterlacingReport:
        return validate_interlacing(
            self.lam.values, self.nu1.values, self.nu2.values, self.mu1.values, self.mu2.values, tol
        )

    def classify(self, tol: float = 1e-9) -> RegularIntervalMap:
        return classify_regular_intervals(
            self.lam.values, self.nu1.values, self.nu2.values, self.mu1.values, self.mu2.values, tol
        )

    def withhold(self, missing_nu1, missing_nu2) -> ThreeSpectraInput:
        """Drop the given half-Dirichlet indices, substituting DN squares."""
        n1 = _as_int_tuple(missing_nu1)
        n2 = _as_int_tuple(missing_nu2)
        for k in n1:
            if k > len(self.nu1) or k > len(self.mu2):
                raise MismatchedLengthError(f"cannot withhold nu1_{k}: sequences too short")
        for k in n2:
            if k > len(self.nu2) or k > len(self.mu1):
                raise MismatchedLengthError(f"cannot withhold nu2_{k}: sequences too short")
        keep1 = np.array([k for k in range(1, len(self.nu1) + 1) if k not in set(n1)], dtype=int)
        keep2 = np.array([k for k in range(1, len(self.nu2) + 1) if k not in set(n2)], dtype=int)
        return ThreeSpectraInput(
            a=self.a,
            lambda_sq=self.lam.values,
            nu1_ks=keep1,
            nu1_sq=self.nu1.values[keep1 - 1],
            nu2_ks=keep2,
            nu2_sq=self.nu2.values[keep2 - 1],
            missing_nu1=n1,
            missing_nu2=n2,
            subst_mu2={k: float(self.mu2.values[k - 1]) for k in n1},
            subst_mu1={k: float(self.mu1.values[k - 1]) for k in n2},
        )

    def to_dict(self) -> dict:
        return {
            "a": float(self.a),
            "sequences": [
                self.lam.to_dict(),
                self.nu1.to_dict(),
                self.nu2.to_dict(),
                self.mu1.to_dict(),
                self.mu2.to_dict(),
            ],
            "missing_indices": {"nu1": [], "nu2": []},
            "substituted": {"mu2": {}, "mu1": {}},
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SpectraBundle":
        a = float(d["a"])
        by_branch = {}
        for s in d["sequences"]:
            seq = SpectralSequence.from_dict(s, a)
            by_branch[seq.branch] = seq
        try:
            return cls(
                a=a,
                lam=by_branch[Branch.FULL_DD],
                nu1=by_branch[Branch.HALF_DD_LEFT],
                nu2=by_branch[Branch.HALF_DD_RIGHT],
                mu1=by_branch[Branch.HALF_DN_LEFT],
                mu2=by_branch[Branch.HALF_DN_RIGHT],
            )
        except KeyError as e:
            raise MismatchedLengthError(f"bundle lacks sequence for branch {e}") from e


def dump_json(obj: dict, path) -> None:
    with open(path, "w") as f:
        json.dump(obj, f, indent=2, sort_keys=False)
        f.write("\n")


def load_json(path) -> dict:
    with open(path) as f:
        return json.load(f)
