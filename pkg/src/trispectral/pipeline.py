"""End-to-end drivers: forward spectra, reconstruction, and round trips.

All drivers work on files (JSON for structured data, CSV for tables) and
return the artifact dictionaries they wrote.  Timings go to the log only so
repeated runs produce byte-identical artifacts.
"""

from __future__ import annotations

import json
import logging
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .direct_solver import PotentialGrid, forward_all
from .errors import InputOutputError, ReconstructionError, ValidationError
from .functional_eq import complete_three_spectra
from .gl_inverse import reconstruct_potential_two_spectra
from .spectral_data import SpectraBundle, ThreeSpectraInput, validate_interlacing

logger = logging.getLogger("trispectral")


@dataclass(frozen=True)
class PipelineConfig:
    """Knobs shared by the drivers; defaults suit smooth potentials.

    The spectral shift used when node squares are non-positive is always
    automatic (smallest shift clearing zero by a unit margin), so it has no
    knob here; ``tol_coincidence`` guards the shifted frame.
    """

    num_eigenvalues: int = 60
    grid_cells: int = 2000
    gl_cells: int = 200
    n_out: int | None = None
    gl_terms: int | None = None
    gl_extend: int | None = None
    missing_nu1: tuple[int, ...] = ()
    missing_nu2: tuple[int, ...] = ()
    tol_root: float = 1e-12
    tol_residual: float = 1e-3
    tol_coincidence: float = 1e-9
    write_csv: bool = True

    def __post_init__(self):
        for name in ("num_eigenvalues", "grid_cells", "gl_cells"):
            if getattr(self, name) <= 0:
                raise ValidationError(f"{name} must be positive")
        for name in ("tol_root", "tol_residual", "tol_coincidence"):
            if not getattr(self, name) > 0.0:
                raise ValidationError(f"{name} must be positive")
        for name in ("missing_nu1", "missing_nu2"):
            ks = getattr(self, name)
            if any(k < 1 or k > self.num_eigenvalues for k in ks):
                raise ValidationError(
                    f"{name} indices must lie in 1..{self.num_eigenvalues}, got {ks}"
                )


def _read_json(path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputOutputError(f"cannot read JSON from {path}: {exc}") from exc


def _write_json(obj: dict, path) -> None:
    try:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(obj, fh, indent=2)
            fh.write("\n")
    except OSError as exc:
        raise InputOutputError(f"cannot write {path}: {exc}") from exc


def _write_text(text: str, path) -> None:
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise InputOutputError(f"cannot write {path}: {exc}") from exc


def load_potential(path) -> PotentialGrid:
    data = _read_json(path)
    try:
        return PotentialGrid.from_dict(data)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputOutputError(f"{path} is not a potential grid: {exc}") from exc


def _regrid(q: PotentialGrid, cells: int) -> PotentialGrid:
    """Resample a potential to the configured forward-solver grid."""
    if q.samples.size == cells + 1:
        return q
    xs = np.linspace(q.x0, q.x1, cells + 1)
    return PotentialGrid(q.x0, q.x1, np.interp(xs, q.x, q.samples))


def run_forward(cfg: PipelineConfig, q_path, out_path) -> dict:
    """Compute all five spectra of a gridded potential and write them."""
    q = _regrid(load_potential(q_path), cfg.grid_cells)
    t0 = time.perf_counter()
    bundle = forward_all(q, cfg.num_eigenvalues, tol_root=cfg.tol_root)
    logger.info("forward solve took %.2fs", time.perf_counter() - t0)
    report = bundle.validate()
    rim = bundle.classify()
    artifact = bundle.to_dict()
    artifact["interlacing"] = report.to_dict()
    artifact["regular_gap_count"] = rim.regular_count
    _write_json(artifact, out_path)
    if cfg.write_csv:
        _write_text(rim.to_csv(), Path(out_path).with_suffix(".gaps.csv"))
    return artifact


def load_reconstruction_input(path) -> ThreeSpectraInput:
    data = _read_json(path)
    try:
        return ThreeSpectraInput.from_dict(data)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputOutputError(f"{path} is not a reconstruction input: {exc}") from exc


def _assemble_full_potential(a: float, left: PotentialGrid, right: PotentialGrid) -> PotentialGrid:
    mid = 0.5 * (left.samples[-1] + right.samples[-1])
    samples = np.concatenate([left.samples[:-1], [mid], right.samples[::-1][1:]])
    return PotentialGrid(0.0, a, samples)


def reconstruct_from_input(cfg: PipelineConfig, inp: ThreeSpectraInput):
    """Completion plus the two half-interval inversions.

    Returns (potential on [0, a], CompletedSpectra, FunctionalEquationReport).
    The right half is reconstructed in reflected coordinates and flipped back.
    """
    t0 = time.perf_counter()
    completed, report, _, _ = complete_three_spectra(
        inp, n_out=cfg.n_out, tol_coincidence=cfg.tol_coincidence
    )
    logger.info("completion took %.2fs (rel residual %.3g)", time.perf_counter() - t0, report.rel_max)
    if report.rel_max > cfg.tol_residual:
        raise ReconstructionError(
            f"functional-equation residual {report.rel_max:.3g} exceeds "
            f"tol_residual={cfg.tol_residual:.3g}; completed spectra are not trustworthy"
        )
    ell = 0.5 * inp.a
    t0 = time.perf_counter()
    q_left, _ = reconstruct_potential_two_spectra(
        completed.nu1.values,
        completed.mu1.values,
        ell,
        cells=cfg.gl_cells,
        terms=cfg.gl_terms,
        extend_to=cfg.gl_extend,
    )
    q_right, _ = reconstruct_potential_two_spectra(
        completed.nu2.values,
        completed.mu2.values,
        ell,
        cells=cfg.gl_cells,
        terms=cfg.gl_terms,
        extend_to=cfg.gl_extend,
    )
    logger.info("half-interval inversions took %.2fs", time.perf_counter() - t0)
    return _assemble_full_potential(inp.a, q_left, q_right), completed, report


def _completed_verdict(inp: ThreeSpectraInput, completed) -> dict:
    """Interlacing check on the completed sequences against the full spectrum."""
    rep = validate_interlacing(
        inp.lambda_sq,
        completed.nu1.values,
        completed.nu2.values,
        completed.mu1.values,
        completed.mu2.values,
    )
    return rep.to_dict()


def run_reconstruct(cfg: PipelineConfig, spectra_path, out_path) -> dict:
    """Reconstruct a potential from a three-spectra input file.

    Writes the potential (JSON, plus CSV next to it), the completed spectra
    inside the JSON artifact, and the functional-equation residuals as CSV.
    """
    inp = load_reconstruction_input(spectra_path)
    grid, completed, report = reconstruct_from_input(cfg, inp)
    artifact = {
        "potential": grid.to_dict(),
        "completed_spectra": completed.to_dict(),
        "residual_summary": report.to_dict(),
        "completed_interlacing": _completed_verdict(inp, completed),
    }
    _write_json(artifact, out_path)
    if cfg.write_csv:
        _write_text(grid.to_csv(), Path(out_path).with_suffix(".csv"))
        _write_text(report.to_csv(), Path(out_path).with_suffix(".residuals.csv"))
    return artifact


def _interp_to(grid: PotentialGrid, xs: np.ndarray) -> np.ndarray:
    return np.interp(xs, grid.x, grid.samples)


def run_roundtrip(cfg: PipelineConfig, q_path, out_path) -> dict:
    """Forward solve, withhold the configured indices, reconstruct, compare.

    The written artifact is deterministic; wall-clock runtimes are appended
    to the returned dict only (and logged), never to the file.
    """
    q = _regrid(load_potential(q_path), cfg.grid_cells)
    if not cfg.missing_nu1 and not cfg.missing_nu2:
        raise ValidationError("round trip needs at least one withheld index per convention")
    t_fwd = time.perf_counter()
    bundle = forward_all(q, cfg.num_eigenvalues, tol_root=cfg.tol_root)
    t_fwd = time.perf_counter() - t_fwd
    forward_verdict = bundle.validate()
    inp = bundle.withhold(cfg.missing_nu1, cfg.missing_nu2)
    t_rec = time.perf_counter()
    grid, completed, report = reconstruct_from_input(cfg, inp)
    t_rec = time.perf_counter() - t_rec

    q_true = _interp_to(q, grid.x)
    diff = grid.samples - q_true
    h = grid.h
    l2 = float(np.sqrt(np.trapezoid(diff * diff, dx=h)))
    recovered = {"nu1": {}, "nu2": {}}
    for k, val in completed.recovered_nu1.items():
        truth = float(bundle.nu1.values[k - 1])
        recovered["nu1"][str(k)] = {"true": truth, "recovered": float(val), "abs_err": abs(val - truth)}
    for k, val in completed.recovered_nu2.items():
        truth = float(bundle.nu2.values[k - 1])
        recovered["nu2"][str(k)] = {"true": truth, "recovered": float(val), "abs_err": abs(val - truth)}
    artifact = {
        "l2_error": l2,
        "max_error": float(np.max(np.abs(diff))),
        "residual_rel_max": report.rel_max,
        "recovered_eigenvalues": recovered,
        "forward_interlacing_ok": forward_verdict.ok,
        "completed_interlacing": _completed_verdict(inp, completed),
        "potential": grid.to_dict(),
        "potential_true_on_grid": [float(v) for v in q_true],
    }
    _write_json(artifact, out_path)
    logger.info("roundtrip timings: forward %.2fs, reconstruction %.2fs", t_fwd, t_rec)
    return {**artifact, "runtimes_sec": {"forward": t_fwd, "reconstruct": t_rec}}


def run_validate(cfg: PipelineConfig, path) -> dict:
    """Interlacing and gap checks for a spectra file (bundle or input).

    A file with all five sequences is a forward-solver bundle; one with the
    three Dirichlet sequences only is a reconstruction input.
    """
    data = _read_json(path)
    branches = {s.get("branch") for s in data.get("sequences", ())}
    if "half_dn_left" not in branches:
        inp = load_reconstruction_input(path)
        inp.validate()
        return {"kind": "three_spectra_input", "ok": True}
    try:
        bundle = SpectraBundle.from_dict(data)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputOutputError(f"{path} is neither a bundle nor an input: {exc}") from exc
    report = bundle.validate()
    rim = bundle.classify()
    out = {
        "kind": "spectra_bundle",
        "ok": report.ok,
        "interlacing": report.to_dict(),
        "regular_gap_count": rim.regular_count,
    }
    if not report.ok:
        raise ValidationError(f"interlacing violations: {report.summary()}")
    return out
