"""Command-line interface.

Subcommands: forward, reconstruct, roundtrip, validate.  Exit codes:
0 success, 2 validation failure, 3 reconstruction failure, 4 I/O failure.
Set TRISPECTRAL_LOG=debug|info|... to see stage logs and timings.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys

from .errors import InputOutputError, ReconstructionError, ValidationError
from .pipeline import (
    PipelineConfig,
    run_forward,
    run_reconstruct,
    run_roundtrip,
    run_validate,
)

_LOG_LEVELS = {"debug": logging.DEBUG, "info": logging.INFO, "warning": logging.WARNING}


def _parse_indices(text: str) -> tuple[int, ...]:
    if not text:
        return ()
    try:
        out = tuple(sorted({int(tok) for tok in text.split(",") if tok.strip()}))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad index list {text!r}") from exc
    if any(k < 1 for k in out):
        raise argparse.ArgumentTypeError("indices are 1-based")
    return out


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="trispectral",
        description="Forward and inverse Sturm-Liouville spectra on an interval "
        "split at its midpoint (three-spectra reconstruction).",
    )
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, output=True):
        sp.add_argument("--input", required=True, help="input file (JSON)")
        if output:
            sp.add_argument("--output", required=True, help="output file (JSON)")
        sp.add_argument("--num-eigenvalues", type=int, default=60, metavar="K")
        sp.add_argument("--grid", type=int, default=2000, help="forward solver cells")
        sp.add_argument("--gl-grid", type=int, default=200, help="inverse kernel cells per half")
        sp.add_argument("--gl-terms", type=int, default=None, help="series terms per half inversion")
        sp.add_argument("--gl-extend", type=int, default=None, help="series length after tail model")
        sp.add_argument("--n-out", type=int, default=None, help="completed eigenvalues per DN spectrum")
        sp.add_argument("--tol-root", type=float, default=1e-12)
        sp.add_argument("--tol-residual", type=float, default=1e-3,
                        help="abort reconstruction above this relative residual")
        sp.add_argument("--tol-coincidence", type=float, default=1e-9,
                        help="minimum relative gap between half-interval spectra")
        sp.add_argument("--missing-nu1", type=_parse_indices, default=(), metavar="K1,K2,...")
        sp.add_argument("--missing-nu2", type=_parse_indices, default=(), metavar="K1,K2,...")
        sp.add_argument(
            "--format",
            choices=("json", "json+csv"),
            default="json+csv",
            help="whether to write CSV tables next to the JSON artifacts",
        )

    common(sub.add_parser("forward", help="all five spectra of a gridded potential"))
    common(sub.add_parser("reconstruct", help="potential from a three-spectra input"))
    common(sub.add_parser("roundtrip", help="forward, withhold, reconstruct, compare"))
    common(sub.add_parser("validate", help="interlacing checks for a spectra file"), output=False)
    return p


def _config(ns: argparse.Namespace) -> PipelineConfig:
    return PipelineConfig(
        num_eigenvalues=ns.num_eigenvalues,
        grid_cells=ns.grid,
        gl_cells=ns.gl_grid,
        n_out=ns.n_out,
        gl_terms=ns.gl_terms,
        gl_extend=ns.gl_extend,
        missing_nu1=ns.missing_nu1,
        missing_nu2=ns.missing_nu2,
        tol_root=ns.tol_root,
        tol_residual=ns.tol_residual,
        tol_coincidence=ns.tol_coincidence,
        write_csv=ns.format == "json+csv",
    )


def main(argv=None) -> int:
    level = _LOG_LEVELS.get(os.environ.get("TRISPECTRAL_LOG", "").lower())
    if level is not None:
        logging.basicConfig(level=level, format="%(name)s %(levelname)s %(message)s")
    ns = build_parser().parse_args(argv)
    try:
        cfg = _config(ns)
        if ns.command == "forward":
            art = run_forward(cfg, ns.input, ns.output)
            print(f"wrote {ns.output}: {len(art['sequences'])} sequences, "
                  f"interlacing ok={art['interlacing']['ok']}")
        elif ns.command == "reconstruct":
            art = run_reconstruct(cfg, ns.input, ns.output)
            print(f"wrote {ns.output}: residual rel max "
                  f"{art['residual_summary']['rel_max']:.3g}")
        elif ns.command == "roundtrip":
            art = run_roundtrip(cfg, ns.input, ns.output)
            print(f"wrote {ns.output}: L2 error {art['l2_error']:.3g}, "
                  f"max error {art['max_error']:.3g}")
        else:
            out = run_validate(cfg, ns.input)
            print(f"{ns.input}: ok ({out['kind']})")
    except ValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return 2
    except ReconstructionError as exc:
        print(f"reconstruction error: {exc}", file=sys.stderr)
        return 3
    except InputOutputError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 4
    return 0


if __name__ == "__main__":
    sys.exit(main())
