"""File-based drivers and the command-line front end.

One smooth asymmetric potential is shared by the whole module; the expensive
commands (forward, reconstruct, roundtrip) each run once in a fixture and
several tests pick the results apart.  Exit-code paths that fail early are
exercised directly since they cost nothing.
"""

import json
import math

import numpy as np
import pytest

from trispectral.cli import main
from trispectral.direct_solver import PotentialGrid
from trispectral.errors import ValidationError
from trispectral.pipeline import (
    PipelineConfig,
    run_roundtrip,
    run_validate,
)
from trispectral.spectral_data import SpectraBundle

A = math.pi
CELLS = 512
K = 50


def _q(x):
    return 0.5 + 0.4 * np.sin(x) - 0.25 * np.cos(2.0 * x) + 0.2 * x / A


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    d = tmp_path_factory.mktemp("pipeline")
    grid = PotentialGrid.from_callable(_q, 0.0, A, CELLS)
    with open(d / "q.json", "w") as fh:
        json.dump(grid.to_dict(), fh)
    return d


def _common_flags(workdir, out_name):
    return [
        "--input", str(workdir / "q.json"),
        "--output", str(workdir / out_name),
        "--num-eigenvalues", str(K),
        "--grid", str(CELLS),
    ]


@pytest.fixture(scope="module")
def forward_artifact(workdir):
    rc = main(["forward", *_common_flags(workdir, "spectra.json")])
    assert rc == 0
    with open(workdir / "spectra.json") as fh:
        return json.load(fh)


@pytest.fixture(scope="module")
def input_file(workdir, forward_artifact):
    bundle = SpectraBundle.from_dict(forward_artifact)
    inp = bundle.withhold((1,), (2,))
    path = workdir / "input.json"
    with open(path, "w") as fh:
        json.dump(inp.to_dict(), fh)
    return path


@pytest.fixture(scope="module")
def roundtrip_result(workdir):
    cfg = PipelineConfig(
        num_eigenvalues=K, grid_cells=CELLS, missing_nu1=(1,), missing_nu2=(2,)
    )
    returned = run_roundtrip(cfg, workdir / "q.json", workdir / "rt.json")
    with open(workdir / "rt.json") as fh:
        return returned, json.load(fh)


class TestForward:
    def test_artifact_contents(self, workdir, forward_artifact):
        art = forward_artifact
        assert len(art["sequences"]) == 5
        assert art["interlacing"]["ok"] is True
        assert art["regular_gap_count"] > 0
        assert (workdir / "spectra.gaps.csv").exists()

    def test_json_only_format_skips_csv(self, workdir):
        rc = main([
            "forward", "--input", str(workdir / "q.json"),
            "--output", str(workdir / "fwd_nocsv.json"),
            "--num-eigenvalues", "8", "--grid", "128", "--format", "json",
        ])
        assert rc == 0
        assert not (workdir / "fwd_nocsv.gaps.csv").exists()

    def test_resamples_to_configured_grid(self, workdir):
        # file has 512 cells, the run asks for 128: spectra barely move
        rc = main([
            "forward", "--input", str(workdir / "q.json"),
            "--output", str(workdir / "fwd_coarse.json"),
            "--num-eigenvalues", "8", "--grid", "128",
        ])
        assert rc == 0
        with open(workdir / "fwd_coarse.json") as fh:
            art = json.load(fh)
        lam = art["sequences"][0]["squares"]
        ks = np.arange(1, 9)
        np.testing.assert_allclose(lam, ks**2 + lam[3] - 16.0, atol=1.0)

    def test_odd_grid_rejected(self, workdir):
        rc = main([
            "forward", "--input", str(workdir / "q.json"),
            "--output", str(workdir / "never.json"),
            "--num-eigenvalues", "8", "--grid", "127",
        ])
        assert rc == 2


class TestReconstruct:
    def test_artifact_and_determinism(self, workdir, input_file):
        flags = [
            "--num-eigenvalues", str(K), "--grid", str(CELLS),
            "--missing-nu1", "1", "--missing-nu2", "2",
        ]
        rc = main(["reconstruct", "--input", str(input_file),
                   "--output", str(workdir / "rec1.json"), *flags])
        assert rc == 0
        rc = main(["reconstruct", "--input", str(input_file),
                   "--output", str(workdir / "rec2.json"), *flags])
        assert rc == 0
        b1 = (workdir / "rec1.json").read_bytes()
        assert b1 == (workdir / "rec2.json").read_bytes()

        art = json.loads(b1)
        assert set(art) == {
            "potential", "completed_spectra", "residual_summary", "completed_interlacing",
        }
        assert art["completed_interlacing"]["ok"] is True
        assert art["residual_summary"]["rel_max"] < 1e-3
        q = PotentialGrid.from_dict(art["potential"])
        err = q.samples - _q(q.x)
        assert math.sqrt(np.trapezoid(err * err, q.x)) < 5e-2
        assert (workdir / "rec1.residuals.csv").exists()

    def test_residual_gate_exits_3(self, workdir, input_file):
        rc = main([
            "reconstruct", "--input", str(input_file),
            "--output", str(workdir / "never.json"),
            "--num-eigenvalues", str(K), "--tol-residual", "1e-12",
        ])
        assert rc == 3


class TestRoundtrip:
    def test_errors_small(self, roundtrip_result):
        _, art = roundtrip_result
        assert art["l2_error"] < 5e-2
        assert art["forward_interlacing_ok"] is True
        assert art["completed_interlacing"]["ok"] is True
        assert art["residual_rel_max"] < 1e-3
        for side in ("nu1", "nu2"):
            for entry in art["recovered_eigenvalues"][side].values():
                assert entry["abs_err"] < 1e-3

    def test_runtimes_returned_but_not_written(self, roundtrip_result):
        returned, art = roundtrip_result
        assert "runtimes_sec" not in art
        assert returned["runtimes_sec"]["forward"] > 0
        assert returned["runtimes_sec"]["reconstruct"] > 0
        assert {k: v for k, v in returned.items() if k != "runtimes_sec"} == art

    def test_true_potential_tabulated_on_output_grid(self, roundtrip_result):
        _, art = roundtrip_result
        q = PotentialGrid.from_dict(art["potential"])
        assert len(art["potential_true_on_grid"]) == q.samples.size

    def test_needs_withheld_indices(self, workdir):
        rc = main(["roundtrip", *_common_flags(workdir, "never.json")])
        assert rc == 2


class TestValidate:
    def test_bundle_file(self, workdir, forward_artifact):
        rc = main(["validate", "--input", str(workdir / "spectra.json")])
        assert rc == 0
        out = run_validate(PipelineConfig(), workdir / "spectra.json")
        assert out["kind"] == "spectra_bundle"
        assert out["ok"] is True

    def test_input_file(self, workdir, input_file):
        rc = main(["validate", "--input", str(input_file)])
        assert rc == 0
        out = run_validate(PipelineConfig(), input_file)
        assert out["kind"] == "three_spectra_input"

    def test_broken_interlacing_exits_2(self, workdir, forward_artifact):
        art = json.loads(json.dumps(forward_artifact))
        seqs = {s["branch"]: s for s in art["sequences"]}
        seqs["half_dd_left"]["squares"], seqs["half_dn_left"]["squares"] = (
            seqs["half_dn_left"]["squares"],
            seqs["half_dd_left"]["squares"],
        )
        path = workdir / "swapped.json"
        with open(path, "w") as fh:
            json.dump(art, fh)
        assert main(["validate", "--input", str(path)]) == 2

    def test_malformed_json_exits_4(self, workdir):
        path = workdir / "broken.json"
        path.write_text("{not json")
        assert main(["validate", "--input", str(path)]) == 4


class TestConfig:
    def test_cli_rejects_bad_counts(self, workdir):
        rc = main([
            "forward", "--input", str(workdir / "q.json"),
            "--output", str(workdir / "never.json"), "--num-eigenvalues", "0",
        ])
        assert rc == 2

    def test_cli_rejects_out_of_range_missing_index(self, workdir):
        rc = main([
            "roundtrip", *_common_flags(workdir, "never.json"), "--missing-nu1", "99",
        ])
        assert rc == 2

    def test_missing_input_exits_4(self, workdir):
        rc = main([
            "forward", "--input", str(workdir / "nope.json"),
            "--output", str(workdir / "never.json"),
        ])
        assert rc == 4

    @pytest.mark.parametrize(
        "bad",
        [
            {"num_eigenvalues": -3},
            {"grid_cells": 0},
            {"tol_root": 0.0},
            {"tol_residual": -1.0},
            {"missing_nu2": (0,)},
            {"missing_nu1": (61,)},
        ],
    )
    def test_invariants(self, bad):
        with pytest.raises(ValidationError):
            PipelineConfig(**bad)
