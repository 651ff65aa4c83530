# tests/test_cli/test_main.py

"""
Tests for the command-line entry point: argument handling and exit codes.
"""

import pytest

from pyevert.__main__ import EXIT_CONFIG, EXIT_IO, EXIT_NUMERICAL, EXIT_OK, build_parser, exit_code, main
from pyevert.errors import (
    ConfigError,
    HalfwayError,
    IoFailure,
    NotASaddle,
    ParseFailure,
    PipelineError,
    ResolutionTooLow,
    SeedMeshMissing,
)
from pyevert.mesh import frame_path, write_obj


class TestExitCodes:
    """Errors map to the documented exit codes."""

    @pytest.mark.parametrize(
        "error, code",
        [
            (ConfigError("bad"), EXIT_CONFIG),
            (ResolutionTooLow("low"), EXIT_CONFIG),
            (IoFailure("gone"), EXIT_IO),
            (ParseFailure("bad token", 3, 1), EXIT_IO),
            (SeedMeshMissing("gone"), EXIT_IO),
            (FileNotFoundError("gone"), EXIT_IO),
            (HalfwayError("odd"), EXIT_NUMERICAL),
            (NotASaddle("positive"), EXIT_NUMERICAL),
        ],
    )
    def test_mapping(self, error, code):
        assert exit_code(error) == code

    def test_pipeline_error_uses_its_cause(self):
        assert exit_code(PipelineError("downhill", NotASaddle("x"))) == EXIT_NUMERICAL
        assert exit_code(PipelineError("halfway", ResolutionTooLow("x"))) == EXIT_CONFIG
        assert exit_code(PipelineError("halfway", SeedMeshMissing("x"))) == EXIT_IO


class TestParser:
    """Subcommands and schema flags."""

    def test_schema_flags(self):
        args = build_parser().parse_args(["evert", "--resolution", "24", "--relax.max_steps", "5"])
        assert args.command == "evert"
        assert args.resolution == "24"
        assert getattr(args, "relax.max_steps") == "5"

    def test_unset_flags_are_none(self):
        args = build_parser().parse_args(["evert"])
        assert args.resolution is None

    @pytest.mark.parametrize("command", ["generate", "relax"])
    def test_out_required(self, command):
        with pytest.raises(SystemExit):
            build_parser().parse_args([command])

    def test_analyze_takes_a_directory(self):
        args = build_parser().parse_args(["analyze", "frames", "--out", "audit"])
        assert args.frames_dir == "frames"
        assert args.out == "audit"


class TestMain:
    """End-to-end runs of cheap subcommands."""

    def test_resolution_too_low(self, tmp_path):
        assert main(["generate", "--resolution", "8", "--out", str(tmp_path / "seed")]) == EXIT_CONFIG

    def test_bad_value_type(self, tmp_path):
        assert main(["generate", "--frame_budget", "many", "--out", str(tmp_path / "seed")]) == EXIT_CONFIG

    def test_malformed_config(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("resolution: 24\n")
        assert main(["generate", "--config", str(cfg), "--out", str(tmp_path / "seed")]) == EXIT_CONFIG

    def test_missing_config(self, tmp_path):
        assert main(["generate", "--config", str(tmp_path / "none.cfg"), "--out", str(tmp_path / "s")]) == EXIT_IO

    def test_analyze_missing_directory(self, tmp_path):
        assert main(["analyze", str(tmp_path / "none")]) == EXIT_IO

    def test_analyze(self, tmp_path, sphere):
        for i in range(3):
            write_obj(sphere.translated([0.01 * i, 0.0, 0.0]), frame_path(tmp_path / "frames", i))
        code = main(["analyze", str(tmp_path / "frames"), "--out", str(tmp_path / "audit")])
        assert code == EXIT_OK
        assert (tmp_path / "audit" / "li_yau.csv").exists()

    def test_export_missing_bundle(self, tmp_path):
        assert main(["export", "--bundle", str(tmp_path / "none.npz"), "--out", str(tmp_path)]) == EXIT_IO

    def test_generate_writes_seed(self, tmp_path):
        code = main(["generate", "--kind", "Boy3Fold", "--out", str(tmp_path / "boy")])
        assert code == EXIT_OK
        assert (tmp_path / "boy.obj").exists()
        assert (tmp_path / "boy.model.yaml").exists()
