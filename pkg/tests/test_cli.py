from dataclasses import dataclass
from unittest.mock import AsyncMock, patch

import numpy as np
import pytest

from crackscan.cli import build_parser, main
from crackscan.exceptions import EXIT_OK, EXIT_STAGE_FAILURE, EXIT_USAGE
from crackscan.formats.cloud import load_point_cloud, save_point_cloud
from crackscan.formats.raster import load_mask, save_image, save_mask
from crackscan.formats.schemas import PointCloud

RUN_CONFIG = (
    "paths:\n"
    "  cloud: c.ply\n"
    "  trajectory: t.txt\n"
    "  camera: cam.yaml\n"
    "  frames: f.txt\n"
    "  extrinsic: e.txt\n"
)


@dataclass
class ExitCase:
    name: str
    argv: list[str]
    expected: int = EXIT_USAGE


exit_cases = [
    ExitCase(name="No command", argv=[]),
    ExitCase(name="Unknown command", argv=["frobnicate"]),
    ExitCase(name="Missing required option", argv=["denoise"]),
    ExitCase(name="Bad option type", argv=["eval", "--density-radius", "wide"]),
    ExitCase(name="Eval without inputs", argv=["eval"]),
    ExitCase(name="Help", argv=["--help"], expected=EXIT_OK),
]


def _scene_args(layout) -> list[str]:
    return [
        "--cloud",
        str(layout.cloud),
        "--trajectory",
        str(layout.trajectory),
        "--camera",
        str(layout.camera),
        "--frames",
        str(layout.frames),
        "--extrinsic",
        str(layout.extrinsic_true),
    ]


@pytest.mark.parametrize("case", exit_cases, ids=[c.name for c in exit_cases])
def test_exit_codes(case: ExitCase, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)

    assert main(case.argv) == case.expected


def test_parser_lists_every_command():
    parser = build_parser()

    sub = next(a for a in parser._actions if a.dest == "command")

    assert set(sub.choices) == {
        "synth",
        "calibrate",
        "refine-mask",
        "denoise",
        "fuse",
        "measure",
        "eval",
        "run",
    }


class TestEval:
    def test_identical_masks(self, tmp_path, mask_factory):
        mask_path = tmp_path / "mask.png"
        save_mask(mask_factory.vertical_band(80, 60, 38, 43), mask_path)
        out = tmp_path / "metrics.txt"

        code = main(
            ["eval", "--pred", str(mask_path), "--gt", str(mask_path), "-o", str(out)]
        )

        assert code == EXIT_OK
        rows = [line.split() for line in out.read_text().splitlines()]
        assert ["mIoU", "1.0000"] in rows

    def test_mask_size_mismatch_fails(self, tmp_path, mask_factory):
        pred, gt = tmp_path / "pred.png", tmp_path / "gt.png"
        save_mask(mask_factory.empty(40, 30), pred)
        save_mask(mask_factory.empty(30, 40), gt)
        out = tmp_path / "metrics.txt"

        code = main(["eval", "--pred", str(pred), "--gt", str(gt), "-o", str(out)])

        assert code == EXIT_STAGE_FAILURE


class TestDenoise:
    def test_outlier_is_removed_and_logged(self, tmp_path, cloud_factory, capsys):
        grid = cloud_factory.grid(10, 10, spacing=0.01)
        cloud_path = tmp_path / "cloud.ply"
        save_point_cloud(
            PointCloud(points=np.vstack([grid.points, [[0.045, 0.045, 1.0]]])),
            cloud_path,
        )
        out = tmp_path / "clean.ply"

        code = main(
            ["denoise", "--cloud", str(cloud_path), "-k", "8", "--no-smooth"]
            + ["-o", str(out)]
        )

        assert code == EXIT_OK
        assert len(load_point_cloud(out)) == 100
        assert "Removed 1 outliers, kept 100 points" in capsys.readouterr().err

    def test_missing_cloud(self, tmp_path):
        code = main(["denoise", "--cloud", str(tmp_path / "absent.ply")])

        assert code == EXIT_STAGE_FAILURE


class TestRefineMask:
    def test_identity_refiner(self, tmp_path, mask_factory):
        image_path = tmp_path / "image.png"
        mask_path = tmp_path / "mask.png"
        save_image(mask_factory.image(120, 80, value=90), image_path)
        save_mask(mask_factory.vertical_band(120, 80, 50, 55), mask_path)
        out = tmp_path / "refined.png"

        code = main(
            ["refine-mask", "--image", str(image_path), "--mask", str(mask_path)]
            + ["-o", str(out)]
        )

        assert code == EXIT_OK
        assert load_mask(out).area == 5 * 80


class TestSceneCommands:
    def test_synth_writes_a_scene(self, tmp_path, small_scene_spec):
        spec_path = tmp_path / "scene.yaml"
        spec_path.write_text(small_scene_spec.to_yaml(), encoding="utf-8")
        out = tmp_path / "scene"

        code = main(["synth", "--spec", str(spec_path), "--seed", "5", "-o", str(out)])

        assert code == EXIT_OK
        assert (out / "cloud.ply").exists()
        assert len(list((out / "images").glob("*.png"))) == 8
        assert "seed: 5" in (out / "scene.yaml").read_text()

    def test_fuse_with_highlight(self, tmp_path, scene_dir):
        out = tmp_path / "fused.ply"

        code = main(
            ["fuse", *_scene_args(scene_dir), "--no-hpr", "--highlight"]
            + ["--workers", "2", "-o", str(out)]
        )

        assert code == EXIT_OK
        fused = load_point_cloud(out)
        assert fused.label is not None
        assert fused.color is not None

    def test_measure_fails_when_no_seed_is_measured(self, tmp_path, scene_dir):
        seeds = tmp_path / "seeds.txt"
        seeds.write_text("c9 10 10 nope\n", encoding="utf-8")
        out = tmp_path / "widths.csv"

        code = main(
            ["measure", *_scene_args(scene_dir), "--seeds", str(seeds)]
            + ["-o", str(out)]
        )

        assert code == EXIT_STAGE_FAILURE
        assert out.exists()


class TestRun:
    def test_overrides_are_applied(self, tmp_path):
        config = tmp_path / "run.yaml"
        config.write_text(RUN_CONFIG, encoding="utf-8")

        with patch("crackscan.cli.run_pipeline", new=AsyncMock()) as run:
            code = main(
                ["run", "--config", str(config), "--workers", "3"]
                + ["--output-dir", str(tmp_path / "o")]
            )

        assert code == EXIT_OK
        passed = run.call_args.args[0]
        assert passed.output_dir == tmp_path / "o"
        assert passed.workers == 3
        assert passed.paths.cloud == tmp_path / "c.ply"

    def test_missing_inputs_are_a_usage_error(self, tmp_path):
        config = tmp_path / "run.yaml"
        config.write_text(RUN_CONFIG, encoding="utf-8")

        assert main(["run", "--config", str(config)]) == EXIT_USAGE
