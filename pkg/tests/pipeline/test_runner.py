import json
import logging

import pytest

from crackscan.config import settings
from crackscan.core.operations import StageOperation
from crackscan.exceptions import NonPositiveReference, StageError, ValidationError
from crackscan.metrology.schemas import SiteResults
from crackscan.pipeline.runner import PipelineRunner, run_pipeline

EVALUATE_ONLY = {
    "stages": {"denoise": False, "fuse": False, "measure": False, "evaluate": True}
}


def _broken_evaluate(**_):
    raise NonPositiveReference()


def _nothing_measured(**_):
    return SiteResults()


class TestRunPipeline:
    async def test_full_run_writes_outputs_and_manifest(self, config_factory):
        config = config_factory()

        manifest = await run_pipeline(config)

        assert manifest.status == "ok"
        assert set(manifest.timings) == {
            "load",
            "denoise",
            "fuse",
            "measure",
            "evaluate",
        }
        assert set(manifest.outputs) == {"fused", "measurements", "metrics"}
        measured = manifest.summary["measure"]
        assert measured["measured"] + len(measured["failures"]) == 3
        assert manifest.summary["fuse"]["points"] > 0

        written = json.loads((config.output_dir / "manifest.json").read_text())
        assert written["status"] == "ok"
        assert written["parameters"]["workers"] == 2
        assert "numpy" in written["versions"]
        metrics = (config.output_dir / "metrics.txt").read_text()
        assert "mIoU" in metrics

    async def test_denoise_only_writes_denoised_cloud(self, config_factory):
        config = config_factory(
            stages={"fuse": False, "measure": False, "evaluate": False}
        )

        manifest = await run_pipeline(config)

        assert set(manifest.outputs) == {"denoised"}
        assert manifest.summary["denoise"]["smoothed"] is False

    async def test_refined_masks_are_saved(self, config_factory):
        config = config_factory(
            stages={
                "refine_masks": True,
                "denoise": False,
                "fuse": False,
                "measure": False,
                "evaluate": False,
            }
        )

        manifest = await run_pipeline(config)

        masks_dir = config.output_dir / "masks"
        assert manifest.outputs["masks"] == str(masks_dir)
        assert len(list(masks_dir.glob("*.png"))) == 8

    async def test_failed_load_is_recorded(self, config_factory, tmp_path, caplog):
        broken = tmp_path / "broken.ply"
        broken.write_text("not a ply file\n", encoding="utf-8")
        config = config_factory()
        config = config.model_copy(
            update={"paths": config.paths.model_copy(update={"cloud": broken})}
        )

        with caplog.at_level(logging.ERROR, logger="crackscan"):
            with pytest.raises(StageError) as exc_info:
                await run_pipeline(config)

        assert exc_info.value.stage == "load"
        manifest = json.loads((config.output_dir / "manifest.json").read_text())
        assert manifest["status"] == "failed"
        assert manifest["failed_stage"] == "load"
        assert "Pipeline failed" in caplog.text

    async def test_missing_input_stops_before_any_work(self, config_factory, tmp_path):
        config = config_factory()
        config = config.model_copy(
            update={
                "paths": config.paths.model_copy(
                    update={"seeds": tmp_path / "absent.txt"}
                )
            }
        )

        with pytest.raises(ValidationError):
            await run_pipeline(config)

        assert not config.output_dir.exists()


class TestPipelineRunner:
    async def test_stage_can_be_replaced(self, config_factory):
        runner = PipelineRunner(config_factory(**EVALUATE_ONLY))
        runner.evaluate_op = StageOperation(name="evaluate", func=_broken_evaluate)

        with pytest.raises(StageError) as exc_info:
            async with runner:
                await runner.run()

        assert exc_info.value.stage == "evaluate"
        assert isinstance(exc_info.value.original_error, NonPositiveReference)
        assert runner.manifest.status == "failed"
        assert "load" in runner.manifest.timings
        assert "evaluate" not in runner.manifest.timings

    def test_workers_fall_back_to_settings(self, config_factory, monkeypatch):
        monkeypatch.setattr(settings, "workers", 3)

        runner = PipelineRunner(config_factory(workers=None))

        assert runner.workers == 3

    async def test_evaluate_only_run(self, config_factory):
        runner = PipelineRunner(config_factory(**EVALUATE_ONLY))

        async with runner:
            outputs = await runner.run()

        assert set(outputs) == {"metrics"}
        assert runner.manifest.summary["evaluate"]["miou"] == pytest.approx(1.0)

    async def test_no_measured_seed_fails_the_run(self, config_factory):
        config = config_factory(
            stages={"denoise": False, "fuse": False, "evaluate": False}
        )
        runner = PipelineRunner(config)
        runner.measure_op = StageOperation(name="measure", func=_nothing_measured)

        with pytest.raises(StageError) as exc_info:
            async with runner:
                await runner.run()

        assert exc_info.value.stage == "measure"
        assert runner.manifest.status == "failed"
        assert runner.manifest.summary["measure"]["measured"] == 0
        assert (config.output_dir / "measurements.csv").exists()
