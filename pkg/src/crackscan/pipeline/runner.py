import logging
from datetime import datetime, timezone
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path
from typing import Any, Optional

from pydantic import Field

from ..calibration.schemas import CalibrationResult
from ..config import settings
from ..core.handler import _StageExecutor
from ..core.operations import AsyncCallable
from ..evaluation.report import write_metrics_report
from ..evaluation.schemas import EvaluationReport
from ..exceptions import CrackscanError, IoError, StageError
from ..formats.cloud import save_point_cloud
from ..formats.raster import save_mask
from ..formats.report import write_measurement_report
from ..formats.schemas import BinaryMask, PointCloud
from ..formats.trajectory import save_pose
from ..metrology.schemas import SiteResults
from . import stages
from .config import validate_paths
from .operations import (
    _CALIBRATE_OP,
    _DENOISE_OP,
    _EVALUATE_OP,
    _FUSE_OP,
    _LOAD_OP,
    _MEASURE_OP,
    _REFINE_MASKS_OP,
)
from .schemas import DenoiseSummary, PipelineConfig, PipelineInputs, RunManifest

log = logging.getLogger(__name__)

RECORDED_PACKAGES = (
    "numpy",
    "scipy",
    "scikit-learn",
    "scikit-image",
    "pillow",
    "pydantic",
    "pyyaml",
)


def package_version(name: str) -> str:
    try:
        return version(name)
    except PackageNotFoundError:
        return "unknown"


class PipelineRunner(_StageExecutor):
    """Runs the whole workflow for one configuration.

    Use as an async context manager: entering validates the inputs and
    creates the output directory, leaving writes ``manifest.json`` whether
    the run succeeded or not.

    Example:
        >>> async with PipelineRunner(config) as runner:
        >>>     await runner.run()
    """

    load_op: AsyncCallable[PipelineInputs] = Field(default=_LOAD_OP, exclude=True)
    calibrate_op: AsyncCallable[CalibrationResult] = Field(
        default=_CALIBRATE_OP, exclude=True
    )
    refine_masks_op: AsyncCallable[dict[str, BinaryMask]] = Field(
        default=_REFINE_MASKS_OP, exclude=True
    )
    denoise_op: AsyncCallable[tuple[PointCloud, DenoiseSummary]] = Field(
        default=_DENOISE_OP, exclude=True
    )
    fuse_op: AsyncCallable[PointCloud] = Field(default=_FUSE_OP, exclude=True)
    measure_op: AsyncCallable[SiteResults] = Field(default=_MEASURE_OP, exclude=True)
    evaluate_op: AsyncCallable[EvaluationReport] = Field(
        default=_EVALUATE_OP, exclude=True
    )

    def __init__(self, config: PipelineConfig):
        self.config = config
        self.output_dir = Path(config.output_dir)
        self.workers = config.workers or settings.resolved_workers()
        self.timings: dict[str, float] = {}
        self.outputs: dict[str, str] = {}
        self.summary: dict[str, Any] = {}
        self.manifest: Optional[RunManifest] = None
        self._started_at: Optional[str] = None

    async def open(self) -> None:
        validate_paths(self.config)
        try:
            self.output_dir.mkdir(parents=True, exist_ok=True)
        except OSError as e:
            raise IoError(
                f"Cannot create {self.output_dir}: {e}", original_error=e
            ) from e
        self._started_at = datetime.now(timezone.utc).isoformat()
        log.info("Writing outputs to %s (%d workers)", self.output_dir, self.workers)

    async def close(self, error: Optional[BaseException] = None) -> None:
        self.manifest = self._build_manifest(error)
        path = self.output_dir / "manifest.json"
        try:
            path.write_text(self.manifest.to_json(indent=2) + "\n", encoding="utf-8")
        except OSError as e:
            raise IoError(f"Cannot write {path}: {e}", original_error=e) from e

    async def __aenter__(self) -> "PipelineRunner":
        await self.open()
        return self

    async def __aexit__(self, exc_type, exc_val, exc_tb) -> None:
        await self.close(exc_val)

    def _record_output(self, name: str, path: Path) -> Path:
        self.outputs[name] = str(path)
        return path

    def _build_manifest(self, error: Optional[BaseException]) -> RunManifest:
        manifest = RunManifest(
            crackscan_version=package_version("crackscan"),
            versions={name: package_version(name) for name in RECORDED_PACKAGES},
            started_at=self._started_at or "",
            inputs={
                name: str(value) if value is not None else None
                for name, value in self.config.paths
            },
            parameters=self.config.model_dump(mode="json"),
            timings=dict(self.timings),
            outputs=dict(self.outputs),
            summary=dict(self.summary),
        )
        if error is None:
            return manifest
        return manifest.model_copy(
            update={
                "status": "failed",
                "failed_stage": getattr(error, "stage", None),
                "error": str(error),
            }
        )

    async def run(self) -> dict[str, str]:
        """Execute the enabled stages in order and return the written files."""
        cfg = self.config
        toggles = cfg.stages
        inputs = await self.load_op(paths=cfg.paths)
        extrinsic = inputs.extrinsic

        if toggles.calibrate:
            calibration = await self.calibrate_op(
                inputs=inputs,
                cfg=cfg.calibration.model_copy(update={"workers": self.workers}),
            )
            extrinsic = calibration.extrinsic
            save_pose(
                extrinsic,
                self._record_output(
                    "extrinsic", self.output_dir / "extrinsic_refined.txt"
                ),
            )
            self.summary["calibration"] = calibration.to_dict()

        masks = None
        if toggles.refine_masks:
            masks = await self.refine_masks_op(inputs=inputs, cfg=cfg.masks)
            self._save_masks(masks)

        poses = stages.camera_poses(inputs, extrinsic)
        cloud = inputs.cloud

        if toggles.denoise:
            mls = cfg.denoise.mls.model_copy(update={"workers": self.workers})
            cloud, summary = await self.denoise_op(
                cloud=cloud, cfg=cfg.denoise.model_copy(update={"mls": mls})
            )
            self.summary["denoise"] = summary.to_dict()

        if toggles.fuse:
            fused = await self.fuse_op(
                cloud=cloud,
                frames=stages.fusion_frames(inputs, poses, masks),
                inputs=inputs,
                cfg=cfg.fusion.model_copy(update={"workers": self.workers}),
            )
            save_point_cloud(
                fused, self._record_output("fused", self.output_dir / "fused.ply")
            )
            self.summary["fuse"] = {
                "points": len(fused),
                "crack_points": int((fused.label == 1).sum()),
            }
        elif toggles.denoise:
            save_point_cloud(
                cloud,
                self._record_output("denoised", self.output_dir / "denoised.ply"),
            )

        sites = None
        if toggles.measure:
            sites = await self.measure_op(
                cloud=cloud,
                frames=stages.metrology_frames(inputs, poses, masks),
                inputs=inputs,
                params=cfg.metrology,
            )
            write_measurement_report(
                sites.measurements,
                self._record_output(
                    "measurements", self.output_dir / "measurements.csv"
                ),
            )
            self.summary["measure"] = {
                "measured": len(sites.measurements),
                "failures": [f.to_dict() for f in sites.failures],
            }
            if inputs.seeds and not sites.measurements:
                raise StageError("measure", message="No crack site could be measured.")

        if toggles.evaluate:
            report = await self.evaluate_op(
                cloud=cloud,
                inputs=inputs,
                cfg=cfg.evaluation,
                masks=masks,
                sites=sites,
            )
            write_metrics_report(
                report, self._record_output("metrics", self.output_dir / "metrics.txt")
            )
            self.summary["evaluate"] = report.to_dict()

        return dict(self.outputs)

    def _save_masks(self, masks: dict[str, BinaryMask]) -> None:
        directory = self.output_dir / "masks"
        try:
            directory.mkdir(parents=True, exist_ok=True)
        except OSError as e:
            raise IoError(f"Cannot create {directory}: {e}", original_error=e) from e
        for frame_id, mask in masks.items():
            save_mask(mask, directory / f"{frame_id}.png")
        self._record_output("masks", directory)


async def run_pipeline(config: PipelineConfig) -> RunManifest:
    """Run every enabled stage and return the manifest that was written.

    Raises:
        ValidationError: An input file is missing.
        StageError: A stage failed; the manifest records which one.
    """
    runner = PipelineRunner(config)
    try:
        async with runner:
            await runner.run()
    except CrackscanError as e:
        log.error("Pipeline failed: %s", e)
        raise
    return runner.manifest
