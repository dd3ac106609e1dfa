"""Command-line entry point.

Every subcommand reads its inputs, runs one part of the workflow and writes
its result below the output directory. Exit codes: 0 success, 1 a stage
failed, 2 usage or configuration error.
"""

import argparse
import asyncio
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from pydantic import ValidationError as PydanticValidationError

from .calibration.schemas import CalibrationConfig, NelderMeadConfig
from .config import settings
from .denoise.schemas import CropBox, DenoiseConfig, MlsConfig, SorConfig
from .evaluation.metrics import (
    confusion_counts,
    point_surface_density,
    surface_roughness,
)
from .evaluation.report import write_metrics_report
from .evaluation.schemas import EvaluationReport
from .exceptions import (
    EXIT_OK,
    EXIT_USAGE,
    CrackscanError,
    StageError,
    ValidationError,
    exit_code_for,
)
from .formats.cloud import load_point_cloud, save_point_cloud
from .formats.raster import load_image, load_mask, save_mask
from .formats.report import write_measurement_report
from .formats.trajectory import save_pose
from .fusion.fuse import highlight_cracks, select_keyframes
from .fusion.schemas import FusionConfig, KeyframeConfig
from .masks.pipeline import refine_mask
from .masks.refiners import get_refiner
from .masks.schemas import MaskParams
from .metrology.measure import compute_error_stats
from .metrology.schemas import MetrologyParams
from .pipeline import stages
from .pipeline.config import load_pipeline_config
from .pipeline.runner import run_pipeline
from .pipeline.schemas import PathsConfig, PipelineInputs
from .synth.scene import generate_scene, load_scene_spec, parse_scene_spec, write_scene

log = logging.getLogger("crackscan.cli")

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def configure_logging(level: str) -> None:
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.INFO),
        format=LOG_FORMAT,
        stream=sys.stderr,
        force=True,
    )


def _output(args: argparse.Namespace, default_name: str) -> Path:
    if args.output:
        path = Path(args.output)
    else:
        path = settings.default_output_dir / default_name
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def _workers(args: argparse.Namespace) -> int:
    return args.workers or settings.resolved_workers()


def _load_scene(args: argparse.Namespace) -> PipelineInputs:
    paths = PathsConfig(
        cloud=args.cloud,
        trajectory=args.trajectory,
        camera=args.camera,
        frames=args.frames,
        extrinsic=args.extrinsic,
        seeds=getattr(args, "seeds", None),
        reference_widths=getattr(args, "reference_widths", None),
    )
    missing = paths.missing()
    if missing:
        raise ValidationError("Missing input files: " + ", ".join(missing))
    return stages.load_inputs(paths)


def cmd_synth(args: argparse.Namespace) -> None:
    spec = load_scene_spec(args.spec) if args.spec else parse_scene_spec({})
    if args.seed is not None:
        spec = spec.model_copy(update={"seed": args.seed})
    scene = generate_scene(spec)
    directory = Path(args.output) if args.output else settings.default_output_dir
    write_scene(scene, directory, binary=not args.ascii)


def cmd_calibrate(args: argparse.Namespace) -> None:
    inputs = _load_scene(args)
    cfg = CalibrationConfig(
        bins=args.bins,
        optimizer=NelderMeadConfig(max_iters=args.max_iters),
        workers=_workers(args),
    )
    result = stages.calibrate(inputs, cfg)
    save_pose(result.extrinsic, _output(args, "extrinsic_refined.txt"))
    log.info("Mean NID %.6f -> %.6f", result.nid_initial, result.nid_final)


def cmd_refine_mask(args: argparse.Namespace) -> None:
    image = load_image(args.image)
    base = load_mask(args.mask, like=image)
    params = MaskParams(
        k=args.k,
        dilation=args.dilation,
        max_holes=args.max_holes,
        max_size_ratio=args.max_size_ratio,
    )
    refined = asyncio.run(refine_mask(image, base, get_refiner(args.refiner), params))
    save_mask(refined, _output(args, "mask_refined.png"))
    log.info("Mask area %d -> %d pixels", base.area, refined.area)


def cmd_denoise(args: argparse.Namespace) -> None:
    cloud = load_point_cloud(args.cloud)
    cfg = DenoiseConfig(
        sor=SorConfig(k=args.k, n_sigma=args.n_sigma, mode=args.mode),
        mls=MlsConfig(
            search_radius=args.radius,
            polynomial_degree=args.degree,
            workers=_workers(args),
        ),
        crop=(
            CropBox(min_corner=args.crop[:3], max_corner=args.crop[3:])
            if args.crop
            else None
        ),
        smooth=not args.no_smooth,
    )
    result, summary = stages.denoise(cloud, cfg)
    log.info(
        "Removed %d outliers, kept %d points",
        summary.removed_points,
        len(result),
    )
    save_point_cloud(
        result,
        _output(args, "denoised.ply"),
        "ascii" if args.ascii else "binary",
    )


def cmd_fuse(args: argparse.Namespace) -> None:
    inputs = _load_scene(args)
    poses = stages.camera_poses(inputs, inputs.extrinsic)
    if args.keyframes:
        keep = select_keyframes(
            [poses[f.frame_id] for f in inputs.frames],
            KeyframeConfig(
                min_translation=args.min_translation,
                min_rotation=args.min_rotation,
            ),
        )
        inputs = inputs.model_copy(update={"frames": [inputs.frames[i] for i in keep]})
    cfg = FusionConfig(
        top_n=args.top_n, use_hpr=not args.no_hpr, workers=_workers(args)
    )
    fused = stages.fuse(inputs.cloud, stages.fusion_frames(inputs, poses), inputs, cfg)
    if args.highlight:
        fused = highlight_cracks(fused)
    save_point_cloud(fused, _output(args, "fused.ply"))


def cmd_measure(args: argparse.Namespace) -> None:
    inputs = _load_scene(args)
    poses = stages.camera_poses(inputs, inputs.extrinsic)
    params = MetrologyParams(
        sample_step=args.step,
        sample_radius=args.radius,
        refine_levels=args.refine_levels,
    )
    sites = stages.measure(
        inputs.cloud, stages.metrology_frames(inputs, poses), inputs, params
    )
    write_measurement_report(sites.measurements, _output(args, "measurements.csv"))
    if inputs.seeds and not sites.measurements:
        raise StageError("measure", message="No crack site could be measured.")
    pairs = [
        (m.width_mm, inputs.reference_widths[m.crack_id])
        for m in sites.measurements
        if m.crack_id in inputs.reference_widths
    ]
    if pairs:
        stats = compute_error_stats(pairs)
        log.info(
            "Width MAE %.4f mm, MRE %.2f %% over %d sites",
            stats.mae_mm,
            stats.mre_percent,
            stats.count,
        )


def cmd_eval(args: argparse.Namespace) -> None:
    if not args.cloud and not (args.pred and args.gt):
        raise ValidationError("eval needs --cloud or both --pred and --gt.")
    report = EvaluationReport(
        density_radius=args.density_radius, roughness_radius=args.roughness_radius
    )
    if args.pred and args.gt:
        ious = confusion_counts(load_mask(args.pred), load_mask(args.gt)).iou()
        report.class_iou = [float(x) for x in ious]
        report.miou = float(ious.mean())
    if args.cloud:
        cloud = load_point_cloud(args.cloud)
        report.density = point_surface_density(cloud, args.density_radius)
        report.roughness = surface_roughness(cloud, args.roughness_radius)
    write_metrics_report(report, _output(args, "metrics.txt"))


def cmd_run(args: argparse.Namespace) -> None:
    config = load_pipeline_config(args.config)
    if args.output_dir:
        config = config.model_copy(update={"output_dir": Path(args.output_dir)})
    if args.workers:
        config = config.model_copy(update={"workers": args.workers})
    asyncio.run(run_pipeline(config))


def _scene_parent() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    group = parent.add_argument_group("scene inputs")
    group.add_argument("--cloud", required=True, help="PLY or PCD point cloud")
    group.add_argument("--trajectory", required=True, help="LiDAR trajectory file")
    group.add_argument("--camera", required=True, help="Camera intrinsics YAML")
    group.add_argument("--frames", required=True, help="Frame list file")
    group.add_argument("--extrinsic", required=True, help="LiDAR-to-camera pose file")
    return parent


def _common_parent() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("-o", "--output", help="Output path")
    parent.add_argument("--workers", type=int, help="Worker threads")
    return parent


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="crackscan",
        description="Crack measurement from LiDAR point clouds and camera frames.",
    )
    parser.add_argument(
        "--log-level",
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        help=f"Logging level (default: {settings.log_level})",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    common = _common_parent()
    scene = _scene_parent()

    p = sub.add_parser("synth", parents=[common], help="Generate a synthetic scene")
    p.add_argument("--spec", help="Scene spec YAML (defaults when omitted)")
    p.add_argument("--seed", type=int, help="Override the spec seed")
    p.add_argument("--ascii", action="store_true", help="Write ASCII PLY clouds")
    p.set_defaults(handler=cmd_synth)

    p = sub.add_parser(
        "calibrate", parents=[common, scene], help="Refine the extrinsic by NID"
    )
    p.add_argument("--bins", type=int, default=32)
    p.add_argument("--max-iters", type=int, default=400)
    p.set_defaults(handler=cmd_calibrate)

    p = sub.add_parser("refine-mask", parents=[common], help="Refine a crack mask")
    p.add_argument("--image", required=True)
    p.add_argument("--mask", required=True)
    p.add_argument(
        "--refiner",
        default="identity",
        help="identity, dilate[:px], flood, holes or external:<command>",
    )
    p.add_argument("--k", type=int, default=20, help="Prompt count per component")
    p.add_argument("--dilation", type=int, default=32, help="Crop margin (pixels)")
    p.add_argument("--max-holes", type=int, default=2)
    p.add_argument("--max-size-ratio", type=float, default=3.0)
    p.set_defaults(handler=cmd_refine_mask)

    p = sub.add_parser("denoise", parents=[common], help="SOR and MLS smoothing")
    p.add_argument("--cloud", required=True)
    p.add_argument("-k", type=int, default=60, help="SOR neighbor count")
    p.add_argument("-n", "--n-sigma", type=float, default=1.0)
    p.add_argument(
        "--mode", choices=["upper", "symmetric", "gaussian"], default="upper"
    )
    p.add_argument("--radius", type=float, help="MLS search radius (meters)")
    p.add_argument("--degree", type=int, default=2, help="MLS polynomial degree")
    p.add_argument(
        "--crop",
        type=float,
        nargs=6,
        metavar=("X0", "Y0", "Z0", "X1", "Y1", "Z1"),
        help="Axis-aligned crop box",
    )
    p.add_argument("--no-smooth", action="store_true", help="Skip MLS")
    p.add_argument("--ascii", action="store_true", help="Write an ASCII PLY")
    p.set_defaults(handler=cmd_denoise)

    p = sub.add_parser(
        "fuse", parents=[common, scene], help="Color and label the cloud"
    )
    p.add_argument("--top-n", type=int, default=4)
    p.add_argument("--no-hpr", action="store_true", help="Skip hidden point removal")
    p.add_argument("--highlight", action="store_true", help="Paint crack points red")
    p.add_argument("--keyframes", action="store_true", help="Fuse keyframes only")
    p.add_argument("--min-translation", type=float, default=0.1)
    p.add_argument("--min-rotation", type=float, default=0.087)
    p.set_defaults(handler=cmd_fuse)

    p = sub.add_parser(
        "measure", parents=[common, scene], help="Measure crack widths at seeds"
    )
    p.add_argument("--seeds", required=True, help="crack_id u v frame_id per line")
    p.add_argument("--reference-widths", help="crack_id width_mm per line")
    p.add_argument("--step", type=float, default=1e-4, help="Plane sampling step")
    p.add_argument("--radius", type=float, default=0.03, help="Plane sampling radius")
    p.add_argument("--refine-levels", type=int, default=1)
    p.set_defaults(handler=cmd_measure)

    p = sub.add_parser("eval", parents=[common], help="Quality metrics report")
    p.add_argument("--pred", help="Predicted mask")
    p.add_argument("--gt", help="Ground-truth mask")
    p.add_argument("--cloud", help="Cloud for density and roughness")
    p.add_argument("--density-radius", type=float, default=0.01)
    p.add_argument("--roughness-radius", type=float, default=0.01)
    p.set_defaults(handler=cmd_eval)

    p = sub.add_parser("run", help="Run the whole workflow from a YAML config")
    p.add_argument("--config", required=True)
    p.add_argument("--output-dir", help="Override the configured output directory")
    p.add_argument("--workers", type=int)
    p.set_defaults(handler=cmd_run)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE
    configure_logging(args.log_level or settings.log_level)
    try:
        args.handler(args)
    except PydanticValidationError as e:
        log.error("Invalid arguments: %s", e)
        return EXIT_USAGE
    except CrackscanError as e:
        log.error("%s", e)
        return exit_code_for(e)
    except OSError as e:
        log.error("%s", e)
        return exit_code_for(e)
    return EXIT_OK
