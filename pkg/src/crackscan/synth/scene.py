"""Deterministic synthetic scans with ground truth."""

import logging
from pathlib import Path
from typing import Any, Mapping

import numpy as np
import yaml
from pydantic import ValidationError as PydanticValidationError

from ..exceptions import InvalidSpec, IoError, NotOnCrack, ParseError
from ..formats.cloud import save_point_cloud
from ..formats.listings import (
    save_camera,
    save_frames,
    save_reference_widths,
    save_seeds,
)
from ..formats.raster import save_image, save_mask
from ..formats.schemas import FrameEntry, PointCloud, SeedEntry, Trajectory
from ..formats.trajectory import save_pose, save_trajectory
from ..geometry.operations import back_project_ray, project, transform_point
from ..geometry.schemas import RigidPose
from .bands import CrackBand, crack_mask
from .render import render_view
from .schemas import (
    GroundTruth,
    SceneFrame,
    SceneLayout,
    SceneSpec,
    ShotSpec,
    SiteTruth,
    SyntheticScene,
)
from .surfaces import Surface, make_surface
from .texture import ValueNoise, albedo, to_gray

log = logging.getLogger(__name__)

AUTO_SHOT_TILT = np.deg2rad(12.0)
AUTO_SHOT_MARGIN = 1.1


def load_scene_spec(path: str | Path) -> SceneSpec:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise IoError(f"Cannot read {path}: {e}", original_error=e) from e
    try:
        data = yaml.safe_load(text) or {}
    except yaml.YAMLError as e:
        raise ParseError(f"Invalid scene YAML: {e}", path=str(path)) from e
    return parse_scene_spec(data)


def parse_scene_spec(data: SceneSpec | Mapping[str, Any]) -> SceneSpec:
    if isinstance(data, SceneSpec):
        return data
    if not isinstance(data, Mapping):
        raise InvalidSpec("A scene spec must be a mapping.")
    try:
        return SceneSpec.model_validate(data)
    except PydanticValidationError as e:
        raise InvalidSpec(f"Invalid scene spec: {e}") from e


def _check_spec(spec: SceneSpec) -> None:
    ids = [c.crack_id for c in spec.cracks]
    if len(set(ids)) != len(ids):
        raise InvalidSpec("Crack ids must be unique.")
    w, h = spec.surface.size
    for crack in spec.cracks:
        pts = np.asarray(crack.centerline)
        if np.any(np.linalg.norm(np.diff(pts, axis=0), axis=1) == 0):
            raise InvalidSpec(f"Crack {crack.crack_id} has a zero-length segment.")
        if np.any(pts < 0) or np.any(pts[:, 0] > w) or np.any(pts[:, 1] > h):
            raise InvalidSpec(f"Crack {crack.crack_id} leaves the surface.")
    for site in spec.sites:
        if site.crack_id not in ids:
            raise InvalidSpec(f"Site refers to unknown crack '{site.crack_id}'.")


def _auto_shots(spec: SceneSpec, surface: Surface) -> list[ShotSpec]:
    w, h = spec.surface.size
    cam = spec.camera
    center, normal = surface.frame_at(w / 2.0, h / 2.0)
    distance = AUTO_SHOT_MARGIN * max(w * cam.fx / cam.width, h * cam.fy / cam.height)
    directions = [normal]
    for axis in ((1.0, 0.0, 0.0), (0.0, 1.0, 0.0)):
        for sign in (1.0, -1.0):
            tilt = RigidPose.from_rotvec(sign * AUTO_SHOT_TILT * np.asarray(axis))
            directions.append(tilt.rotation_matrix() @ normal)
    return [
        ShotSpec(
            eye=tuple(center + distance * d),
            target=tuple(center),
            up=(0.0, 1.0, 0.0),
        )
        for d in directions
    ]


def _timestamps(spec: SceneSpec, shots: list[ShotSpec]) -> list[float]:
    times: list[float] = []
    for shot in shots:
        if shot.timestamp is not None:
            times.append(shot.timestamp)
        else:
            times.append(times[-1] + spec.frame_interval if times else 0.0)
    for _ in spec.sites:
        times.append(times[-1] + spec.frame_interval if times else 0.0)
    if any(b <= a for a, b in zip(times, times[1:])):
        raise InvalidSpec("Camera path timestamps must be strictly increasing.")
    return times


def _perturbed(spec: SceneSpec, rng: np.random.Generator) -> RigidPose:
    axis = rng.normal(size=3)
    axis /= np.linalg.norm(axis)
    shift = rng.normal(size=3)
    shift /= np.linalg.norm(shift)
    delta = RigidPose.from_rotvec(
        np.deg2rad(spec.perturbation.rotation_deg) * axis,
        spec.perturbation.translation * shift,
    )
    return delta.compose(spec.extrinsic)


def generate_scene(spec: SceneSpec | Mapping[str, Any]) -> SyntheticScene:
    """Generate the cloud, camera path, images, masks and ground truth of a
    scene.

    Identical specs produce identical scenes.

    Raises:
        InvalidSpec: The spec is malformed or inconsistent.
    """
    spec = parse_scene_spec(spec)
    _check_spec(spec)
    streams = np.random.SeedSequence(spec.seed).spawn(3)
    texture_seq, noise_seq, extrinsic_seq = streams
    surface = make_surface(spec.surface)
    bands = [CrackBand(c) for c in spec.cracks]
    band_by_id = {c.crack_id: b for c, b in zip(spec.cracks, bands)}
    texture = ValueNoise(spec.texture, int(texture_seq.generate_state(1)[0]))
    cam = spec.camera

    samples = surface.sample()
    labels = samples.on_crack_face & crack_mask(bands, samples.coords)
    value = albedo(texture, samples.points, labels)
    points = samples.points
    if spec.noise > 0:
        rng = np.random.default_rng(noise_seq)
        offsets = rng.normal(0.0, spec.noise, len(points))
        points = points + offsets[:, None] * samples.normals
    cloud = PointCloud(points=points, intensity=value, intensity_max=1.0)
    gt_colors = np.repeat(to_gray(value)[:, None], 3, axis=1)

    shots = list(spec.shots) or _auto_shots(spec, surface)
    times = _timestamps(spec, shots)
    poses: list[tuple[str, str, RigidPose]] = []
    for i, shot in enumerate(shots):
        up = shot.up if shot.up is not None else (0.0, 0.0, 1.0)
        pose = RigidPose.look_at(shot.eye, shot.target, up)
        poses.append(("survey", f"f{i:03d}", pose))

    sites: list[SiteTruth] = []
    site_points = []
    for k, site in enumerate(spec.sites):
        band = band_by_id[site.crack_id]
        coords, tangent, width = band.point_at(site.fraction)
        point, normal = surface.frame_at(*coords)
        up = surface.tangent_at(coords[0], coords[1], tangent[0], tangent[1])
        pose = RigidPose.look_at(point + site.distance * normal, point, up)
        frame_id = f"s{k:03d}"
        poses.append(("site", frame_id, pose))
        site_points.append((site, frame_id, point, width, pose))

    frames = []
    for (kind, frame_id, pose), t in zip(poses, times):
        pose = pose.with_timestamp(t)
        image, mask = render_view(surface, bands, texture, cam, pose, timestamp=t)
        frames.append(
            SceneFrame(
                frame_id=frame_id,
                timestamp=t,
                kind=kind,
                image=image,
                mask=mask,
                camera_pose=pose,
            )
        )
        log.debug("Rendered %s frame %s: %d crack pixels", kind, frame_id, mask.area)

    seeds = []
    for k, (site, frame_id, point, width, pose) in enumerate(site_points):
        u, v = project(cam, transform_point(pose.inverse(), point))
        site_id = site.site_id or f"{site.crack_id}-{k:02d}"
        seeds.append(SeedEntry(crack_id=site_id, u=u, v=v, frame_id=frame_id))
        sites.append(
            SiteTruth(
                site_id=site_id,
                crack_id=site.crack_id,
                frame_id=frame_id,
                seed=(u, v),
                point=tuple(float(x) for x in point),
                width=width,
            )
        )

    trajectory = Trajectory(
        [
            f.camera_pose.compose(spec.extrinsic).with_timestamp(f.timestamp)
            for f in frames
        ]
    )
    extrinsic_init = _perturbed(spec, np.random.default_rng(extrinsic_seq))
    ground_truth = GroundTruth(
        spec=spec,
        extrinsic=spec.extrinsic,
        camera_poses={f.frame_id: f.camera_pose for f in frames},
        sites=sites,
        labels=labels.astype(np.int64),
        colors=gt_colors,
    )
    log.info(
        "Generated scene %s: %d points (%d crack), %d frames, %d sites",
        spec.name,
        len(cloud),
        int(labels.sum()),
        len(frames),
        len(sites),
    )
    return SyntheticScene(
        cloud=cloud,
        trajectory=trajectory,
        frames=frames,
        camera=cam,
        extrinsic_init=extrinsic_init,
        seeds=seeds,
        ground_truth=ground_truth,
    )


def ground_truth_width_at(
    gt: GroundTruth, pixel: tuple[float, float], frame_id: str
) -> float:
    """True crack width (meters) under ``pixel`` of frame ``frame_id``, taken
    at the nearest centerline point of the band the pixel falls into.

    Raises:
        NotOnCrack: The pixel does not see a crack band.
    """
    pose = gt.camera_poses.get(frame_id)
    if pose is None:
        raise NotOnCrack(f"Unknown frame '{frame_id}'.")
    surface = make_surface(gt.spec.surface)
    origin, direction = back_project_ray(gt.spec.camera, pose, *pixel)
    hits = surface.intersect(origin[None, :], direction[None, :])
    if not hits.on_crack_face[0]:
        raise NotOnCrack()

    best = None
    for crack in gt.spec.cracks:
        dist, width = CrackBand(crack).nearest(hits.coords[:1])
        if dist[0] <= width[0] / 2.0 and (best is None or dist[0] < best[0]):
            best = (float(dist[0]), float(width[0]))
    if best is None:
        raise NotOnCrack()
    return best[1]


def write_scene(
    scene: SyntheticScene, directory: str | Path, *, binary: bool = True
) -> SceneLayout:
    """Write a scene in the on-disk layout the other commands read."""
    layout = SceneLayout.in_directory(directory)
    try:
        (layout.root / "images").mkdir(parents=True, exist_ok=True)
        (layout.root / "masks").mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise IoError(f"Cannot create {layout.root}: {e}", original_error=e) from e

    encoding = "binary" if binary else "ascii"
    gt = scene.ground_truth
    save_point_cloud(
        scene.cloud.with_attributes(label=None, color=None), layout.cloud, encoding
    )
    save_point_cloud(
        scene.cloud.with_attributes(label=gt.labels, color=gt.colors),
        layout.cloud_gt,
        encoding,
    )
    save_trajectory(scene.trajectory, layout.trajectory)
    save_pose(gt.extrinsic, layout.extrinsic_true)
    save_pose(scene.extrinsic_init, layout.extrinsic_init)
    save_camera(scene.camera, layout.camera)

    entries = []
    for frame in scene.frames:
        image_path = layout.root / "images" / f"{frame.frame_id}.png"
        mask_path = layout.root / "masks" / f"{frame.frame_id}.png"
        save_image(frame.image, image_path)
        save_mask(frame.mask, mask_path)
        entries.append(
            FrameEntry(
                frame_id=frame.frame_id,
                timestamp=frame.timestamp,
                image=image_path,
                mask=mask_path,
            )
        )
    save_frames(entries, layout.frames)
    save_seeds(scene.seeds, layout.seeds)
    save_reference_widths(gt.reference_widths_mm(), layout.widths)
    try:
        layout.spec.write_text(gt.spec.to_yaml(), encoding="utf-8")
    except OSError as e:
        raise IoError(f"Cannot write {layout.spec}: {e}", original_error=e) from e
    log.info("Wrote scene with %d frames to %s", len(scene.frames), layout.root)
    return layout
