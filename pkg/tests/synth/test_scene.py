import numpy as np
import pytest

from crackscan.exceptions import InvalidSpec, NotOnCrack, ParseError
from crackscan.formats.cloud import load_point_cloud
from crackscan.formats.listings import (
    load_camera,
    load_frames,
    load_reference_widths,
    load_seeds,
)
from crackscan.formats.trajectory import load_pose, load_trajectory
from crackscan.synth.scene import (
    generate_scene,
    ground_truth_width_at,
    load_scene_spec,
    parse_scene_spec,
    write_scene,
)
from crackscan.synth.schemas import SceneSpec


def _crack(crack_id, centerline, width=0.001):
    return {"crack_id": crack_id, "centerline": centerline, "width": width}


@pytest.fixture
def small_spec(small_scene_spec) -> SceneSpec:
    return small_scene_spec


@pytest.fixture
def scene(small_scene):
    return small_scene


class TestGenerateScene:
    def test_layout_of_a_default_scene(self, scene):
        assert len(scene.cloud) == 151 * 101
        assert [f.kind for f in scene.frames] == ["survey"] * 5 + ["site"] * 3
        assert [f.timestamp for f in scene.frames] == pytest.approx(
            [0.1 * i for i in range(8)]
        )
        assert len(scene.trajectory) == 8
        assert [s.crack_id for s in scene.seeds] == ["c1-00", "c1-01", "c2-02"]

    def test_identical_specs_give_identical_scenes(self, small_spec, scene):
        again = generate_scene(small_spec)

        np.testing.assert_array_equal(again.cloud.points, scene.cloud.points)
        np.testing.assert_array_equal(again.cloud.intensity, scene.cloud.intensity)
        for a, b in zip(again.frames, scene.frames):
            np.testing.assert_array_equal(a.image.pixels, b.image.pixels)
            np.testing.assert_array_equal(a.mask.bits, b.mask.bits)
        assert again.extrinsic_init == scene.extrinsic_init

    def test_seed_changes_texture_only(self, small_spec, scene):
        other = generate_scene(small_spec.model_copy(update={"seed": 12}))

        np.testing.assert_array_equal(other.cloud.points, scene.cloud.points)
        assert not np.array_equal(other.cloud.intensity, scene.cloud.intensity)
        np.testing.assert_array_equal(
            other.ground_truth.labels, scene.ground_truth.labels
        )

    def test_site_widths_follow_the_taper(self, scene):
        widths = {s.site_id: s.width for s in scene.ground_truth.sites}

        assert widths["c1-00"] == pytest.approx(0.001)
        assert widths["c1-01"] == pytest.approx(0.001)
        assert widths["c2-02"] == pytest.approx(0.0006)
        assert scene.ground_truth.reference_widths_mm()["c2-02"] == pytest.approx(
            0.6
        )

    def test_site_seeds_fall_on_the_crack(self, scene):
        for seed in scene.seeds[:2]:
            mask = scene.frame(seed.frame_id).mask

            assert mask.bits[int(round(seed.v)), int(round(seed.u))]

    def test_labels_mark_crack_points(self, scene):
        gt = scene.ground_truth
        crack = gt.labels == 1

        assert 0 < crack.sum() < len(gt.labels)
        assert np.all(gt.colors[crack] == gt.colors[crack][0])

    def test_initial_extrinsic_is_perturbed(self, scene, small_spec):
        true = scene.ground_truth.extrinsic

        angle = true.rotation_angle_to(scene.extrinsic_init)

        assert np.rad2deg(angle) == pytest.approx(
            small_spec.perturbation.rotation_deg
        )

    def test_noise_moves_points_along_normals(self, small_spec, scene):
        noisy = generate_scene(small_spec.model_copy(update={"noise": 0.001}))

        np.testing.assert_allclose(
            noisy.cloud.points[:, :2], scene.cloud.points[:, :2]
        )
        assert np.std(noisy.cloud.points[:, 2]) == pytest.approx(0.001, rel=0.1)


class TestGroundTruthWidth:
    def test_width_under_seed(self, scene):
        gt = scene.ground_truth
        site = gt.sites[2]

        width = ground_truth_width_at(gt, site.seed, site.frame_id)

        assert width == pytest.approx(site.width, rel=1e-3)

    def test_background_pixel(self, scene):
        site = scene.ground_truth.sites[0]

        with pytest.raises(NotOnCrack):
            ground_truth_width_at(scene.ground_truth, (0.0, 0.0), site.frame_id)

    def test_unknown_frame(self, scene):
        with pytest.raises(NotOnCrack):
            ground_truth_width_at(scene.ground_truth, (80.0, 60.0), "nope")


class TestSceneSpec:
    @pytest.mark.parametrize(
        "update",
        [
            {"cracks": [_crack("a", [(0, 0), (0.1, 0)])] * 2},
            {"cracks": [_crack("a", [(0, 0), (0.9, 0)])]},
            {"cracks": [_crack("a", [(0.1, 0.1), (0.1, 0.1)])]},
            {"sites": [{"crack_id": "zz"}]},
        ],
        ids=["Duplicate ids", "Leaves surface", "Zero segment", "Unknown crack"],
    )
    def test_inconsistent_specs(self, update):
        data = {"sites": [], **update}

        with pytest.raises(InvalidSpec):
            generate_scene(data)

    def test_schema_errors_become_invalid_spec(self):
        with pytest.raises(InvalidSpec):
            parse_scene_spec({"surface": {"kind": "cylinder", "size": (0.4, 2.0)}})

    def test_non_mapping(self):
        with pytest.raises(InvalidSpec):
            parse_scene_spec(["plane"])

    def test_yaml_round_trip(self, tmp_path, small_spec):
        path = tmp_path / "scene.yaml"
        path.write_text(small_spec.to_yaml(), encoding="utf-8")

        assert load_scene_spec(path) == small_spec

    def test_invalid_yaml(self, tmp_path):
        path = tmp_path / "scene.yaml"
        path.write_text("surface: [unclosed", encoding="utf-8")

        with pytest.raises(ParseError):
            load_scene_spec(path)


class TestWriteScene:
    def test_files_can_be_read_back(self, tmp_path, scene):
        layout = write_scene(scene, tmp_path / "scene")

        cloud = load_point_cloud(layout.cloud)
        cloud_gt = load_point_cloud(layout.cloud_gt)
        frames = load_frames(layout.frames)

        assert len(cloud) == len(scene.cloud)
        assert cloud.label is None
        np.testing.assert_array_equal(cloud_gt.label, scene.ground_truth.labels)
        assert [f.frame_id for f in frames] == [f.frame_id for f in scene.frames]
        assert all(f.image.exists() and f.mask.exists() for f in frames)
        assert len(load_trajectory(layout.trajectory)) == 8
        extrinsic = load_pose(layout.extrinsic_true)
        assert extrinsic.rotation_angle_to(scene.ground_truth.extrinsic) < 1e-9
        assert extrinsic.translation_distance_to(scene.ground_truth.extrinsic) < 1e-9
        assert load_camera(layout.camera) == scene.camera
        assert [s.crack_id for s in load_seeds(layout.seeds)] == [
            "c1-00",
            "c1-01",
            "c2-02",
        ]
        assert load_reference_widths(layout.widths)["c1-00"] == pytest.approx(1.0)
        assert load_scene_spec(layout.spec) == scene.ground_truth.spec
