from pathlib import Path

import pytest

from crackscan.pipeline.config import parse_pipeline_config
from crackscan.pipeline.schemas import PipelineConfig
from crackscan.synth.scene import generate_scene, write_scene
from crackscan.synth.schemas import CrackSpec, SceneLayout, SceneSpec, SiteSpec

SURVEY_CRACKS = [
    CrackSpec(
        crack_id=f"c{i + 1}",
        centerline=[(0.1, y), (0.5, y + 0.01)],
        width=start,
        end_width=end,
    )
    for i, (y, start, end) in enumerate(
        [
            (0.05, 0.0017, 0.0013),
            (0.12, 0.0012, 0.0009),
            (0.19, 0.0009, 0.0006),
            (0.26, 0.0006, 0.0004),
            (0.33, 0.0004, 0.0002),
        ]
    )
]

SURVEY_SITES = [
    SiteSpec(crack_id=crack.crack_id, fraction=fraction)
    for crack in SURVEY_CRACKS
    for fraction in (0.2, 0.5, 0.8)
]


def _survey_spec(kind: str, **overrides) -> SceneSpec:
    """Fifteen measurement sites, 0.2 to 1.7 mm wide, on a 1 mm noisy scan."""
    surface = {"kind": kind, "size": (0.6, 0.4), "spacing": 0.001}
    if kind == "cylinder":
        surface["radius"] = 0.15
    return SceneSpec.model_validate(
        {
            "name": f"survey-{kind}",
            "seed": 3,
            "surface": surface,
            "cracks": SURVEY_CRACKS,
            "sites": SURVEY_SITES,
            "noise": 0.0005,
            **overrides,
        }
    )


def _pipeline_config(layout: SceneLayout, output_dir: Path, **overrides):
    data = {
        "paths": {
            "cloud": layout.cloud,
            "trajectory": layout.trajectory,
            "camera": layout.camera,
            "frames": layout.frames,
            "extrinsic": layout.extrinsic_true,
            "seeds": layout.seeds,
            "reference_widths": layout.widths,
            "ground_truth_masks": layout.frames,
        },
        "output_dir": output_dir,
        **overrides,
    }
    return parse_pipeline_config(data)


@pytest.fixture(scope="session")
def default_scene():
    return generate_scene(SceneSpec(name="acceptance", seed=7))


@pytest.fixture(scope="session")
def default_scene_dir(default_scene, tmp_path_factory) -> SceneLayout:
    return write_scene(default_scene, tmp_path_factory.mktemp("acceptance"))


@pytest.fixture
def default_config(default_scene_dir, tmp_path) -> PipelineConfig:
    return _pipeline_config(default_scene_dir, tmp_path / "out")


@pytest.fixture(scope="session")
def survey_spec():
    return _survey_spec


@pytest.fixture
def config_for(tmp_path):
    def _create(layout: SceneLayout, name: str = "out", **overrides):
        return _pipeline_config(layout, tmp_path / name, **overrides)

    return _create
