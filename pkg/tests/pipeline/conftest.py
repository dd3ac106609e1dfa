import pytest

from crackscan.pipeline.config import parse_pipeline_config
from crackscan.pipeline.stages import load_inputs


@pytest.fixture
def paths_config(scene_dir) -> dict:
    return {
        "cloud": str(scene_dir.cloud),
        "trajectory": str(scene_dir.trajectory),
        "camera": str(scene_dir.camera),
        "frames": str(scene_dir.frames),
        "extrinsic": str(scene_dir.extrinsic_true),
        "seeds": str(scene_dir.seeds),
        "reference_widths": str(scene_dir.widths),
        "ground_truth_masks": str(scene_dir.frames),
    }


@pytest.fixture
def config_factory(paths_config, tmp_path):
    def _create(**overrides):
        data = {
            "paths": paths_config,
            "output_dir": str(tmp_path / "out"),
            "workers": 2,
            "denoise": {"smooth": False},
            **overrides,
        }
        return parse_pipeline_config(data)

    return _create


@pytest.fixture(scope="session")
def scene_inputs(scene_dir):
    return load_inputs(
        parse_pipeline_config(
            {
                "paths": {
                    "cloud": scene_dir.cloud,
                    "trajectory": scene_dir.trajectory,
                    "camera": scene_dir.camera,
                    "frames": scene_dir.frames,
                    "extrinsic": scene_dir.extrinsic_true,
                    "seeds": scene_dir.seeds,
                    "reference_widths": scene_dir.widths,
                    "ground_truth_masks": scene_dir.frames,
                }
            }
        ).paths
    )
