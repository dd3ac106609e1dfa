from ..core.operations import StageOperation
from . import stages

_LOAD_OP = StageOperation(
    name="load",
    func=stages.load_inputs,
    description="Read the cloud, poses, camera, frames and seeds",
    inputs=("paths",),
    output_name="inputs",
)

_CALIBRATE_OP = StageOperation(
    name="calibrate",
    func=stages.calibrate,
    description="Refine the LiDAR-camera extrinsic by minimizing mean NID",
    inputs=("inputs", "cfg"),
    optional=True,
    output_name="calibration",
)

_REFINE_MASKS_OP = StageOperation(
    name="refine-masks",
    func=stages.refine_masks,
    description="Run prompt-based refinement on every frame mask",
    inputs=("inputs", "cfg"),
    optional=True,
    output_name="masks",
)

_DENOISE_OP = StageOperation(
    name="denoise",
    func=stages.denoise,
    description="Crop, statistical outlier removal and MLS smoothing",
    inputs=("cloud", "cfg"),
    output_name="cloud",
)

_FUSE_OP = StageOperation(
    name="fuse",
    func=stages.fuse,
    description="Transfer colors and crack labels from the frames to the cloud",
    inputs=("cloud", "frames", "inputs", "cfg"),
    output_name="fused",
)

_MEASURE_OP = StageOperation(
    name="measure",
    func=stages.measure,
    description="Measure crack widths at every seed",
    inputs=("cloud", "frames", "inputs", "params"),
    output_name="sites",
)

_EVALUATE_OP = StageOperation(
    name="evaluate",
    func=stages.evaluate,
    description="Density, roughness, mask agreement and width errors",
    inputs=("cloud", "inputs", "cfg", "masks", "sites"),
    output_name="report",
)
