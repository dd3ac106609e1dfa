import asyncio
import logging
from typing import Optional

import numpy as np

from ..exceptions import CrackscanError
from ..formats.schemas import BinaryMask, RasterImage
from .prompts import cluster_prompts, make_crop_batches, sample_prompts
from .quality import assess_quality
from .refiners import RefinerInterface
from .schemas import CropOutcome, MaskParams, MaskRefinement, PromptSet, RefineRequest
from .skeleton import medial_axis_transform

log = logging.getLogger(__name__)


def generate_prompts(base: BinaryMask, params: MaskParams) -> PromptSet:
    skeleton, edt = medial_axis_transform(base)
    points = sample_prompts(skeleton, edt, params.k, params.min_dist)
    ids = cluster_prompts(points, params.eps, params.min_pts)
    rects = make_crop_batches(points, ids, params.dilation, base.width, base.height)
    return PromptSet(points=points, cluster_ids=ids, crop_rects=rects)


async def _refine_crop(
    refiner: RefinerInterface,
    request: RefineRequest,
    params: MaskParams,
    semaphore: asyncio.Semaphore,
) -> tuple[Optional[BinaryMask], CropOutcome]:
    async with semaphore:
        try:
            refined = await refiner.refine(request)
            verdict = assess_quality(
                request.prior, refined, params.max_size_ratio, params.max_holes
            )
        except CrackscanError as e:
            log.warning(f"Refiner {refiner.name} failed on crop {request.rect}: {e}")
            return None, CropOutcome(rect=request.rect, error=str(e))
        except Exception as e:
            log.warning(
                f"Refiner {refiner.name} crashed on crop {request.rect}: {e!r}",
                exc_info=True,
            )
            return None, CropOutcome(rect=request.rect, error=repr(e))
    if not verdict.accepted:
        log.info("Crop %s rejected: %s", request.rect, verdict.reason)
        return None, CropOutcome(rect=request.rect, verdict=verdict)
    return refined, CropOutcome(rect=request.rect, verdict=verdict)


async def refine_mask_detailed(
    image: RasterImage,
    base: BinaryMask,
    refiner: RefinerInterface,
    params: Optional[MaskParams] = None,
) -> MaskRefinement:
    params = params or MaskParams()
    base.check_dimensions(image.width, image.height)
    prompts = generate_prompts(base, params)

    requests = []
    for cid, rect in enumerate(prompts.crop_rects):
        u0, v0, _, _ = rect
        local = prompts.members(cid) - np.array([u0, v0])
        requests.append(
            RefineRequest(
                image=image.crop(rect), prompts=local, rect=rect, prior=base.crop(rect)
            )
        )

    semaphore = asyncio.Semaphore(params.concurrency)
    results = await asyncio.gather(
        *(_refine_crop(refiner, r, params, semaphore) for r in requests)
    )

    merged = base.bits.copy()
    outcomes = []
    for (refined, outcome), request in zip(results, requests):
        outcomes.append(outcome)
        if refined is None:
            continue
        u0, v0, w, h = request.rect
        merged[v0 : v0 + h, u0 : u0 + w] |= refined.bits

    result = MaskRefinement(
        mask=BinaryMask(bits=merged), prompts=prompts, outcomes=outcomes
    )
    log.info(
        "Refined mask: %d of %d crops accepted, area %d -> %d",
        result.accepted,
        len(requests),
        base.area,
        result.mask.area,
    )
    return result


async def refine_mask(
    image: RasterImage,
    base: BinaryMask,
    refiner: RefinerInterface,
    params: Optional[MaskParams] = None,
) -> BinaryMask:
    """Prompt the refiner around the base mask's skeleton and OR every crop
    that passes the quality gate into a copy of the base mask."""
    return (await refine_mask_detailed(image, base, refiner, params)).mask
