"""Stage composition with domain tracking, and the pipeline-order ablation.

A pipeline starts from a noisy Bayer mosaic (domain "mosaic", scale 1) and
must end in the color domain at the target scale, applying exactly one
demosaic (DM) plus at most one denoise (DN) and one super-resolve (SR) in
any order. Mosaic-domain DN/SR act on the packed four-plane representation.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from itertools import permutations
from typing import Optional, Sequence

import numpy as np

from .bayer import BayerMosaic, ColorImage, pack, unpack
from .classical import (
    demosaic_bilinear,
    demosaic_malvar,
    denoise_gaussian,
    denoise_wiener,
    sr_bicubic,
)
from .degrade import DegradationSpec, degrade, derive_seed
from .metrics import psnr, ssim

# Detail-band cutoff used when a DN stage is conditioned on the declared
# input noise level: sigma_f = DN_STRENGTH * (sigma/255). The filter is tied
# to the white-noise process the denoiser assumes, not to the current
# resolution, mirroring denoisers built for a declared noise level.
# Calibrated once at sigma=10, x2 on a held-out synthetic image, then frozen.
DN_STRENGTH = 20.0

DM_METHODS = {"bilinear": demosaic_bilinear, "malvar": demosaic_malvar}
DN_METHODS = ("wiener", "gaussian")


class PipelineError(ValueError):
    pass


@dataclass
class StageOperator:
    kind: str  # DN | SR | DM
    domain: str  # mosaic | color (for DM: the input domain, always mosaic)
    method: str = ""  # DM: bilinear | malvar; DN: wiener | gaussian
    factor: int = 1  # SR upsampling factor
    sigma_f: Optional[float] = None  # DN: explicit filter sigma; None = derive


@dataclass
class SignalState:
    domain: str = "mosaic"
    scale: int = 1


@dataclass
class PipelineSpec:
    stages: list[StageOperator]
    target_scale: int = 2
    dn_strength: float = DN_STRENGTH


def make_pipeline(
    order: Sequence[str],
    target_scale: int = 2,
    dm_method: str = "malvar",
    dn_method: str = "wiener",
    dn_strength: float = DN_STRENGTH,
) -> PipelineSpec:
    """Build a PipelineSpec from a stage-kind order such as ("DN", "SR", "DM").

    Stage domains are derived from position: everything before DM runs in the
    mosaic domain, everything after in the color domain.
    """
    if dm_method not in DM_METHODS:
        raise PipelineError(f"unknown demosaic method {dm_method!r}")
    if dn_method not in DN_METHODS:
        raise PipelineError(f"unknown denoise method {dn_method!r}")
    stages = []
    domain = "mosaic"
    for kind in order:
        kind = kind.upper()
        if kind == "DM":
            stages.append(StageOperator(kind="DM", domain="mosaic", method=dm_method))
            domain = "color"
        elif kind == "SR":
            stages.append(StageOperator(kind="SR", domain=domain, factor=target_scale))
        elif kind == "DN":
            stages.append(StageOperator(kind="DN", domain=domain, method=dn_method))
        else:
            raise PipelineError(f"unknown stage kind {kind!r}")
    return PipelineSpec(stages=stages, target_scale=target_scale, dn_strength=dn_strength)


def validate(spec: PipelineSpec) -> Optional[str]:
    """Return None if the spec is executable, else a description of the
    first violated constraint."""
    state = SignalState()
    counts = {"DN": 0, "SR": 0, "DM": 0}
    for i, stage in enumerate(spec.stages):
        if stage.kind not in counts:
            return f"stage {i}: unknown kind {stage.kind!r}"
        counts[stage.kind] += 1
        if counts[stage.kind] > 1:
            return f"stage {i}: duplicate {stage.kind}"
        if stage.kind == "DM":
            if state.domain != "mosaic":
                return f"stage {i}: DM requires mosaic input, state is {state.domain}"
            if stage.domain != "mosaic":
                return f"stage {i}: DM declared with domain {stage.domain!r}"
            if stage.method not in DM_METHODS:
                return f"stage {i}: unknown demosaic method {stage.method!r}"
            state.domain = "color"
        else:
            if stage.domain != state.domain:
                return (
                    f"stage {i}: {stage.kind} declared for domain "
                    f"{stage.domain!r} but state is {state.domain!r}"
                )
            if stage.kind == "DN" and stage.method not in ("",) + DN_METHODS:
                return f"stage {i}: unknown denoise method {stage.method!r}"
            if stage.kind == "SR":
                if stage.factor < 1:
                    return f"stage {i}: SR factor must be >= 1"
                state.scale *= stage.factor
    if counts["DM"] == 0:
        return "missing DM: terminal domain is mosaic, not color"
    if state.scale != spec.target_scale:
        return f"terminal scale {state.scale} != target {spec.target_scale}"
    return None


def run(spec: PipelineSpec, mosaic: BayerMosaic, noise_sigma: float = 0.0) -> ColorImage:
    """Execute the stages left to right. Each DN without an explicit sigma_f
    is conditioned on noise_sigma (the declared input noise level, 0-255):
    sigma_f = dn_strength * noise_sigma/255. noise_sigma = 0 makes DN the
    identity."""
    err = validate(spec)
    if err is not None:
        raise PipelineError(err)
    state = SignalState()
    x = mosaic
    for stage in spec.stages:
        if stage.kind == "DM":
            x = DM_METHODS[stage.method](x)
            state.domain = "color"
        elif stage.kind == "DN":
            sigma_n = noise_sigma / 255.0
            sigma_f = stage.sigma_f
            if sigma_f is None:
                sigma_f = spec.dn_strength * sigma_n
            if stage.method == "gaussian":
                op = lambda planes: denoise_gaussian(planes, sigma_f)
            else:
                op = lambda planes: denoise_wiener(planes, sigma_n, sigma_f)
            if state.domain == "mosaic":
                x = unpack(op(pack(x)))
            else:
                x = op(x)
        elif stage.kind == "SR":
            if state.domain == "mosaic":
                x = unpack(sr_bicubic(pack(x), stage.factor))
            else:
                x = sr_bicubic(x, stage.factor)
            state.scale *= stage.factor
    return x


ALL_ORDERS = tuple(permutations(("DN", "SR", "DM")))


def order_name(order: Sequence[str]) -> str:
    return ">".join(order)


@dataclass
class OrderingResult:
    ordering: str
    mean_psnr_db: float
    mean_ssim: float
    n_images: int
    sigma: float
    scale: int


@dataclass
class OrderingReport:
    rows: list[OrderingResult] = field(default_factory=list)

    def to_csv(self, fileobj) -> None:
        writer = csv.writer(fileobj)
        writer.writerow(["ordering", "mean_psnr_db", "mean_ssim", "n_images", "sigma", "scale"])
        for r in self.rows:
            writer.writerow(
                [r.ordering, f"{r.mean_psnr_db:.4f}", f"{r.mean_ssim:.6f}", r.n_images, r.sigma, r.scale]
            )

    def csv_text(self) -> str:
        buf = io.StringIO()
        self.to_csv(buf)
        return buf.getvalue()

    def by_ordering(self) -> dict[str, OrderingResult]:
        return {r.ordering: r for r in self.rows}


def evaluate_orders_on_image(
    gt: ColorImage,
    sigma: float,
    scale: int,
    seed: int,
    dm_method: str = "bilinear",
    dn_method: str = "wiener",
    dn_strength: float = DN_STRENGTH,
) -> dict[str, tuple[float, float]]:
    """Degrade one GT image and run all six orderings on it.

    Returns {ordering: (psnr_db, ssim)} against the ground truth.
    """
    pair = degrade(gt, DegradationSpec(scale=scale, sigma=sigma, seed=seed))
    out = {}
    for order in ALL_ORDERS:
        spec = make_pipeline(
            order,
            target_scale=scale,
            dm_method=dm_method,
            dn_method=dn_method,
            dn_strength=dn_strength,
        )
        restored = run(spec, pair.lr_mosaic_noisy, noise_sigma=sigma)
        out[order_name(order)] = (psnr(restored, gt), ssim(restored, gt))
    return out


def ablate_orders(
    dataset: Sequence[ColorImage],
    sigma: float = 10.0,
    scale: int = 2,
    seed: int = 0,
    dm_method: str = "bilinear",
    dn_method: str = "wiener",
    dn_strength: float = DN_STRENGTH,
    per_image: Optional[list] = None,
) -> OrderingReport:
    """Run the six-ordering ablation over a dataset and aggregate mean
    PSNR/SSIM per ordering, sorted descending by PSNR.

    Per-image degradation seeds are derived as seed ^ image_index. If
    ``per_image`` is a list, per-image metric dicts are appended to it.
    """
    if len(dataset) == 0:
        raise ValueError("ablate_orders requires at least one image")
    sums = {order_name(o): [0.0, 0.0] for o in ALL_ORDERS}
    for i, gt in enumerate(dataset):
        scores = evaluate_orders_on_image(
            gt, sigma, scale, derive_seed(seed, i), dm_method, dn_method, dn_strength
        )
        if per_image is not None:
            per_image.append(scores)
        for name, (p, s) in scores.items():
            sums[name][0] += p
            sums[name][1] += s
    n = len(dataset)
    rows = [
        OrderingResult(
            ordering=name,
            mean_psnr_db=acc[0] / n,
            mean_ssim=acc[1] / n,
            n_images=n,
            sigma=sigma,
            scale=scale,
        )
        for name, acc in sums.items()
    ]
    rows.sort(key=lambda r: r.mean_psnr_db, reverse=True)
    return OrderingReport(rows=rows)
