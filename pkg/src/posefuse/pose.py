"""Pose representation and body-part affine geometry.

A pose is 14 keypoints in pixel coordinates with per-keypoint visibility.
Heatmaps are one full-resolution Gaussian per keypoint; body parts are small
keypoint groups that move (approximately) rigidly, so the transfer of one part
between two poses is a 2x3 affine estimated from its keypoints.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
import torch

from .errors import DegeneratePartError

NUM_KEYPOINTS = 14

KEYPOINT_NAMES = (
    "head_top",
    "neck",
    "r_shoulder",
    "r_elbow",
    "r_wrist",
    "l_shoulder",
    "l_elbow",
    "l_wrist",
    "r_hip",
    "r_knee",
    "r_ankle",
    "l_hip",
    "l_knee",
    "l_ankle",
)

KEYPOINT_INDEX = {name: i for i, name in enumerate(KEYPOINT_NAMES)}

DEFAULT_HEATMAP_SIGMA = 3.0  # px at 64x64; scale with resolution


@dataclass
class Pose:
    """Keypoint locations (x, y) in pixels plus visibility flags."""

    keypoints: np.ndarray  # [14, 2] float64, (x, y)
    visible: np.ndarray  # [14] bool

    def __post_init__(self):
        self.keypoints = np.asarray(self.keypoints, dtype=np.float64)
        self.visible = np.asarray(self.visible, dtype=bool)
        if self.keypoints.shape != (NUM_KEYPOINTS, 2):
            raise ValueError(f"expected [{NUM_KEYPOINTS}, 2] keypoints, got {self.keypoints.shape}")
        if self.visible.shape != (NUM_KEYPOINTS,):
            raise ValueError(f"expected [{NUM_KEYPOINTS}] visibility flags, got {self.visible.shape}")

    @classmethod
    def from_triples(cls, triples: Sequence[Sequence[float]]) -> "Pose":
        """Build from the on-disk [x, y, visible] triple list."""
        arr = np.asarray(triples, dtype=np.float64)
        if arr.shape != (NUM_KEYPOINTS, 3):
            raise ValueError(f"expected {NUM_KEYPOINTS} [x, y, visible] triples, got {arr.shape}")
        return cls(keypoints=arr[:, :2], visible=arr[:, 2] > 0.5)

    def to_triples(self) -> list[list[float]]:
        return [
            [float(x), float(y), 1.0 if v else 0.0]
            for (x, y), v in zip(self.keypoints, self.visible)
        ]

    def validate_bounds(self, height: int, width: int) -> None:
        vis = self.keypoints[self.visible]
        if vis.size == 0:
            return
        if (vis[:, 0] < 0).any() or (vis[:, 0] >= width).any() \
                or (vis[:, 1] < 0).any() or (vis[:, 1] >= height).any():
            raise ValueError("visible keypoint outside [0, W) x [0, H)")


# Ten rigid-ish segments covering all 14 keypoints. Each part lists the
# keypoint names that define it; consecutive pairs are its bones.
DEFAULT_PART_LAYOUT: tuple[tuple[str, tuple[str, ...]], ...] = (
    ("head", ("neck", "head_top")),
    ("torso", ("r_shoulder", "l_shoulder", "l_hip", "r_hip")),
    ("r_upper_arm", ("r_shoulder", "r_elbow")),
    ("r_forearm", ("r_elbow", "r_wrist")),
    ("l_upper_arm", ("l_shoulder", "l_elbow")),
    ("l_forearm", ("l_elbow", "l_wrist")),
    ("r_thigh", ("r_hip", "r_knee")),
    ("r_shin", ("r_knee", "r_ankle")),
    ("l_thigh", ("l_hip", "l_knee")),
    ("l_shin", ("l_knee", "l_ankle")),
)


class BodyPartLayout:
    """Partition of the 14 keypoints into named parts (default: 10 segments)."""

    def __init__(self, parts=DEFAULT_PART_LAYOUT):
        self.parts: dict[str, tuple[int, ...]] = {}
        self.part_names: tuple[str, ...] = tuple(name for name, _ in parts)
        for name, kp_names in parts:
            idx = tuple(KEYPOINT_INDEX[k] if isinstance(k, str) else int(k) for k in kp_names)
            if len(idx) < 2:
                raise ValueError(f"part {name!r} needs >= 2 keypoints")
            if any(i < 0 or i >= NUM_KEYPOINTS for i in idx):
                raise ValueError(f"part {name!r} has out-of-range keypoint index")
            self.parts[name] = idx

    def indices(self, part: str) -> tuple[int, ...]:
        if part not in self.parts:
            raise KeyError(f"unknown part {part!r}")
        return self.parts[part]

    def bones(self, part: str) -> list[tuple[int, int]]:
        idx = self.indices(part)
        return [(idx[i], idx[i + 1]) for i in range(len(idx) - 1)]


def render_heatmap(pose: Pose, height: int, width: int, sigma: float) -> torch.Tensor:
    """Render one Gaussian channel per keypoint; invisible keypoints are zero.

    channel_k(x, y) = exp(-((x - x_k)^2 + (y - y_k)^2) / (2 sigma^2))
    """
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    ys = np.arange(height, dtype=np.float64)[:, None]
    xs = np.arange(width, dtype=np.float64)[None, :]
    out = np.zeros((NUM_KEYPOINTS, height, width), dtype=np.float64)
    for k in range(NUM_KEYPOINTS):
        if not pose.visible[k]:
            continue
        x_k, y_k = pose.keypoints[k]
        d2 = (xs - x_k) ** 2 + (ys - y_k) ** 2
        out[k] = np.exp(-d2 / (2.0 * sigma * sigma))
    return torch.from_numpy(out.astype(np.float32))


def heatmap_to_pose(heatmap: torch.Tensor) -> Pose:
    """Recover keypoints from a heatmap via per-channel argmax.

    A channel whose maximum is ~0 is treated as an invisible keypoint.
    """
    hm = heatmap.detach().cpu().numpy()
    if hm.ndim != 3 or hm.shape[0] != NUM_KEYPOINTS:
        raise ValueError(f"expected [{NUM_KEYPOINTS}, H, W] heatmap, got {tuple(hm.shape)}")
    kps = np.zeros((NUM_KEYPOINTS, 2), dtype=np.float64)
    vis = np.zeros(NUM_KEYPOINTS, dtype=bool)
    for k in range(NUM_KEYPOINTS):
        peak = hm[k].max()
        if peak < 1e-6:
            continue
        y, x = np.unravel_index(int(hm[k].argmax()), hm[k].shape)
        kps[k] = (x, y)
        vis[k] = True
    return Pose(keypoints=kps, visible=vis)


class PartAffine(NamedTuple):
    matrix: np.ndarray  # [2, 3], maps source (x, y) to destination (x, y)
    similarity_fallback: bool


def _similarity_from_points(src: np.ndarray, dst: np.ndarray) -> np.ndarray:
    """Least-squares similarity (rotation + uniform scale + translation).

    Complex formulation: dst ~= a * src + b with a, b complex. Exact for two
    distinct points; for more points it is the least-squares similarity
    (without reflection).
    """
    s = src[:, 0] + 1j * src[:, 1]
    d = dst[:, 0] + 1j * dst[:, 1]
    s_mean, d_mean = s.mean(), d.mean()
    s_c, d_c = s - s_mean, d - d_mean
    denom = np.sum(s_c * np.conj(s_c)).real
    if denom < 1e-12:
        raise DegeneratePartError("source keypoints coincide; similarity transform undefined")
    a = np.sum(d_c * np.conj(s_c)) / denom
    b = d_mean - a * s_mean
    return np.array(
        [[a.real, -a.imag, b.real], [a.imag, a.real, b.imag]], dtype=np.float64
    )


def estimate_part_affine(
    src: Pose, dst: Pose, part: str, layout: BodyPartLayout | None = None
) -> PartAffine:
    """Estimate the 2x3 affine carrying one part's keypoints from src to dst.

    Parts with two usable keypoints get a similarity transform; three or more
    non-collinear points get the full least-squares affine. Collinear 3+ point
    configurations fall back to the similarity fit, signalled via the flag.
    """
    layout = layout or BodyPartLayout()
    idx = list(layout.indices(part))
    usable = [i for i in idx if src.visible[i] and dst.visible[i]]
    if len(usable) < 2:
        raise DegeneratePartError(
            f"part {part!r} has {len(usable)} keypoints visible in both poses; need >= 2"
        )
    pts_s = src.keypoints[usable]
    pts_d = dst.keypoints[usable]

    if len(usable) == 2:
        return PartAffine(_similarity_from_points(pts_s, pts_d), False)

    centered = pts_s - pts_s.mean(axis=0)
    sing = np.linalg.svd(centered, compute_uv=False)
    if sing[-1] < 1e-6 * max(sing[0], 1.0):
        return PartAffine(_similarity_from_points(pts_s, pts_d), True)

    design = np.concatenate([pts_s, np.ones((len(usable), 1))], axis=1)  # [n, 3]
    sol, *_ = np.linalg.lstsq(design, pts_d, rcond=None)  # [3, 2]
    return PartAffine(sol.T.copy(), False)


def _invert_affine(affine: np.ndarray) -> np.ndarray:
    a = np.asarray(affine, dtype=np.float64)
    if a.shape != (2, 3):
        raise ValueError(f"expected [2, 3] affine, got {a.shape}")
    lin, t = a[:, :2], a[:, 2]
    det = lin[0, 0] * lin[1, 1] - lin[0, 1] * lin[1, 0]
    if abs(det) < 1e-12:
        lin_inv = np.linalg.pinv(lin)
    else:
        lin_inv = np.array([[lin[1, 1], -lin[0, 1]], [-lin[1, 0], lin[0, 0]]]) / det
    return np.concatenate([lin_inv, (-lin_inv @ t)[:, None]], axis=1)


def _bilinear_gather(feature: torch.Tensor, sx: torch.Tensor, sy: torch.Tensor) -> torch.Tensor:
    """Sample feature [B, C, H, W] at float coords (sx, sy) [B, H, W].

    Bilinear, zero outside the image. Written with explicit floor/gather so
    that integer source coordinates reproduce input values exactly.
    """
    b, c, h, w = feature.shape
    x0 = torch.floor(sx)
    y0 = torch.floor(sy)
    wx = (sx - x0).unsqueeze(1)
    wy = (sy - y0).unsqueeze(1)
    x0 = x0.long()
    y0 = y0.long()
    batch_idx = torch.arange(b, device=feature.device).view(b, 1, 1).expand(b, h, w)

    def tap(xi, yi):
        inside = (xi >= 0) & (xi < w) & (yi >= 0) & (yi < h)
        xi_c = xi.clamp(0, w - 1)
        yi_c = yi.clamp(0, h - 1)
        vals = feature[batch_idx, :, yi_c, xi_c].permute(0, 3, 1, 2)  # [B, C, H, W]
        return vals * inside.unsqueeze(1).to(feature.dtype)

    v00 = tap(x0, y0)
    v01 = tap(x0 + 1, y0)
    v10 = tap(x0, y0 + 1)
    v11 = tap(x0 + 1, y0 + 1)
    top = v00 * (1 - wx) + v01 * wx
    bot = v10 * (1 - wx) + v11 * wx
    return top * (1 - wy) + bot * wy


def warp_affine_batch(features: torch.Tensor, affines: np.ndarray | torch.Tensor) -> torch.Tensor:
    """Inverse-warp a batch of feature maps by per-item forward affines.

    The affine maps source pixel coords to destination coords; the output at a
    destination pixel is the bilinear sample of the input at the inverse-mapped
    location, zero outside. Differentiable w.r.t. feature values.
    """
    if features.ndim != 4:
        raise ValueError(f"expected [B, C, H, W] features, got {tuple(features.shape)}")
    b, _, h, w = features.shape
    affs = np.asarray(
        affines.detach().cpu().numpy() if isinstance(affines, torch.Tensor) else affines,
        dtype=np.float64,
    )
    if affs.shape == (2, 3):
        affs = np.broadcast_to(affs, (b, 2, 3))
    if affs.shape != (b, 2, 3):
        raise ValueError(f"expected [{b}, 2, 3] affines, got {affs.shape}")
    if not np.isfinite(affs).all():
        raise ValueError("affine contains non-finite values")

    inv = np.stack([_invert_affine(a) for a in affs])  # [B, 2, 3]
    ys, xs = np.meshgrid(np.arange(h, dtype=np.float64), np.arange(w, dtype=np.float64), indexing="ij")
    # source coords per batch item: inv @ [x, y, 1]
    sx = inv[:, 0, 0, None, None] * xs + inv[:, 0, 1, None, None] * ys + inv[:, 0, 2, None, None]
    sy = inv[:, 1, 0, None, None] * xs + inv[:, 1, 1, None, None] * ys + inv[:, 1, 2, None, None]
    sx_t = torch.from_numpy(sx).to(features.device, features.dtype)
    sy_t = torch.from_numpy(sy).to(features.device, features.dtype)
    return _bilinear_gather(features, sx_t, sy_t)


def warp_by_affine(feature: torch.Tensor, affine: np.ndarray | torch.Tensor) -> torch.Tensor:
    """Single-instance wrapper around warp_affine_batch for [C, H, W] input."""
    if feature.ndim != 3:
        raise ValueError(f"expected [C, H, W] feature, got {tuple(feature.shape)}")
    return warp_affine_batch(feature.unsqueeze(0), affine)[0]
