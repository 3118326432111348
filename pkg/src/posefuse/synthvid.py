"""Deterministic synthetic articulated-figure clips.

Renders a 2D kinematic stick figure (14 joints, limbs drawn as anti-aliased
capsules) over a procedural static background. Because the scene is analytic,
every clip ships with exact keypoints, exact foreground masks, and exact
optical flow (background still, limb pixels moving with their rigid part),
plus an enumeration of the pixels where flow-based warping is undefined
(disocclusions and anti-aliased boundaries).
"""

from __future__ import annotations

import json
import math
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import torch
from PIL import Image

from .errors import ConfigError, GenerationError
from .pose import NUM_KEYPOINTS, Pose

FLOW_MAGIC = b"SFLO"


# ---------------------------------------------------------------------------
# Scene description
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class JointTrack:
    """Sinusoidal angle trajectory: base + amplitude * sin(2*pi*t/period + phase)."""

    base: float = 0.0
    amplitude: float = 0.0
    period: float = 16.0
    phase: float = 0.0

    def angle(self, t: float) -> float:
        if self.amplitude == 0.0:
            return self.base
        return self.base + self.amplitude * math.sin(2.0 * math.pi * t / self.period + self.phase)


# Track names driving the kinematic chain. Angles are in radians; limb angles
# are measured from straight down, relative angles from the parent segment.
TRACK_NAMES = (
    "torso", "head",
    "r_arm", "r_forearm", "l_arm", "l_forearm",
    "r_leg", "r_shin", "l_leg", "l_shin",
)


def _default_tracks() -> dict[str, JointTrack]:
    return {
        "torso": JointTrack(0.0, 0.10, 20.0, 0.0),
        "head": JointTrack(0.0, 0.15, 16.0, 1.0),
        "r_arm": JointTrack(0.45, 0.65, 16.0, 0.0),
        "r_forearm": JointTrack(0.25, 0.45, 16.0, 0.8),
        "l_arm": JointTrack(-0.45, 0.65, 16.0, math.pi),
        "l_forearm": JointTrack(-0.25, 0.45, 16.0, math.pi + 0.8),
        "r_leg": JointTrack(0.16, 0.35, 16.0, math.pi / 2),
        "r_shin": JointTrack(-0.12, 0.25, 16.0, 1.2),
        "l_leg": JointTrack(-0.16, 0.35, 16.0, math.pi / 2 + math.pi),
        "l_shin": JointTrack(0.12, 0.25, 16.0, 1.2 + math.pi),
    }


@dataclass(frozen=True)
class MotionProgram:
    """Root trajectory plus per-joint angle tracks."""

    root_start: tuple[float, float] | None = None  # pixels; default centers the figure
    root_velocity: tuple[float, float] = (0.0, 0.0)  # px / frame
    sway_amplitude: tuple[float, float] = (0.0, 0.0)  # px
    sway_period: float = 16.0
    tracks: dict[str, JointTrack] = field(default_factory=_default_tracks)

    def root(self, t: float, default_start: tuple[float, float]) -> tuple[float, float]:
        x0, y0 = self.root_start if self.root_start is not None else default_start
        ph = 2.0 * math.pi * t / self.sway_period
        return (
            x0 + self.root_velocity[0] * t + self.sway_amplitude[0] * math.sin(ph),
            y0 + self.root_velocity[1] * t + self.sway_amplitude[1] * math.sin(ph + math.pi / 2),
        )

    def angle(self, name: str, t: float) -> float:
        track = self.tracks.get(name)
        return track.angle(t) if track is not None else 0.0

    @classmethod
    def dancing(cls) -> "MotionProgram":
        return cls(sway_amplitude=(2.0, 1.0), sway_period=24.0)

    @classmethod
    def static(cls) -> "MotionProgram":
        tracks = {k: JointTrack(v.base, 0.0, v.period, v.phase) for k, v in _default_tracks().items()}
        return cls(tracks=tracks)

    @classmethod
    def translating(cls, vx: float, vy: float = 0.0,
                    start: tuple[float, float] | None = None) -> "MotionProgram":
        tracks = {k: JointTrack(v.base, 0.0, v.period, v.phase) for k, v in _default_tracks().items()}
        return cls(root_start=start, root_velocity=(vx, vy), tracks=tracks)


DEFAULT_PALETTE = {
    "torso": (0.85, 0.25, 0.25),
    "head": (0.95, 0.75, 0.55),
    "r_upper_arm": (0.25, 0.55, 0.90),
    "r_forearm": (0.35, 0.80, 0.90),
    "l_upper_arm": (0.20, 0.40, 0.70),
    "l_forearm": (0.30, 0.60, 0.70),
    "r_thigh": (0.30, 0.70, 0.30),
    "r_shin": (0.55, 0.85, 0.35),
    "l_thigh": (0.20, 0.50, 0.25),
    "l_shin": (0.40, 0.65, 0.30),
}


@dataclass
class SceneSpec:
    """Everything needed to deterministically reproduce one clip."""

    seed: int = 0
    num_frames: int = 16
    resolution: tuple[int, int] = (64, 64)  # (H, W)
    figure_palette: dict[str, tuple[float, float, float]] = field(
        default_factory=lambda: dict(DEFAULT_PALETTE))
    background: str = "noise"  # gradient | checker | noise
    background_params: dict = field(default_factory=dict)
    motion_program: MotionProgram = field(default_factory=MotionProgram.dancing)
    figure_scale: float | None = None  # figure size in px; default 0.62 * min(H, W)
    clip_id: str | None = None

    def validate(self) -> None:
        h, w = self.resolution
        if h < 32 or w < 32 or h % 4 != 0 or w % 4 != 0:
            raise ConfigError(f"resolution must be >= 32 and divisible by 4, got {(h, w)}")
        if self.num_frames < 1:
            raise ConfigError("num_frames must be >= 1")
        if self.background not in ("gradient", "checker", "noise"):
            raise ConfigError(f"unknown background texture {self.background!r}")

    @property
    def resolved_clip_id(self) -> str:
        return self.clip_id if self.clip_id else f"synth-{self.seed:06d}"


# ---------------------------------------------------------------------------
# Clip container
# ---------------------------------------------------------------------------

@dataclass
class VideoClip:
    """Fixed-length frame sequence with aligned pose / mask / flow annotations."""

    frames: torch.Tensor  # [N, 3, H, W] float32 in [-1, 1]
    poses: list[Pose]
    clip_id: str
    gt_masks: torch.Tensor | None = None  # [N, 1, H, W] float32 in {0, 1}
    gt_flows: torch.Tensor | None = None  # [N-1, 2, H, W] float32, (dx, dy) px
    flow_unreliable: torch.Tensor | None = None  # [N-1, 1, H, W] bool

    def __len__(self) -> int:
        return int(self.frames.shape[0])

    @property
    def resolution(self) -> tuple[int, int]:
        return (int(self.frames.shape[2]), int(self.frames.shape[3]))

    def validate(self) -> None:
        n = len(self)
        if self.frames.ndim != 4 or self.frames.shape[1] != 3:
            raise ValueError(f"frames must be [N, 3, H, W], got {tuple(self.frames.shape)}")
        if len(self.poses) != n:
            raise ValueError("poses length must match frames")
        if self.frames.abs().max() > 1.0 + 1e-6:
            raise ValueError("frame values outside [-1, 1]")
        if self.gt_flows is not None and self.gt_flows.shape[0] != n - 1:
            raise ValueError("need exactly N-1 flow fields")
        if self.gt_flows is not None:
            diag = math.hypot(*self.resolution)
            if not torch.isfinite(self.gt_flows).all():
                raise ValueError("non-finite flow values")
            if self.gt_flows.abs().max() > diag:
                raise ValueError("flow magnitude exceeds the frame diagonal")


# ---------------------------------------------------------------------------
# Kinematics and rendering
# ---------------------------------------------------------------------------

def _dir(theta: float) -> np.ndarray:
    # angle 0 points straight down (+y); positive rotates toward +x
    return np.array([math.sin(theta), math.cos(theta)])


def _forward_kinematics(program: MotionProgram, t: float, default_root: tuple[float, float],
                        scale: float) -> dict[str, np.ndarray]:
    """Joint positions at time t. Lengths are fixed fractions of figure scale."""
    torso_len = 0.30 * scale
    head_len = 0.16 * scale
    shoulder_w = 0.13 * scale
    hip_w = 0.09 * scale
    upper_arm = 0.15 * scale
    forearm = 0.14 * scale
    thigh = 0.20 * scale
    shin = 0.18 * scale

    pelvis = np.array(program.root(t, default_root))
    tau = program.angle("torso", t)
    up = math.pi + tau  # torso axis, straight up when tau == 0
    neck = pelvis + torso_len * _dir(up)
    head_top = neck + head_len * _dir(up + program.angle("head", t))

    right = up + math.pi / 2
    left = up - math.pi / 2
    r_shoulder = neck + shoulder_w * _dir(right)
    l_shoulder = neck + shoulder_w * _dir(left)
    r_hip = pelvis + hip_w * _dir(right)
    l_hip = pelvis + hip_w * _dir(left)

    a_r = program.angle("r_arm", t)
    a_l = program.angle("l_arm", t)
    r_elbow = r_shoulder + upper_arm * _dir(a_r)
    r_wrist = r_elbow + forearm * _dir(a_r + program.angle("r_forearm", t))
    l_elbow = l_shoulder + upper_arm * _dir(a_l)
    l_wrist = l_elbow + forearm * _dir(a_l + program.angle("l_forearm", t))

    g_r = program.angle("r_leg", t)
    g_l = program.angle("l_leg", t)
    r_knee = r_hip + thigh * _dir(g_r)
    r_ankle = r_knee + shin * _dir(g_r + program.angle("r_shin", t))
    l_knee = l_hip + thigh * _dir(g_l)
    l_ankle = l_knee + shin * _dir(g_l + program.angle("l_shin", t))

    return {
        "pelvis": pelvis, "neck": neck, "head_top": head_top,
        "r_shoulder": r_shoulder, "r_elbow": r_elbow, "r_wrist": r_wrist,
        "l_shoulder": l_shoulder, "l_elbow": l_elbow, "l_wrist": l_wrist,
        "r_hip": r_hip, "r_knee": r_knee, "r_ankle": r_ankle,
        "l_hip": l_hip, "l_knee": l_knee, "l_ankle": l_ankle,
    }


# Draw order, back to front. Each limb is a capsule between two joints with a
# radius given as a fraction of figure scale.
LIMB_ORDER = (
    ("l_upper_arm", "l_shoulder", "l_elbow", 0.040),
    ("l_forearm", "l_elbow", "l_wrist", 0.035),
    ("l_thigh", "l_hip", "l_knee", 0.050),
    ("l_shin", "l_knee", "l_ankle", 0.042),
    ("torso", "pelvis", "neck", 0.105),
    ("head", "neck", "head_top", 0.075),
    ("r_thigh", "r_hip", "r_knee", 0.050),
    ("r_shin", "r_knee", "r_ankle", 0.042),
    ("r_upper_arm", "r_shoulder", "r_elbow", 0.040),
    ("r_forearm", "r_elbow", "r_wrist", 0.035),
)

_PURE_EPS = 1e-9


def _capsule_coverage(h: int, w: int, a: np.ndarray, b: np.ndarray, radius: float) -> np.ndarray:
    """Per-pixel coverage in [0, 1] of the capsule from a to b (1px linear AA)."""
    ys, xs = np.meshgrid(np.arange(h, dtype=np.float64), np.arange(w, dtype=np.float64),
                         indexing="ij")
    ab = b - a
    denom = float(ab @ ab)
    px = xs - a[0]
    py = ys - a[1]
    if denom < 1e-12:
        dist = np.hypot(px, py)
    else:
        s = np.clip((px * ab[0] + py * ab[1]) / denom, 0.0, 1.0)
        dist = np.hypot(px - s * ab[0], py - s * ab[1])
    return np.clip(radius + 0.5 - dist, 0.0, 1.0)


def _render_background(spec: SceneSpec, h: int, w: int) -> np.ndarray:
    """Static [H, W, 3] texture in [0, 1]; content seeded by spec.seed."""
    rng = np.random.default_rng(spec.seed ^ 0x5EED)
    params = spec.background_params
    ys, xs = np.meshgrid(np.arange(h, dtype=np.float64) / max(h - 1, 1),
                         np.arange(w, dtype=np.float64) / max(w - 1, 1), indexing="ij")
    if spec.background == "gradient":
        c0 = np.asarray(params.get("color_a", rng.uniform(0.1, 0.5, 3)))
        c1 = np.asarray(params.get("color_b", rng.uniform(0.5, 0.9, 3)))
        theta = float(params.get("angle", rng.uniform(0, 2 * math.pi)))
        ramp = (xs * math.cos(theta) + ys * math.sin(theta) + 1.0) / 2.0
        img = c0[None, None] + ramp[..., None] * (c1 - c0)[None, None]
    elif spec.background == "checker":
        cell = int(params.get("cell", 8))
        c0 = np.asarray(params.get("color_a", (0.25, 0.25, 0.30)))
        c1 = np.asarray(params.get("color_b", (0.75, 0.75, 0.70)))
        yy, xx = np.meshgrid(np.arange(h) // cell, np.arange(w) // cell, indexing="ij")
        parity = ((yy + xx) % 2).astype(np.float64)
        img = c0[None, None] * (1 - parity[..., None]) + c1[None, None] * parity[..., None]
    else:  # smooth seeded noise: bilinearly upsampled coarse grid
        cells = int(params.get("cells", 8))
        coarse = rng.uniform(0.05, 0.95, size=(cells, cells, 3))
        gy = ys * (cells - 1)
        gx = xs * (cells - 1)
        y0 = np.clip(np.floor(gy).astype(int), 0, cells - 2)
        x0 = np.clip(np.floor(gx).astype(int), 0, cells - 2)
        fy = (gy - y0)[..., None]
        fx = (gx - x0)[..., None]
        img = (coarse[y0, x0] * (1 - fx) * (1 - fy) + coarse[y0, x0 + 1] * fx * (1 - fy)
               + coarse[y0 + 1, x0] * (1 - fx) * fy + coarse[y0 + 1, x0 + 1] * fx * fy)
    return np.clip(img, 0.0, 1.0)


def _render_frame(spec: SceneSpec, joints: dict[str, np.ndarray], background: np.ndarray,
                  scale: float, frame_idx: int):
    """Composite the figure over the background.

    Returns (image [H,W,3], total_alpha, owner, pure) where owner is the draw
    index of the topmost covering limb (-1 for background) and pure marks
    pixels whose final color is exactly one limb's color.
    """
    h, w = spec.resolution
    img = background.copy()
    total_alpha = np.zeros((h, w), dtype=np.float64)
    owner = np.full((h, w), -1, dtype=np.int32)
    owner_alpha = np.zeros((h, w), dtype=np.float64)

    for i, (name, ja, jb, rfrac) in enumerate(LIMB_ORDER):
        a, b = joints[ja], joints[jb]
        radius = rfrac * scale
        lo = np.minimum(a, b) - radius - 1.0
        hi = np.maximum(a, b) + radius + 1.0
        if lo[0] < 0 or lo[1] < 0 or hi[0] > w - 1 or hi[1] > h - 1:
            raise GenerationError(
                f"frame {frame_idx}: limb {name!r} leaves the {w}x{h} frame "
                f"(extent x [{lo[0]:.1f}, {hi[0]:.1f}], y [{lo[1]:.1f}, {hi[1]:.1f}])")
        alpha = _capsule_coverage(h, w, a, b, radius)
        color = np.asarray(spec.figure_palette[name], dtype=np.float64)
        img = img * (1.0 - alpha[..., None]) + color[None, None] * alpha[..., None]
        covered = alpha > 0.0
        owner[covered] = i
        owner_alpha[covered] = alpha[covered]
        total_alpha = 1.0 - (1.0 - total_alpha) * (1.0 - alpha)

    pure = (owner >= 0) & (owner_alpha >= 1.0 - _PURE_EPS)
    return img, total_alpha, owner, pure


def _rigid_flow(owner: np.ndarray, joints_t: dict[str, np.ndarray],
                joints_t1: dict[str, np.ndarray]) -> np.ndarray:
    """Per-pixel flow [2, H, W]: zero on background, rigid motion per limb."""
    h, w = owner.shape
    flow = np.zeros((2, h, w), dtype=np.float64)
    ys, xs = np.meshgrid(np.arange(h, dtype=np.float64), np.arange(w, dtype=np.float64),
                         indexing="ij")
    for i, (_, ja, jb, _) in enumerate(LIMB_ORDER):
        sel = owner == i
        if not sel.any():
            continue
        a0, b0 = joints_t[ja], joints_t[jb]
        a1, b1 = joints_t1[ja], joints_t1[jb]
        z0 = complex(b0[0] - a0[0], b0[1] - a0[1])
        z1 = complex(b1[0] - a1[0], b1[1] - a1[1])
        # limb lengths are constant, so s is a unit rotation
        s = z1 / z0 if abs(z0) > 1e-12 else 1.0 + 0.0j
        p = (xs[sel] - a0[0]) + 1j * (ys[sel] - a0[1])
        q = complex(a1[0], a1[1]) + s * p
        flow[0][sel] = q.real - xs[sel]
        flow[1][sel] = q.imag - ys[sel]
    return flow


def _flow_unreliable_mask(alpha_t, pure_t, owner_t, flow,
                          alpha_t1, pure_t1, owner_t1) -> np.ndarray:
    """Pixels where warping frame t by the flow need not reproduce frame t+1.

    Covers anti-aliased limb boundaries, background becoming occluded, and
    figure pixels landing on boundaries / other limbs / out of frame.
    """
    h, w = alpha_t.shape
    bad = np.zeros((h, w), dtype=bool)

    covered_t = alpha_t > 0.0
    bad |= covered_t & ~pure_t  # mixed colors at the source pixel

    bg_t = ~covered_t
    bad |= bg_t & (alpha_t1 > 0.0)  # background newly occluded

    src = pure_t
    if src.any():
        ys, xs = np.nonzero(src)
        qx = xs + flow[0][ys, xs]
        qy = ys + flow[1][ys, xs]
        x0 = np.floor(qx).astype(int)
        y0 = np.floor(qy).astype(int)
        ok = (qx >= 0) & (qx <= w - 1) & (qy >= 0) & (qy <= h - 1)
        own = owner_t[ys, xs]
        for dx in (0, 1):
            for dy in (0, 1):
                xi = np.clip(x0 + dx, 0, w - 1)
                yi = np.clip(y0 + dy, 0, h - 1)
                # a tap only matters when its bilinear weight is nonzero
                wgt = (1 - np.abs(qx - xi)).clip(0) * (1 - np.abs(qy - yi)).clip(0)
                tap_ok = (wgt <= 1e-12) | (pure_t1[yi, xi] & (owner_t1[yi, xi] == own))
                ok &= tap_ok
        bad[ys[~ok], xs[~ok]] = True
    return bad


def generate_clip(spec: SceneSpec) -> VideoClip:
    """Render the clip described by spec. Pure function: same spec, same bytes."""
    spec.validate()
    h, w = spec.resolution
    scale = spec.figure_scale if spec.figure_scale is not None else 0.62 * min(h, w)
    default_root = (w / 2.0, 0.55 * h)
    background = _render_background(spec, h, w)

    frames = np.empty((spec.num_frames, 3, h, w), dtype=np.float32)
    masks = np.empty((spec.num_frames, 1, h, w), dtype=np.float32)
    poses: list[Pose] = []
    per_frame = []
    all_joints = []

    for t in range(spec.num_frames):
        joints = _forward_kinematics(spec.motion_program, float(t), default_root, scale)
        img, alpha, owner, pure = _render_frame(spec, joints, background, scale, t)
        frames[t] = (img.transpose(2, 0, 1) * 2.0 - 1.0).astype(np.float32)
        masks[t, 0] = (alpha > 0.0).astype(np.float32)
        kps = np.stack([joints[name] for name in
                        ("head_top", "neck", "r_shoulder", "r_elbow", "r_wrist",
                         "l_shoulder", "l_elbow", "l_wrist",
                         "r_hip", "r_knee", "r_ankle", "l_hip", "l_knee", "l_ankle")])
        pose = Pose(keypoints=kps, visible=np.ones(NUM_KEYPOINTS, dtype=bool))
        pose.validate_bounds(h, w)
        poses.append(pose)
        per_frame.append((alpha, owner, pure))
        all_joints.append(joints)

    flows = np.zeros((max(spec.num_frames - 1, 0), 2, h, w), dtype=np.float32)
    unreliable = np.zeros((max(spec.num_frames - 1, 0), 1, h, w), dtype=bool)
    for t in range(spec.num_frames - 1):
        alpha_t, owner_t, pure_t = per_frame[t]
        alpha_1, owner_1, pure_1 = per_frame[t + 1]
        flow = _rigid_flow(owner_t, all_joints[t], all_joints[t + 1])
        flows[t] = flow.astype(np.float32)
        unreliable[t, 0] = _flow_unreliable_mask(
            alpha_t, pure_t, owner_t, flow, alpha_1, pure_1, owner_1)

    clip = VideoClip(
        frames=torch.from_numpy(frames),
        poses=poses,
        clip_id=spec.resolved_clip_id,
        gt_masks=torch.from_numpy(masks),
        gt_flows=torch.from_numpy(flows),
        flow_unreliable=torch.from_numpy(unreliable),
    )
    clip.validate()
    return clip


def render_figure_only(spec: SceneSpec, frame_idx: int) -> torch.Tensor:
    """Re-render a single frame's figure over black. Used by mask checks."""
    spec.validate()
    h, w = spec.resolution
    scale = spec.figure_scale if spec.figure_scale is not None else 0.62 * min(h, w)
    default_root = (w / 2.0, 0.55 * h)
    joints = _forward_kinematics(spec.motion_program, float(frame_idx), default_root, scale)
    black = np.zeros((h, w, 3), dtype=np.float64)
    img, _, _, _ = _render_frame(spec, joints, black, scale, frame_idx)
    return torch.from_numpy(img.transpose(2, 0, 1).astype(np.float32))


# ---------------------------------------------------------------------------
# On-disk dataset layout
# ---------------------------------------------------------------------------

def write_flow(path: Path | str, flow: np.ndarray | torch.Tensor) -> None:
    """Write a [2, H, W] float32 flow as SFLO binary (little-endian)."""
    arr = flow.detach().cpu().numpy() if isinstance(flow, torch.Tensor) else np.asarray(flow)
    if arr.ndim != 3 or arr.shape[0] != 2:
        raise ValueError(f"expected [2, H, W] flow, got {arr.shape}")
    _, h, w = arr.shape
    interleaved = np.ascontiguousarray(arr.transpose(1, 2, 0), dtype="<f4")
    with open(path, "wb") as f:
        f.write(FLOW_MAGIC)
        f.write(struct.pack("<ii", h, w))
        f.write(interleaved.tobytes())


def read_flow(path: Path | str) -> np.ndarray:
    with open(path, "rb") as f:
        magic = f.read(4)
        if magic != FLOW_MAGIC:
            raise ValueError(f"{path}: bad flow magic {magic!r}")
        h, w = struct.unpack("<ii", f.read(8))
        data = np.frombuffer(f.read(h * w * 2 * 4), dtype="<f4")
    if data.size != h * w * 2:
        raise ValueError(f"{path}: truncated flow file")
    return data.reshape(h, w, 2).transpose(2, 0, 1).copy()


def _frame_to_uint8(frame: torch.Tensor) -> np.ndarray:
    img01 = (frame.detach().cpu().numpy().transpose(1, 2, 0) + 1.0) / 2.0
    return np.clip(np.round(img01 * 255.0), 0, 255).astype(np.uint8)


def export_dataset(clips: list[VideoClip], root: Path | str) -> dict:
    """Write clips under root and return the manifest (also saved as JSON)."""
    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)
    entries = []
    for clip in clips:
        cdir = root / clip.clip_id
        (cdir / "frames").mkdir(parents=True, exist_ok=True)
        for t in range(len(clip)):
            Image.fromarray(_frame_to_uint8(clip.frames[t])).save(cdir / "frames" / f"{t:05d}.png")
        with open(cdir / "poses.json", "w") as f:
            json.dump([p.to_triples() for p in clip.poses], f)
        if clip.gt_masks is not None:
            (cdir / "masks").mkdir(exist_ok=True)
            for t in range(len(clip)):
                m = (clip.gt_masks[t, 0].numpy() * 255).astype(np.uint8)
                Image.fromarray(m, mode="L").save(cdir / "masks" / f"{t:05d}.png")
        if clip.gt_flows is not None:
            (cdir / "flows").mkdir(exist_ok=True)
            for t in range(len(clip) - 1):
                write_flow(cdir / "flows" / f"{t:05d}.sflo", clip.gt_flows[t])
        h, w = clip.resolution
        entries.append({
            "id": clip.clip_id,
            "num_frames": len(clip),
            "height": h,
            "width": w,
            "has_masks": clip.gt_masks is not None,
            "has_flows": clip.gt_flows is not None,
        })
    manifest = {"version": 1, "clips": entries}
    with open(root / "manifest.json", "w") as f:
        json.dump(manifest, f, indent=2)
    return manifest


def load_clip(root: Path | str, clip_id: str, entry: dict | None = None) -> VideoClip:
    cdir = Path(root) / clip_id
    frame_paths = sorted((cdir / "frames").glob("*.png"))
    if not frame_paths:
        raise FileNotFoundError(f"no frames under {cdir / 'frames'}")
    frames = []
    for p in frame_paths:
        arr = np.asarray(Image.open(p).convert("RGB"), dtype=np.float32) / 255.0
        frames.append(arr.transpose(2, 0, 1) * 2.0 - 1.0)
    frames_t = torch.from_numpy(np.stack(frames))

    with open(cdir / "poses.json") as f:
        poses = [Pose.from_triples(tr) for tr in json.load(f)]

    masks_t = None
    mask_dir = cdir / "masks"
    if mask_dir.is_dir():
        masks = [np.asarray(Image.open(p), dtype=np.float32)[None] / 255.0
                 for p in sorted(mask_dir.glob("*.png"))]
        masks_t = torch.from_numpy(np.stack(masks))

    flows_t = None
    flow_dir = cdir / "flows"
    if flow_dir.is_dir():
        flow_files = sorted(flow_dir.glob("*.sflo"))
        if flow_files:
            flows_t = torch.from_numpy(np.stack([read_flow(p) for p in flow_files]))

    clip = VideoClip(frames=frames_t, poses=poses, clip_id=clip_id,
                     gt_masks=masks_t, gt_flows=flows_t)
    clip.validate()
    return clip


def load_dataset(root: Path | str) -> list[VideoClip]:
    root = Path(root)
    with open(root / "manifest.json") as f:
        manifest = json.load(f)
    return [load_clip(root, e["id"], e) for e in manifest["clips"]]
