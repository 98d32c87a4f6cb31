"""Deterministic synthetic sequences: ground truth, detections, embeddings.

Agents follow piecewise-linear paths.  Detections are ground-truth boxes
with i.i.d. Gaussian center noise, dropped inside full-occlusion windows
or with a global drop probability.  Each agent has a fixed unit anchor
embedding; per-detection embeddings are the (optionally occluder-blended)
anchor plus Gaussian perturbation, renormalized.  Confidence starts at
the base value and degrades inside occlusion windows.

Presets:

* ``linear``   - well-separated constant-velocity agents.
* ``crossing`` - two agents that approach, reverse direction while both
  are fully occluded, and reappear partially occluded.  Engineered so an
  IoU-only tracker provably swaps their identities while the full
  pipeline (direction cost + binned appearance memory) keeps them.
* ``occlusion`` - one agent hidden for a configurable gap, probing the
  lost-track retention policy.
* ``crowd``    - several crossing pairs in separate lanes plus straight
  walkers, every pair reversing under full occlusion.

Everything is a pure function of the spec (including its seed).
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

from .mot_io import DetectionRecord, GroundTruthRecord

EMBED_NOISE = 0.05
SEPARATION_MARGIN = 0.2


@dataclass(frozen=True)
class OcclusionWindow:
    """Frames [start, end] (inclusive) where an agent is occluded.

    ``drop`` mode removes the detection; ``partial`` mode keeps it with
    degraded confidence and an embedding blended toward the occluder
    anchor.  The ``ramp`` profile scales severity linearly up to the
    window midpoint and back down; ``flat`` applies it throughout.
    """

    agent: int
    start: int
    end: int
    mode: str = "drop"  # "drop" | "partial"
    conf: float = 0.45
    blend: float = 0.6
    profile: str = "flat"  # "flat" | "ramp"


@dataclass(frozen=True)
class AgentPath:
    """Per-frame centers (n_frames x 2) and a fixed box extent."""

    centers: np.ndarray
    width: float
    height: float


@dataclass(frozen=True)
class ScenarioSpec:
    name: str
    n_frames: int
    agents: tuple[AgentPath, ...]
    noise_sigma: float = 0.0
    drop_prob: float = 0.0
    occlusions: tuple[OcclusionWindow, ...] = ()
    embed_dim: int = 32
    seed: int = 0
    base_conf: float = 0.9

    @property
    def n_agents(self) -> int:
        return len(self.agents)

    def __post_init__(self) -> None:
        if self.n_frames < 1 or not self.agents:
            raise ValueError("scenario needs at least one agent and one frame")
        for w in self.occlusions:
            if not (1 <= w.start <= w.end <= self.n_frames):
                raise ValueError("occlusion window outside the frame range")
            if w.agent < 0 or w.agent >= len(self.agents):
                raise ValueError("occlusion window references unknown agent")


@dataclass
class Scenario:
    """Generated data, all keyed by 1-based frame index."""

    spec: ScenarioSpec
    gt: dict[int, list[GroundTruthRecord]]
    detections: dict[int, list[DetectionRecord]]
    embeddings: dict[tuple[int, int], np.ndarray]
    anchors: np.ndarray  # (n_agents + 1, dim); last row is the occluder


def _waypoint_path(waypoints: list[tuple[int, float, float]], n_frames: int,
                   width: float, height: float) -> AgentPath:
    frames = np.array([w[0] for w in waypoints], dtype=float)
    xs = np.array([w[1] for w in waypoints], dtype=float)
    ys = np.array([w[2] for w in waypoints], dtype=float)
    t = np.arange(1, n_frames + 1, dtype=float)
    centers = np.stack([np.interp(t, frames, xs), np.interp(t, frames, ys)], axis=1)
    return AgentPath(centers=centers, width=width, height=height)


def _severity(window: OcclusionWindow, frame: int) -> float:
    if window.profile == "flat":
        return 1.0
    span = window.end - window.start
    if span == 0:
        return 1.0
    mid = (window.start + window.end) / 2.0
    half = (span + 1) / 2.0
    return max(0.0, 1.0 - abs(frame - mid) / half)


def _draw_anchors(rng: np.random.Generator, n: int, dim: int) -> np.ndarray:
    anchors = rng.normal(size=(n, dim))
    return anchors / np.linalg.norm(anchors, axis=1, keepdims=True)


def generate(spec: ScenarioSpec) -> Scenario:
    """Generate the scenario; fully determined by the spec (incl. seed)."""
    rng = np.random.default_rng(spec.seed)

    gt: dict[int, list[GroundTruthRecord]] = {}
    for frame in range(1, spec.n_frames + 1):
        rows = []
        for aid, agent in enumerate(spec.agents):
            cx, cy = agent.centers[frame - 1]
            rows.append(
                GroundTruthRecord(
                    frame,
                    aid + 1,
                    cx - agent.width / 2.0,
                    cy - agent.height / 2.0,
                    agent.width,
                    agent.height,
                )
            )
        gt[frame] = rows

    # anchors: one per agent plus one shared occluder; regenerated until
    # the empirical inter/intra separation margin holds
    for attempt in range(20):
        anchor_rng = np.random.default_rng((spec.seed, attempt))
        anchors = _draw_anchors(anchor_rng, spec.n_agents + 1, spec.embed_dim)
        gram = anchors[: spec.n_agents] @ anchors[: spec.n_agents].T
        np.fill_diagonal(gram, -1.0)
        min_inter = 1.0 - float(gram.max()) if spec.n_agents > 1 else 2.0
        # intra distance stays near dim * noise^2 / 2 for small noise
        max_intra_estimate = spec.embed_dim * EMBED_NOISE**2
        if min_inter - max_intra_estimate >= SEPARATION_MARGIN:
            break
    else:
        raise RuntimeError("could not draw sufficiently separated anchor embeddings")

    windows_by_agent: dict[int, list[OcclusionWindow]] = {}
    for w in spec.occlusions:
        windows_by_agent.setdefault(w.agent, []).append(w)

    detections: dict[int, list[DetectionRecord]] = {}
    embeddings: dict[tuple[int, int], np.ndarray] = {}
    for frame in range(1, spec.n_frames + 1):
        det_rows: list[DetectionRecord] = []
        for aid, agent in enumerate(spec.agents):
            dropped = False
            conf = spec.base_conf
            blend = 0.0
            for w in windows_by_agent.get(aid, []):
                if w.start <= frame <= w.end:
                    sev = _severity(w, frame)
                    if w.mode == "drop":
                        dropped = sev > 0.0
                    else:
                        conf = min(conf, spec.base_conf - (spec.base_conf - w.conf) * sev)
                        blend = max(blend, w.blend * sev)
            # the random stream advances identically whether or not the
            # detection survives, keeping drops independent of windows
            center_noise = rng.normal(scale=spec.noise_sigma or 0.0, size=2)
            drop_roll = rng.random()
            emb_noise = rng.normal(scale=EMBED_NOISE, size=spec.embed_dim)
            if dropped or drop_roll < spec.drop_prob:
                continue
            cx, cy = agent.centers[frame - 1] + center_noise
            det_rows.append(
                DetectionRecord(
                    frame,
                    cx - agent.width / 2.0,
                    cy - agent.height / 2.0,
                    agent.width,
                    agent.height,
                    round(conf, 4),
                )
            )
            base = (1.0 - blend) * anchors[aid] + blend * anchors[-1]
            base = base / np.linalg.norm(base)
            vec = base + emb_noise
            vec = vec / np.linalg.norm(vec)
            embeddings[(frame, len(det_rows) - 1)] = vec.astype(np.float32)
        detections[frame] = det_rows
    return Scenario(spec=spec, gt=gt, detections=detections, embeddings=embeddings, anchors=anchors)


def trajectory_csv(scenario: Scenario) -> str:
    """Ground-truth centers as (frame, id, x, y) CSV for external plotting."""
    buf = io.StringIO()
    buf.write("frame,id,x,y\n")
    for frame in sorted(scenario.gt):
        for rec in scenario.gt[frame]:
            cx = rec.bb_left + rec.bb_width / 2.0
            cy = rec.bb_top + rec.bb_height / 2.0
            buf.write(f"{frame},{rec.track_id},{cx:.3f},{cy:.3f}\n")
    return buf.getvalue()


# ----------------------------------------------------------------------
# presets
# ----------------------------------------------------------------------

def _linear_spec(seed: int, n_agents: int = 3, n_frames: int = 100,
                 noise_sigma: float = 0.0, drop_prob: float = 0.0) -> ScenarioSpec:
    agents = []
    for i in range(n_agents):
        y = 100.0 + 140.0 * i
        agents.append(
            _waypoint_path(
                [(1, 50.0, y), (n_frames, 50.0 + 3.0 * (n_frames - 1), y)],
                n_frames,
                width=24.0,
                height=48.0,
            )
        )
    return ScenarioSpec(
        name="linear",
        n_frames=n_frames,
        agents=tuple(agents),
        noise_sigma=noise_sigma,
        drop_prob=drop_prob,
        seed=seed,
    )


def _crossing_spec(seed: int, noise_sigma: float = 0.5) -> ScenarioSpec:
    n_frames = 110
    w, h = 30.0, 48.0
    # agents converge at frame 60 and bounce back the way they came; the
    # reversal happens while both are fully occluded, so the coasting
    # constant-velocity predictions land closer to the wrong agent at
    # reappearance, and both reappear still partially occluded so only
    # occlusion-level appearance memory can tell them apart
    agent_a = _waypoint_path(
        [(1, 182.0, 200.0), (60, 300.0, 200.0), (110, 200.0, 200.0)], n_frames, w, h
    )
    agent_b = _waypoint_path(
        [(1, 418.0, 202.0), (60, 300.0, 202.0), (110, 400.0, 202.0)], n_frames, w, h
    )
    occlusions = (
        # early partial occlusions seed each agent's occlusion-level memory
        OcclusionWindow(agent=0, start=20, end=32, mode="partial", conf=0.45, blend=0.6),
        OcclusionWindow(agent=1, start=20, end=32, mode="partial", conf=0.45, blend=0.6),
        # both hidden through the bounce
        OcclusionWindow(agent=0, start=56, end=61, mode="drop"),
        OcclusionWindow(agent=1, start=56, end=61, mode="drop"),
        # both reappear at the same degraded confidence level
        OcclusionWindow(agent=0, start=62, end=70, mode="partial", conf=0.45, blend=0.6),
        OcclusionWindow(agent=1, start=62, end=70, mode="partial", conf=0.45, blend=0.6),
    )
    return ScenarioSpec(
        name="crossing",
        n_frames=n_frames,
        agents=(agent_a, agent_b),
        noise_sigma=noise_sigma,
        occlusions=occlusions,
        seed=seed,
    )


def _occlusion_spec(seed: int, gap: int = 15, noise_sigma: float = 0.5) -> ScenarioSpec:
    n_frames = max(140, 60 + gap + 40)
    agent = _waypoint_path(
        [(1, 30.0, 150.0), (n_frames, 30.0 + 3.0 * (n_frames - 1), 150.0)],
        n_frames,
        width=24.0,
        height=48.0,
    )
    window = OcclusionWindow(agent=0, start=60, end=59 + gap, mode="drop")
    return ScenarioSpec(
        name="occlusion",
        n_frames=n_frames,
        agents=(agent,),
        noise_sigma=noise_sigma,
        occlusions=(window,),
        seed=seed,
    )


def _crowd_spec(seed: int, n_agents: int = 20, n_frames: int = 300,
                noise_sigma: float = 0.5, drop_prob: float = 0.0) -> ScenarioSpec:
    """Crowded scene built from crossing pairs plus straight walkers.

    Each pair converges in its own horizontal lane, reverses while both
    members are fully occluded, and reappears partially occluded, so an
    association strategy without direction or occlusion-level appearance
    cues tends to exchange the two identities at every event.
    """
    if n_agents < 2:
        raise ValueError("crowd scenario needs at least two agents")
    rng = np.random.default_rng((seed, 101))
    w, h = 30.0, 48.0
    xc = 640.0
    n_pairs = min(6, n_agents // 2)
    n_walkers = n_agents - 2 * n_pairs
    agents: list[AgentPath] = []
    occlusions: list[OcclusionWindow] = []
    for i in range(n_pairs):
        y = 60.0 + 110.0 * i
        t_meet = 60 + 30 * i + int(rng.integers(-5, 6))
        v = 2.0
        a_start = xc - v * (t_meet - 1)
        b_start = xc + v * (t_meet - 1)
        a_end = xc - v * (n_frames - t_meet)
        b_end = xc + v * (n_frames - t_meet)
        idx = len(agents)
        agents.append(
            _waypoint_path([(1, a_start, y), (t_meet, xc, y), (n_frames, a_end, y)],
                           n_frames, w, h)
        )
        agents.append(
            _waypoint_path([(1, b_start, y + 2.0), (t_meet, xc, y + 2.0),
                            (n_frames, b_end, y + 2.0)], n_frames, w, h)
        )
        for member in (idx, idx + 1):
            occlusions.append(OcclusionWindow(agent=member, start=t_meet - 40,
                                              end=t_meet - 28, mode="partial",
                                              conf=0.45, blend=0.6))
            occlusions.append(OcclusionWindow(agent=member, start=t_meet - 4,
                                              end=t_meet + 1, mode="drop"))
            occlusions.append(OcclusionWindow(agent=member, start=t_meet + 2,
                                              end=t_meet + 10, mode="partial",
                                              conf=0.45, blend=0.6))
    for j in range(n_walkers):
        y = 115.0 + 110.0 * (j % 6) + 10.0 * (j // 6)
        speed = float(rng.uniform(1.5, 2.5)) * (1.0 if j % 2 == 0 else -1.0)
        x0 = float(rng.uniform(200, 1080))
        agents.append(
            _waypoint_path([(1, x0, y), (n_frames, x0 + speed * (n_frames - 1), y)],
                           n_frames, w, h)
        )
    return ScenarioSpec(
        name="crowd",
        n_frames=n_frames,
        agents=tuple(agents),
        noise_sigma=noise_sigma,
        drop_prob=drop_prob,
        occlusions=tuple(occlusions),
        seed=seed,
    )


_PRESETS = {
    "linear": _linear_spec,
    "crossing": _crossing_spec,
    "occlusion": _occlusion_spec,
    "crowd": _crowd_spec,
}


def make_scenario(name: str, seed: int = 0, **kwargs) -> ScenarioSpec:
    """Build a preset scenario spec by name."""
    if name not in _PRESETS:
        raise ValueError(f"unknown scenario {name!r}; choose from {sorted(_PRESETS)}")
    return _PRESETS[name](seed, **kwargs)
