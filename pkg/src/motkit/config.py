"""Flat ``key = value`` configuration files with dotted section names.

Every default equals the tuned tracker values, so an empty file (or no
file) reproduces the stock configuration.  Unknown keys are rejected by
name to catch typos.
"""

from __future__ import annotations

from dataclasses import replace
from pathlib import Path
from typing import IO

from .association import AssociationConfig
from .kalman import NoiseConfig
from .tracker import TrackerConfig
from .trajectory import SmoothingParams


class ConfigError(ValueError):
    pass


def _parse_bool(raw: str) -> bool:
    low = raw.lower()
    if low in ("true", "yes", "on", "1"):
        return True
    if low in ("false", "no", "off", "0"):
        return False
    raise ConfigError(f"cannot parse boolean value {raw!r}")


# dotted key -> (sub-config attribute on TrackerConfig or None, field, parser)
_KEYS: dict[str, tuple[str | None, str, type | object]] = {
    "noise.qx": ("noise", "q0", float),
    "noise.qy": ("noise", "q1", float),
    "noise.qvx": ("noise", "q2", float),
    "noise.qvy": ("noise", "q3", float),
    "noise.rx": ("noise", "r0", float),
    "noise.ry": ("noise", "r1", float),
    "smoothing.k": ("smoothing", "k", int),
    "smoothing.dt": ("smoothing", "dt", int),
    "association.lambda": ("association", "lam", float),
    "association.iou_gate": ("association", "iou_gate", float),
    "association.appearance_threshold": ("association", "appearance_threshold", float),
    "association.iou_accept_min_overlap": ("association", "iou_accept_min_overlap", float),
    "association.cd_neutral": ("association", "cd_neutral", float),
    "association.fusion_mode": ("association", "fusion_mode", str),
    "association.lambda1": ("association", "lambda1", float),
    "association.lambda2": ("association", "lambda2", float),
    "tracker.new_track_conf": (None, "new_track_conf", float),
    "tracker.max_lost_frames": (None, "max_lost_frames", int),
    "tracker.n_init": (None, "n_init", int),
    "tracker.interpolation": (None, "interpolation", _parse_bool),
    "tracker.interpolation_max_gap": (None, "interpolation_max_gap", int),
    "features.smoothing": (None, "enable_smoothing", _parse_bool),
    "features.direction": (None, "enable_direction", _parse_bool),
    "features.appearance": (None, "enable_appearance", _parse_bool),
    "features.fine_memory": (None, "enable_fine_memory", _parse_bool),
    "features.depth_staging": (None, "enable_depth_staging", _parse_bool),
}


def parse_config(stream: IO[str] | str | Path) -> TrackerConfig:
    """Parse a flat config file into a TrackerConfig."""
    if isinstance(stream, (str, Path)):
        text = Path(stream).read_text()
    else:
        text = stream.read()

    top: dict[str, object] = {}
    noise_q = list(NoiseConfig().q)
    noise_r = list(NoiseConfig().r)
    assoc: dict[str, object] = {}
    smooth: dict[str, object] = {}

    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, _, raw_value = line.partition("=")
        key = key.strip()
        raw_value = raw_value.strip()
        if key not in _KEYS:
            raise ConfigError(f"line {lineno}: unknown configuration key {key!r}")
        section, fieldname, parser = _KEYS[key]
        try:
            value = parser(raw_value)
        except ConfigError:
            raise
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"line {lineno}: bad value for {key!r}: {raw_value!r}") from exc
        if section == "noise":
            idx = int(fieldname[1])
            if fieldname.startswith("q"):
                noise_q[idx] = value
            else:
                noise_r[idx] = value
        elif section == "association":
            assoc[fieldname] = value
        elif section == "smoothing":
            smooth[fieldname] = value
        else:
            top[fieldname] = value

    try:
        return TrackerConfig(
            noise=NoiseConfig(q=tuple(noise_q), r=tuple(noise_r)),
            association=replace(AssociationConfig(), **assoc),
            smoothing=replace(SmoothingParams(), **smooth),
            **top,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
