"""MOTChallenge file parsing/serialization and the embedding sidecar format.

Detection and result files follow the MOTChallenge CSV convention, so
MOT17/MOT20 files work unmodified.  Embeddings travel in a binary
sidecar: magic ``RTEMB1``, a little-endian u32 dimension, then records of
(u32 frame, u32 detection-index-within-frame, dim float32 values).  A CSV
fallback ``frame,index,v0,...,vN`` is accepted on read for hand-authored
fixtures.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterable

import numpy as np

SIDECAR_MAGIC = b"RTEMB1"

#: Detections below this confidence are dropped at ingest.
MIN_DETECTION_CONF = 0.1


class DataError(ValueError):
    """Malformed or inconsistent input data."""


@dataclass(frozen=True)
class DetectionRecord:
    frame: int
    bb_left: float
    bb_top: float
    bb_width: float
    bb_height: float
    conf: float

    @property
    def box(self) -> tuple[float, float, float, float]:
        return (self.bb_left, self.bb_top, self.bb_width, self.bb_height)

    @property
    def center(self) -> np.ndarray:
        return np.array([self.bb_left + self.bb_width / 2.0, self.bb_top + self.bb_height / 2.0])


@dataclass(frozen=True)
class ResultRecord:
    frame: int
    track_id: int
    bb_left: float
    bb_top: float
    bb_width: float
    bb_height: float
    conf: float

    @property
    def box(self) -> tuple[float, float, float, float]:
        return (self.bb_left, self.bb_top, self.bb_width, self.bb_height)


@dataclass(frozen=True)
class GroundTruthRecord:
    frame: int
    track_id: int
    bb_left: float
    bb_top: float
    bb_width: float
    bb_height: float

    @property
    def box(self) -> tuple[float, float, float, float]:
        return (self.bb_left, self.bb_top, self.bb_width, self.bb_height)


def _lines(stream: IO[str] | str | Path):
    if isinstance(stream, (str, Path)):
        with open(stream, "r") as fh:
            yield from enumerate(fh, start=1)
    else:
        yield from enumerate(stream, start=1)


def parse_detections(
    stream: IO[str] | str | Path,
    strict: bool = False,
) -> tuple[dict[int, list[DetectionRecord]], int]:
    """Parse a MOT detection file into records grouped and sorted by frame.

    Lines are ``frame,id,left,top,width,height,conf,x,y,z``; the id field
    is ignored.  Rows with non-positive extent or confidence below the
    ingest floor are skipped.  In lenient mode (default), malformed lines
    are skipped and counted; strict mode raises with the line number.

    Returns:
        (frames, skipped) where ``frames`` maps frame index to its
        detections and ``skipped`` counts dropped malformed lines.
    """
    frames: dict[int, list[DetectionRecord]] = {}
    skipped = 0
    for lineno, line in _lines(stream):
        line = line.strip()
        if not line:
            continue
        try:
            fields = line.split(",")
            frame = int(float(fields[0]))
            left, top, width, height = (float(v) for v in fields[2:6])
            conf = float(fields[6])
            if frame < 1:
                raise ValueError("frame index must be >= 1")
        except (ValueError, IndexError) as exc:
            if strict:
                raise DataError(f"line {lineno}: cannot parse detection row: {exc}") from exc
            skipped += 1
            continue
        if width <= 0 or height <= 0:
            skipped += 1
            continue
        if conf < MIN_DETECTION_CONF:
            continue
        frames.setdefault(frame, []).append(
            DetectionRecord(frame, left, top, width, height, conf)
        )
    return dict(sorted(frames.items())), skipped


def parse_ground_truth(stream: IO[str] | str | Path) -> dict[int, list[GroundTruthRecord]]:
    """Parse a MOT ground-truth file; columns past the first 6 are tolerated."""
    frames: dict[int, list[GroundTruthRecord]] = {}
    for lineno, line in _lines(stream):
        line = line.strip()
        if not line:
            continue
        try:
            fields = line.split(",")
            frame = int(float(fields[0]))
            track_id = int(float(fields[1]))
            left, top, width, height = (float(v) for v in fields[2:6])
        except (ValueError, IndexError) as exc:
            raise DataError(f"line {lineno}: cannot parse ground-truth row: {exc}") from exc
        frames.setdefault(frame, []).append(
            GroundTruthRecord(frame, track_id, left, top, width, height)
        )
    return dict(sorted(frames.items()))


def parse_results(stream: IO[str] | str | Path) -> dict[int, list[ResultRecord]]:
    frames: dict[int, list[ResultRecord]] = {}
    for lineno, line in _lines(stream):
        line = line.strip()
        if not line:
            continue
        try:
            fields = line.split(",")
            frame = int(float(fields[0]))
            track_id = int(float(fields[1]))
            left, top, width, height = (float(v) for v in fields[2:6])
            conf = float(fields[6]) if len(fields) > 6 else 1.0
        except (ValueError, IndexError) as exc:
            raise DataError(f"line {lineno}: cannot parse result row: {exc}") from exc
        frames.setdefault(frame, []).append(
            ResultRecord(frame, track_id, left, top, width, height, conf)
        )
    return dict(sorted(frames.items()))


def format_result(rec: ResultRecord) -> str:
    return (
        f"{rec.frame},{rec.track_id},{rec.bb_left:.2f},{rec.bb_top:.2f},"
        f"{rec.bb_width:.2f},{rec.bb_height:.2f},{rec.conf:.2f},-1,-1,-1"
    )


def write_results(records: Iterable[ResultRecord], path: str | Path) -> None:
    """Write result records sorted by (frame, id)."""
    ordered = sorted(records, key=lambda r: (r.frame, r.track_id))
    with open(path, "w") as fh:
        for rec in ordered:
            fh.write(format_result(rec) + "\n")


def write_detections(frames: dict[int, list[DetectionRecord]], path: str | Path) -> None:
    with open(path, "w") as fh:
        for frame in sorted(frames):
            for det in frames[frame]:
                fh.write(
                    f"{frame},-1,{det.bb_left:.2f},{det.bb_top:.2f},"
                    f"{det.bb_width:.2f},{det.bb_height:.2f},{det.conf:.4f},-1,-1,-1\n"
                )


def write_ground_truth(frames: dict[int, list[GroundTruthRecord]], path: str | Path) -> None:
    with open(path, "w") as fh:
        for frame in sorted(frames):
            for gt in frames[frame]:
                fh.write(
                    f"{frame},{gt.track_id},{gt.bb_left:.2f},{gt.bb_top:.2f},"
                    f"{gt.bb_width:.2f},{gt.bb_height:.2f},1,-1,-1,-1\n"
                )


def write_sidecar(
    path: str | Path,
    dim: int,
    embeddings: dict[tuple[int, int], np.ndarray],
) -> None:
    """Write an embedding sidecar keyed by (frame, detection index)."""
    if dim <= 0:
        raise DataError("sidecar dimension must be positive")
    with open(path, "wb") as fh:
        fh.write(SIDECAR_MAGIC)
        fh.write(struct.pack("<I", dim))
        for (frame, index) in sorted(embeddings):
            vec = np.asarray(embeddings[(frame, index)], dtype="<f4").ravel()
            if vec.size != dim:
                raise DataError(
                    f"embedding for frame {frame} index {index} has dimension "
                    f"{vec.size}, expected {dim}"
                )
            fh.write(struct.pack("<II", frame, index))
            fh.write(vec.tobytes())


def _read_csv_sidecar(path: str | Path) -> tuple[int, dict[tuple[int, int], np.ndarray]]:
    embeddings: dict[tuple[int, int], np.ndarray] = {}
    dim = None
    with open(path, "r") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            fields = line.split(",")
            try:
                frame = int(fields[0])
                index = int(fields[1])
                vec = np.array([float(v) for v in fields[2:]], dtype=np.float32)
            except (ValueError, IndexError) as exc:
                raise DataError("not an embedding sidecar") from exc
            if vec.size == 0:
                raise DataError("not an embedding sidecar")
            if dim is None:
                dim = vec.size
            elif vec.size != dim:
                raise DataError(f"line {lineno}: inconsistent embedding dimension")
            embeddings[(frame, index)] = vec
    if dim is None:
        raise DataError("not an embedding sidecar")
    return dim, embeddings


def read_sidecar(
    path: str | Path,
    expected_dim: int | None = None,
) -> tuple[int, dict[tuple[int, int], np.ndarray]]:
    """Read an embedding sidecar (binary, or the CSV fallback).

    Returns (dimension, {(frame, index): float32 vector}).
    """
    with open(path, "rb") as fh:
        head = fh.read(len(SIDECAR_MAGIC))
        if head == SIDECAR_MAGIC:
            raw = fh.read()
            if len(raw) < 4:
                raise DataError("corrupt sidecar")
            (dim,) = struct.unpack("<I", raw[:4])
            if dim <= 0:
                raise DataError("corrupt sidecar")
            body = raw[4:]
            rec_size = 8 + 4 * dim
            if len(body) % rec_size != 0:
                raise DataError("corrupt sidecar")
            embeddings: dict[tuple[int, int], np.ndarray] = {}
            for off in range(0, len(body), rec_size):
                frame, index = struct.unpack("<II", body[off : off + 8])
                vec = np.frombuffer(body[off + 8 : off + rec_size], dtype="<f4")
                embeddings[(frame, index)] = vec.copy()
        else:
            # fall back to the CSV form; anything else is rejected
            try:
                dim, embeddings = _read_csv_sidecar(path)
            except (UnicodeDecodeError, OSError) as exc:
                raise DataError("not an embedding sidecar") from exc
    if expected_dim is not None and dim != expected_dim:
        raise DataError(f"sidecar dimension {dim} does not match configured {expected_dim}")
    return dim, embeddings


def validate_sidecar(
    embeddings: dict[tuple[int, int], np.ndarray],
    detections: dict[int, list[DetectionRecord]],
) -> None:
    """Check that every sidecar record references an existing detection."""
    for frame, index in embeddings:
        dets = detections.get(frame, [])
        if index < 0 or index >= len(dets):
            raise DataError(
                f"sidecar references detection index {index} in frame {frame}, "
                f"which has {len(dets)} detections"
            )
