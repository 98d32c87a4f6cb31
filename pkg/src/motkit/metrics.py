"""CLEAR-MOT and identity metrics.

``clear_mot`` accumulates FP/FN/IDSW with the CLEAR convention:
previous-frame correspondences are carried over while they still overlap
above the IoU threshold, then the remaining boxes are matched by
Hungarian on IoU.  ``idf1`` solves one global bipartite matching between
ground-truth and predicted identities that maximizes identity true
positives.  MT/ML counts are reported for information only.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .association import iou
from .mot_io import GroundTruthRecord, ResultRecord


@dataclass
class MetricsReport:
    mota: float
    idf1: float
    recall: float
    fp: int
    fn: int
    idsw: int
    gt_count: int
    mt: int
    ml: int

    def as_dict(self) -> dict[str, float]:
        return {
            "MOTA": self.mota,
            "IDF1": self.idf1,
            "Recall": self.recall,
            "FP": self.fp,
            "FN": self.fn,
            "IDSW": self.idsw,
            "GT": self.gt_count,
            "MT": self.mt,
            "ML": self.ml,
        }


def _check_gt(gt: dict[int, list[GroundTruthRecord]]) -> None:
    if not gt or all(len(v) == 0 for v in gt.values()):
        raise ValueError("no ground truth")


def clear_mot(
    gt: dict[int, list[GroundTruthRecord]],
    results: dict[int, list[ResultRecord]],
    iou_threshold: float = 0.5,
) -> dict[str, float | int]:
    """CLEAR-MOT accumulation; returns the MOTA family of counts."""
    _check_gt(gt)
    fp = fn = idsw = gt_count = matches_total = 0
    # gt id -> currently corresponding predicted id
    active: dict[int, int] = {}
    # gt id -> last predicted id it was ever matched to
    last_match: dict[int, int] = {}
    # per-gt-identity coverage for MT/ML
    gt_frames: dict[int, int] = {}
    gt_covered: dict[int, int] = {}

    frames = sorted(set(gt) | set(results))
    for frame in frames:
        gts = gt.get(frame, [])
        preds = results.get(frame, [])
        gt_count += len(gts)
        for g in gts:
            gt_frames[g.track_id] = gt_frames.get(g.track_id, 0) + 1

        gt_ids = [g.track_id for g in gts]
        pred_ids = [p.track_id for p in preds]
        overlap = np.zeros((len(gts), len(preds)))
        for i, g in enumerate(gts):
            for j, p in enumerate(preds):
                overlap[i, j] = iou(g.box, p.box)

        pairs: dict[int, int] = {}  # gt index -> pred index
        used_preds: set[int] = set()
        # carry over previous correspondences still valid
        for i, gid in enumerate(gt_ids):
            pid = active.get(gid)
            if pid is None or pid not in pred_ids:
                continue
            j = pred_ids.index(pid)
            if j in used_preds:
                continue
            if overlap[i, j] >= iou_threshold:
                pairs[i] = j
                used_preds.add(j)
        # Hungarian over the rest
        free_g = [i for i in range(len(gts)) if i not in pairs]
        free_p = [j for j in range(len(preds)) if j not in used_preds]
        if free_g and free_p:
            cost = np.ones((len(free_g), len(free_p)))
            for a, i in enumerate(free_g):
                for b, j in enumerate(free_p):
                    if overlap[i, j] >= iou_threshold:
                        cost[a, b] = 1.0 - overlap[i, j]
            rows, cols = linear_sum_assignment(cost)
            for a, b in zip(rows, cols):
                i, j = free_g[a], free_p[b]
                if overlap[i, j] >= iou_threshold:
                    pairs[i] = j
                    used_preds.add(j)

        new_active: dict[int, int] = {}
        for i, j in pairs.items():
            gid, pid = gt_ids[i], pred_ids[j]
            if gid in last_match and last_match[gid] != pid:
                idsw += 1
            last_match[gid] = pid
            new_active[gid] = pid
            gt_covered[gid] = gt_covered.get(gid, 0) + 1
        matches_total += len(pairs)
        fn += len(gts) - len(pairs)
        fp += len(preds) - len(pairs)
        # correspondences persist through frames where the gt id is absent
        for gid, pid in active.items():
            if gid not in new_active:
                new_active[gid] = pid
        active = new_active

    mt = sum(
        1 for gid, total in gt_frames.items() if gt_covered.get(gid, 0) / total >= 0.8
    )
    ml = sum(
        1 for gid, total in gt_frames.items() if gt_covered.get(gid, 0) / total <= 0.2
    )
    mota = 1.0 - (fp + fn + idsw) / gt_count
    recall = matches_total / gt_count
    return {
        "mota": mota,
        "recall": recall,
        "fp": fp,
        "fn": fn,
        "idsw": idsw,
        "gt_count": gt_count,
        "mt": mt,
        "ml": ml,
    }


def idf1(
    gt: dict[int, list[GroundTruthRecord]],
    results: dict[int, list[ResultRecord]],
    iou_threshold: float = 0.5,
) -> float:
    """Identity F1 via a globally optimal gt-identity to pred-identity matching."""
    _check_gt(gt)
    gt_ids = sorted({g.track_id for recs in gt.values() for g in recs})
    pred_ids = sorted({p.track_id for recs in results.values() for p in recs})
    gt_len = {gid: 0 for gid in gt_ids}
    pred_len = {pid: 0 for pid in pred_ids}
    overlap_frames = np.zeros((len(gt_ids), len(pred_ids)))
    g_index = {gid: i for i, gid in enumerate(gt_ids)}
    p_index = {pid: j for j, pid in enumerate(pred_ids)}

    frames = sorted(set(gt) | set(results))
    for frame in frames:
        for g in gt.get(frame, []):
            gt_len[g.track_id] += 1
        for p in results.get(frame, []):
            pred_len[p.track_id] += 1
        for g in gt.get(frame, []):
            for p in results.get(frame, []):
                if iou(g.box, p.box) >= iou_threshold:
                    overlap_frames[g_index[g.track_id], p_index[p.track_id]] += 1

    idtp = 0.0
    if len(gt_ids) and len(pred_ids):
        rows, cols = linear_sum_assignment(-overlap_frames)
        idtp = float(overlap_frames[rows, cols].sum())
    total_gt = sum(gt_len.values())
    total_pred = sum(pred_len.values())
    denom = total_gt + total_pred
    if denom == 0:
        return 0.0
    return 2.0 * idtp / denom


def evaluate(
    gt: dict[int, list[GroundTruthRecord]],
    results: dict[int, list[ResultRecord]],
    iou_threshold: float = 0.5,
) -> MetricsReport:
    """Full report: CLEAR counts plus IDF1."""
    counts = clear_mot(gt, results, iou_threshold)
    return MetricsReport(
        mota=float(counts["mota"]),
        idf1=idf1(gt, results, iou_threshold),
        recall=float(counts["recall"]),
        fp=int(counts["fp"]),
        fn=int(counts["fn"]),
        idsw=int(counts["idsw"]),
        gt_count=int(counts["gt_count"]),
        mt=int(counts["mt"]),
        ml=int(counts["ml"]),
    )
