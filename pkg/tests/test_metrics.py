import itertools

import pytest

from motkit.metrics import clear_mot, evaluate, idf1
from motkit.mot_io import GroundTruthRecord, ResultRecord


def gt_rec(frame, tid, x, y=0.0, w=10.0, h=10.0):
    return GroundTruthRecord(frame, tid, x, y, w, h)


def res_rec(frame, tid, x, y=0.0, w=10.0, h=10.0):
    return ResultRecord(frame, tid, x, y, w, h, 1.0)


def group(records):
    out = {}
    for r in records:
        out.setdefault(r.frame, []).append(r)
    return out


def idf1_brute_force(gt, results, iou_threshold=0.5):
    """Exhaustive IDF1 over all injective gt-id to pred-id mappings."""
    from motkit.association import iou

    gt_ids = sorted({g.track_id for recs in gt.values() for g in recs})
    pred_ids = sorted({p.track_id for recs in results.values() for p in recs})
    overlap = {}
    total_gt = total_pred = 0
    for frame in set(gt) | set(results):
        gts = gt.get(frame, [])
        preds = results.get(frame, [])
        total_gt += len(gts)
        total_pred += len(preds)
        for g in gts:
            for p in preds:
                if iou(g.box, p.box) >= iou_threshold:
                    overlap[(g.track_id, p.track_id)] = (
                        overlap.get((g.track_id, p.track_id), 0) + 1
                    )
    best = 0
    k = min(len(gt_ids), len(pred_ids))
    for gt_subset in itertools.combinations(gt_ids, k):
        for perm in itertools.permutations(pred_ids, k):
            best = max(
                best, sum(overlap.get((g, p), 0) for g, p in zip(gt_subset, perm))
            )
    denom = total_gt + total_pred
    return 0.0 if denom == 0 else 2.0 * best / denom


def test_perfect_results_score_one():
    gt = group([gt_rec(f, tid, 50.0 * tid + f) for f in range(1, 6) for tid in (1, 2)])
    results = group(
        [res_rec(f, tid, 50.0 * tid + f) for f in range(1, 6) for tid in (1, 2)]
    )
    report = evaluate(gt, results)
    assert report.mota == pytest.approx(1.0, abs=1e-12)
    assert report.idf1 == pytest.approx(1.0, abs=1e-12)
    assert report.fp == report.fn == report.idsw == 0


def test_half_mota_case():
    # one frame, 4 gt, 3 matched, 1 spurious box: FP=1, FN=1, MOTA=0.5
    gt = group([gt_rec(1, tid, 100.0 * tid) for tid in (1, 2, 3, 4)])
    results = group(
        [res_rec(1, tid, 100.0 * tid) for tid in (1, 2, 3)] + [res_rec(1, 9, 900.0)]
    )
    counts = clear_mot(gt, results)
    assert counts["fp"] == 1
    assert counts["fn"] == 1
    assert counts["idsw"] == 0
    assert abs(counts["mota"] - 0.5) < 1e-12


def test_two_switches_on_mid_sequence_swap():
    # two agents, predictions swap ids between frames 2 and 3: IDSW = 2
    gt, results = [], []
    for f in (1, 2, 3, 4):
        gt += [gt_rec(f, 1, 0.0), gt_rec(f, 2, 100.0)]
        a, b = (1, 2) if f <= 2 else (2, 1)
        results += [res_rec(f, a, 0.0), res_rec(f, b, 100.0)]
    counts = clear_mot(group(gt), group(results))
    assert counts["idsw"] == 2
    assert counts["fp"] == 0 and counts["fn"] == 0
    assert abs(counts["mota"] - (1.0 - 2.0 / 8.0)) < 1e-12


def test_half_idf1_two_segment_case():
    # one gt track, covered half by pred id 7 and half by pred id 8
    frames = range(1, 9)
    gt = group([gt_rec(f, 1, float(f)) for f in frames])
    results = group(
        [res_rec(f, 7 if f <= 4 else 8, float(f)) for f in frames]
    )
    value = idf1(gt, results)
    assert abs(value - 0.5) < 1e-12


def test_idf1_matches_brute_force_small_cases(rng):
    for _ in range(30):
        n_gt = int(rng.integers(1, 5))
        n_pred = int(rng.integers(1, 5))
        gt, results = [], []
        for f in range(1, 7):
            for tid in range(1, n_gt + 1):
                if rng.random() < 0.8:
                    gt.append(gt_rec(f, tid, 40.0 * tid))
            for tid in range(1, n_pred + 1):
                # predictions hover near a random gt lane
                lane = int(rng.integers(1, n_gt + 1))
                if rng.random() < 0.8:
                    results.append(res_rec(f, 100 + tid, 40.0 * lane + rng.uniform(0, 4)))
        gt_g, res_g = group(gt), group(results)
        if not gt_g:
            continue
        assert idf1(gt_g, res_g) == pytest.approx(idf1_brute_force(gt_g, res_g), abs=1e-12)


def test_correspondence_carry_over_prevents_spurious_switch():
    # pred id 1 stays on gt 1 with moderate overlap while a second pred
    # box sits closer in one frame; carried-over correspondence keeps id 1
    gt = group([gt_rec(f, 1, 0.0) for f in (1, 2, 3)])
    results = group(
        [res_rec(1, 1, 0.0), res_rec(2, 1, 2.0), res_rec(2, 2, 1.0), res_rec(3, 1, 0.0)]
    )
    counts = clear_mot(gt, results)
    assert counts["idsw"] == 0
    assert counts["fp"] == 1  # the extra frame-2 box


def test_idf1_invariant_to_pred_relabeling():
    gt = group([gt_rec(f, 1, float(f)) for f in range(1, 9)])
    results = [res_rec(f, 7 if f <= 4 else 8, float(f)) for f in range(1, 9)]
    relabeled = [
        ResultRecord(r.frame, r.track_id + 1000, r.bb_left, r.bb_top, r.bb_width,
                     r.bb_height, r.conf)
        for r in results
    ]
    assert idf1(gt, group(results)) == pytest.approx(idf1(gt, group(relabeled)), abs=1e-12)


def test_injected_fp_weakly_decreases_mota():
    gt = group([gt_rec(f, 1, float(f)) for f in range(1, 6)])
    clean = [res_rec(f, 1, float(f)) for f in range(1, 6)]
    polluted = clean + [res_rec(3, 99, 500.0)]
    assert clear_mot(gt, group(polluted))["mota"] < clear_mot(gt, group(clean))["mota"]


def test_mt_ml_counts():
    gt = group(
        [gt_rec(f, 1, 0.0) for f in range(1, 11)]
        + [gt_rec(f, 2, 100.0) for f in range(1, 11)]
    )
    # id 1 covered 9/10 frames (MT), id 2 covered 1/10 (ML)
    results = group(
        [res_rec(f, 1, 0.0) for f in range(1, 10)] + [res_rec(1, 2, 100.0)]
    )
    report = evaluate(gt, results)
    assert report.mt == 1
    assert report.ml == 1


def test_empty_results_idf1_zero():
    gt = group([gt_rec(1, 1, 0.0)])
    assert idf1(gt, {}) == 0.0


def test_no_ground_truth_raises():
    with pytest.raises(ValueError, match="no ground truth"):
        clear_mot({}, {})
    with pytest.raises(ValueError, match="no ground truth"):
        idf1({1: []}, {})


def test_mota_invariant_formula():
    gt = group([gt_rec(f, 1, float(f)) for f in range(1, 6)])
    results = group([res_rec(f, 1, float(f) + 20.0) for f in range(1, 6)])
    counts = clear_mot(gt, results)
    assert counts["mota"] == pytest.approx(
        1.0 - (counts["fp"] + counts["fn"] + counts["idsw"]) / counts["gt_count"],
        abs=1e-12,
    )
