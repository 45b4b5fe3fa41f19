"""Triplet-level exact-match metrics, multi-run aggregation, and the
single-cause/single-effect ratio analysis."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

import numpy as np

from .errors import IdMismatch
from .scheme import CausalTriplet

TripletsById = dict[int, list[CausalTriplet]]


@dataclass(frozen=True)
class Metrics:
    precision: float
    recall: float
    f1: float
    correct: int
    predicted: int
    gold: int


@dataclass(frozen=True)
class RunAggregate:
    p_mean: float
    p_std: float
    r_mean: float
    r_std: float
    f_mean: float
    f_std: float
    runs: int


@dataclass(frozen=True)
class SingleRatios:
    rs_c: float
    rs_e: float


def _check_ids(gold: TripletsById, pred: TripletsById) -> None:
    if set(gold) != set(pred):
        missing = set(gold) ^ set(pred)
        raise IdMismatch(f"sentence id sets differ; symmetric difference {sorted(missing)[:5]}")


def _f1(p: float, r: float) -> float:
    return 2 * p * r / (p + r) if p + r > 0 else 0.0


def triplet_prf(gold: TripletsById, pred: TripletsById) -> Metrics:
    """Exact-match precision/recall/F1.

    A prediction is correct iff both its cause and effect span boundaries
    match a gold triplet in the same sentence; each gold triplet matches at
    most one prediction.
    """
    _check_ids(gold, pred)
    correct = predicted = total_gold = 0
    for sid, gold_list in gold.items():
        pred_list = pred[sid]
        predicted += len(pred_list)
        total_gold += len(gold_list)
        matched = Counter(gold_list) & Counter(pred_list)
        correct += sum(matched.values())
    p = correct / predicted if predicted else 0.0
    r = correct / total_gold if total_gold else 0.0
    return Metrics(precision=p, recall=r, f1=_f1(p, r),
                   correct=correct, predicted=predicted, gold=total_gold)


def aggregate_runs(runs: list[Metrics]) -> RunAggregate:
    """Mean and sample standard deviation (n-1 denominator; 0 for one run)."""
    if not runs:
        raise ValueError("at least one run required")
    p = np.array([m.precision for m in runs])
    r = np.array([m.recall for m in runs])
    f = np.array([m.f1 for m in runs])

    def std(values: np.ndarray) -> float:
        return float(np.std(values, ddof=1)) if len(runs) > 1 else 0.0

    return RunAggregate(
        p_mean=float(p.mean()), p_std=std(p),
        r_mean=float(r.mean()), r_std=std(r),
        f_mean=float(f.mean()), f_std=std(f),
        runs=len(runs),
    )


def format_report_row(name: str, agg: RunAggregate) -> str:
    """One metrics-report line: ``model<TAB>P±σ<TAB>R±σ<TAB>F±σ``."""
    return (f"{name}"
            f"\t{agg.p_mean:.4f}±{agg.p_std:.4f}"
            f"\t{agg.r_mean:.4f}±{agg.r_std:.4f}"
            f"\t{agg.f_mean:.4f}±{agg.f_std:.4f}")


def single_ratios(gold: TripletsById, pred: TripletsById) -> SingleRatios:
    """Share of predicted cause (effect) spans that hit a gold cause (effect)
    span while the full triplet is wrong; 0 when nothing is predicted."""
    _check_ids(gold, pred)
    single_c = single_e = n_pred = 0
    for sid, pred_list in pred.items():
        gold_set = set(gold[sid])
        gold_causes = {t.cause for t in gold[sid]}
        gold_effects = {t.effect for t in gold[sid]}
        for t in pred_list:
            n_pred += 1
            if t in gold_set:
                continue
            if t.cause in gold_causes:
                single_c += 1
            if t.effect in gold_effects:
                single_e += 1
    if n_pred == 0:
        return SingleRatios(rs_c=0.0, rs_e=0.0)
    return SingleRatios(rs_c=single_c / n_pred, rs_e=single_e / n_pred)
