"""Delimited reports and the figures rendered next to them."""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .evaluation import Metrics, TestCaseResult


def write_results_csv(path: Path, results: Sequence[TestCaseResult], aggregate: Metrics, aggregation: str):
    """Per-test-case scores plus a final MICRO/MACRO row."""
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["testcase", "precision", "recall", "f1", "tp", "fp", "fn"])
        for r in results:
            writer.writerow(
                [r.name, f"{r.metrics.precision:.4f}", f"{r.metrics.recall:.4f}", f"{r.metrics.f1:.4f}",
                 r.counts.tp, r.counts.fp, r.counts.fn]
            )
        total_tp = sum(r.counts.tp for r in results)
        total_fp = sum(r.counts.fp for r in results)
        total_fn = sum(r.counts.fn for r in results)
        writer.writerow(
            [aggregation.upper(), f"{aggregate.precision:.4f}", f"{aggregate.recall:.4f}",
             f"{aggregate.f1:.4f}", total_tp, total_fp, total_fn]
        )


def plot_results(path: Path, results: Sequence[TestCaseResult], aggregate: Metrics, aggregation: str):
    names = [r.name for r in results]
    fig, ax = plt.subplots(figsize=(max(4.0, 0.9 * len(names) + 2), 3.2))
    x = range(len(names))
    width = 0.27
    ax.bar([i - width for i in x], [r.metrics.precision for r in results], width, label="precision")
    ax.bar(list(x), [r.metrics.recall for r in results], width, label="recall")
    ax.bar([i + width for i in x], [r.metrics.f1 for r in results], width, label="f1")
    ax.axhline(aggregate.f1, color="gray", linestyle="--", linewidth=1, label=f"{aggregation} f1")
    ax.set_xticks(list(x))
    ax.set_xticklabels(names, rotation=30, ha="right")
    ax.set_ylim(0, 1.05)
    ax.set_ylabel("score")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def write_stages_csv(path: Path, stages: Sequence[tuple[str, int]], threshold: float, training_f1: float | None):
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["stage", "size"])
        writer.writerows(stages)
        writer.writerow(["chosen_threshold", repr(threshold)])
        if training_f1 is not None:
            writer.writerow(["training_f1", f"{training_f1:.4f}"])


def plot_stages(path: Path, stages: Sequence[tuple[str, int]]):
    names = [name for name, _ in stages]
    sizes = [size for _, size in stages]
    fig, ax = plt.subplots(figsize=(4.5, 3.0))
    bars = ax.bar(names, sizes, color="#4878a8")
    ax.bar_label(bars)
    ax.set_ylabel("correspondences")
    ax.set_title("alignment size per pipeline stage")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def write_sweep_csv(path: Path, rows: Sequence[tuple[float, Metrics]]):
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["fraction", "precision", "recall", "f1"])
        for fraction, m in rows:
            writer.writerow([fraction, f"{m.precision:.4f}", f"{m.recall:.4f}", f"{m.f1:.4f}"])


def plot_sweep(path: Path, rows: Sequence[tuple[float, Metrics]]):
    fractions = [fraction for fraction, _ in rows]
    fig, ax = plt.subplots(figsize=(4.5, 3.0))
    ax.plot(fractions, [m.precision for _, m in rows], marker="o", label="precision")
    ax.plot(fractions, [m.recall for _, m in rows], marker="s", label="recall")
    ax.plot(fractions, [m.f1 for _, m in rows], marker="^", label="f1")
    ax.set_xlabel("reference sampling fraction")
    ax.set_ylabel("score")
    ax.set_ylim(0, 1.05)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
