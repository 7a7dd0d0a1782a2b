"""Delimited and graphical reports for the fuzz and simulation harnesses.

Matplotlib is imported lazily with the Agg backend so the CLI stays usable
on headless machines and pays nothing unless a figure is requested.
"""

from __future__ import annotations

import csv
from typing import Iterable

from .simulate import SimConfig, SimReport
from .verify import TP1Report

SIM_FIELDS = (
    "seed",
    "clients",
    "steps",
    "converged",
    "edits",
    "puts",
    "gets",
    "transforms",
    "max_pending_len",
    "final_doc_len",
)


def sim_row(config: SimConfig, report: SimReport) -> dict:
    return {
        "seed": config.seed,
        "clients": config.clients,
        "steps": config.steps,
        "converged": int(report.converged),
        "edits": report.counts["edits"],
        "puts": report.counts["puts"],
        "gets": report.counts["gets"],
        "transforms": report.counts["transforms"],
        "max_pending_len": report.max_pending_len,
        "final_doc_len": len(report.server_doc),
    }


def write_sim_csv(path: str, rows: Iterable[dict]) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.DictWriter(handle, fieldnames=SIM_FIELDS)
        writer.writeheader()
        writer.writerows(rows)


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def plot_sim(path: str, rows: list[dict]) -> None:
    """Convergence tally and pending-queue pressure across a batch of runs."""
    plt = _pyplot()
    fig, (left, right) = plt.subplots(1, 2, figsize=(9, 3.5))
    converged = sum(r["converged"] for r in rows)
    left.bar(["converged", "diverged"], [converged, len(rows) - converged], color=["tab:green", "tab:red"])
    left.set_title(f"{converged}/{len(rows)} runs converged")
    right.hist([r["max_pending_len"] for r in rows], bins=20, color="tab:blue")
    right.set_title("max pending-queue length")
    right.set_xlabel("diffs queued")
    right.set_ylabel("runs")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_coverage(path: str, report: TP1Report) -> None:
    """Branch-coverage bars for the single-diff transform table."""
    plt = _pyplot()
    cases = sorted(report.case_hits)
    hits = [report.case_hits[c] for c in cases]
    fig, ax = plt.subplots(figsize=(8, 0.35 * len(cases) + 1.5))
    ax.barh(cases, hits, color="tab:blue")
    ax.set_xlabel("pairs hitting the branch")
    ax.set_title(f"{report.pairs} pairs, {len(report.counterexamples)} counterexamples")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
