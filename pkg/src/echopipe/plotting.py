"""SVG figure rendering for built datasets.

One figure per record: the source path, the re-timed waypoints colored
by their per-waypoint speed, and the speed-vs-time curve. A summary
figure overlays the per-emotion speed profiles. Rendering is headless
(Agg) and writes SVG only.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "echopipe"

import matplotlib.pyplot as plt
import numpy as np

from .dataset import FUTURE_SPAN_SEC, CotRecord, load_dataset

_EMOTION_COLORS = {"normal": "tab:gray", "urgent": "tab:red",
                   "hesitant": "tab:blue"}


def plot_record(record: CotRecord, out_dir: Path) -> Path:
    fig, (ax_path, ax_speed) = plt.subplots(
        1, 2, figsize=(9, 4), gridspec_kw={"width_ratios": [3, 2]})

    src = record.source_future
    ax_path.plot(src[:, 0], src[:, 1], "--", color="0.6", lw=1.2,
                 label="ground truth path")
    pts = record.answer_points
    scatter = ax_path.scatter(pts[:, 0], pts[:, 1], c=record.answer_speeds,
                              cmap="viridis", s=45, zorder=3,
                              label="planned waypoints")
    fig.colorbar(scatter, ax=ax_path, label="speed (m/s)")
    ax_path.set_xlabel("x (m)")
    ax_path.set_ylabel("y (m)")
    ax_path.set_title(f"{record.record_id} [{record.emotion.value}]")
    ax_path.axis("equal")
    ax_path.legend(loc="best", fontsize=8)

    t = np.linspace(0.0, FUTURE_SPAN_SEC, len(record.answer_speeds))
    color = _EMOTION_COLORS.get(record.emotion.value, "tab:green")
    ax_speed.plot(t, record.answer_speeds, "o-", color=color)
    ax_speed.set_xlabel("time (s)")
    ax_speed.set_ylabel("speed (m/s)")
    ax_speed.set_title(f"speed profile (arousal {record.arousal:.2f})")
    ax_speed.grid(alpha=0.3)

    fig.tight_layout()
    out_path = out_dir / f"{record.record_id}.svg"
    fig.savefig(out_path, format="svg")
    plt.close(fig)
    return out_path


def plot_summary(records: list[CotRecord], out_dir: Path) -> Path:
    fig, ax = plt.subplots(figsize=(6, 4))
    seen = set()
    for record in records:
        emotion = record.emotion.value
        t = np.linspace(0.0, FUTURE_SPAN_SEC, len(record.answer_speeds))
        label = emotion if emotion not in seen else None
        seen.add(emotion)
        ax.plot(t, record.answer_speeds, alpha=0.5,
                color=_EMOTION_COLORS.get(emotion, "tab:green"), label=label)
    ax.set_xlabel("time (s)")
    ax.set_ylabel("speed (m/s)")
    ax.set_title("per-waypoint speeds by emotion")
    if seen:
        ax.legend()
    ax.grid(alpha=0.3)
    fig.tight_layout()
    out_path = out_dir / "speed_profiles.svg"
    fig.savefig(out_path, format="svg")
    plt.close(fig)
    return out_path


def plot_dataset(dataset_path: str | Path, out_dir: str | Path,
                 limit: int | None = None) -> list[Path]:
    """Render per-record figures plus the summary; returns written paths."""
    records = load_dataset(dataset_path)
    if limit is not None:
        records = records[:limit]
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = [plot_record(record, out_dir) for record in records]
    written.append(plot_summary(records, out_dir))
    return written
