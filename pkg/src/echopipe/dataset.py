"""Scene ingestion, dataset building, and dataset validation.

Scenes arrive as JSON Lines with an explicit schema header on line 1
({"schema": "echo-scenes", "version": 1}); each following line is one
frame with its image reference, ego history/future, ego state, and
per-future-step agent boxes. The builder fans every scene out into one
record per requested emotion: it renders the command text from the
clustered intention, synthesizes (or loads) the base audio, applies the
prosody preset, measures arousal from the exact bytes written to disk,
labels the emotion from that measurement, and re-times the future
trajectory accordingly. Normal records keep the ground-truth future
untouched.

Everything is deterministic: per-record RNG seeds are derived by hashing
(config seed, frame id, emotion), so rebuilding with the same config
produces byte-identical outputs.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .arousal import Emotion, arousal, label_emotion
from .audio import decode_wav, encode_wav
from .errors import EchoPipeError, ParameterError, SchemaError
from .features import extract_features, normalize_features
from .intent import (WAYPOINT_DT, CommandText, IntentFeature, classify,
                     fit_intents, render_command)
from .prosody import emotionalize
from .synth import SynthSpec, synth_speech
from .trajectory import (GEOMETRY_TOL, Trajectory, arc_length, base_speed,
                         default_profile_params, modulate,
                         point_to_polyline_distance)

SCENES_SCHEMA = "echo-scenes"
SCENES_VERSION = 1
DATASET_SCHEMA = "echo-cot"
DATASET_VERSION = 1

FUTURE_STEPS = 6
#: Time span of the six future waypoints measured from the first one (2 Hz).
FUTURE_SPAN_SEC = (FUTURE_STEPS - 1) * WAYPOINT_DT

EMOTION_ORDER = (Emotion.NORMAL, Emotion.URGENT, Emotion.HESITANT)

REASONING_STAGES = ("audio_analysis", "emotion_detection", "trajectory_decision")

# Base-voice calibration: chosen so the plain rendering lands in the
# normal arousal band while the urgent/hesitant presets push the
# measured label across its threshold.
_BASE_F0_HZ = (214.0, 226.0)
_BASE_SLOPE = (-8.0, 8.0)
_BASE_SYLLABLE_HZ = (1.9, 2.1)
_BASE_AMPLITUDE = 0.70
_BASE_NOISE = 0.02
_SECONDS_PER_WORD = 0.32
_DURATION_RANGE = (1.6, 3.2)


def _stable_seed(*parts) -> int:
    key = ":".join(str(p) for p in parts).encode()
    return int.from_bytes(hashlib.blake2b(key, digest_size=8).digest(), "big")


# --- scene records ----------------------------------------------------------

@dataclass(frozen=True)
class SceneRecord:
    """One ingested keyframe in its own ego frame (x forward, y left)."""

    scene_id: str
    frame_id: str
    timestamp: float
    image_path: str
    ego_history: np.ndarray = field(repr=False)   # (H, 2)
    ego_future: np.ndarray = field(repr=False)    # (6, 2)
    ego_speed: float
    ego_accel: float
    agents: tuple = field(repr=False)             # 6 steps of (n_i, 5) arrays

    def to_dict(self) -> dict:
        return {
            "scene_id": self.scene_id,
            "frame_id": self.frame_id,
            "timestamp": self.timestamp,
            "image_path": self.image_path,
            "ego_history": self.ego_history.tolist(),
            "ego_future": self.ego_future.tolist(),
            "ego_speed": self.ego_speed,
            "ego_accel": self.ego_accel,
            "agents": [step.tolist() for step in self.agents],
        }


def _parse_scene(row: dict) -> SceneRecord:
    for key in ("scene_id", "frame_id", "timestamp", "image_path", "ego_history",
                "ego_future", "ego_speed", "ego_accel", "agents"):
        if key not in row:
            raise ParameterError(f"missing field {key!r}")
    future = np.asarray(row["ego_future"], dtype=np.float64)
    if future.shape != (FUTURE_STEPS, 2):
        raise ParameterError(
            f"ego_future must have exactly {FUTURE_STEPS} points, got {future.shape}")
    if not np.all(np.isfinite(future)):
        raise ParameterError("ego_future must be finite")
    history = np.asarray(row["ego_history"], dtype=np.float64)
    if history.size and (history.ndim != 2 or history.shape[1] != 2
                         or not np.all(np.isfinite(history))):
        raise ParameterError("ego_history must be finite (H, 2) waypoints")
    if len(row["agents"]) != FUTURE_STEPS:
        raise ParameterError(
            f"agents must list {FUTURE_STEPS} steps, got {len(row['agents'])}")
    steps = []
    for i, step in enumerate(row["agents"]):
        boxes = np.asarray(step, dtype=np.float64).reshape(-1, 5) if step else \
            np.empty((0, 5))
        if boxes.size and (not np.all(np.isfinite(boxes))
                           or np.any(boxes[:, 3:] <= 0.0)):
            raise ParameterError(f"agents step {i} has a malformed box")
        steps.append(boxes)
    speed = float(row["ego_speed"])
    accel = float(row["ego_accel"])
    timestamp = float(row["timestamp"])
    if not (math.isfinite(speed) and speed >= 0.0):
        raise ParameterError(f"ego_speed must be finite and >= 0, got {speed}")
    if not (math.isfinite(accel) and math.isfinite(timestamp)):
        raise ParameterError("ego_accel and timestamp must be finite")
    return SceneRecord(
        scene_id=str(row["scene_id"]), frame_id=str(row["frame_id"]),
        timestamp=timestamp, image_path=str(row["image_path"]),
        ego_history=history.reshape(-1, 2), ego_future=future,
        ego_speed=speed, ego_accel=accel, agents=tuple(steps))


@dataclass(frozen=True)
class LineError:
    line: int
    message: str

    def to_dict(self) -> dict:
        return {"line": self.line, "message": self.message}


def _check_header(line: str, schema: str, version: int) -> None:
    try:
        header = json.loads(line)
    except json.JSONDecodeError:
        raise SchemaError("first line is not a JSON schema header")
    if not isinstance(header, dict) or header.get("schema") != schema:
        raise SchemaError(f"expected schema {schema!r}, got {header!r}")
    if header.get("version") != version:
        raise SchemaError(
            f"unsupported {schema} version {header.get('version')!r}, "
            f"this build reads version {version}")


def ingest(path: str | Path) -> tuple[list[SceneRecord], list[LineError]]:
    """Read and validate a scenes.jsonl file.

    A bad schema header is a hard error; invalid records are skipped and
    returned as line errors with their line numbers.
    """
    lines = Path(path).read_text().splitlines()
    if not lines:
        raise SchemaError(f"{path} is empty, expected a schema header")
    _check_header(lines[0], SCENES_SCHEMA, SCENES_VERSION)
    records: list[SceneRecord] = []
    errors: list[LineError] = []
    seen: set[str] = set()
    for line_no, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        try:
            record = _parse_scene(json.loads(line))
            if record.frame_id in seen:
                raise ParameterError(f"duplicate frame_id {record.frame_id!r}")
            seen.add(record.frame_id)
            records.append(record)
        except (json.JSONDecodeError, EchoPipeError, ValueError, TypeError) as exc:
            errors.append(LineError(line=line_no, message=str(exc)))
    return records, errors


def write_scenes(path: str | Path, records) -> None:
    """Emit scenes.jsonl with its schema header (ingest's round-trip twin)."""
    with open(path, "w") as fh:
        fh.write(json.dumps({"schema": SCENES_SCHEMA, "version": SCENES_VERSION}) + "\n")
        for record in records:
            fh.write(json.dumps(record.to_dict()) + "\n")


# --- emitted records ---------------------------------------------------------

@dataclass(frozen=True)
class CotRecord:
    """One emitted dataset sample with its staged-reasoning text fields."""

    record_id: str
    frame_id: str
    scene_id: str
    image_path: str
    audio_path: str
    intention: str
    command: CommandText
    arousal: float
    emotion: Emotion
    requested_emotion: Emotion
    reasoning: dict
    answer_points: np.ndarray = field(repr=False)   # (6, 2)
    answer_speeds: np.ndarray = field(repr=False)   # (6,)
    source_future: np.ndarray = field(repr=False)   # (6, 2)
    agents: tuple = field(repr=False)

    def to_dict(self) -> dict:
        return {
            "record_id": self.record_id,
            "frame_id": self.frame_id,
            "scene_id": self.scene_id,
            "image_path": self.image_path,
            "audio_path": self.audio_path,
            "intention": self.intention,
            "command_text": {"goal": self.command.goal,
                             "current_action": self.command.current_action},
            "arousal": self.arousal,
            "emotion": self.emotion.value,
            "requested_emotion": self.requested_emotion.value,
            "reasoning": self.reasoning,
            "answer_trajectory": {"points": self.answer_points.tolist(),
                                  "speeds": self.answer_speeds.tolist()},
            "source_future": self.source_future.tolist(),
            "agents": [step.tolist() for step in self.agents],
        }


def _parse_cot(row: dict) -> CotRecord:
    answer = row["answer_trajectory"]
    return CotRecord(
        record_id=row["record_id"], frame_id=row["frame_id"],
        scene_id=row["scene_id"], image_path=row["image_path"],
        audio_path=row["audio_path"], intention=row["intention"],
        command=CommandText(goal=row["command_text"]["goal"],
                            current_action=row["command_text"]["current_action"]),
        arousal=float(row["arousal"]), emotion=Emotion(row["emotion"]),
        requested_emotion=Emotion(row["requested_emotion"]),
        reasoning=dict(row["reasoning"]),
        answer_points=np.asarray(answer["points"], dtype=np.float64),
        answer_speeds=np.asarray(answer["speeds"], dtype=np.float64),
        source_future=np.asarray(row["source_future"], dtype=np.float64),
        agents=tuple(np.asarray(step, dtype=np.float64).reshape(-1, 5)
                     for step in row["agents"]))


def load_dataset(path: str | Path) -> list[CotRecord]:
    """Strictly parse a built dataset.jsonl (header + records)."""
    path = _dataset_file(path)
    lines = path.read_text().splitlines()
    if not lines:
        raise SchemaError(f"{path} is empty, expected a schema header")
    _check_header(lines[0], DATASET_SCHEMA, DATASET_VERSION)
    records = []
    for line_no, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        try:
            records.append(_parse_cot(json.loads(line)))
        except (KeyError, ValueError, TypeError) as exc:
            raise ParameterError(f"{path}:{line_no}: malformed record ({exc})")
    return records


def _dataset_file(path: str | Path) -> Path:
    path = Path(path)
    return path / "dataset.jsonl" if path.is_dir() else path


# --- build -------------------------------------------------------------------

@dataclass(frozen=True)
class BuildConfig:
    """Inputs, outputs, and knobs of one dataset build."""

    input: Path
    output: Path
    emotions: tuple[Emotion, ...] = EMOTION_ORDER
    seed: int = 0
    intent_k: int = 6
    audio_source: str | Path = "synthetic"  # "synthetic" or a directory of WAVs

    def __post_init__(self):
        if not self.emotions:
            raise ParameterError("emotions must be nonempty")
        object.__setattr__(self, "input", Path(self.input))
        object.__setattr__(self, "output", Path(self.output))
        object.__setattr__(
            self, "emotions",
            tuple(e for e in EMOTION_ORDER if e in {Emotion(x) for x in self.emotions}))

    @classmethod
    def from_json_file(cls, path: str | Path) -> "BuildConfig":
        path = Path(path)
        data = json.loads(path.read_text())
        base = path.parent
        source = data.get("audio_source", "synthetic")
        if source != "synthetic":
            source = base / source
        return cls(
            input=base / data["input"], output=base / data["output"],
            emotions=tuple(Emotion(e) for e in data.get(
                "emotions", [e.value for e in EMOTION_ORDER])),
            seed=int(data.get("seed", 0)), intent_k=int(data.get("intent_k", 6)),
            audio_source=source)


@dataclass
class BuildReport:
    scenes_ingested: int = 0
    line_errors: list = field(default_factory=list)
    records_written: int = 0
    counts: dict = field(default_factory=dict)
    flagged: list = field(default_factory=list)
    skipped: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "scenes_ingested": self.scenes_ingested,
            "records_written": self.records_written,
            "counts_per_emotion": self.counts,
            "line_errors": [e.to_dict() for e in self.line_errors],
            "flagged_records": self.flagged,
            "skipped_frames": self.skipped,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _base_synth_spec(config_seed: int, frame_id: str, command: CommandText) -> SynthSpec:
    seed = _stable_seed(config_seed, frame_id, "voice")
    u = np.random.default_rng(seed).random(3)
    words = len(command.sentence.split())
    duration = float(np.clip(words * _SECONDS_PER_WORD, *_DURATION_RANGE))
    return SynthSpec(
        f0=_BASE_F0_HZ[0] + (_BASE_F0_HZ[1] - _BASE_F0_HZ[0]) * float(u[0]),
        f0_slope=_BASE_SLOPE[0] + (_BASE_SLOPE[1] - _BASE_SLOPE[0]) * float(u[1]),
        amplitude=_BASE_AMPLITUDE,
        syllable_rate=_BASE_SYLLABLE_HZ[0]
        + (_BASE_SYLLABLE_HZ[1] - _BASE_SYLLABLE_HZ[0]) * float(u[2]),
        duration=duration, noise_floor=_BASE_NOISE, seed=seed)


def _reasoning_text(feats, score, label: Emotion) -> dict:
    detection = {
        Emotion.URGENT: "at or above the urgent threshold 0.6",
        Emotion.HESITANT: "at or below the hesitant threshold 0.4",
        Emotion.NORMAL: "inside the normal band (0.4, 0.6)",
    }[label]
    decision = {
        Emotion.URGENT: ("urgent command: re-time the path with a faster speed "
                         "profile, keeping the driving direction"),
        Emotion.HESITANT: ("hesitant command: re-time the path with a slower, "
                           "more cautious speed profile, keeping the driving "
                           "direction"),
        Emotion.NORMAL: "no emotional override: keep the ground-truth trajectory",
    }[label]
    return {
        "audio_analysis": (
            f"measured speech features: rms {feats.rms_mean:.4f}, "
            f"f0 {feats.f0_mean:.1f} Hz, tempo {feats.tempo_bpm:.1f} bpm, "
            f"centroid {feats.centroid_mean:.1f} Hz; arousal {score:.4f}"),
        "emotion_detection": f"arousal {score:.4f} is {detection}; "
                             f"the speaker sounds {label.value}",
        "trajectory_decision": decision,
    }


def build(config: BuildConfig) -> BuildReport:
    """Run the full augmentation pipeline and write the dataset to disk."""
    report = BuildReport(counts={e.value: 0 for e in config.emotions})
    scenes, line_errors = ingest(config.input)
    report.scenes_ingested = len(scenes)
    report.line_errors = line_errors

    out_dir = config.output
    audio_dir = out_dir / "audio"
    audio_dir.mkdir(parents=True, exist_ok=True)

    records: list[CotRecord] = []
    if scenes:
        features = [IntentFeature.from_future(s.ego_future, s.ego_speed)
                    for s in scenes]
        k = min(config.intent_k, len(scenes))
        model = fit_intents(features, k=k, seed=config.seed)

        for scene, feature in zip(scenes, features):
            intention = classify(model, feature)
            command = render_command(intention, scene.ego_speed, scene.ego_accel)

            if config.audio_source == "synthetic":
                base_audio = synth_speech(
                    _base_synth_spec(config.seed, scene.frame_id, command))
            else:
                wav_path = Path(config.audio_source) / f"{scene.frame_id}.wav"
                if not wav_path.exists():
                    report.skipped.append({"frame_id": scene.frame_id,
                                           "reason": f"missing WAV {wav_path.name}"})
                    continue
                base_audio = decode_wav(wav_path.read_bytes())

            for requested in config.emotions:
                record = _build_record(config, scene, intention, command,
                                       base_audio, requested, audio_dir, report)
                records.append(record)
                report.counts[requested.value] += 1

    with open(out_dir / "dataset.jsonl", "w") as fh:
        fh.write(json.dumps({"schema": DATASET_SCHEMA,
                             "version": DATASET_VERSION}) + "\n")
        for record in records:
            fh.write(json.dumps(record.to_dict()) + "\n")
    report.records_written = len(records)
    (out_dir / "build_report.json").write_text(report.to_json() + "\n")
    return report


def _build_record(config, scene, intention, command, base_audio, requested,
                  audio_dir, report) -> CotRecord:
    variant = emotionalize(base_audio, requested)
    wav_bytes = encode_wav(variant)
    record_id = f"{scene.frame_id}_{requested.value}"
    wav_name = f"{record_id}.wav"
    (audio_dir / wav_name).write_bytes(wav_bytes)

    # Measure from the exact bytes on disk so validation recomputes the
    # identical value after the PCM16 round trip.
    feats = extract_features(decode_wav(wav_bytes))
    score = arousal(normalize_features(feats))
    label = label_emotion(score)
    if label != requested:
        report.flagged.append({"record_id": record_id,
                               "requested": requested.value,
                               "measured": label.value,
                               "arousal": score.value})

    source = Trajectory(scene.ego_future, FUTURE_SPAN_SEC)
    if label == Emotion.NORMAL:
        answer_points = scene.ego_future.copy()
        answer_speeds = np.full(FUTURE_STEPS,
                                base_speed(arc_length(source), FUTURE_SPAN_SEC))
    else:
        params = default_profile_params(
            label, rng_seed=_stable_seed(config.seed, scene.frame_id,
                                         requested.value, "traj"))
        modulated = modulate(source, label, params)
        answer_points = modulated.points
        answer_speeds = modulated.speeds

    return CotRecord(
        record_id=record_id, frame_id=scene.frame_id, scene_id=scene.scene_id,
        image_path=scene.image_path, audio_path=f"audio/{wav_name}",
        intention=intention, command=command, arousal=score.value,
        emotion=label, requested_emotion=requested,
        reasoning=_reasoning_text(feats, score.value, label),
        answer_points=answer_points, answer_speeds=answer_speeds,
        source_future=scene.ego_future.copy(), agents=scene.agents)


# --- validation ---------------------------------------------------------------

@dataclass(frozen=True)
class Finding:
    record_id: str | None
    field: str
    message: str

    def to_dict(self) -> dict:
        return {"record_id": self.record_id, "field": self.field,
                "message": self.message}


@dataclass
class ValidationReport:
    records_checked: int = 0
    findings: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.findings

    def to_dict(self) -> dict:
        return {"records_checked": self.records_checked,
                "findings": [f.to_dict() for f in self.findings]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


AROUSAL_RECHECK_TOL = 1e-6


def validate_dataset(path: str | Path) -> ValidationReport:
    """Re-check every record invariant of a built dataset.

    Re-runs feature extraction and arousal scoring on the stored audio,
    confirms the stored label matches the stored arousal, and re-verifies
    that the answer trajectory stays on the source path with pinned
    endpoints and monotone progress.
    """
    dataset_path = _dataset_file(path)
    root = dataset_path.parent
    report = ValidationReport()

    lines = dataset_path.read_text().splitlines()
    if not lines:
        report.findings.append(Finding(None, "file", "empty dataset file"))
        return report
    try:
        _check_header(lines[0], DATASET_SCHEMA, DATASET_VERSION)
    except SchemaError as exc:
        report.findings.append(Finding(None, "header", str(exc)))
        return report

    for line_no, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        try:
            record = _parse_cot(json.loads(line))
        except (KeyError, ValueError, TypeError) as exc:
            report.findings.append(
                Finding(None, "record", f"line {line_no}: malformed ({exc})"))
            continue
        report.records_checked += 1
        _validate_record(record, root, report)
    return report


def _validate_record(record: CotRecord, root: Path, report: ValidationReport) -> None:
    rid = record.record_id

    def finding(field_name, message):
        report.findings.append(Finding(rid, field_name, message))

    if not 0.0 <= record.arousal <= 1.0:
        finding("arousal", f"arousal {record.arousal} outside [0, 1]")
    if label_emotion(record.arousal) != record.emotion:
        finding("emotion", f"label {record.emotion.value} inconsistent with "
                           f"arousal {record.arousal:.6f}")

    wav_path = root / record.audio_path
    if not wav_path.exists():
        finding("audio_path", f"missing audio file {record.audio_path}")
    else:
        try:
            feats = extract_features(decode_wav(wav_path.read_bytes()))
            recomputed = arousal(normalize_features(feats)).value
            if abs(recomputed - record.arousal) > AROUSAL_RECHECK_TOL:
                finding("arousal", f"stored {record.arousal!r} but recomputed "
                                   f"{recomputed!r} from audio")
        except EchoPipeError as exc:
            finding("audio_path", f"stored audio unreadable: {exc}")

    if record.answer_points.shape != (FUTURE_STEPS, 2):
        finding("answer_trajectory", "wrong waypoint count")
        return
    if record.answer_speeds.shape != (FUTURE_STEPS,):
        finding("answer_trajectory", "wrong speed count")
        return
    if not (np.all(np.isfinite(record.answer_points))
            and np.all(np.isfinite(record.answer_speeds))
            and np.all(record.answer_speeds >= 0.0)):
        finding("answer_trajectory", "non-finite points or negative speeds")
        return

    if len(record.agents) != FUTURE_STEPS:
        finding("agents", f"agents must list {FUTURE_STEPS} steps")

    if list(record.reasoning) != list(REASONING_STAGES):
        finding("reasoning", f"stages must be {list(REASONING_STAGES)} in order")

    source = record.source_future
    if record.emotion == Emotion.NORMAL:
        if not np.allclose(record.answer_points, source, atol=GEOMETRY_TOL):
            finding("answer_trajectory",
                    "normal record must carry the ground-truth future unmodified")
        return
    for name, idx in (("first", 0), ("last", -1)):
        if np.hypot(*(record.answer_points[idx] - source[idx])) > GEOMETRY_TOL:
            finding("answer_trajectory", f"{name} waypoint moved off the source")
    for i, point in enumerate(record.answer_points):
        if point_to_polyline_distance(point, source) > GEOMETRY_TOL:
            finding("answer_trajectory",
                    f"waypoint {i} lies {point_to_polyline_distance(point, source):.3g} m "
                    f"off the source path")
            break
    progress = _progress_along(source, record.answer_points)
    if np.any(np.diff(progress) < -GEOMETRY_TOL):
        finding("answer_trajectory", "progress along the source path decreases")


def _progress_along(source: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Arc-length position of each point projected onto the source polyline."""
    table = arc_length(Trajectory(source, FUTURE_SPAN_SEC))
    a, b = source[:-1], source[1:]
    ab = b - a
    seg_sq = (ab ** 2).sum(axis=1)
    out = np.zeros(len(points))
    for i, p in enumerate(points):
        t = np.zeros(len(a))
        nonzero = seg_sq > 0.0
        t[nonzero] = np.clip(((p - a[nonzero]) * ab[nonzero]).sum(axis=1)
                             / seg_sq[nonzero], 0.0, 1.0)
        closest = a + t[:, None] * ab
        dists = np.hypot(*(closest - p).T)
        j = int(dists.argmin())
        out[i] = table.cumulative[j] + t[j] * np.sqrt(seg_sq[j])
    return out
