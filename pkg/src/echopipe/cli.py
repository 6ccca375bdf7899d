"""Command-line front end.

Machine-readable JSON goes to stdout (except ``plot``), diagnostics to
stderr. Exit codes: 0 success, 1 runtime error, 2 usage error. The
ECHO_SEED environment variable overrides the default seed of 0.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from .arousal import Emotion, arousal, label_emotion
from .audio import decode_wav, save_wav
from .dataset import BuildConfig, build, load_dataset, validate_dataset
from .errors import EchoPipeError
from .evaluation import evaluate, load_predictions
from .features import extract_features, normalize_features
from .prosody import emotionalize
from .trajectory import Trajectory, default_profile_params, modulate


def _default_seed() -> int:
    return int(os.environ.get("ECHO_SEED", "0"))


def _emit(payload: dict) -> None:
    json.dump(payload, sys.stdout, indent=2)
    sys.stdout.write("\n")


def _cmd_features(args) -> int:
    buf = decode_wav(Path(args.wav).read_bytes())
    feats = extract_features(buf)
    norm = normalize_features(feats)
    score = arousal(norm)
    _emit({
        "features": {"rms_mean": feats.rms_mean, "f0_mean_hz": feats.f0_mean,
                     "tempo_bpm": feats.tempo_bpm,
                     "centroid_mean_hz": feats.centroid_mean},
        "normalized": {"r_n": norm.r_n, "f_n": norm.f_n, "t_n": norm.t_n,
                       "c_n": norm.c_n},
        "arousal": score.value,
        "contributions": {"rms": score.contributions[0],
                          "f0": score.contributions[1],
                          "tempo": score.contributions[2],
                          "centroid": score.contributions[3]},
        "emotion": label_emotion(score).value,
    })
    return 0


def _cmd_emotionalize(args) -> int:
    buf = decode_wav(Path(args.wav).read_bytes())
    out = emotionalize(buf, Emotion(args.emotion))
    save_wav(args.output, out)

    def clip_arousal(b):
        return arousal(normalize_features(extract_features(b))).value

    _emit({
        "input": str(args.wav),
        "output": str(args.output),
        "emotion": args.emotion,
        "input_arousal": clip_arousal(buf),
        "output_arousal": clip_arousal(out),
    })
    return 0


def _cmd_modulate_traj(args) -> int:
    data = json.loads(Path(args.input).read_text())
    traj = Trajectory(np.asarray(data["points"], dtype=np.float64),
                      float(data["duration"]))
    emotion = Emotion(args.emotion)
    params = (default_profile_params(emotion, rng_seed=args.seed)
              if emotion != Emotion.NORMAL else None)
    out = modulate(traj, emotion, params)
    payload = {
        "emotion": emotion.value,
        "duration": traj.duration,
        "seed": args.seed,
        "points": out.points.tolist(),
        "speeds": out.speeds.tolist(),
    }
    if args.output:
        Path(args.output).write_text(json.dumps(payload, indent=2) + "\n")
    _emit(payload)
    return 0


def _cmd_build_dataset(args) -> int:
    config = BuildConfig.from_json_file(args.config)
    report = build(config)
    _emit(report.to_dict())
    return 0


def _cmd_validate(args) -> int:
    report = validate_dataset(args.dataset)
    _emit(report.to_dict())
    return 0 if report.ok else 1


def _cmd_evaluate(args) -> int:
    records = load_dataset(args.dataset)
    predictions = load_predictions(args.predictions)
    report = evaluate(records, predictions,
                      ego_dims=(args.ego_length, args.ego_width),
                      l2_mode=args.l2_mode,
                      per_record_path=args.per_record)
    if args.output:
        Path(args.output).write_text(report.to_json() + "\n")
    _emit(report.to_dict())
    return 0


def _cmd_plot(args) -> int:
    from .plotting import plot_dataset  # matplotlib import deferred

    written = plot_dataset(args.dataset, args.output, limit=args.limit)
    print(f"wrote {len(written)} figures to {args.output}", file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="echopipe",
        description="Emotion-aware audio/trajectory dataset toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("features", help="score a WAV file's features and arousal")
    p.add_argument("wav")
    p.set_defaults(func=_cmd_features)

    p = sub.add_parser("emotionalize", help="re-render a WAV with an emotion preset")
    p.add_argument("wav")
    p.add_argument("--emotion", required=True,
                   choices=[e.value for e in Emotion])
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=_cmd_emotionalize)

    p = sub.add_parser("modulate-traj", help="re-time a trajectory JSON file")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--emotion", required=True,
                   choices=[e.value for e in Emotion])
    p.add_argument("--seed", type=int, default=_default_seed())
    p.add_argument("-o", "--output")
    p.set_defaults(func=_cmd_modulate_traj)

    p = sub.add_parser("build-dataset", help="run the dataset builder")
    p.add_argument("--config", required=True)
    p.set_defaults(func=_cmd_build_dataset)

    p = sub.add_parser("validate", help="re-check a built dataset's invariants")
    p.add_argument("--dataset", required=True)
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("evaluate", help="score predictions against a dataset")
    p.add_argument("--dataset", required=True)
    p.add_argument("--pred", dest="predictions", required=True)
    p.add_argument("-o", "--output")
    p.add_argument("--per-record", help="write per-record CSV here")
    p.add_argument("--l2-mode", choices=["cumulative", "endpoint"],
                   default="cumulative")
    p.add_argument("--ego-length", type=float, default=4.08)
    p.add_argument("--ego-width", type=float, default=1.73)
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("plot", help="render SVG figures for a dataset")
    p.add_argument("--dataset", required=True)
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--limit", type=int)
    p.set_defaults(func=_cmd_plot)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except EchoPipeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
