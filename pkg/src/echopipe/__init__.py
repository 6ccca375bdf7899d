"""Emotion-aware speech analysis and trajectory re-timing toolkit."""

from .arousal import (ArousalScore, ArousalWeights, Emotion, SigmoidParams,
                      arousal, label_by_ratio, label_emotion, sigmoid)
from .audio import (CANONICAL_RATE, AudioBuffer, decode_wav, encode_wav,
                    load_wav, resample, save_wav)
from .dataset import (BuildConfig, BuildReport, CotRecord, SceneRecord,
                      build, ingest, load_dataset, validate_dataset,
                      write_scenes)
from .errors import (AudioDecodeError, AudioTooShortError,
                     DegenerateTrajectoryError, EchoPipeError, ParameterError,
                     SchemaError, UnsupportedFormatError)
from .evaluation import (EvalReport, ObbBox, collision_flags, collision_rate,
                         evaluate, l2_error, obb_overlap)
from .features import (FeatureSummary, NormalizedFeatures, extract_features,
                       normalize_features)
from .intent import (CommandText, IntentFeature, IntentModel, classify,
                     fit_intents, parse_command, render_command)
from .prosody import (EMOTION_PRESETS, ProsodyParams, emotionalize,
                      pitch_shift, time_stretch)
from .synth import SynthSpec, synth_speech
from .trajectory import (ModulatedTrajectory, SpeedProfile, SpeedProfileParams,
                         Trajectory, arc_length, base_speed,
                         default_profile_params, interpolate, modulate,
                         reparameterize, speed_profile)

__version__ = "0.1.0"
