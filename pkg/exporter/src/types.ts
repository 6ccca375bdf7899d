/** Subset of the nuScenes table rows the exporter reads. */

export interface SceneRow {
  token: string;
  name: string;
  first_sample_token: string;
  last_sample_token: string;
  nbr_samples: number;
}

export interface SampleRow {
  token: string;
  timestamp: number; // microseconds
  scene_token: string;
  prev: string;
  next: string;
}

export interface SampleDataRow {
  token: string;
  sample_token: string;
  ego_pose_token: string;
  calibrated_sensor_token: string;
  timestamp: number;
  fileformat: string;
  is_key_frame: boolean;
  filename: string;
  prev: string;
  next: string;
}

export interface EgoPoseRow {
  token: string;
  timestamp: number;
  rotation: [number, number, number, number]; // w, x, y, z
  translation: [number, number, number];
}

export interface CalibratedSensorRow {
  token: string;
  sensor_token: string;
}

export interface SensorRow {
  token: string;
  channel: string;
  modality: string;
}

export interface SampleAnnotationRow {
  token: string;
  sample_token: string;
  visibility_token: string;
  translation: [number, number, number];
  size: [number, number, number]; // width, length, height
  rotation: [number, number, number, number];
}

/** One agent box in the keyframe's ego frame: cx, cy, yaw, length, width. */
export type AgentBox = [number, number, number, number, number];

/** One record of the canonical scenes.jsonl schema (version 1). */
export interface SceneRecord {
  scene_id: string;
  frame_id: string;
  timestamp: number; // seconds
  image_path: string;
  ego_history: Array<[number, number]>;
  ego_future: Array<[number, number]>;
  ego_speed: number;
  ego_accel: number;
  agents: AgentBox[][];
}

export interface ExportConfig {
  dataroot: string;
  version: string; // e.g. v1.0-mini
  camera: string; // e.g. CAM_FRONT
  out: string;
  maxScenes?: number;
}

export interface ExportSummary {
  scenes: number;
  keyframes_seen: number;
  records_written: number;
  skipped: {
    no_history: number;
    no_future: number;
    missing_camera: number;
  };
}

export const SCHEMA_HEADER = { schema: 'echo-scenes', version: 1 } as const;

export const HISTORY_STEPS = 4; // 2 s of past at 2 Hz
export const FUTURE_STEPS = 6; // 3 s of future at 2 Hz
export const STEP_SECONDS = 0.5;
export const AGENT_RANGE_M = 50;
