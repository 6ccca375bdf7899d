/**
 * Exporter core: walk each scene's keyframes, and for every keyframe with
 * full 2 s history and 3 s future coverage emit one scenes.jsonl record in
 * that keyframe's ego frame. Ego poses are resampled to the exact 2 Hz
 * offsets by linear interpolation over the scene's dense pose track; agent
 * boxes come from the time-aligned future keyframes. Exports are
 * deterministic: same dataroot and config, byte-identical file.
 */

import * as fs from 'fs';
import * as path from 'path';

import { Tables, channelOf, loadTables, sceneSamples } from './nuscenes';
import { PoseTrack, Pose2D, quaternionYaw, relativeYaw, toEgoFrame, toPose2D } from './transform';
import {
  AGENT_RANGE_M,
  AgentBox,
  ExportConfig,
  ExportSummary,
  FUTURE_STEPS,
  HISTORY_STEPS,
  SCHEMA_HEADER,
  SampleRow,
  SceneRecord,
  STEP_SECONDS,
} from './types';

function poseTrackOf(tables: Tables, samples: SampleRow[]): PoseTrack {
  const poses: Pose2D[] = [];
  const seen = new Set<string>();
  for (const sample of samples) {
    for (const row of tables.sampleDataBySample.get(sample.token) ?? []) {
      if (seen.has(row.ego_pose_token)) continue;
      seen.add(row.ego_pose_token);
      const pose = tables.egoPoses.get(row.ego_pose_token);
      if (pose) poses.push(toPose2D(pose));
    }
  }
  return new PoseTrack(poses);
}

function keyframeImage(
  tables: Tables, sample: SampleRow, camera: string,
): string | undefined {
  for (const row of tables.sampleDataBySample.get(sample.token) ?? []) {
    if (row.is_key_frame && channelOf(tables, row) === camera) {
      return row.filename;
    }
  }
  return undefined;
}

function agentBoxes(tables: Tables, sample: SampleRow, origin: Pose2D): AgentBox[] {
  const boxes: AgentBox[] = [];
  for (const ann of tables.annotationsBySample.get(sample.token) ?? []) {
    if (!(parseInt(ann.visibility_token, 10) > 0)) continue;
    const [cx, cy] = toEgoFrame(origin, ann.translation[0], ann.translation[1]);
    if (Math.hypot(cx, cy) > AGENT_RANGE_M) continue;
    const yaw = relativeYaw(origin, quaternionYaw(ann.rotation));
    const [width, length] = ann.size;
    boxes.push([cx, cy, yaw, length, width]);
  }
  return boxes;
}

export function exportScenes(config: ExportConfig): ExportSummary {
  const tables = loadTables(config.dataroot, config.version);
  const summary: ExportSummary = {
    scenes: 0,
    keyframes_seen: 0,
    records_written: 0,
    skipped: { no_history: 0, no_future: 0, missing_camera: 0 },
  };

  const lines: string[] = [JSON.stringify(SCHEMA_HEADER)];
  const sceneRows = config.maxScenes !== undefined
    ? tables.scenes.slice(0, config.maxScenes)
    : tables.scenes;

  for (const scene of sceneRows) {
    summary.scenes += 1;
    const samples = sceneSamples(tables, scene);
    const track = poseTrackOf(tables, samples);

    samples.forEach((sample, index) => {
      summary.keyframes_seen += 1;
      const t0 = sample.timestamp / 1e6;

      if (!track.covers(t0 - HISTORY_STEPS * STEP_SECONDS)) {
        summary.skipped.no_history += 1;
        return;
      }
      const futureSamples = samples.slice(index + 1, index + 1 + FUTURE_STEPS);
      if (futureSamples.length < FUTURE_STEPS
          || !track.covers(t0 + FUTURE_STEPS * STEP_SECONDS)) {
        summary.skipped.no_future += 1;
        return;
      }
      const image = keyframeImage(tables, sample, config.camera);
      if (!image) {
        summary.skipped.missing_camera += 1;
        return;
      }

      const origin = track.at(t0);
      const history: Array<[number, number]> = [];
      for (let j = HISTORY_STEPS; j >= 1; j -= 1) {
        const p = track.at(t0 - j * STEP_SECONDS);
        history.push(toEgoFrame(origin, p.x, p.y));
      }
      const future: Array<[number, number]> = [];
      for (let j = 1; j <= FUTURE_STEPS; j += 1) {
        const p = track.at(t0 + j * STEP_SECONDS);
        future.push(toEgoFrame(origin, p.x, p.y));
      }

      const speed = track.speedAt(t0);
      const speedAhead = track.speedAt(t0 + 0.25);
      const speedBehind = track.speedAt(t0 - 0.25);
      const accel = (speedAhead - speedBehind) / 0.5;

      const agents = futureSamples.map((future_sample) =>
        agentBoxes(tables, future_sample, origin));

      const record: SceneRecord = {
        scene_id: scene.name,
        frame_id: sample.token,
        timestamp: t0,
        image_path: image,
        ego_history: history,
        ego_future: future,
        ego_speed: speed,
        ego_accel: accel,
        agents,
      };
      lines.push(JSON.stringify(record));
      summary.records_written += 1;
    });
  }

  fs.mkdirSync(path.dirname(path.resolve(config.out)), { recursive: true });
  fs.writeFileSync(config.out, lines.join('\n') + '\n');
  return summary;
}
