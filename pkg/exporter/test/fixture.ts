/**
 * Synthetic nuScenes-layout dataroot for tests: two scenes (one straight
 * drive, one constant-rate left curve) with keyframes at exactly 2 Hz,
 * dense 10 Hz ego poses, and two annotated agents per keyframe.
 */

import * as fs from 'fs';
import * as path from 'path';

const KEYFRAMES_PER_SCENE = 26;
const SWEEP_HZ = 10;
const STEP_US = 500_000;
const BASE_TIMESTAMP_US = 1_700_000_000_000_000;

interface Motion {
  x(t: number): number;
  y(t: number): number;
  yaw(t: number): number;
}

function straightMotion(speed: number): Motion {
  return {
    x: (t) => speed * t,
    y: () => 0,
    yaw: () => 0,
  };
}

function curveMotion(speed: number, turnRate: number): Motion {
  const radius = speed / turnRate;
  return {
    x: (t) => radius * Math.sin(turnRate * t),
    y: (t) => radius * (1 - Math.cos(turnRate * t)),
    yaw: (t) => turnRate * t,
  };
}

function yawQuaternion(yaw: number): [number, number, number, number] {
  return [Math.cos(yaw / 2), 0, 0, Math.sin(yaw / 2)];
}

export function writeFixtureDataroot(dataroot: string, version = 'v1.0-mini'): void {
  const dir = path.join(dataroot, version);
  fs.mkdirSync(dir, { recursive: true });

  const scenes: object[] = [];
  const samples: object[] = [];
  const sampleData: object[] = [];
  const egoPoses: object[] = [];
  const annotations: object[] = [];

  const sensors = [
    { token: 'sensor-cam-front', channel: 'CAM_FRONT', modality: 'camera' },
    { token: 'sensor-lidar', channel: 'LIDAR_TOP', modality: 'lidar' },
  ];
  const calibrated = [
    {
      token: 'calib-cam-front', sensor_token: 'sensor-cam-front',
      translation: [1.7, 0, 1.5], rotation: [1, 0, 0, 0], camera_intrinsic: [],
    },
    {
      token: 'calib-lidar', sensor_token: 'sensor-lidar',
      translation: [1.0, 0, 1.8], rotation: [1, 0, 0, 0], camera_intrinsic: [],
    },
  ];

  const motions: Array<{ name: string; motion: Motion; speed: number }> = [
    { name: 'scene-0001', motion: straightMotion(8.0), speed: 8.0 },
    { name: 'scene-0002', motion: curveMotion(6.0, 0.06), speed: 6.0 },
  ];

  motions.forEach(({ name, motion, speed }, sceneIndex) => {
    const sceneToken = `scene-token-${sceneIndex}`;
    const sceneStartUs = BASE_TIMESTAMP_US + sceneIndex * 60_000_000;
    const sampleTokens = Array.from(
      { length: KEYFRAMES_PER_SCENE },
      (_, k) => `sample-${sceneIndex}-${String(k).padStart(3, '0')}`);

    scenes.push({
      token: sceneToken,
      name,
      log_token: `log-${sceneIndex}`,
      nbr_samples: KEYFRAMES_PER_SCENE,
      first_sample_token: sampleTokens[0],
      last_sample_token: sampleTokens[KEYFRAMES_PER_SCENE - 1],
      description: 'synthetic fixture',
    });

    // two agents: one parked beside the route, one trailing the ego
    const parked = sceneIndex === 0
      ? { x: 60.0, y: 5.0, yaw: 0.0 }
      : { x: 40.0, y: -6.0, yaw: 0.5 };

    for (let k = 0; k < KEYFRAMES_PER_SCENE; k += 1) {
      const tUs = sceneStartUs + k * STEP_US;
      const t = (k * STEP_US) / 1e6;
      const sampleToken = sampleTokens[k] as string;
      samples.push({
        token: sampleToken,
        timestamp: tUs,
        scene_token: sceneToken,
        prev: k > 0 ? sampleTokens[k - 1] : '',
        next: k < KEYFRAMES_PER_SCENE - 1 ? sampleTokens[k + 1] : '',
      });

      // dense sweeps between this keyframe and the next
      const sweeps = k < KEYFRAMES_PER_SCENE - 1 ? SWEEP_HZ / 2 : 1;
      for (let s = 0; s < sweeps; s += 1) {
        const sweepT = t + s / SWEEP_HZ;
        const sweepUs = sceneStartUs + Math.round(sweepT * 1e6);
        const poseToken = `pose-${sceneIndex}-${k}-${s}`;
        egoPoses.push({
          token: poseToken,
          timestamp: sweepUs,
          rotation: yawQuaternion(motion.yaw(sweepT)),
          translation: [motion.x(sweepT), motion.y(sweepT), 0],
        });
        const isKey = s === 0;
        sampleData.push({
          token: `data-${sceneIndex}-${k}-${s}`,
          sample_token: sampleToken,
          ego_pose_token: poseToken,
          calibrated_sensor_token: isKey ? 'calib-cam-front' : 'calib-lidar',
          timestamp: sweepUs,
          fileformat: isKey ? 'jpg' : 'pcd',
          is_key_frame: isKey,
          filename: isKey
            ? `samples/CAM_FRONT/${name}-${k}.jpg`
            : `sweeps/LIDAR_TOP/${name}-${k}-${s}.pcd`,
          prev: '',
          next: '',
        });
      }

      annotations.push({
        token: `ann-parked-${sceneIndex}-${k}`,
        sample_token: sampleToken,
        instance_token: `instance-parked-${sceneIndex}`,
        visibility_token: '4',
        translation: [parked.x, parked.y, 0],
        size: [1.9, 4.5, 1.6],
        rotation: yawQuaternion(parked.yaw),
        prev: '',
        next: '',
      });
      annotations.push({
        token: `ann-trailer-${sceneIndex}-${k}`,
        sample_token: sampleToken,
        instance_token: `instance-trailer-${sceneIndex}`,
        visibility_token: '3',
        translation: [
          motion.x(Math.max(0, t - 12 / speed)),
          motion.y(Math.max(0, t - 12 / speed)) - 3.5,
          0,
        ],
        size: [2.0, 4.8, 1.7],
        rotation: yawQuaternion(motion.yaw(Math.max(0, t - 12 / speed))),
        prev: '',
        next: '',
      });
    }
  });

  const write = (nameBase: string, rows: object[]) =>
    fs.writeFileSync(path.join(dir, `${nameBase}.json`), JSON.stringify(rows));

  write('scene', scenes);
  write('sample', samples);
  write('sample_data', sampleData);
  write('ego_pose', egoPoses);
  write('calibrated_sensor', calibrated);
  write('sensor', sensors);
  write('sample_annotation', annotations);
  write('visibility', [
    { token: '1', level: 'v0-40', description: '0-40%' },
    { token: '2', level: 'v40-60', description: '40-60%' },
    { token: '3', level: 'v60-80', description: '60-80%' },
    { token: '4', level: 'v80-100', description: '80-100%' },
  ]);
}
