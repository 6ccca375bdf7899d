/** Table loading and indexing for a nuScenes-layout dataroot. */

import * as fs from 'fs';
import * as path from 'path';

import {
  CalibratedSensorRow,
  EgoPoseRow,
  SampleAnnotationRow,
  SampleDataRow,
  SampleRow,
  SceneRow,
  SensorRow,
} from './types';

export interface Tables {
  scenes: SceneRow[];
  samplesByToken: Map<string, SampleRow>;
  sampleDataBySample: Map<string, SampleDataRow[]>;
  egoPoses: Map<string, EgoPoseRow>;
  calibratedSensors: Map<string, CalibratedSensorRow>;
  sensors: Map<string, SensorRow>;
  annotationsBySample: Map<string, SampleAnnotationRow[]>;
}

function loadTable<T>(dataroot: string, version: string, name: string): T[] {
  const file = path.join(dataroot, version, `${name}.json`);
  if (!fs.existsSync(file)) {
    throw new Error(`missing nuScenes table: ${file}`);
  }
  return JSON.parse(fs.readFileSync(file, 'utf-8')) as T[];
}

export function loadTables(dataroot: string, version: string): Tables {
  const scenes = loadTable<SceneRow>(dataroot, version, 'scene');
  const samples = loadTable<SampleRow>(dataroot, version, 'sample');
  const sampleData = loadTable<SampleDataRow>(dataroot, version, 'sample_data');
  const egoPoses = loadTable<EgoPoseRow>(dataroot, version, 'ego_pose');
  const calibrated = loadTable<CalibratedSensorRow>(
    dataroot, version, 'calibrated_sensor');
  const sensors = loadTable<SensorRow>(dataroot, version, 'sensor');
  const annotations = loadTable<SampleAnnotationRow>(
    dataroot, version, 'sample_annotation');

  const sampleDataBySample = new Map<string, SampleDataRow[]>();
  for (const row of sampleData) {
    const bucket = sampleDataBySample.get(row.sample_token);
    if (bucket) {
      bucket.push(row);
    } else {
      sampleDataBySample.set(row.sample_token, [row]);
    }
  }
  const annotationsBySample = new Map<string, SampleAnnotationRow[]>();
  for (const row of annotations) {
    const bucket = annotationsBySample.get(row.sample_token);
    if (bucket) {
      bucket.push(row);
    } else {
      annotationsBySample.set(row.sample_token, [row]);
    }
  }

  return {
    scenes,
    samplesByToken: new Map(samples.map((row) => [row.token, row])),
    sampleDataBySample,
    egoPoses: new Map(egoPoses.map((row) => [row.token, row])),
    calibratedSensors: new Map(calibrated.map((row) => [row.token, row])),
    sensors: new Map(sensors.map((row) => [row.token, row])),
    annotationsBySample,
  };
}

/** Keyframe samples of a scene in capture order, via the linked list. */
export function sceneSamples(tables: Tables, scene: SceneRow): SampleRow[] {
  const out: SampleRow[] = [];
  let token = scene.first_sample_token;
  while (token) {
    const sample = tables.samplesByToken.get(token);
    if (!sample) {
      throw new Error(`broken sample chain at token ${token}`);
    }
    out.push(sample);
    token = sample.next;
  }
  return out;
}

/** Channel name of a sample_data row, resolved through calibrated_sensor. */
export function channelOf(tables: Tables, row: SampleDataRow): string | undefined {
  const calibrated = tables.calibratedSensors.get(row.calibrated_sensor_token);
  if (!calibrated) return undefined;
  return tables.sensors.get(calibrated.sensor_token)?.channel;
}
