import assert = require('node:assert');
import { spawnSync } from 'node:child_process';
import * as fs from 'node:fs';
import * as os from 'node:os';
import * as path from 'node:path';
import { test } from 'node:test';

import { exportScenes } from '../src/export';
import { main as cliMain } from '../src/cli';
import { quaternionYaw, PoseTrack, toEgoFrame } from '../src/transform';
import { SceneRecord } from '../src/types';
import { writeFixtureDataroot } from './fixture';

const VERSION = 'v1.0-mini';

function makeWorkspace(): { dataroot: string; out: string } {
  const dir = fs.mkdtempSync(path.join(os.tmpdir(), 'nusc-export-'));
  const dataroot = path.join(dir, 'dataroot');
  writeFixtureDataroot(dataroot, VERSION);
  return { dataroot, out: path.join(dir, 'scenes.jsonl') };
}

function readRecords(out: string): { header: object; records: SceneRecord[] } {
  const lines = fs.readFileSync(out, 'utf-8').trim().split('\n');
  const header = JSON.parse(lines[0] as string) as object;
  const records = lines.slice(1).map((line) => JSON.parse(line) as SceneRecord);
  return { header, records };
}

test('export writes the schema header and valid records', () => {
  const { dataroot, out } = makeWorkspace();
  const summary = exportScenes({ dataroot, version: VERSION, camera: 'CAM_FRONT', out });
  const { header, records } = readRecords(out);

  assert.deepStrictEqual(header, { schema: 'echo-scenes', version: 1 });
  assert.strictEqual(summary.scenes, 2);
  assert.strictEqual(summary.records_written, records.length);
  // 26 keyframes per scene; indices 0-3 lack history, 20-25 lack future
  assert.strictEqual(summary.skipped.no_history, 8);
  assert.strictEqual(summary.skipped.no_future, 12);
  assert.strictEqual(records.length, 2 * 16);

  const frameIds = new Set(records.map((r) => r.frame_id));
  assert.strictEqual(frameIds.size, records.length);

  for (const record of records) {
    assert.strictEqual(record.ego_future.length, 6);
    assert.strictEqual(record.ego_history.length, 4);
    assert.strictEqual(record.agents.length, 6);
    assert.ok(record.ego_speed > 0);
    assert.ok(record.image_path.includes('CAM_FRONT'));
    for (const step of record.agents) {
      for (const [cx, cy, , length, width] of step) {
        assert.ok(Math.hypot(cx, cy) <= 50);
        assert.ok(length > 0 && width > 0);
      }
    }
  }
});

test('frame math: first future step matches dead reckoning from the origin', () => {
  const { dataroot, out } = makeWorkspace();
  exportScenes({ dataroot, version: VERSION, camera: 'CAM_FRONT', out });
  for (const record of readRecords(out).records) {
    const [fx, fy] = record.ego_future[0] as [number, number];
    const reach = record.ego_speed * 0.5;
    assert.ok(
      Math.hypot(fx - reach, fy) <= 0.6,
      `future[0]=(${fx}, ${fy}) vs dead reckoning ${reach} m ahead`,
    );
  }
});

test('re-export with the same config is byte-identical', () => {
  const { dataroot, out } = makeWorkspace();
  exportScenes({ dataroot, version: VERSION, camera: 'CAM_FRONT', out });
  const first = fs.readFileSync(out);
  exportScenes({ dataroot, version: VERSION, camera: 'CAM_FRONT', out });
  assert.ok(first.equals(fs.readFileSync(out)));
});

test('max-scenes limits the export', () => {
  const { dataroot, out } = makeWorkspace();
  const summary = exportScenes({
    dataroot, version: VERSION, camera: 'CAM_FRONT', out, maxScenes: 1,
  });
  assert.strictEqual(summary.scenes, 1);
  const { records } = readRecords(out);
  assert.ok(records.every((r) => r.scene_id === 'scene-0001'));
});

test('agents transform into the keyframe ego frame', () => {
  const { dataroot, out } = makeWorkspace();
  exportScenes({ dataroot, version: VERSION, camera: 'CAM_FRONT', out });
  const { records } = readRecords(out);
  // straight scene: ego at x = 8t; the parked car sits at (60, 5) global
  // with yaw 0, so in the ego frame it appears at (60 - 8t, 5)
  const straight = records.filter((r) => r.scene_id === 'scene-0001');
  const first = straight[0] as SceneRecord;
  const step0 = first.agents[0] as Array<[number, number, number, number, number]>;
  const parked = step0.find(([, cy]) => Math.abs(cy - 5) < 0.01);
  assert.ok(parked, 'parked agent visible at step 0');
  const t0 = first.timestamp - 1_700_000_000; // seconds into the scene
  const expectedX = 60 - 8 * t0; // static box, offset only by the ego origin
  assert.ok(Math.abs((parked as number[])[0]! - expectedX) < 0.01);
});

test('missing camera table entries are a hard error', () => {
  const dir = fs.mkdtempSync(path.join(os.tmpdir(), 'nusc-broken-'));
  assert.throws(() => exportScenes({
    dataroot: dir, version: VERSION, camera: 'CAM_FRONT',
    out: path.join(dir, 'out.jsonl'),
  }), /missing nuScenes table/);
});

test('cli parses flags and reports a summary', () => {
  const { dataroot, out } = makeWorkspace();
  const code = cliMain([
    '--dataroot', dataroot, '--out', out, '--version', VERSION,
    '--max-scenes', '1',
  ]);
  assert.strictEqual(code, 0);
  assert.ok(fs.existsSync(out));
  assert.strictEqual(cliMain(['--dataroot', dataroot]), 2);
  assert.strictEqual(cliMain(['--dataroot', '/no/such/dir', '--out', out]), 1);
});

test('quaternion and frame helpers behave', () => {
  assert.ok(Math.abs(quaternionYaw([1, 0, 0, 0])) < 1e-12);
  const q90: [number, number, number, number] = [Math.SQRT1_2, 0, 0, Math.SQRT1_2];
  assert.ok(Math.abs(quaternionYaw(q90) - Math.PI / 2) < 1e-12);
  const track = new PoseTrack([
    { t: 0, x: 0, y: 0, yaw: 0 },
    { t: 1, x: 10, y: 0, yaw: 0 },
  ]);
  const mid = track.at(0.5);
  assert.ok(Math.abs(mid.x - 5) < 1e-12);
  assert.ok(Math.abs(track.speedAt(0.5) - 10) < 1e-9);
  const [ex, ey] = toEgoFrame({ t: 0, x: 1, y: 2, yaw: Math.PI / 2 }, 1, 5);
  assert.ok(Math.abs(ex - 3) < 1e-12 && Math.abs(ey) < 1e-12);
});

test('exported records pass the primary pipeline end to end', (t) => {
  const probe = spawnSync('python3', ['--version']);
  if (probe.error || probe.status !== 0) {
    t.skip('python3 unavailable');
    return;
  }
  const { dataroot, out } = makeWorkspace();
  exportScenes({ dataroot, version: VERSION, camera: 'CAM_FRONT', out });

  const workdir = path.dirname(out);
  const configPath = path.join(workdir, 'build.json');
  fs.writeFileSync(configPath, JSON.stringify({
    input: 'scenes.jsonl',
    output: 'built',
    emotions: ['normal'],
    seed: 0,
    intent_k: 3,
  }));

  const repoRoot = path.resolve(__dirname, '..', '..', '..');
  const result = spawnSync(
    'python3', ['-m', 'echopipe', 'build-dataset', '--config', configPath],
    {
      env: { ...process.env, PYTHONPATH: path.join(repoRoot, 'src') },
      encoding: 'utf-8',
    },
  );
  assert.strictEqual(result.status, 0, result.stderr);
  const report = JSON.parse(result.stdout) as {
    scenes_ingested: number;
    records_written: number;
    line_errors: unknown[];
  };
  // every exported record passes ingest validation
  assert.strictEqual(report.line_errors.length, 0);
  assert.strictEqual(report.scenes_ingested, 32);
  assert.strictEqual(report.records_written, 32);
});
