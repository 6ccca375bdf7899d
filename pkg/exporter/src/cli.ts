#!/usr/bin/env node
/** CLI: nuscenes-export --dataroot D --out scenes.jsonl [options]. */

import { exportScenes } from './export';
import { ExportConfig } from './types';

const USAGE = `usage: nuscenes-export --dataroot DIR --out FILE
                       [--version v1.0-mini] [--camera CAM_FRONT]
                       [--max-scenes N]`;

function parseArgs(argv: string[]): ExportConfig {
  const options = new Map<string, string>();
  for (let i = 0; i < argv.length; i += 2) {
    const flag = argv[i];
    const value = argv[i + 1];
    if (!flag || !flag.startsWith('--') || value === undefined) {
      throw new Error(USAGE);
    }
    options.set(flag.slice(2), value);
  }
  const dataroot = options.get('dataroot');
  const out = options.get('out');
  if (!dataroot || !out) {
    throw new Error(USAGE);
  }
  const config: ExportConfig = {
    dataroot,
    out,
    version: options.get('version') ?? 'v1.0-mini',
    camera: options.get('camera') ?? 'CAM_FRONT',
  };
  const maxScenes = options.get('max-scenes');
  if (maxScenes !== undefined) {
    config.maxScenes = parseInt(maxScenes, 10);
    if (!Number.isFinite(config.maxScenes) || config.maxScenes < 0) {
      throw new Error(`bad --max-scenes value: ${maxScenes}`);
    }
  }
  return config;
}

export function main(argv: string[]): number {
  let config: ExportConfig;
  try {
    config = parseArgs(argv);
  } catch (err) {
    console.error((err as Error).message);
    return 2;
  }
  try {
    const summary = exportScenes(config);
    console.log(JSON.stringify(summary, null, 2));
    return 0;
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    return 1;
  }
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}
