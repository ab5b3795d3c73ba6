/**
 * Vitest global setup: materialize a small labeled tensor export by driving
 * the generation CLI (synthetic 128px slides, balanced to 67 per class,
 * windowed height persistence). Cached under .fixtures/ across runs.
 */

import { execSync } from 'node:child_process';
import * as fs from 'node:fs';
import * as path from 'node:path';

export const FIXTURES = path.resolve(__dirname, '..', '.fixtures');
export const SLIDES_DIR = path.join(FIXTURES, 'slides');
export const SMOKE_DIR = path.join(FIXTURES, 'smoke');

export default function setup(): void {
  const manifest = path.join(SMOKE_DIR, 'manifest.json');
  if (fs.existsSync(manifest)) return;
  fs.mkdirSync(FIXTURES, { recursive: true });
  const run = (cmd: string) =>
    execSync(cmd, { stdio: 'inherit', timeout: 600_000 });
  run(`python3 -m phconv.cli synth --out ${SLIDES_DIR} --per-class 68 ` +
    `--side 128 --seed 5`);
  run(`python3 -m phconv.cli generate --input ${SLIDES_DIR} --out ${SMOKE_DIR} ` +
    `--balance-target 67 --max-side 128 --window 32 --stride 32 ` +
    `--resolution 20 --filtration height --mode local --seed 5`);
}
