/**
 * Export-manifest loading: the JSON file the tensor exporter writes next to
 * its NPY arrays, carrying labels, splits, and the pipeline configuration.
 */

import * as fs from 'node:fs';
import * as path from 'node:path';

export type Split = 'train' | 'val' | 'test';

export interface ManifestEntry {
  source: string;
  label: string;
  aug: string;
  split: string;
  file: string;
  shape: number[];
  sha256: string;
}

export interface Manifest {
  version: string;
  mode: 'local' | 'global' | 'image';
  config: Record<string, unknown>;
  seed: number;
  classes: string[];
  entries: ManifestEntry[];
}

export function loadManifest(dir: string): Manifest {
  const p = path.join(dir, 'manifest.json');
  const m = JSON.parse(fs.readFileSync(p, 'utf-8')) as Manifest;
  if (!Array.isArray(m.entries) || !Array.isArray(m.classes)) {
    throw new Error(`malformed manifest at ${p}`);
  }
  return m;
}

export function entriesFor(m: Manifest, split: Split): ManifestEntry[] {
  const rows = m.entries.filter((e) => e.split === split);
  if (rows.length === 0) {
    throw new Error(`manifest has no entries for split '${split}'`);
  }
  return rows;
}

export function labelIndex(m: Manifest, label: string): number {
  const i = m.classes.indexOf(label);
  if (i < 0) throw new Error(`label '${label}' not in manifest classes`);
  return i;
}
