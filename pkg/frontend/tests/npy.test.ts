import * as fs from 'node:fs';
import * as path from 'node:path';

import { describe, expect, it } from 'vitest';

import { parseNpy, readNpy, serializeNpy } from '../src/npy.js';
import { loadManifest } from '../src/manifest.js';

const SMOKE_DIR = path.resolve(__dirname, '..', '.fixtures', 'smoke');

describe('npy round trip', () => {
  it('serialize/parse recovers shape and data', () => {
    const arr = {
      shape: [2, 3],
      data: new Float32Array([1, 2, 3, 4.5, -1, 0.25]),
    };
    const back = parseNpy(serializeNpy(arr));
    expect(back.shape).toEqual([2, 3]);
    expect(Array.from(back.data)).toEqual(Array.from(arr.data));
  });

  it('1-tuple shapes use the trailing-comma form', () => {
    const buf = serializeNpy({ shape: [4], data: new Float32Array(4) });
    expect(buf.toString('latin1')).toContain("'shape': (4,)");
  });

  it('rejects wrong dtype', () => {
    const buf = serializeNpy({ shape: [1], data: new Float32Array([1]) });
    const corrupted = Buffer.from(
      buf.toString('latin1').replace('<f4', '<f8'), 'latin1');
    expect(() => parseNpy(corrupted)).toThrow(/f4/);
  });

  it('reading exported files is bit-faithful (re-serialization matches)', () => {
    const manifest = loadManifest(SMOKE_DIR);
    const file = path.join(SMOKE_DIR, manifest.entries[0].file);
    const original = fs.readFileSync(file);
    const arr = readNpy(file);
    expect(arr.shape).toEqual(manifest.entries[0].shape);
    const rewritten = serializeNpy(arr);
    expect(rewritten.equals(original)).toBe(true);
  });

  it('every smoke tensor matches its manifest shape', () => {
    const manifest = loadManifest(SMOKE_DIR);
    for (const e of manifest.entries.slice(0, 10)) {
      const arr = readNpy(path.join(SMOKE_DIR, e.file));
      expect(arr.shape).toEqual(e.shape);
      expect(arr.data.length).toBe(e.shape.reduce((a, b) => a * b, 1));
    }
  });
});
