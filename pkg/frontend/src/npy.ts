/**
 * Minimal NPY v1.0 reader/writer for little-endian float32 C-order arrays,
 * matching the format the exporter writes (magic, version (1,0), python
 * dict header padded to a 64-byte boundary).
 */

import * as fs from 'node:fs';

export interface NpyArray {
  shape: number[];
  data: Float32Array;
}

const MAGIC = Buffer.from('\x93NUMPY', 'latin1');

export function parseNpy(buf: Buffer): NpyArray {
  if (!buf.subarray(0, 6).equals(MAGIC)) {
    throw new Error('not an NPY file (bad magic)');
  }
  const major = buf[6];
  const minor = buf[7];
  if (major !== 1 || minor !== 0) {
    throw new Error(`unsupported NPY version ${major}.${minor}`);
  }
  const headerLen = buf.readUInt16LE(8);
  const header = buf.subarray(10, 10 + headerLen).toString('latin1');

  const descr = /'descr':\s*'([^']+)'/.exec(header)?.[1];
  if (descr !== '<f4') {
    throw new Error(`expected '<f4' data, got ${descr}`);
  }
  if (!/'fortran_order':\s*False/.test(header)) {
    throw new Error('expected C-contiguous (fortran_order: False)');
  }
  const shapeText = /'shape':\s*\(([^)]*)\)/.exec(header)?.[1] ?? '';
  const shape = shapeText
    .split(',')
    .map((s) => s.trim())
    .filter((s) => s.length > 0)
    .map((s) => parseInt(s, 10));

  const count = shape.reduce((a, b) => a * b, 1);
  const start = 10 + headerLen;
  if (buf.length < start + 4 * count) {
    throw new Error('NPY payload truncated');
  }
  // Copy so the Float32Array is aligned and independent of the file buffer.
  const body = Buffer.from(buf.subarray(start, start + 4 * count));
  const data = new Float32Array(body.buffer, body.byteOffset, count);
  return { shape, data };
}

export function readNpy(path: string): NpyArray {
  return parseNpy(fs.readFileSync(path));
}

export function serializeNpy(arr: NpyArray): Buffer {
  const count = arr.shape.reduce((a, b) => a * b, 1);
  if (count !== arr.data.length) {
    throw new Error(`shape ${JSON.stringify(arr.shape)} does not match length ${arr.data.length}`);
  }
  // numpy prints 1-tuples as "(n,)" and longer tuples comma-separated.
  const shapeText =
    arr.shape.length === 1 ? `(${arr.shape[0]},)` : `(${arr.shape.join(', ')})`;
  let dict = `{'descr': '<f4', 'fortran_order': False, 'shape': ${shapeText}, }`;
  // Pad with spaces so magic+version+len+header is a multiple of 64, then '\n'.
  const unpadded = 10 + dict.length + 1;
  dict = dict + ' '.repeat((64 - (unpadded % 64)) % 64) + '\n';

  const header = Buffer.alloc(10);
  MAGIC.copy(header);
  header[6] = 1;
  header[7] = 0;
  header.writeUInt16LE(dict.length, 8);
  const payload = Buffer.from(arr.data.buffer, arr.data.byteOffset, 4 * count);
  return Buffer.concat([header, Buffer.from(dict, 'latin1'), Buffer.from(payload)]);
}

export function writeNpy(path: string, arr: NpyArray): void {
  fs.writeFileSync(path, serializeNpy(arr));
}
