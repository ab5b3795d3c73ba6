/**
 * Load exported NPY arrays (by manifest split) into tfjs tensors, with the
 * (W, n, n) persistence stacks transposed to channels-last.
 */

import * as path from 'node:path';
import * as tf from '@tensorflow/tfjs';

import { Manifest, ManifestEntry, Split, entriesFor } from './manifest.js';
import { readNpy } from './npy.js';
import { stackToChannelsLast } from './model.js';

export interface SplitData {
  xs: tf.Tensor4D;
  ys: tf.Tensor2D;
  labels: number[];
  entries: ManifestEntry[];
}

function toChannelsLast(shape: number[], data: Float32Array): tf.Tensor3D {
  if (shape.length === 3) {
    // (W, n, n) -> (n, n, W)
    return tf.tensor3d(data, shape as [number, number, number]).transpose([1, 2, 0]);
  }
  if (shape.length === 2) {
    return tf.tensor3d(data, [shape[0], shape[1], 1]);
  }
  throw new Error(`unsupported array rank ${shape.length}`);
}

export function loadSplit(dir: string, manifest: Manifest, split: Split): SplitData {
  const entries = entriesFor(manifest, split);
  const tensors: tf.Tensor3D[] = [];
  const labels: number[] = [];
  for (const e of entries) {
    const arr = readNpy(path.join(dir, e.file));
    tensors.push(toChannelsLast(arr.shape, arr.data));
    labels.push(manifest.classes.indexOf(e.label));
  }
  const xs = tf.stack(tensors) as tf.Tensor4D;
  tensors.forEach((t) => t.dispose());
  const ys = tf.oneHot(tf.tensor1d(labels, 'int32'), manifest.classes.length) as tf.Tensor2D;
  return { xs, ys, labels, entries };
}

export function inputShapeOf(manifest: Manifest): number[] {
  return stackToChannelsLast(manifest.entries[0].shape);
}

/** Deterministic in-place Fisher-Yates shuffle with a 32-bit LCG. */
export function seededShuffle<T>(items: T[], seed: number): T[] {
  let state = (seed >>> 0) || 1;
  const next = () => {
    state = (Math.imul(state, 1664525) + 1013904223) >>> 0;
    return state / 0x100000000;
  };
  for (let i = items.length - 1; i > 0; i--) {
    const j = Math.floor(next() * (i + 1));
    [items[i], items[j]] = [items[j], items[i]];
  }
  return items;
}
