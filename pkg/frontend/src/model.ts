/**
 * Small CNN builder: two 3x3/stride-2 convolution + pooling stages followed
 * by three dense layers (the last a 3-way softmax). Single-branch for one
 * input representation, dual-branch (two feature extraction blocks whose
 * flattened outputs concatenate) for image + persistence input pairs.
 */

import * as tf from '@tensorflow/tfjs';

export const CONV_FILTER_GRID = [8, 16, 32];
export const DENSE_SIZE_GRID = [64, 128, 256, 512, 1028];
export const REG_GRID = [0.0001, 0.001, 0.01, 0.1];
export const DROPOUT_GRID = [0.1, 0.2, 0.3];

export interface ModelConfig {
  convFilters: [number, number];
  denseSizes: [number, number];
  l1: number;
  l2: number;
  dropout: number;
  learningRate: number; // fixed 0.001 in the protocol
  epochs: number;       // 50 in the protocol
  patience: number;     // early-stop patience 5
  branch: 'single' | 'dual';
  seed: number;
}

export const defaultConfig: ModelConfig = {
  convFilters: [16, 32],
  denseSizes: [128, 64],
  l1: 0.0001,
  l2: 0.0001,
  dropout: 0.2,
  learningRate: 0.001,
  epochs: 50,
  patience: 5,
  branch: 'single',
  seed: 0,
};

function validate(cfg: ModelConfig): void {
  for (const f of cfg.convFilters) {
    if (!CONV_FILTER_GRID.includes(f)) throw new Error(`conv filters ${f} not in grid`);
  }
  for (const d of cfg.denseSizes) {
    if (!DENSE_SIZE_GRID.includes(d)) throw new Error(`dense size ${d} not in grid`);
  }
  if (!REG_GRID.includes(cfg.l1) || !REG_GRID.includes(cfg.l2)) {
    throw new Error('l1/l2 not in grid');
  }
  if (!DROPOUT_GRID.includes(cfg.dropout)) throw new Error('dropout not in grid');
}

/** One conv/pool feature block; returns the flattened feature tensor. */
function featureBlock(
  input: tf.SymbolicTensor,
  cfg: ModelConfig,
  seedBase: number,
): tf.SymbolicTensor {
  let x = input;
  for (let i = 0; i < 2; i++) {
    x = tf.layers
      .conv2d({
        filters: cfg.convFilters[i],
        kernelSize: 3,
        strides: 2,
        padding: 'same',
        activation: 'relu',
        kernelInitializer: tf.initializers.heNormal({ seed: seedBase + i }),
      })
      .apply(x) as tf.SymbolicTensor;
    x = tf.layers
      .maxPooling2d({ poolSize: 2, strides: 2, padding: 'same' })
      .apply(x) as tf.SymbolicTensor;
  }
  return tf.layers.flatten().apply(x) as tf.SymbolicTensor;
}

/**
 * Build and compile the classifier.
 *
 * `inputShapes` lists one shape for single-branch mode or two (image branch
 * first) for dual mode, each channels-last, e.g. [20, 20, 16] for a
 * persistence stack whose window index became the channel axis.
 */
export function buildModel(
  cfg: ModelConfig,
  inputShapes: number[][],
  nClasses = 3,
): tf.LayersModel {
  validate(cfg);
  const expected = cfg.branch === 'single' ? 1 : 2;
  if (inputShapes.length !== expected) {
    throw new Error(`${cfg.branch} branch expects ${expected} input shape(s)`);
  }
  const inputs = inputShapes.map((shape, i) =>
    tf.input({ shape, name: `branch_${i}` }),
  );
  const features = inputs.map((inp, i) =>
    featureBlock(inp, cfg, cfg.seed + 101 * (i + 1)),
  );
  let x =
    features.length === 1
      ? features[0]
      : (tf.layers.concatenate().apply(features) as tf.SymbolicTensor);

  const reg = () => tf.regularizers.l1l2({ l1: cfg.l1, l2: cfg.l2 });
  for (let i = 0; i < 2; i++) {
    x = tf.layers
      .dense({
        units: cfg.denseSizes[i],
        activation: 'relu',
        kernelRegularizer: reg(),
        kernelInitializer: tf.initializers.heNormal({ seed: cfg.seed + 7 + i }),
      })
      .apply(x) as tf.SymbolicTensor;
    x = tf.layers
      .dropout({ rate: cfg.dropout, seed: cfg.seed + 31 + i })
      .apply(x) as tf.SymbolicTensor;
  }
  const out = tf.layers
    .dense({
      units: nClasses,
      activation: 'softmax',
      kernelInitializer: tf.initializers.heNormal({ seed: cfg.seed + 97 }),
    })
    .apply(x) as tf.SymbolicTensor;

  const model = tf.model({ inputs, outputs: out });
  model.compile({
    optimizer: tf.train.adam(cfg.learningRate),
    loss: 'categoricalCrossentropy',
    metrics: ['accuracy'],
  });
  return model;
}

/**
 * Reorder a (W, n, n) stack into channels-last (n, n, W): the window index
 * becomes the channel axis, so the first convolution's channel weights play
 * the role of the per-window kernel in the weighted-sum operator.
 */
export function stackToChannelsLast(shape: number[]): number[] {
  if (shape.length === 3) return [shape[1], shape[2], shape[0]];
  if (shape.length === 2) return [shape[0], shape[1], 1];
  throw new Error(`cannot interpret array shape ${JSON.stringify(shape)}`);
}
