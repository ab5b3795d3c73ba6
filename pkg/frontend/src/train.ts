/**
 * Training loop: up to `epochs` epochs with early stopping on validation
 * loss (patience per config), fully seeded, batched gradient descent on the
 * pre-shuffled training split.
 */

import * as tf from '@tensorflow/tfjs';

import { ModelConfig, buildModel } from './model.js';
import { SplitData, seededShuffle } from './data.js';

export interface History {
  loss: number[];
  valLoss: number[];
  accuracy: number[];
  stoppedEpoch: number;
}

/** Early stopping on a monitored loss: halt after `patience` consecutive
 * epochs without improvement. With strictly worsening loss and patience p,
 * training stops after epoch p + 1. */
export class EarlyStopper {
  private best = Number.POSITIVE_INFINITY;
  private sinceBest = 0;

  constructor(private readonly patience: number) {}

  /** Record one epoch's monitored loss; true means stop now. */
  update(loss: number): boolean {
    if (loss < this.best - 1e-12) {
      this.best = loss;
      this.sinceBest = 0;
      return false;
    }
    this.sinceBest += 1;
    return this.sinceBest >= this.patience;
  }
}

export interface TrainResult {
  model: tf.LayersModel;
  history: History;
}

export async function train(
  cfg: ModelConfig,
  trainData: SplitData,
  valData: SplitData | null,
  options: { batchSize?: number; epochs?: number; verbose?: boolean } = {},
): Promise<TrainResult> {
  const inputShape = trainData.xs.shape.slice(1) as number[];
  const model = buildModel(cfg, [inputShape], trainData.ys.shape[1]);
  return { model, history: await fitModel(model, cfg, trainData, valData, options) };
}

export async function fitModel(
  model: tf.LayersModel,
  cfg: ModelConfig,
  trainData: SplitData,
  valData: SplitData | null,
  options: { batchSize?: number; epochs?: number; verbose?: boolean } = {},
): Promise<History> {
  const epochs = options.epochs ?? cfg.epochs;
  const batchSize = options.batchSize ?? 32;

  // One seeded shuffle up front; tf.fit's own shuffling is unseeded.
  const order = seededShuffle(
    Array.from({ length: trainData.xs.shape[0] }, (_, i) => i),
    cfg.seed + 17,
  );
  const idx = tf.tensor1d(order, 'int32');
  const xs = tf.gather(trainData.xs, idx);
  const ys = tf.gather(trainData.ys, idx);
  idx.dispose();

  const history: History = { loss: [], valLoss: [], accuracy: [], stoppedEpoch: 0 };
  const stopper = new EarlyStopper(cfg.patience);

  try {
    for (let epoch = 0; epoch < epochs; epoch++) {
      const out = await model.fit(xs, ys, {
        epochs: 1,
        batchSize,
        shuffle: false,
        verbose: 0,
        validationData: valData ? [valData.xs, valData.ys] : undefined,
      });
      const loss = out.history['loss'][0] as number;
      const acc = (out.history['acc'] ?? out.history['accuracy'])?.[0] as number;
      history.loss.push(loss);
      history.accuracy.push(acc ?? NaN);
      history.stoppedEpoch = epoch + 1;
      const monitored = valData ? (out.history['val_loss'][0] as number) : loss;
      if (valData) history.valLoss.push(monitored);
      if (options.verbose) {
        console.log(`epoch ${epoch + 1}/${epochs} loss=${loss.toFixed(4)}` +
          (valData ? ` val_loss=${monitored.toFixed(4)}` : ''));
      }
      if (stopper.update(monitored)) break;
    }
  } finally {
    xs.dispose();
    ys.dispose();
  }
  return history;
}

/** Per-sample class scores as plain arrays. */
export function predictScores(model: tf.LayersModel, xs: tf.Tensor4D): number[][] {
  const out = model.predict(xs) as tf.Tensor2D;
  const rows = out.arraySync() as number[][];
  out.dispose();
  return rows;
}
