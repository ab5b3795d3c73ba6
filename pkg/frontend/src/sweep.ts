/**
 * Seeded random hyperparameter search over the protocol grids, ranked by
 * validation accuracy. (A stand-in for Bayesian search; reproducible.)
 */

import {
  CONV_FILTER_GRID,
  DENSE_SIZE_GRID,
  DROPOUT_GRID,
  ModelConfig,
  REG_GRID,
} from './model.js';
import { SplitData } from './data.js';
import { predictScores, train } from './train.js';
import { EvalReport, argmax, evaluate } from './metrics.js';

export interface SweepEntry {
  config: ModelConfig;
  valAccuracy: number;
  report: EvalReport | null;
  history: { loss: number[]; valLoss: number[]; stoppedEpoch: number };
}

function lcg(seed: number): () => number {
  let state = (seed >>> 0) || 1;
  return () => {
    state = (Math.imul(state, 1664525) + 1013904223) >>> 0;
    return state / 0x100000000;
  };
}

export function sampleConfigs(budget: number, seed: number): ModelConfig[] {
  const rand = lcg(seed * 2654435761);
  const pick = <T>(xs: readonly T[]): T => xs[Math.floor(rand() * xs.length)];
  const configs: ModelConfig[] = [];
  for (let i = 0; i < budget; i++) {
    configs.push({
      convFilters: [pick(CONV_FILTER_GRID), pick(CONV_FILTER_GRID)],
      denseSizes: [pick(DENSE_SIZE_GRID), pick(DENSE_SIZE_GRID)],
      l1: pick(REG_GRID),
      l2: pick(REG_GRID),
      dropout: pick(DROPOUT_GRID),
      learningRate: 0.001,
      epochs: 50,
      patience: 5,
      branch: 'single',
      seed: seed + i,
    });
  }
  return configs;
}

export async function sweep(
  budget: number,
  seed: number,
  trainData: SplitData,
  valData: SplitData,
  testData: SplitData | null,
  classes: string[],
  options: { epochs?: number; batchSize?: number } = {},
): Promise<SweepEntry[]> {
  if (budget < 1) throw new Error('sweep budget must be >= 1');
  const entries: SweepEntry[] = [];
  for (const config of sampleConfigs(budget, seed)) {
    const { model, history } = await train(config, trainData, valData, options);
    const valScores = predictScores(model, valData.xs);
    let correct = 0;
    for (let i = 0; i < valScores.length; i++) {
      if (argmax(valScores[i]) === valData.labels[i]) correct += 1;
    }
    const report = testData
      ? evaluate(predictScores(model, testData.xs), testData.labels, classes)
      : null;
    entries.push({
      config,
      valAccuracy: correct / valScores.length,
      report,
      history: {
        loss: history.loss,
        valLoss: history.valLoss,
        stoppedEpoch: history.stoppedEpoch,
      },
    });
    model.dispose();
  }
  entries.sort((a, b) => b.valAccuracy - a.valAccuracy);
  return entries;
}
