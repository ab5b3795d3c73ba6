/**
 * CLI: train, evaluate, and sweep over a tensor export directory (NPY files
 * plus manifest.json produced by the generation pipeline).
 *
 *   node dist/cli.js train --data DIR [--epochs N] [--seed S] [--out model-dir]
 *   node dist/cli.js evaluate --data DIR --model model-dir [--out report.json]
 *   node dist/cli.js sweep --data DIR --budget B [--epochs N] [--seed S] --out DIR
 */

import * as fs from 'node:fs';
import * as path from 'node:path';
import { loadManifest } from './manifest.js';
import { loadModel, saveModel } from './modelio.js';
import { loadSplit } from './data.js';
import { defaultConfig } from './model.js';
import { fitModel, predictScores, train } from './train.js';
import { evaluate, reportToCsv } from './metrics.js';
import { sweep } from './sweep.js';

interface Args {
  command: string;
  [key: string]: string;
}

function parseArgs(argv: string[]): Args {
  const out: Args = { command: argv[0] ?? '' };
  for (let i = 1; i < argv.length; i += 2) {
    const key = argv[i];
    if (!key.startsWith('--')) throw new Error(`unexpected argument ${key}`);
    out[key.slice(2)] = argv[i + 1];
  }
  return out;
}

async function cmdTrain(args: Args): Promise<void> {
  const dir = args.data;
  const manifest = loadManifest(dir);
  const cfg = {
    ...defaultConfig,
    seed: parseInt(args.seed ?? '0', 10),
    epochs: parseInt(args.epochs ?? String(defaultConfig.epochs), 10),
  };
  const trainData = loadSplit(dir, manifest, 'train');
  const valData = loadSplit(dir, manifest, 'val');
  console.log(`training on ${trainData.labels.length} samples, ` +
    `validating on ${valData.labels.length}`);
  const { model, history } = await train(cfg, trainData, valData, {
    verbose: true,
  });
  console.log(`stopped after ${history.stoppedEpoch} epochs, ` +
    `final loss ${history.loss.at(-1)?.toFixed(4)}`);
  if (args.out) {
    await saveModel(model, args.out);
    console.log(`model saved to ${args.out}`);
  }
  const testData = loadSplit(dir, manifest, 'test');
  const report = evaluate(predictScores(model, testData.xs),
    testData.labels, manifest.classes);
  console.log(JSON.stringify(report, null, 2));
}

async function cmdEvaluate(args: Args): Promise<void> {
  const dir = args.data;
  const manifest = loadManifest(dir);
  const model = await loadModel(args.model);
  const testData = loadSplit(dir, manifest, 'test');
  const report = evaluate(predictScores(model, testData.xs),
    testData.labels, manifest.classes);
  const text = JSON.stringify(report, null, 2);
  if (args.out) {
    fs.writeFileSync(args.out, text);
    console.log(`report written to ${args.out}`);
  }
  console.log(text);
}

async function cmdSweep(args: Args): Promise<void> {
  const dir = args.data;
  const manifest = loadManifest(dir);
  const budget = parseInt(args.budget ?? '1', 10);
  const seed = parseInt(args.seed ?? '0', 10);
  const epochs = parseInt(args.epochs ?? '50', 10);
  const trainData = loadSplit(dir, manifest, 'train');
  const valData = loadSplit(dir, manifest, 'val');
  const testData = loadSplit(dir, manifest, 'test');
  const ranked = await sweep(budget, seed, trainData, valData, testData,
    manifest.classes, { epochs });
  const outDir = args.out ?? 'sweep-out';
  fs.mkdirSync(outDir, { recursive: true });
  fs.writeFileSync(path.join(outDir, 'sweep.json'),
    JSON.stringify(ranked, null, 2));
  fs.writeFileSync(path.join(outDir, 'summary.csv'), reportToCsv(
    ranked.filter((e) => e.report !== null)
      .map((e, i) => ({ name: `rank${i}`, report: e.report! }))));
  console.log(`best val accuracy ${ranked[0].valAccuracy.toFixed(4)}; ` +
    `results in ${outDir}`);
}

export async function main(argv: string[]): Promise<number> {
  const args = parseArgs(argv);
  if (!args.data) {
    console.error('usage: cli.js <train|evaluate|sweep> --data DIR [options]');
    return 2;
  }
  if (args.command === 'train') await cmdTrain(args);
  else if (args.command === 'evaluate') await cmdEvaluate(args);
  else if (args.command === 'sweep') await cmdSweep(args);
  else {
    console.error(`unknown command '${args.command}'`);
    return 2;
  }
  return 0;
}

const isMain = process.argv[1] && import.meta.url.endsWith(path.basename(process.argv[1]));
if (isMain) {
  main(process.argv.slice(2)).then(
    (code) => process.exit(code),
    (err) => {
      console.error(err);
      process.exit(1);
    },
  );
}
