/**
 * Disk persistence for tfjs models without the node-specific backend:
 * topology + weight specs as JSON, weight data as a raw binary file.
 */

import * as fs from 'node:fs';
import * as path from 'node:path';
import * as tf from '@tensorflow/tfjs';

export async function saveModel(model: tf.LayersModel, dir: string): Promise<void> {
  fs.mkdirSync(dir, { recursive: true });
  const artifacts = await new Promise<tf.io.ModelArtifacts>((resolve, reject) => {
    model
      .save(
        tf.io.withSaveHandler(async (a) => {
          resolve(a);
          return {
            modelArtifactsInfo: {
              dateSaved: new Date(),
              modelTopologyType: 'JSON' as const,
            },
          };
        }),
      )
      .catch(reject);
  });
  fs.writeFileSync(
    path.join(dir, 'model.json'),
    JSON.stringify({
      modelTopology: artifacts.modelTopology,
      weightSpecs: artifacts.weightSpecs,
      format: artifacts.format,
    }),
  );
  const weightData = artifacts.weightData as ArrayBuffer;
  fs.writeFileSync(path.join(dir, 'weights.bin'), Buffer.from(weightData));
}

export async function loadModel(dir: string): Promise<tf.LayersModel> {
  const meta = JSON.parse(
    fs.readFileSync(path.join(dir, 'model.json'), 'utf-8'),
  );
  const raw = fs.readFileSync(path.join(dir, 'weights.bin'));
  const weightData = raw.buffer.slice(
    raw.byteOffset,
    raw.byteOffset + raw.byteLength,
  );
  return tf.loadLayersModel(
    tf.io.fromMemory({
      modelTopology: meta.modelTopology,
      weightSpecs: meta.weightSpecs,
      weightData,
    }),
  );
}
