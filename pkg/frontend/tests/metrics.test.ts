import { describe, expect, it } from 'vitest';

import {
  Confusion,
  accuracyOf,
  argmax,
  confusionMatrix,
  evaluate,
  oneVsRest,
  precision,
  sensitivity,
  sensitivityAtSpecificity,
  specificity,
  specificityAtSensitivity,
} from '../src/metrics.js';

/** Deterministic LCG for reproducible synthetic matrices. */
function lcg(seed: number): () => number {
  let s = seed >>> 0 || 1;
  return () => {
    s = (Math.imul(s, 1664525) + 1013904223) >>> 0;
    return s / 0x100000000;
  };
}

function randomConfusion(rand: () => number): number[][] {
  return Array.from({ length: 3 }, () =>
    Array.from({ length: 3 }, () => 1 + Math.floor(rand() * 20)),
  );
}

/** Expand a confusion matrix into labels + argmax-consistent scores. */
function realize(matrix: number[][]): { scores: number[][]; labels: number[] } {
  const scores: number[][] = [];
  const labels: number[] = [];
  for (let i = 0; i < 3; i++) {
    for (let j = 0; j < 3; j++) {
      for (let k = 0; k < matrix[i][j]; k++) {
        const row = [0.1, 0.1, 0.1];
        row[j] = 0.8;
        scores.push(row);
        labels.push(i);
      }
    }
  }
  return { scores, labels };
}

describe('binary metric formulas', () => {
  it('matches the textbook definitions', () => {
    const c: Confusion = { tp: 7, fp: 3, tn: 15, fn: 5 };
    expect(precision(c)).toBe(7 / 10);
    expect(sensitivity(c)).toBe(7 / 12);
    expect(specificity(c)).toBe(15 / 18);
    expect(accuracyOf(c)).toBe(22 / 30);
  });

  it('degenerate denominators give zero', () => {
    expect(precision({ tp: 0, fp: 0, tn: 1, fn: 1 })).toBe(0);
    expect(specificity({ tp: 1, fp: 0, tn: 0, fn: 0 })).toBe(0);
  });
});

describe('metrics oracle: 10 synthetic confusion matrices', () => {
  it('evaluate reproduces direct-formula metrics exactly', () => {
    const rand = lcg(20260810);
    for (let trial = 0; trial < 10; trial++) {
      const matrix = randomConfusion(rand);
      const { scores, labels } = realize(matrix);
      const report = evaluate(scores, labels, ['a', 'b', 'c']);

      expect(report.confusion).toEqual(matrix);
      const total = matrix.flat().reduce((a, b) => a + b, 0);
      const trace = matrix[0][0] + matrix[1][1] + matrix[2][2];
      expect(report.accuracy).toBe(trace / total);

      let precSum = 0;
      for (let c = 0; c < 3; c++) {
        const ovr = oneVsRest(matrix, c);
        const direct = ovr.tp + ovr.fp === 0 ? 0 : ovr.tp / (ovr.tp + ovr.fp);
        expect(report.perClass[c].precision).toBe(direct);
        precSum += direct;
      }
      expect(report.macroPrecision).toBe(precSum / 3);
      const sum = report.confusion.flat().reduce((a, b) => a + b, 0);
      expect(sum).toBe(labels.length);
    }
  });
});

describe('threshold-based sensitivity and specificity', () => {
  const scores = [0.9, 0.8, 0.7, 0.4, 0.2];
  const pos = [true, false, true, false, false];

  it('hand-computed operating points', () => {
    // spec >= 0.9 forces zero false positives: only the 0.9 threshold works
    expect(sensitivityAtSpecificity(scores, pos, 0.9)).toBe(0.5);
    // spec >= 0.6 admits one false positive: both positives recovered
    expect(sensitivityAtSpecificity(scores, pos, 0.6)).toBe(1.0);
    // sens >= 0.9 needs both positives: threshold 0.7 leaks one negative
    expect(specificityAtSensitivity(scores, pos, 0.9)).toBe(2 / 3);
  });

  it('raising the specificity floor never increases sensitivity', () => {
    const rand = lcg(7);
    for (let trial = 0; trial < 20; trial++) {
      const s = Array.from({ length: 40 }, () => rand());
      const p = Array.from({ length: 40 }, () => rand() < 0.4);
      let prev = 1.0;
      for (const floor of [0.5, 0.7, 0.9, 0.95, 1.0]) {
        const v = sensitivityAtSpecificity(s, p, floor);
        expect(v).toBeLessThanOrEqual(prev + 1e-12);
        prev = v;
      }
    }
  });

  it('empty-positive classes floor at zero', () => {
    expect(sensitivityAtSpecificity([0.1, 0.5], [false, false], 0.9)).toBe(0);
  });
});

describe('evaluate edge cases', () => {
  it('perfect predictions', () => {
    const { scores, labels } = realize([
      [5, 0, 0],
      [0, 4, 0],
      [0, 0, 6],
    ]);
    const r = evaluate(scores, labels, ['a', 'b', 'c']);
    expect(r.accuracy).toBe(1.0);
    expect(r.macroPrecision).toBe(1.0);
  });

  it('constant predictor on a balanced set scores one third', () => {
    const { scores, labels } = realize([
      [5, 0, 0],
      [5, 0, 0],
      [5, 0, 0],
    ]);
    const r = evaluate(scores, labels, ['a', 'b', 'c']);
    expect(r.accuracy).toBeCloseTo(1 / 3, 12);
  });

  it('skips classes absent from the test set', () => {
    const scores = [
      [0.8, 0.1, 0.1],
      [0.1, 0.8, 0.1],
    ];
    const r = evaluate(scores, [0, 1], ['a', 'b', 'c']);
    expect(r.skippedClasses).toEqual(['c']);
    expect(r.perClass).toHaveLength(2);
  });

  it('argmax picks the first maximum', () => {
    expect(argmax([0.2, 0.5, 0.3])).toBe(1);
    expect(argmax([0.5, 0.5, 0.0])).toBe(0);
  });

  it('confusion matrix counts sum to sample count', () => {
    const m = confusionMatrix([0, 1, 2, 2], [0, 2, 2, 1], 3);
    expect(m.flat().reduce((a, b) => a + b, 0)).toBe(4);
    expect(m[2][2]).toBe(1);
  });
});
