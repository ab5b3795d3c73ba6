/**
 * Classification metrics: accuracy from argmax, one-vs-rest precision, and
 * threshold-based sensitivity-at-minimum-specificity (and the dual), macro
 * averaged over the classes present in the test set.
 */

export interface Confusion {
  tp: number;
  fp: number;
  tn: number;
  fn: number;
}

export function precision(c: Confusion): number {
  return c.tp + c.fp === 0 ? 0 : c.tp / (c.tp + c.fp);
}

export function sensitivity(c: Confusion): number {
  return c.tp + c.fn === 0 ? 0 : c.tp / (c.tp + c.fn);
}

export function specificity(c: Confusion): number {
  return c.tn + c.fp === 0 ? 0 : c.tn / (c.tn + c.fp);
}

export function accuracyOf(c: Confusion): number {
  const n = c.tp + c.fp + c.tn + c.fn;
  return n === 0 ? 0 : (c.tp + c.tn) / n;
}

/** counts[i][j] = samples with true class i predicted as class j. */
export function confusionMatrix(
  labels: number[],
  predicted: number[],
  nClasses: number,
): number[][] {
  const m = Array.from({ length: nClasses }, () => new Array(nClasses).fill(0));
  for (let i = 0; i < labels.length; i++) {
    m[labels[i]][predicted[i]] += 1;
  }
  return m;
}

export function oneVsRest(matrix: number[][], cls: number): Confusion {
  let tp = 0;
  let fp = 0;
  let tn = 0;
  let fn = 0;
  const n = matrix.length;
  for (let i = 0; i < n; i++) {
    for (let j = 0; j < n; j++) {
      const v = matrix[i][j];
      if (i === cls && j === cls) tp += v;
      else if (i === cls) fn += v;
      else if (j === cls) fp += v;
      else tn += v;
    }
  }
  return { tp, fp, tn, fn };
}

function thresholdSweep(scores: number[], isPositive: boolean[]) {
  // Candidate thresholds: every observed score plus one above the max, so
  // "predict nothing positive" is always in the feasible set.
  const uniq = Array.from(new Set(scores)).sort((a, b) => a - b);
  uniq.push(Number.POSITIVE_INFINITY);
  const out: { sens: number; spec: number }[] = [];
  const nPos = isPositive.filter(Boolean).length;
  const nNeg = isPositive.length - nPos;
  for (const t of uniq) {
    let tp = 0;
    let fp = 0;
    for (let i = 0; i < scores.length; i++) {
      if (scores[i] >= t) {
        if (isPositive[i]) tp += 1;
        else fp += 1;
      }
    }
    out.push({
      sens: nPos === 0 ? 0 : tp / nPos,
      spec: nNeg === 0 ? 0 : (nNeg - fp) / nNeg,
    });
  }
  return out;
}

/** Max sensitivity over thresholds whose specificity is at least minSpec. */
export function sensitivityAtSpecificity(
  scores: number[],
  isPositive: boolean[],
  minSpec: number,
): number {
  let best = 0;
  for (const { sens, spec } of thresholdSweep(scores, isPositive)) {
    if (spec >= minSpec && sens > best) best = sens;
  }
  return best;
}

/** Max specificity over thresholds whose sensitivity is at least minSens. */
export function specificityAtSensitivity(
  scores: number[],
  isPositive: boolean[],
  minSens: number,
): number {
  let best = 0;
  for (const { sens, spec } of thresholdSweep(scores, isPositive)) {
    if (sens >= minSens && spec > best) best = spec;
  }
  return best;
}

export interface PerClassReport {
  label: string;
  support: number;
  precision: number;
  sensitivityAtSpec: number;
  specificityAtSens: number;
}

export interface EvalReport {
  accuracy: number;
  macroPrecision: number;
  macroSensitivityAtSpec: number;
  macroSpecificityAtSens: number;
  minSpecificity: number;
  minSensitivity: number;
  confusion: number[][];
  perClass: PerClassReport[];
  skippedClasses: string[];
}

export function argmax(row: number[] | Float32Array): number {
  let best = 0;
  for (let i = 1; i < row.length; i++) {
    if (row[i] > row[best]) best = i;
  }
  return best;
}

/**
 * Full evaluation from per-sample class scores and integer labels.
 * Classes absent from the test set are skipped (and reported as such).
 */
export function evaluate(
  scores: number[][],
  labels: number[],
  classes: string[],
  minSpec = 0.9,
  minSens = 0.9,
): EvalReport {
  if (scores.length !== labels.length || scores.length === 0) {
    throw new Error('scores and labels must be equal-length and non-empty');
  }
  const predicted = scores.map((s) => argmax(s));
  const matrix = confusionMatrix(labels, predicted, classes.length);
  let correct = 0;
  for (let i = 0; i < labels.length; i++) {
    if (predicted[i] === labels[i]) correct += 1;
  }

  const perClass: PerClassReport[] = [];
  const skipped: string[] = [];
  for (let c = 0; c < classes.length; c++) {
    const support = matrix[c].reduce((a, b) => a + b, 0);
    if (support === 0) {
      console.warn(`class '${classes[c]}' absent from test set; skipped`);
      skipped.push(classes[c]);
      continue;
    }
    const ovr = oneVsRest(matrix, c);
    const col = scores.map((s) => s[c]);
    const pos = labels.map((l) => l === c);
    perClass.push({
      label: classes[c],
      support,
      precision: precision(ovr),
      sensitivityAtSpec: sensitivityAtSpecificity(col, pos, minSpec),
      specificityAtSens: specificityAtSensitivity(col, pos, minSens),
    });
  }
  const mean = (xs: number[]) =>
    xs.length === 0 ? 0 : xs.reduce((a, b) => a + b, 0) / xs.length;
  return {
    accuracy: correct / labels.length,
    macroPrecision: mean(perClass.map((p) => p.precision)),
    macroSensitivityAtSpec: mean(perClass.map((p) => p.sensitivityAtSpec)),
    macroSpecificityAtSens: mean(perClass.map((p) => p.specificityAtSens)),
    minSpecificity: minSpec,
    minSensitivity: minSens,
    confusion: matrix,
    perClass,
    skippedClasses: skipped,
  };
}

export function reportToCsv(reports: { name: string; report: EvalReport }[]): string {
  const lines = ['name,accuracy,precision,sensitivity,specificity'];
  for (const { name, report } of reports) {
    lines.push(
      [
        name,
        report.accuracy.toFixed(4),
        report.macroPrecision.toFixed(4),
        report.macroSensitivityAtSpec.toFixed(4),
        report.macroSpecificityAtSens.toFixed(4),
      ].join(','),
    );
  }
  return lines.join('\n') + '\n';
}
