/**
 * The two deliberately trivial models behind the adapter: these exist to
 * exercise the prediction protocol, not to model anything.
 *
 * - prior: constant prediction from training-label class priors (or the
 *   label mean for regression), fitted from a sidecar training CSV.
 * - threshold: per-row prediction from the sign of one feature minus a
 *   configured threshold.
 */

import { readFileSync } from "fs";
import { parseCsv } from "./csv";

export type TaskKind = "classification" | "regression";

export interface AdapterConfig {
  mode: "prior" | "threshold";
  train_csv?: string;
  label?: string;
  feature?: string;
  threshold?: number;
}

export interface PredictionRow {
  prediction: string;
  probabilities?: number[];
}

export class ConfigError extends Error {}

export function loadConfig(path: string): AdapterConfig {
  let raw: string;
  try {
    raw = readFileSync(path, "utf-8");
  } catch (err) {
    throw new ConfigError(`cannot read config file '${path}': ${err}`);
  }
  let parsed: unknown;
  try {
    parsed = JSON.parse(raw);
  } catch (err) {
    throw new ConfigError(`config file '${path}' is not valid JSON: ${err}`);
  }
  const config = parsed as AdapterConfig;
  if (config.mode !== "prior" && config.mode !== "threshold") {
    throw new ConfigError(`config 'mode' must be "prior" or "threshold"`);
  }
  if (config.mode === "threshold") {
    if (typeof config.feature !== "string" || config.feature.length === 0) {
      throw new ConfigError("threshold mode requires a 'feature' name");
    }
    if (typeof config.threshold !== "number" || !isFinite(config.threshold)) {
      throw new ConfigError("threshold mode requires a finite numeric 'threshold'");
    }
  } else {
    if (typeof config.train_csv !== "string" || config.train_csv.length === 0) {
      throw new ConfigError("prior mode requires a 'train_csv' path");
    }
    if (typeof config.label !== "string" || config.label.length === 0) {
      throw new ConfigError("prior mode requires a 'label' column name");
    }
  }
  return config;
}

function readLabelColumn(trainCsvPath: string, label: string): string[] {
  let text: string;
  try {
    text = readFileSync(trainCsvPath, "utf-8");
  } catch (err) {
    throw new ConfigError(`cannot read training file '${trainCsvPath}': ${err}`);
  }
  const rows = parseCsv(text);
  if (rows.length === 0) {
    throw new ConfigError(`training file '${trainCsvPath}' is empty`);
  }
  const header = rows[0];
  const idx = header.indexOf(label);
  if (idx < 0) {
    throw new ConfigError(`label column '${label}' not found in '${trainCsvPath}'`);
  }
  return rows.slice(1).map((r) => r[idx] ?? "");
}

const MISSING = new Set(["", "NaN", "null"]);

/** Constant prediction for every row: argmax class prior with the priors
 *  as probabilities, or the label mean for regression. */
export function fitPrior(
  trainCsvPath: string,
  label: string,
  task: TaskKind,
  classes: string[]
): PredictionRow {
  const values = readLabelColumn(trainCsvPath, label).filter((v) => !MISSING.has(v));
  if (values.length === 0) {
    throw new ConfigError(`label column '${label}' has no non-missing values`);
  }
  if (task === "regression") {
    let sum = 0;
    let count = 0;
    for (const v of values) {
      const x = Number(v);
      if (isFinite(x)) {
        sum += x;
        count += 1;
      }
    }
    if (count === 0) {
      throw new ConfigError(`label column '${label}' has no numeric values`);
    }
    return { prediction: String(sum / count) };
  }
  const counts = new Map<string, number>(classes.map((c) => [c, 0]));
  for (const v of values) {
    if (counts.has(v)) {
      counts.set(v, (counts.get(v) as number) + 1);
    }
  }
  const total = classes.reduce((acc, c) => acc + (counts.get(c) as number), 0);
  if (total === 0) {
    throw new ConfigError("no training labels match the configured class list");
  }
  const priors = classes.map((c) => (counts.get(c) as number) / total);
  let best = 0;
  for (let i = 1; i < priors.length; i += 1) {
    if (priors[i] > priors[best]) {
      best = i;
    }
  }
  return { prediction: classes[best], probabilities: priors };
}

/** Sign of (feature - threshold); missing or unparseable cells count as
 *  "not above" and take the low branch. */
export function thresholdPredict(
  cell: string,
  threshold: number,
  task: TaskKind,
  classes: string[]
): PredictionRow {
  const value = MISSING.has(cell) ? NaN : Number(cell);
  const above = value > threshold; // NaN comparisons are false
  if (task === "regression") {
    return { prediction: above ? "1" : "-1" };
  }
  if (classes.length !== 2) {
    throw new ConfigError(`threshold mode needs exactly 2 classes, got ${classes.length}`);
  }
  const pick = above ? 1 : 0;
  return {
    prediction: classes[pick],
    probabilities: classes.map((_, i) => (i === pick ? 1 : 0)),
  };
}
