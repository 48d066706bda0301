/**
 * Entry point: answer one batch of prediction requests over stdin/stdout.
 *
 * Wire contract: feature CSV on stdin (header row, missing cells empty),
 * DEEPCHECKS_TASK and (for classification) DEEPCHECKS_CLASSES in the
 * environment, prediction CSV on stdout. Exit 0 on success, 1 with a
 * message on stderr for any configuration or protocol problem.
 */

import { formatCsv, parseCsv } from "./csv";
import {
  AdapterConfig,
  ConfigError,
  PredictionRow,
  TaskKind,
  fitPrior,
  loadConfig,
  thresholdPredict,
} from "./model";

function readStdin(): string {
  const chunks: Buffer[] = [];
  const fd = 0;
  const buf = Buffer.alloc(1 << 16);
  const { readSync } = require("fs") as typeof import("fs");
  while (true) {
    let n: number;
    try {
      n = readSync(fd, buf, 0, buf.length, null);
    } catch (err: unknown) {
      if ((err as NodeJS.ErrnoException).code === "EAGAIN") {
        continue;
      }
      throw err;
    }
    if (n <= 0) {
      break;
    }
    chunks.push(Buffer.from(buf.subarray(0, n)));
  }
  return Buffer.concat(chunks).toString("utf-8");
}

function resolveTask(): TaskKind {
  const task = process.env.DEEPCHECKS_TASK;
  if (task !== "classification" && task !== "regression") {
    throw new ConfigError(
      "DEEPCHECKS_TASK must be 'classification' or 'regression', got " + JSON.stringify(task ?? null)
    );
  }
  return task;
}

function resolveClasses(task: TaskKind): string[] {
  if (task !== "classification") {
    return [];
  }
  const raw = process.env.DEEPCHECKS_CLASSES;
  if (!raw) {
    throw new ConfigError("DEEPCHECKS_CLASSES is required for classification");
  }
  const classes = raw.split(",");
  if (classes.length === 0 || classes.some((c) => c.length === 0)) {
    throw new ConfigError("DEEPCHECKS_CLASSES must be a comma-joined list of nonempty class names");
  }
  return classes;
}

function predictAll(
  config: AdapterConfig,
  task: TaskKind,
  classes: string[],
  header: string[],
  rows: string[][]
): PredictionRow[] {
  if (config.mode === "prior") {
    const constant = fitPrior(config.train_csv as string, config.label as string, task, classes);
    return rows.map(() => constant);
  }
  const featureIdx = header.indexOf(config.feature as string);
  if (featureIdx < 0) {
    throw new ConfigError(`feature '${config.feature}' not found in the input header`);
  }
  return rows.map((row) =>
    thresholdPredict(row[featureIdx] ?? "", config.threshold as number, task, classes)
  );
}

export function main(): number {
  try {
    const configPath = process.argv[2];
    if (!configPath) {
      throw new ConfigError("usage: main.js <config.json> (feature CSV on stdin)");
    }
    const config = loadConfig(configPath);
    const task = resolveTask();
    const classes = resolveClasses(task);

    const input = parseCsv(readStdin());
    if (input.length === 0) {
      throw new ConfigError("empty input: the feature CSV needs a header row");
    }
    const [header, ...rows] = input;
    const predictions = predictAll(config, task, classes, header, rows);

    const withProbs = predictions.length > 0 && predictions[0].probabilities !== undefined;
    const outHeader = ["prediction"];
    if (task === "classification" && (withProbs || rows.length === 0)) {
      outHeader.push(...classes.map((c) => `proba_${c}`));
    }
    const outRows = predictions.map((p) => {
      const row = [p.prediction];
      if (p.probabilities) {
        row.push(...p.probabilities.map((x) => String(x)));
      }
      return row;
    });
    process.stdout.write(formatCsv([outHeader, ...outRows]));
    return 0;
  } catch (err) {
    const message = err instanceof ConfigError ? err.message : String(err);
    process.stderr.write(`adapter error: ${message}\n`);
    return 1;
  }
}

if (require.main === module) {
  // process.exit() would truncate large pending stdout writes on a pipe;
  // setting exitCode lets the stream drain first.
  process.exitCode = main();
}
