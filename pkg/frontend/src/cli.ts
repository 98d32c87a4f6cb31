#!/usr/bin/env node
/**
 * Command line entry points.
 *
 * * `embed`        - run the embedding model over a crop manifest and
 *   write a binary sidecar: `embed --manifest m.csv --out emb.rtemb
 *   [--weights w.json] [--seed N]`.
 * * `init-weights` - write a deterministic randomly initialized weights
 *   file: `init-weights --out w.json [--seed N]`.
 *
 * Exit codes: 0 success, 1 usage error, 2 data error.
 */

import { parseArgs } from "node:util";
import { readFileSync, writeFileSync } from "node:fs";

import { readManifest } from "./manifest.js";
import { deserializeModel, initModel, serializeModel } from "./model.js";
import { exportEmbeddings } from "./export.js";

export const USAGE_ERROR = 1;
export const DATA_ERROR = 2;

const USAGE = `usage:
  crop-embed embed --manifest <csv> --out <sidecar> [--weights <json>] [--seed <n>]
  crop-embed init-weights --out <json> [--seed <n>]`;

function cmdEmbed(argv: string[]): number {
  const { values } = parseArgs({
    args: argv,
    options: {
      manifest: { type: "string" },
      weights: { type: "string" },
      out: { type: "string" },
      seed: { type: "string", default: "0" },
    },
  });
  if (!values.manifest || !values.out) {
    console.error("embed requires --manifest and --out\n" + USAGE);
    return USAGE_ERROR;
  }
  const model = values.weights
    ? deserializeModel(readFileSync(values.weights, "utf8"))
    : initModel(Number(values.seed));
  const entries = readManifest(values.manifest);
  const count = exportEmbeddings(model, entries, values.out);
  console.error(`wrote ${count} embeddings to ${values.out}`);
  return 0;
}

function cmdInitWeights(argv: string[]): number {
  const { values } = parseArgs({
    args: argv,
    options: {
      out: { type: "string" },
      seed: { type: "string", default: "0" },
    },
  });
  if (!values.out) {
    console.error("init-weights requires --out\n" + USAGE);
    return USAGE_ERROR;
  }
  writeFileSync(values.out, serializeModel(initModel(Number(values.seed))));
  console.error(`wrote weights to ${values.out}`);
  return 0;
}

export function main(argv: string[]): number {
  const [command, ...rest] = argv;
  const handlers: Record<string, (a: string[]) => number> = {
    embed: cmdEmbed,
    "init-weights": cmdInitWeights,
  };
  if (!command || !(command in handlers)) {
    console.error(USAGE);
    return USAGE_ERROR;
  }
  try {
    return handlers[command](rest);
  } catch (err) {
    if (err instanceof Error && err.message.startsWith("Unknown option")) {
      console.error(`error: ${err.message}\n${USAGE}`);
      return USAGE_ERROR;
    }
    console.error(`error: ${err instanceof Error ? err.message : err}`);
    return DATA_ERROR;
  }
}

import { fileURLToPath } from "node:url";
if (process.argv[1] && fileURLToPath(import.meta.url) === process.argv[1]) {
  process.exit(main(process.argv.slice(2)));
}
