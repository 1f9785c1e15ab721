#!/usr/bin/env node
/**
 * use-exporter: embed an id<TAB>text file into the shared JSONL format.
 *
 *   use-exporter --input texts.tsv --out embeddings.jsonl [--batch-size 256]
 *                [--encoder use|hash]
 *
 * `--encoder hash` swaps in the deterministic offline encoder (dry runs,
 * CI); the default requires the TensorFlow.js universal sentence
 * encoder packages and network access to the model weights.
 */

import { parseArgs } from "node:util";
import { pathToFileURL } from "node:url";
import process from "node:process";

import { Encoder, hashEncoder, loadUseEncoder } from "./encoder.js";
import { exportEmbeddings } from "./export.js";

export async function main(argv: string[]): Promise<number> {
  let parsed;
  try {
    parsed = parseArgs({
      args: argv,
      options: {
        input: { type: "string" },
        out: { type: "string" },
        "batch-size": { type: "string", default: "256" },
        encoder: { type: "string", default: "use" },
      },
    });
  } catch (err) {
    report("UsageError", err);
    return 2;
  }
  const { input, out, encoder: encoderName } = parsed.values;
  const batchSize = Number(parsed.values["batch-size"]);
  if (!input || !out) {
    report("UsageError", new Error("--input and --out are required"));
    return 2;
  }
  try {
    let encoder: Encoder;
    if (encoderName === "hash") {
      encoder = hashEncoder();
    } else if (encoderName === "use") {
      encoder = await loadUseEncoder();
    } else {
      report("UsageError", new Error(`unknown encoder ${encoderName}`));
      return 2;
    }
    const summary = await exportEmbeddings(
      { inputPath: input, outputPath: out, batchSize },
      encoder
    );
    console.log(
      `wrote ${summary.records} embeddings of dimension ${summary.dim} ` +
        `(${summary.encoder}) to ${out}`
    );
    return 0;
  } catch (err) {
    const code =
      err && typeof err === "object" && "code" in err && typeof err.code === "string"
        ? err.code
        : err instanceof Error
          ? err.name
          : "Error";
    report(code, err);
    return 1;
  }
}

function report(code: string, err: unknown): void {
  const message = err instanceof Error ? err.message : String(err);
  process.stderr.write(JSON.stringify({ error: code, message }) + "\n");
}

const invokedDirectly =
  process.argv[1] !== undefined && import.meta.url === pathToFileURL(process.argv[1]).href;

if (invokedDirectly) {
  main(process.argv.slice(2)).then((code) => {
    process.exitCode = code;
  });
}
