import { readFile, unlink, writeFile } from "node:fs/promises";

import { Encoder } from "./encoder.js";
import { toJsonLine } from "./jsonl.js";
import { parseTexts } from "./tsv.js";

export interface ExportJob {
  inputPath: string;
  outputPath: string;
  batchSize: number;
}

export interface ExportSummary {
  records: number;
  dim: number;
  encoder: string;
}

/**
 * Export every input line as one embedding record, in input order.
 *
 * Texts run through the encoder in batches of `batchSize`; ids are
 * preserved verbatim and vectors written raw. An empty input produces
 * an empty (zero-line) output file. A sidecar `<output>.meta.json`
 * records the encoder identity so the file's provenance survives.
 * On failure the partially written output is removed.
 */
export async function exportEmbeddings(
  job: ExportJob,
  encoder: Encoder
): Promise<ExportSummary> {
  if (!Number.isInteger(job.batchSize) || job.batchSize < 1) {
    throw new RangeError(`batch size must be a positive integer, got ${job.batchSize}`);
  }
  const records = parseTexts(await readFile(job.inputPath, "utf-8"));
  const lines: string[] = [];
  try {
    for (let start = 0; start < records.length; start += job.batchSize) {
      const batch = records.slice(start, start + job.batchSize);
      const vectors = await encoder.embedBatch(batch.map((r) => r.text));
      if (vectors.length !== batch.length) {
        throw new Error(
          `encoder returned ${vectors.length} vectors for a batch of ${batch.length}`
        );
      }
      for (let i = 0; i < batch.length; i++) {
        const vector = vectors[i];
        if (vector.length !== encoder.dim || vector.some((v) => !Number.isFinite(v))) {
          throw new Error(
            `vector for ${batch[i].id} is not a finite ${encoder.dim}-dimensional embedding`
          );
        }
        lines.push(toJsonLine({ id: batch[i].id, vector }));
      }
    }
    await writeFile(job.outputPath, lines.map((l) => l + "\n").join(""), "utf-8");
    await writeFile(
      `${job.outputPath}.meta.json`,
      JSON.stringify(
        {
          encoder: encoder.name,
          dim: encoder.dim,
          batch_size: job.batchSize,
          records: records.length,
        },
        null,
        2
      ) + "\n",
      "utf-8"
    );
  } catch (err) {
    await unlink(job.outputPath).catch(() => {});
    await unlink(`${job.outputPath}.meta.json`).catch(() => {});
    throw err;
  }
  return { records: records.length, dim: encoder.dim, encoder: encoder.name };
}
