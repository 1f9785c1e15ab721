/**
 * Embedding JSONL: one `{"id": string, "vector": [numbers]}` object per
 * line, no header. This is the exchange format the calibration pipeline
 * reads; vectors are written raw (no normalization) so the boundary
 * stays lossless.
 */

export interface EmbeddingRecord {
  id: string;
  vector: number[];
}

export function toJsonLine(record: EmbeddingRecord): string {
  return JSON.stringify({ id: record.id, vector: record.vector });
}

export function parseJsonl(content: string): EmbeddingRecord[] {
  return content
    .split("\n")
    .filter((line) => line.trim() !== "")
    .map((line) => JSON.parse(line) as EmbeddingRecord);
}
