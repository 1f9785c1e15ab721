import { ModelUnavailableError } from "./errors.js";

export const EMBEDDING_DIM = 512;

/** Batch text encoder producing fixed-dimension vectors. */
export interface Encoder {
  /** Short identifier recorded in the output sidecar. */
  name: string;
  dim: number;
  embedBatch(texts: string[]): Promise<number[][]>;
}

type ModuleImporter = (specifier: string) => Promise<any>;

/**
 * Load the TensorFlow.js universal sentence encoder.
 *
 * Both the packages and the model weights are fetched lazily; any
 * failure (missing package, no network to the model host) surfaces as
 * ModelUnavailableError so callers can fall back or abort cleanly. The
 * importer is injectable for tests.
 */
export async function loadUseEncoder(
  importer: ModuleImporter = (spec) => import(spec)
): Promise<Encoder> {
  let use: any;
  try {
    await importer("@tensorflow/tfjs");
    use = await importer("@tensorflow-models/universal-sentence-encoder");
  } catch (cause) {
    throw new ModelUnavailableError(
      "encoder packages not installed (@tensorflow/tfjs, @tensorflow-models/universal-sentence-encoder)",
      { cause }
    );
  }
  let model: any;
  try {
    model = await use.load();
  } catch (cause) {
    throw new ModelUnavailableError(
      "could not fetch the sentence encoder model weights",
      { cause }
    );
  }
  return {
    name: "universal-sentence-encoder",
    dim: EMBEDDING_DIM,
    async embedBatch(texts: string[]): Promise<number[][]> {
      if (texts.length === 0) {
        return [];
      }
      const tensor = await model.embed(texts);
      try {
        return tensor.arraySync() as number[][];
      } finally {
        tensor.dispose();
      }
    },
  };
}

/**
 * Deterministic offline encoder: signed token hashing into 512
 * dimensions. A stand-in with the same shape contract as the real
 * model, used by the tests and for dry runs without network access.
 */
export function hashEncoder(dim: number = EMBEDDING_DIM): Encoder {
  const fnv1a = (token: string): number => {
    let hash = 0x811c9dc5;
    for (let i = 0; i < token.length; i++) {
      hash ^= token.charCodeAt(i);
      hash = Math.imul(hash, 0x01000193) >>> 0;
    }
    return hash >>> 0;
  };
  return {
    name: "hash",
    dim,
    async embedBatch(texts: string[]): Promise<number[][]> {
      return texts.map((text) => {
        const vector = new Array<number>(dim).fill(0);
        for (const token of text.toLowerCase().split(/\s+/)) {
          if (token === "") {
            continue;
          }
          const h = fnv1a(token);
          vector[(h >>> 1) % dim] += h & 1 ? 1 : -1;
        }
        return vector;
      });
    },
  };
}
