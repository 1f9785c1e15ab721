/** Error types surfaced by the exporter CLI as machine-readable codes. */

export class ModelUnavailableError extends Error {
  readonly code = "ModelUnavailable";

  constructor(message: string, options?: { cause?: unknown }) {
    super(message, options);
    this.name = "ModelUnavailableError";
  }
}

export class MalformedInputLineError extends Error {
  readonly code = "MalformedInputLine";

  constructor(message: string) {
    super(message);
    this.name = "MalformedInputLineError";
  }
}
