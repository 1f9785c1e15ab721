import { MalformedInputLineError } from "./errors.js";

export interface TextRecord {
  id: string;
  text: string;
}

/**
 * Parse `id<TAB>text` content. Blank lines are skipped; a non-blank line
 * without a tab is malformed. Text may itself contain further tabs.
 */
export function parseTexts(content: string): TextRecord[] {
  const records: TextRecord[] = [];
  const lines = content.split("\n");
  for (let i = 0; i < lines.length; i++) {
    const line = lines[i].replace(/\r$/, "");
    if (line.trim() === "") {
      continue;
    }
    const tab = line.indexOf("\t");
    if (tab < 0) {
      throw new MalformedInputLineError(`line ${i + 1}: expected id<TAB>text`);
    }
    records.push({ id: line.slice(0, tab), text: line.slice(tab + 1) });
  }
  return records;
}
