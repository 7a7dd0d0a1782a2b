/**
 * Edit values and their application, mirroring the server's semantics.
 *
 * Positions count Unicode code points, not UTF-16 units, so both ends of
 * the wire index documents identically.  JavaScript strings are UTF-16;
 * helpers below convert at the boundary.
 */

export type Insert = { op: "i"; pos: number; text: string };
export type Delete = { op: "d"; pos: number; len: number };
export type Diff = Insert | Delete;

export function insert(pos: number, text: string): Insert {
  if (pos < 0 || text.length === 0) throw new Error(`bad insert ${pos} ${JSON.stringify(text)}`);
  return { op: "i", pos, text };
}

export function del(pos: number, len: number): Delete {
  if (pos < 0 || len < 1) throw new Error(`bad delete ${pos} ${len}`);
  return { op: "d", pos, len };
}

/** Code-point length of a string. */
export function cpLength(s: string): number {
  let n = 0;
  for (const _ of s) n++;
  return n;
}

/** Code-point array (one entry per scalar value). */
export function cpSplit(s: string): string[] {
  return Array.from(s);
}

/** Convert a UTF-16 offset (e.g. textarea selectionStart) to code points. */
export function utf16ToCp(s: string, utf16: number): number {
  return cpLength(s.slice(0, utf16));
}

/** Convert a code-point offset back to UTF-16 units. */
export function cpToUtf16(s: string, cp: number): number {
  let units = 0;
  let count = 0;
  for (const ch of s) {
    if (count === cp) break;
    units += ch.length;
    count++;
  }
  return units;
}

export function applyDiff(doc: string, diff: Diff): string {
  const chars = cpSplit(doc);
  if (diff.op === "i") {
    if (diff.pos > chars.length) throw new Error(`insert at ${diff.pos} outside doc of ${chars.length}`);
    chars.splice(diff.pos, 0, ...cpSplit(diff.text));
    return chars.join("");
  }
  if (diff.pos + diff.len > chars.length) {
    throw new Error(`delete ${diff.pos}+${diff.len} outside doc of ${chars.length}`);
  }
  chars.splice(diff.pos, diff.len);
  return chars.join("");
}

export function applySeq(doc: string, diffs: readonly Diff[]): string {
  for (const d of diffs) doc = applyDiff(doc, d);
  return doc;
}

/** Validate a decoded wire object as a diff. */
export function asDiff(obj: unknown): Diff {
  const d = obj as Record<string, unknown>;
  if (d && d.op === "i" && typeof d.pos === "number" && typeof d.text === "string") {
    return insert(d.pos, d.text);
  }
  if (d && d.op === "d" && typeof d.pos === "number" && typeof d.len === "number") {
    return del(d.pos, d.len);
  }
  throw new Error(`not a diff: ${JSON.stringify(obj)}`);
}
