/**
 * Turn a textarea change into diffs.
 *
 * Each input event gives us the text before, the text after, and the caret
 * position after the change.  A contiguous insertion or deletion becomes a
 * single diff; a selection replaced by typing decomposes into a delete
 * followed by an insert at the same spot.  The caret disambiguates between
 * equivalent positions (typing "a" in "aa" could be three different
 * inserts); every returned decomposition satisfies
 * `applySeq(before, result) === after`.
 *
 * All positions are code points; `caretUtf16` is the raw selectionStart.
 */

import { Diff, cpSplit, del, insert, utf16ToCp } from "./diffs.js";

export function captureEdit(before: string, after: string, caretUtf16: number): Diff[] {
  if (before === after) return [];
  const b = cpSplit(before);
  const a = cpSplit(after);
  const caret = utf16ToCp(after, caretUtf16);

  if (a.length > b.length) {
    const grown = a.length - b.length;
    const pos = caret - grown;
    if (pos >= 0 && pureInsertAt(b, a, pos, grown)) {
      return [insert(pos, a.slice(pos, pos + grown).join(""))];
    }
  } else if (a.length < b.length) {
    const shrunk = b.length - a.length;
    if (pureDeleteAt(b, a, caret, shrunk)) {
      return [del(caret, shrunk)];
    }
  }

  // General case: trim the common prefix and suffix, replace the middle.
  let prefix = 0;
  const max = Math.min(a.length, b.length);
  while (prefix < max && a[prefix] === b[prefix]) prefix++;
  let suffix = 0;
  while (
    suffix < max - prefix &&
    a[a.length - 1 - suffix] === b[b.length - 1 - suffix]
  ) {
    suffix++;
  }
  const out: Diff[] = [];
  const removed = b.length - prefix - suffix;
  if (removed > 0) out.push(del(prefix, removed));
  const added = a.slice(prefix, a.length - suffix).join("");
  if (added.length > 0) out.push(insert(prefix, added));
  return out;
}

function pureInsertAt(b: string[], a: string[], pos: number, grown: number): boolean {
  for (let i = 0; i < pos; i++) if (a[i] !== b[i]) return false;
  for (let i = pos; i < b.length; i++) if (a[i + grown] !== b[i]) return false;
  return true;
}

function pureDeleteAt(b: string[], a: string[], pos: number, shrunk: number): boolean {
  if (pos + shrunk > b.length) return false;
  for (let i = 0; i < pos; i++) if (a[i] !== b[i]) return false;
  for (let i = pos; i < a.length; i++) if (a[i] !== b[i + shrunk]) return false;
  return true;
}
