import { describe, expect, it } from "vitest";

import { captureEdit } from "../src/capture.js";
import { applySeq, cpSplit, cpToUtf16 } from "../src/diffs.js";

describe("captureEdit basics", () => {
  it("captures a single typed character", () => {
    expect(captureEdit("abc", "abXc", 3)).toEqual([{ op: "i", pos: 2, text: "X" }]);
  });

  it("captures a backspace", () => {
    expect(captureEdit("abc", "ac", 1)).toEqual([{ op: "d", pos: 1, len: 1 }]);
  });

  it("decomposes a selection replace into delete then insert", () => {
    expect(captureEdit("abc", "aXYc", 3)).toEqual([
      { op: "d", pos: 1, len: 1 },
      { op: "i", pos: 1, text: "XY" },
    ]);
  });

  it("returns nothing for identical text", () => {
    expect(captureEdit("same", "same", 2)).toEqual([]);
  });

  it("uses the caret to disambiguate repeated characters", () => {
    // "aa" -> "aaa" typed at the start: caret lands at 1.
    expect(captureEdit("aa", "aaa", 1)).toEqual([{ op: "i", pos: 0, text: "a" }]);
    // Same text typed at the end: caret lands at 3.
    expect(captureEdit("aa", "aaa", 3)).toEqual([{ op: "i", pos: 2, text: "a" }]);
  });

  it("handles paste over a selection spanning the whole text", () => {
    const diffs = captureEdit("hello", "bye", 3);
    expect(applySeq("hello", diffs)).toBe("bye");
  });

  it("works across astral characters", () => {
    const before = "a\u{1f600}b";
    const after = "a\u{1f600}Xb";
    const caretUtf16 = 4; // after the typed X, in UTF-16 units
    const diffs = captureEdit(before, after, caretUtf16);
    expect(diffs).toEqual([{ op: "i", pos: 2, text: "X" }]);
    expect(applySeq(before, diffs)).toBe(after);
  });
});

/** Deterministic LCG so the scripted session is reproducible. */
function rng(seed: number): () => number {
  let state = seed >>> 0;
  return () => {
    state = (state * 1664525 + 1013904223) >>> 0;
    return state / 2 ** 32;
  };
}

describe("scripted typing session", () => {
  it("round-trips 500 keystrokes", () => {
    const rand = rng(20240);
    const alphabet = "abcdefg \u{1f600}";
    const letters = cpSplit(alphabet);
    let text = "";
    let caret = 0; // code points
    for (let step = 0; step < 500; step++) {
      const chars = cpSplit(text);
      caret = Math.min(caret, chars.length);
      const roll = rand();
      let nextChars: string[];
      let nextCaret: number;
      if (roll < 0.6 || chars.length === 0) {
        // Type one character at the caret.
        const ch = letters[Math.floor(rand() * letters.length)];
        nextChars = [...chars.slice(0, caret), ch, ...chars.slice(caret)];
        nextCaret = caret + 1;
      } else if (roll < 0.8 && caret > 0) {
        // Backspace.
        nextChars = [...chars.slice(0, caret - 1), ...chars.slice(caret)];
        nextCaret = caret - 1;
      } else {
        // Select a short range and type over it.
        const start = Math.floor(rand() * chars.length);
        const span = Math.min(1 + Math.floor(rand() * 3), chars.length - start);
        const ch = letters[Math.floor(rand() * letters.length)];
        nextChars = [...chars.slice(0, start), ch, ...chars.slice(start + span)];
        nextCaret = start + 1;
      }
      const next = nextChars.join("");
      const diffs = captureEdit(text, next, cpToUtf16(next, nextCaret));
      expect(diffs.length).toBeLessThanOrEqual(2);
      expect(applySeq(text, diffs)).toBe(next);
      text = next;
      caret = nextCaret;
    }
    expect(text.length).toBeGreaterThan(0);
  });
});
