/**
 * Client half of the collaboration protocol, transport- and DOM-free.
 *
 * The server numbers the diff batches it owes each client; `applied` is the
 * highest serial folded into our mirror, `known` the highest ever announced.
 * Puts carry `seen = applied`.  In push mode the server replies to each put
 * with the still-unconfirmed remainder rewritten into our new frame, under
 * our *current* serial; a fresh batch instead advances the serial by one.
 * That is the whole trick: while we have puts in flight we skip incoming
 * batches (their coordinates predate our puts) and apply the final reply,
 * which re-delivers their content rebased.  No transform logic runs here.
 */

import { Diff, applySeq, asDiff } from "./diffs.js";

export type ServerMsg =
  | { t: "doc"; text: string; serial: number }
  | { t: "diffs"; diffs: Diff[]; serial: number }
  | { t: "err"; msg: string };

export interface HandleResult {
  docChanged: boolean;
}

export class ProtocolViolation extends Error {}

export function parseServerMsg(raw: string): ServerMsg {
  let obj: Record<string, unknown>;
  try {
    obj = JSON.parse(raw);
  } catch {
    throw new ProtocolViolation(`unparseable frame: ${raw.slice(0, 80)}`);
  }
  if (obj.t === "doc" && typeof obj.text === "string" && typeof obj.serial === "number") {
    return { t: "doc", text: obj.text, serial: obj.serial };
  }
  if (obj.t === "diffs" && Array.isArray(obj.diffs) && typeof obj.serial === "number") {
    return { t: "diffs", diffs: obj.diffs.map(asDiff), serial: obj.serial };
  }
  if (obj.t === "err" && typeof obj.msg === "string") {
    return { t: "err", msg: obj.msg };
  }
  throw new ProtocolViolation(`unknown frame: ${raw.slice(0, 80)}`);
}

export class EditorCore {
  doc: string | null = null;
  applied = 0;
  known = 0;
  inFlight = 0;
  failure: string | null = null;
  /** Batches that arrived before the document snapshot (defensive only). */
  private preJoin: ServerMsg[] = [];

  constructor(readonly clientId: string, readonly mode: "push" | "pull" = "push") {}

  joinFrame(): string {
    return JSON.stringify({ t: "join", client: this.clientId });
  }

  /** Record locally applied diffs and build their put frame. */
  putFrame(diffs: Diff[], newDoc: string): string {
    if (this.doc === null) throw new ProtocolViolation("edit before join completed");
    this.doc = newDoc;
    if (this.mode === "push" && diffs.length > 0) this.inFlight++;
    return JSON.stringify({ t: "put", diffs, seen: this.applied });
  }

  getFrame(): string {
    return JSON.stringify({ t: "get" });
  }

  handle(msg: ServerMsg): HandleResult {
    if (msg.t === "err") {
      this.failure = msg.msg;
      throw new ProtocolViolation(`server: ${msg.msg}`);
    }
    if (msg.t === "doc") {
      this.doc = msg.text;
      this.applied = this.known = msg.serial;
      this.inFlight = 0;
      const buffered = this.preJoin;
      this.preJoin = [];
      let changed = true;
      for (const m of buffered) changed = this.handle(m).docChanged || changed;
      return { docChanged: changed };
    }
    if (this.doc === null) {
      this.preJoin.push(msg);
      return { docChanged: false };
    }
    if (this.mode === "pull") {
      if (msg.serial < this.known) {
        throw new ProtocolViolation(`serial went backwards to ${msg.serial}`);
      }
      this.known = msg.serial;
      this.apply(msg.diffs, msg.serial);
      return { docChanged: true };
    }
    if (msg.serial === this.known + 1) {
      // Fresh batch; stale for us while a put is in flight.
      this.known = msg.serial;
      if (this.inFlight === 0) {
        this.apply(msg.diffs, msg.serial);
        return { docChanged: true };
      }
      return { docChanged: false };
    }
    if (msg.serial === this.known && this.inFlight > 0) {
      // Put reply: the unapplied remainder, rebased into our frame.
      this.inFlight--;
      if (this.inFlight === 0) {
        this.apply(msg.diffs, msg.serial);
        return { docChanged: msg.diffs.length > 0 };
      }
      return { docChanged: false };
    }
    throw new ProtocolViolation(
      `serial ${msg.serial} out of order (known ${this.known}, inFlight ${this.inFlight})`
    );
  }

  private apply(diffs: Diff[], serial: number): void {
    this.doc = applySeq(this.doc as string, diffs);
    this.applied = serial;
  }
}
