/**
 * DOM wiring: one textarea bound to the collaboration service.
 *
 * Every input event is captured as diffs and put immediately, so the outbox
 * lives for at most one round trip.  The textarea always mirrors the
 * protocol core's document after each event-loop turn.
 */

import { captureEdit } from "./capture.js";
import { cpToUtf16, utf16ToCp } from "./diffs.js";
import { EditorCore, ProtocolViolation, parseServerMsg } from "./protocol.js";

function wsUrl(): string {
  const scheme = location.protocol === "https:" ? "wss" : "ws";
  return `${scheme}://${location.host}/ws`;
}

export function mount(textarea: HTMLTextAreaElement, status: HTMLElement): void {
  const core = new EditorCore(`web-${Math.random().toString(36).slice(2, 10)}`, "push");
  const socket = new WebSocket(wsUrl());
  textarea.disabled = true;

  const show = (text: string) => {
    status.textContent = text;
  };

  const freeze = (reason: string) => {
    textarea.disabled = true;
    show(`frozen: ${reason}`);
    socket.close();
  };

  const syncTextarea = () => {
    if (core.doc === null || textarea.value === core.doc) return;
    const caretCp = utf16ToCp(textarea.value, textarea.selectionStart);
    textarea.value = core.doc;
    const utf16 = cpToUtf16(core.doc, caretCp);
    textarea.setSelectionRange(utf16, utf16);
  };

  socket.onopen = () => {
    socket.send(core.joinFrame());
    show(`joining as ${core.clientId}...`);
  };

  socket.onmessage = (event) => {
    try {
      const result = core.handle(parseServerMsg(event.data as string));
      if (core.doc !== null && textarea.disabled) {
        textarea.disabled = false;
        textarea.value = core.doc;
      } else if (result.docChanged) {
        syncTextarea();
      }
      show(`${core.clientId} | serial ${core.applied} | ${core.doc?.length ?? 0} chars`);
    } catch (err) {
      if (err instanceof ProtocolViolation) freeze(err.message);
      else throw err;
    }
  };

  socket.onclose = () => {
    if (!core.failure) show("disconnected");
    textarea.disabled = true;
  };

  textarea.addEventListener("input", () => {
    if (core.doc === null) return;
    const diffs = captureEdit(core.doc, textarea.value, textarea.selectionStart);
    if (diffs.length === 0) return;
    socket.send(core.putFrame(diffs, textarea.value));
    show(`${core.clientId} | serial ${core.applied} | ${core.doc.length} chars`);
  });
}

const area = document.getElementById("doc");
const status = document.getElementById("status");
if (area instanceof HTMLTextAreaElement && status instanceof HTMLElement) {
  mount(area, status);
}
