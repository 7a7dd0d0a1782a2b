"""JSON message codec for the collaboration service.

One message per WebSocket frame.  Client to server::

    {"t": "join", "client": ID}
    {"t": "put", "diffs": [...], "seen": N}
    {"t": "get"}

Server to client::

    {"t": "doc", "text": S, "serial": N}
    {"t": "diffs", "diffs": [...], "serial": N}
    {"t": "err", "msg": S}

``serial`` counts the diff batches created for that client so far; a put's
``seen`` echoes the highest serial the client had applied when it made the
edits.  Diffs use the canonical encoding from :mod:`coedit.diffs`.  Decoded
messages are plain dicts with the diff arrays turned into tuples.
"""

from __future__ import annotations

import json

from .diffs import DiffSeq, decode_seq, encode_seq


class ProtocolError(Exception):
    """A frame that does not parse or violates the message schema."""


def join_msg(client: str) -> dict:
    return {"t": "join", "client": client}


def put_msg(diffs: DiffSeq, seen: int) -> dict:
    return {"t": "put", "diffs": diffs, "seen": seen}


def get_msg() -> dict:
    return {"t": "get"}


def doc_msg(text: str, serial: int) -> dict:
    return {"t": "doc", "text": text, "serial": serial}


def diffs_msg(diffs: DiffSeq, serial: int) -> dict:
    return {"t": "diffs", "diffs": diffs, "serial": serial}


def err_msg(msg: str) -> dict:
    return {"t": "err", "msg": msg}


def encode_msg(msg: dict) -> str:
    """Message dict to wire JSON; diff tuples become canonical arrays."""
    out = dict(msg)
    if "diffs" in out:
        out["diffs"] = encode_seq(out["diffs"])
    return json.dumps(out)


def _field(obj: dict, name: str, kind: type) -> object:
    if name not in obj:
        raise ProtocolError(f"message missing field {name!r}")
    value = obj[name]
    if not isinstance(value, kind) or isinstance(value, bool):
        raise ProtocolError(f"field {name!r} must be {kind.__name__}")
    return value


def decode_msg(text: str | bytes) -> dict:
    """Wire JSON to a validated message dict, or :class:`ProtocolError`."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProtocolError(f"invalid JSON: {exc}") from None
    if not isinstance(obj, dict):
        raise ProtocolError("message must be a JSON object")
    tag = obj.get("t")
    if tag == "join":
        return join_msg(str(_field(obj, "client", str)))
    if tag == "put":
        try:
            diffs = decode_seq(obj.get("diffs"))
        except ValueError as exc:
            raise ProtocolError(str(exc)) from None
        return put_msg(diffs, int(_field(obj, "seen", int)))
    if tag == "get":
        return get_msg()
    if tag == "doc":
        return doc_msg(str(_field(obj, "text", str)), int(_field(obj, "serial", int)))
    if tag == "diffs":
        try:
            diffs = decode_seq(obj.get("diffs"))
        except ValueError as exc:
            raise ProtocolError(str(exc)) from None
        return diffs_msg(diffs, int(_field(obj, "serial", int)))
    if tag == "err":
        return err_msg(str(_field(obj, "msg", str)))
    raise ProtocolError(f"unknown message type {tag!r}")
