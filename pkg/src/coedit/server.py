"""WebSocket front end for the collaboration service.

One JSON message per frame on the ``/ws`` endpoint.  A connection's first
frame must be a join; afterwards the connection's identity is fixed.  All
commands across all connections funnel through a single :class:`ServiceCore`
on the event loop, so they are processed strictly sequentially; per-client
outbound queues preserve send order.  Any protocol violation gets an err
frame and the connection is closed.
"""

from __future__ import annotations

import asyncio
import http
import logging
import mimetypes
from pathlib import Path

from websockets.asyncio.server import serve

from .service import ServiceCore, ServiceError
from .wire import ProtocolError, decode_msg, encode_msg, err_msg

log = logging.getLogger(__name__)


class CollabServer:
    """Owns the service core and the per-connection plumbing."""

    def __init__(self, doc: str = "", mode: str = "pull", static_dir: str | None = None):
        self.core = ServiceCore(doc, mode=mode)
        self.static_dir = Path(static_dir).resolve() if static_dir else None
        self._queues: dict[str, asyncio.Queue] = {}

    def _route(self, outbounds) -> None:
        for target, msg in outbounds:
            queue = self._queues.get(target)
            if queue is not None:
                queue.put_nowait(encode_msg(msg))

    async def _writer(self, websocket, queue: asyncio.Queue) -> None:
        while True:
            await websocket.send(await queue.get())

    async def handler(self, websocket) -> None:
        if websocket.request.path != "/ws":
            await websocket.close(code=1008, reason="unknown endpoint")
            return
        client = None
        writer = None
        try:
            async for frame in websocket:
                try:
                    msg = decode_msg(frame)
                    if client is None:
                        if msg.get("t") != "join":
                            raise ServiceError("first message must be a join")
                        cid = msg["client"]
                        if cid in self._queues:
                            raise ServiceError(f"client {cid!r} already connected")
                        outbounds = self.core.handle(cid, msg)
                        client = cid
                        queue = self._queues[cid] = asyncio.Queue()
                        writer = asyncio.ensure_future(self._writer(websocket, queue))
                    else:
                        outbounds = self.core.handle(client, msg)
                    self._route(outbounds)
                except (ProtocolError, ServiceError) as exc:
                    log.info("rejecting %s: %s", client or "<unjoined>", exc)
                    await websocket.send(encode_msg(err_msg(str(exc))))
                    break
        finally:
            if writer is not None:
                writer.cancel()
            if client is not None:
                self._queues.pop(client, None)
                self.core.leave(client)

    def process_request(self, connection, request):
        """Serve the static editor page for plain HTTP requests, if enabled."""
        if request.path == "/ws" or "upgrade" in request.headers.get("Connection", "").lower():
            return None
        if self.static_dir is None:
            return connection.respond(http.HTTPStatus.NOT_FOUND, "WebSocket endpoint is /ws\n")
        name = request.path.lstrip("/") or "index.html"
        target = (self.static_dir / name).resolve()
        if not str(target).startswith(str(self.static_dir)) or not target.is_file():
            return connection.respond(http.HTTPStatus.NOT_FOUND, "not found\n")
        body = target.read_bytes()
        response = connection.respond(http.HTTPStatus.OK, "")
        response.body = body
        del response.headers["Content-Type"]
        del response.headers["Content-Length"]
        response.headers["Content-Type"] = (
            mimetypes.guess_type(target.name)[0] or "application/octet-stream"
        )
        response.headers["Content-Length"] = str(len(body))
        return response


async def run_server(
    port: int,
    doc: str = "",
    mode: str = "pull",
    host: str = "127.0.0.1",
    static_dir: str | None = None,
    ready: asyncio.Event | None = None,
    port_box: list | None = None,
) -> None:
    """Serve until cancelled.  Raises ``OSError`` if the port is taken.

    With ``port=0`` the OS picks a port; it is appended to ``port_box``
    (when given) before ``ready`` is set.
    """
    collab = CollabServer(doc, mode=mode, static_dir=static_dir)
    async with serve(
        collab.handler, host, port, process_request=collab.process_request
    ) as server:
        bound = server.sockets[0].getsockname()[1]
        log.info("serving %s mode on ws://%s:%d/ws", mode, host, bound)
        if port_box is not None:
            port_box.append(bound)
        if ready is not None:
            ready.set()
        await server.wait_closed()
