"""Run the FastAPI app on a real socket so HTTP clients can reach it."""

from __future__ import annotations

import threading
import time

import uvicorn


class LiveServer:
    def __init__(self, app):
        self._config = uvicorn.Config(app, host="127.0.0.1", port=0, log_level="warning")
        self._server = uvicorn.Server(self._config)
        self._thread = threading.Thread(target=self._server.run, daemon=True)

    def __enter__(self) -> str:
        self._thread.start()
        deadline = time.time() + 10
        while not self._server.started:
            if time.time() > deadline:
                raise RuntimeError("server did not start")
            time.sleep(0.02)
        port = self._server.servers[0].sockets[0].getsockname()[1]
        return f"http://127.0.0.1:{port}"

    def __exit__(self, *exc_info):
        self._server.should_exit = True
        self._thread.join(timeout=10)
