"""Scripted chat-completion server for offline transport tests."""
from __future__ import annotations

import json
import threading
import time
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer


class MockLLMServer:
    """Answers POSTs from a script, one entry per request.

    Entries are reply strings, or dicts with ``delay`` (seconds to stall
    before answering) and/or ``status`` (HTTP error code) and optional
    ``text``.  Past the end of the script the last entry repeats.  Use as a
    context manager; ``url`` is valid inside the block.
    """

    def __init__(self, script):
        self.script = list(script)
        self.requests: list[dict] = []
        self._lock = threading.Lock()
        self._server = None
        self._thread = None

    @property
    def url(self) -> str:
        host, port = self._server.server_address[:2]
        return f"http://{host}:{port}/v1/chat/completions"

    def _next(self):
        with self._lock:
            i = len(self.requests) - 1
            if not self.script:
                return ""
            return self.script[min(i, len(self.script) - 1)]

    def __enter__(self):
        owner = self

        class Handler(BaseHTTPRequestHandler):
            def do_POST(self):
                n = int(self.headers.get("Content-Length", 0))
                body = json.loads(self.rfile.read(n) or b"{}")
                with owner._lock:
                    owner.requests.append(body)
                entry = owner._next()
                if isinstance(entry, str):
                    entry = {"text": entry}
                if entry.get("delay"):
                    time.sleep(entry["delay"])
                status = entry.get("status", 200)
                if status != 200:
                    self.send_error(status)
                    return
                payload = {"choices": [{"message": {"role": "assistant", "content": entry.get("text", "")}}]}
                data = json.dumps(payload).encode("utf-8")
                try:
                    self.send_response(200)
                    self.send_header("Content-Type", "application/json")
                    self.send_header("Content-Length", str(len(data)))
                    self.end_headers()
                    self.wfile.write(data)
                except (BrokenPipeError, ConnectionResetError):
                    pass

            def log_message(self, *args):
                pass

        self._server = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
        self._server.daemon_threads = True
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)
        self._thread.start()
        return self

    def __exit__(self, *exc):
        self._server.shutdown()
        self._server.server_close()
        self._thread.join(timeout=5)
        return False
