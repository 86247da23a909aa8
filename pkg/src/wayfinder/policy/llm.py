"""Chat-completion client for the landmark-choice prompt, plus a replay transport."""
from __future__ import annotations

import base64
import json
import os
import socket
import urllib.error
import urllib.request
from dataclasses import dataclass, field
from pathlib import Path

from ..memory import MemoryBank
from .planners import Choice, ParseError, PromptBundle, parse_choice

KEY_ENV = "WAYFINDER_LLM_KEY"
ENDPOINT_ENV = "WAYFINDER_LLM_ENDPOINT"

CORRECTION = (
    "Your previous answer could not be used ({error}). Reply with your reasoning "
    "followed by the index of an unvisited landmark from the JSON in brackets, e.g. [3]."
)


class TransportError(RuntimeError):
    pass


class PolicyFailure(RuntimeError):
    """Retries exhausted without a valid choice."""

    def __init__(self, message: str, errors: list[str]):
        super().__init__(message)
        self.errors = errors


def build_messages(bundle: PromptBundle) -> list[dict]:
    user: list[dict] = [{"type": "text", "text": bundle.instruction_text}]
    if bundle.map_image is not None:
        b64 = base64.b64encode(bundle.map_image).decode("ascii")
        user.append({"type": "image_url", "image_url": {"url": f"data:image/png;base64,{b64}"}})
    return [
        {"role": "system", "content": bundle.system_text},
        {"role": "user", "content": user},
    ]


class HttpTransport:
    """POSTs an OpenAI-style chat-completion body and returns the reply text."""

    def __init__(self, endpoint: str | None = None, model: str = "gpt-4o", timeout: float = 30.0, api_key=None):
        self.endpoint = endpoint or os.environ.get(ENDPOINT_ENV)
        if not self.endpoint:
            raise ValueError(f"no LLM endpoint given and {ENDPOINT_ENV} is unset")
        self.model = model
        self.timeout = timeout
        self.api_key = api_key if api_key is not None else os.environ.get(KEY_ENV)

    def complete(self, messages: list[dict]) -> str:
        body = json.dumps({"model": self.model, "messages": messages}).encode("utf-8")
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        req = urllib.request.Request(self.endpoint, data=body, headers=headers, method="POST")
        try:
            with urllib.request.urlopen(req, timeout=self.timeout) as resp:
                payload = json.loads(resp.read().decode("utf-8"))
        except (urllib.error.URLError, socket.timeout, TimeoutError, ConnectionError) as e:
            raise TransportError(f"request failed: {e}") from e
        except json.JSONDecodeError as e:
            raise TransportError(f"response is not JSON: {e}") from e
        try:
            return payload["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError) as e:
            raise TransportError(f"unexpected response shape: {e}") from e


@dataclass
class ReplayTransport:
    """Serves recorded replies in order from JSON lines.

    Each line is ``{"response": text}`` or ``{"error": text}``; an error line
    raises :class:`TransportError` when served.
    """

    records: list[dict]
    position: int = 0
    requests: list = field(default_factory=list)

    @classmethod
    def from_file(cls, path) -> "ReplayTransport":
        lines = Path(path).read_text(encoding="utf-8").splitlines()
        return cls([json.loads(line) for line in lines if line.strip()])

    def complete(self, messages: list[dict]) -> str:
        self.requests.append(messages)
        if self.position >= len(self.records):
            raise TransportError("replay transcript exhausted")
        rec = self.records[self.position]
        self.position += 1
        if "error" in rec:
            raise TransportError(rec["error"])
        return rec["response"]


class RecordingTransport:
    """Wraps a transport and appends every reply to a JSON-lines transcript."""

    def __init__(self, inner, path):
        self.inner = inner
        self.path = Path(path)

    def complete(self, messages: list[dict]) -> str:
        try:
            text = self.inner.complete(messages)
        except TransportError as e:
            self._append({"error": str(e)})
            raise
        self._append({"response": text})
        return text

    def _append(self, rec: dict) -> None:
        with self.path.open("a", encoding="utf-8") as fh:
            fh.write(json.dumps(rec) + "\n")


@dataclass
class LLMClient:
    transport: object
    max_retries: int = 2


def llm_choose(client: LLMClient, bundle: PromptBundle, bank: MemoryBank | None = None) -> Choice:
    """Ask for a landmark; on a bad reply, retry with the error as a new user turn.

    At most ``max_retries + 1`` requests are made.  Raises
    :class:`PolicyFailure` when none yields a valid, unvisited index.
    """
    bank = bank if bank is not None else bundle.bank
    if bank is None:
        raise ValueError("llm_choose needs the bank to validate the reply")
    messages = build_messages(bundle)
    errors: list[str] = []
    for _ in range(client.max_retries + 1):
        try:
            text = client.transport.complete(messages)
        except TransportError as e:
            errors.append(f"transport: {e}")
            continue
        try:
            return parse_choice(text, bank)
        except ParseError as e:
            errors.append(f"{type(e).__name__}: {e}")
            messages = messages + [
                {"role": "assistant", "content": text},
                {"role": "user", "content": CORRECTION.format(error=e)},
            ]
    raise PolicyFailure(f"no valid choice after {len(errors)} attempts", errors)
