"""Chat-completion providers: live HTTP, canned, recording, and replay.

Every request is identified by a content hash over (stage, messages,
temperature).  Transcripts are JSON-lines of {stage, request_hash, response}
and make replays byte-identical: the same request always yields the stored
response text.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional, Sequence, Union

API_KEY_ENV = "ROOMLAYOUT_API_KEY"
DEFAULT_BASE_URL = "https://api.openai.com/v1"
DEFAULT_MODEL = "gpt-4"
DEFAULT_MAX_TOKENS = 2000


@dataclass(frozen=True)
class ChatRequest:
    stage: str
    messages: tuple[dict, ...]  # {"role": ..., "content": ...}
    temperature: float = 0.2
    max_tokens: int = DEFAULT_MAX_TOKENS


def request_hash(request: ChatRequest) -> str:
    payload = {
        "stage": request.stage,
        "messages": list(request.messages),
        "temperature": request.temperature,
    }
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


class Provider:
    """Single-call chat-completion surface."""

    def complete(self, request: ChatRequest) -> str:
        raise NotImplementedError


class HttpProvider(Provider):
    """Live provider speaking the common chat-completions HTTP dialect.

    The API key comes from the environment; constructing without one fails
    early so a misconfigured run dies before any pipeline work.
    """

    def __init__(
        self,
        model: str = DEFAULT_MODEL,
        base_url: str = DEFAULT_BASE_URL,
        api_key: Optional[str] = None,
        timeout: float = 120.0,
    ):
        self.model = model
        self.base_url = base_url.rstrip("/")
        self.api_key = api_key if api_key is not None else os.environ.get(API_KEY_ENV)
        self.timeout = timeout
        if not self.api_key:
            raise ValueError(f"no API key: set {API_KEY_ENV} or pass api_key")

    def complete(self, request: ChatRequest) -> str:
        import requests

        resp = requests.post(
            f"{self.base_url}/chat/completions",
            headers={"Authorization": f"Bearer {self.api_key}"},
            json={
                "model": self.model,
                "messages": list(request.messages),
                "temperature": request.temperature,
                "max_tokens": request.max_tokens,
            },
            timeout=self.timeout,
        )
        resp.raise_for_status()
        return resp.json()["choices"][0]["message"]["content"]


class CannedProvider(Provider):
    """Scripted provider for tests and fixture authoring.

    Responses are either a per-stage queue (consumed in order) or a callable
    (request) -> text for full control.
    """

    def __init__(
        self,
        responses: Union[dict[str, Sequence[str]], Callable[[ChatRequest], str]],
    ):
        if callable(responses):
            self._fn = responses
            self._queues = None
        else:
            self._fn = None
            self._queues = {stage: list(items) for stage, items in responses.items()}
        self.requests: list[ChatRequest] = []

    def complete(self, request: ChatRequest) -> str:
        self.requests.append(request)
        if self._fn is not None:
            return self._fn(request)
        queue = self._queues.get(request.stage)
        if not queue:
            raise KeyError(f"no canned response left for stage {request.stage!r}")
        return queue.pop(0)


@dataclass
class TranscriptStore:
    """Ordered (stage, request_hash, response) records with JSONL persistence."""

    records: list[dict] = field(default_factory=list)

    def record(self, stage: str, digest: str, response: str) -> None:
        self.records.append({"stage": stage, "request_hash": digest, "response": response})

    def lookup(self, digest: str) -> Optional[str]:
        for rec in self.records:
            if rec["request_hash"] == digest:
                return rec["response"]
        return None

    def save(self, path: Union[str, Path]) -> None:
        with open(path, "w") as fh:
            for rec in self.records:
                fh.write(json.dumps(rec, sort_keys=True) + "\n")

    @classmethod
    def load(cls, path: Union[str, Path]) -> "TranscriptStore":
        records = []
        with open(path) as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                rec = json.loads(line)
                for key in ("stage", "request_hash", "response"):
                    if key not in rec:
                        raise ValueError(f"transcript record missing {key!r}")
                records.append(rec)
        return cls(records)


class ReplayMissError(KeyError):
    def __init__(self, request: ChatRequest, digest: str):
        self.request = request
        self.digest = digest
        super().__init__(
            f"no transcript entry for stage {request.stage!r} (hash {digest[:12]}...)"
        )


class ReplayProvider(Provider):
    """Serves responses from a transcript; never touches the network."""

    def __init__(self, store: TranscriptStore):
        self.store = store

    def complete(self, request: ChatRequest) -> str:
        digest = request_hash(request)
        response = self.store.lookup(digest)
        if response is None:
            raise ReplayMissError(request, digest)
        return response


class RecordingProvider(Provider):
    """Delegates to an inner provider and records every exchange."""

    def __init__(self, inner: Provider, store: TranscriptStore):
        self.inner = inner
        self.store = store

    def complete(self, request: ChatRequest) -> str:
        response = self.inner.complete(request)
        self.store.record(request.stage, request_hash(request), response)
        return response
