"""Collecting model responses over a chat-completions style HTTP endpoint.

The output file doubles as the resume journal: records are appended as they
arrive, and a rerun only requests the ids that are not already present.
Failures are retried with exponential backoff, then recorded in a sidecar
errors file without stopping the run.
"""

from __future__ import annotations

import json
import os
import threading
import time
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import requests

from .records import read_instructions, read_responses
from .rules import Instruction

TRANSIENT_STATUS = frozenset({429, 500, 502, 503, 504})
MAX_ATTEMPTS = 3


class ConfigError(ValueError):
    """The endpoint configuration is unusable (missing keys, no credential)."""


@dataclass
class EndpointConfig:
    base_url: str
    model: str
    credential_env: str
    temperature: float = 0.7
    top_p: float = 1.0
    max_tokens: int = 1024
    timeout_s: float = 60.0
    max_in_flight: int = 4
    retry_backoff_s: float = 0.5

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> EndpointConfig:
        missing = {"base_url", "model", "credential_env"} - data.keys()
        if missing:
            raise ConfigError(f"endpoint config is missing keys: {sorted(missing)}")
        allowed = {
            "base_url", "model", "credential_env", "temperature", "top_p",
            "max_tokens", "timeout_s", "max_in_flight", "retry_backoff_s",
        }
        return cls(**{k: v for k, v in data.items() if k in allowed})

    @classmethod
    def from_file(cls, path: str | Path) -> EndpointConfig:
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"endpoint config is not valid JSON: {exc.msg}") from exc
        if not isinstance(data, dict):
            raise ConfigError("endpoint config must be a JSON object")
        return cls.from_dict(data)

    def credential(self) -> str:
        value = os.environ.get(self.credential_env, "")
        if not value:
            raise ConfigError(f"environment variable {self.credential_env} is empty or unset")
        return value


@dataclass
class CollectResult:
    requested: int
    completed: int
    skipped: int
    failed: tuple[str, ...]

    @property
    def partial(self) -> bool:
        return bool(self.failed)


def _post_once(config: EndpointConfig, key: str, prompt: str) -> str:
    url = config.base_url.rstrip("/") + "/chat/completions"
    payload = {
        "model": config.model,
        "messages": [{"role": "user", "content": prompt}],
        "temperature": config.temperature,
        "top_p": config.top_p,
        "max_tokens": config.max_tokens,
    }
    response = requests.post(
        url,
        json=payload,
        headers={"Authorization": f"Bearer {key}"},
        timeout=config.timeout_s,
    )
    if response.status_code in TRANSIENT_STATUS:
        raise _Transient(f"HTTP {response.status_code}")
    if response.status_code != 200:
        raise _Permanent(f"HTTP {response.status_code}: {response.text[:200]}")
    try:
        content = response.json()["choices"][0]["message"]["content"]
    except (KeyError, IndexError, TypeError, ValueError) as exc:
        raise _Permanent(f"unexpected response body: {exc!r}") from exc
    if not isinstance(content, str):
        raise _Permanent("response content is not a string")
    return content


class _Transient(RuntimeError):
    pass


class _Permanent(RuntimeError):
    pass


def _request_with_retries(config: EndpointConfig, key: str, instruction: Instruction) -> tuple[str, float]:
    last_error: Exception | None = None
    for attempt in range(MAX_ATTEMPTS):
        started = time.monotonic()
        try:
            text = _post_once(config, key, instruction.prompt)
            return text, time.monotonic() - started
        except _Permanent:
            raise
        except (_Transient, requests.ConnectionError, requests.Timeout) as exc:
            last_error = exc
            if attempt < MAX_ATTEMPTS - 1:
                time.sleep(config.retry_backoff_s * (2**attempt))
    raise RuntimeError(f"gave up after {MAX_ATTEMPTS} attempts: {last_error}")


def collect(
    instructions_path: str | Path,
    config: EndpointConfig,
    output_path: str | Path,
) -> CollectResult:
    """Request a response for every instruction that the journal lacks.

    At most ``config.max_in_flight`` requests are outstanding at once.  Each
    output record carries the measured request latency; failures go to
    ``<output>.errors.jsonl`` and leave the run with a partial result.
    """
    key = config.credential()
    instructions = read_instructions(instructions_path)
    output_path = Path(output_path)
    done: set[str] = set()
    if output_path.exists():
        done = set(read_responses(output_path))
    pending = [i for i in instructions if i.id not in done]

    errors_path = output_path.with_name(output_path.name + ".errors.jsonl")
    if errors_path.exists():
        errors_path.unlink()

    write_lock = threading.Lock()
    failed: list[str] = []

    def fetch(instruction: Instruction) -> None:
        try:
            text, latency = _request_with_retries(config, key, instruction)
        except (RuntimeError, requests.RequestException) as exc:
            with write_lock:
                failed.append(instruction.id)
                with open(errors_path, "a", encoding="utf-8") as fh:
                    fh.write(json.dumps({"id": instruction.id, "error": str(exc)}, ensure_ascii=False))
                    fh.write("\n")
            return
        record = {"id": instruction.id, "response": text, "latency_s": round(latency, 4)}
        with write_lock:
            with open(output_path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(record, ensure_ascii=False, sort_keys=True))
                fh.write("\n")

    if pending:
        with ThreadPoolExecutor(max_workers=max(1, config.max_in_flight)) as pool:
            futures = [pool.submit(fetch, instruction) for instruction in pending]
            for future in as_completed(futures):
                future.result()
    else:
        output_path.touch()

    return CollectResult(
        requested=len(pending),
        completed=len(pending) - len(failed),
        skipped=len(done),
        failed=tuple(sorted(failed)),
    )
