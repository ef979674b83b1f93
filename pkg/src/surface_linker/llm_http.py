"""Minimal HTTP transport for the LLM adapter contract.

The endpoint receives the prompt as a UTF-8 ``text/plain`` POST body and
answers with the model's reply as plain text.
"""

from __future__ import annotations

import urllib.request


class HttpLlmClient:
    def __init__(self, endpoint: str, timeout: float = 60.0):
        self.endpoint = endpoint
        self.timeout = timeout

    def ask(self, prompt: str) -> str:
        req = urllib.request.Request(
            self.endpoint, data=prompt.encode("utf-8"), method="POST",
            headers={"Content-Type": "text/plain; charset=utf-8"})
        with urllib.request.urlopen(req, timeout=self.timeout) as resp:
            return resp.read().decode("utf-8")
