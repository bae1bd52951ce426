"""
External evaluator process adapter

Fronts any program that speaks the line-delimited JSON protocol:

    request  (stdin,  one line): {"genome": [x0, x1, ...], "seed": N}
    response (stdout, one line): {"fitness": X}

One child process is started per request, so a crashed or hung evaluator
never poisons later evaluations. This is the contract a real PhysiCell
wrapper has to satisfy.
"""

from __future__ import annotations

import json
import logging
import math
import os
import shlex
import subprocess
from dataclasses import dataclass
from typing import Dict, Optional, Sequence, Tuple, Union

from src.core.exceptions import ConfigError, EvaluatorTimeout, NonZeroExit, ProtocolError


logger = logging.getLogger(__name__)

DEFAULT_TIMEOUT_S = 600.0


@dataclass(frozen=True)
class ExternalEvaluatorConfig:
    command: Tuple[str, ...]
    timeout_s: float = DEFAULT_TIMEOUT_S
    cwd: Optional[str] = None
    env: Optional[Tuple[Tuple[str, str], ...]] = None

    @classmethod
    def from_dict(cls, data: Dict) -> "ExternalEvaluatorConfig":
        command: Union[str, Sequence[str], None] = data.get("command")
        if not command:
            raise ConfigError("external objective needs a 'command'")
        if isinstance(command, str):
            command = shlex.split(command)
        timeout = float(data.get("timeout_s", DEFAULT_TIMEOUT_S))
        if timeout <= 0:
            raise ConfigError(f"timeout_s must be positive, got {timeout}")
        env = data.get("env")
        return cls(
            command=tuple(str(c) for c in command),
            timeout_s=timeout,
            cwd=data.get("cwd"),
            env=tuple(sorted((str(k), str(v)) for k, v in env.items())) if env else None,
        )


def encode_request(genome: Sequence[float], seed: int) -> str:
    return json.dumps({"genome": [float(x) for x in genome], "seed": int(seed)}) + "\n"


def decode_response(text: str) -> float:
    """Parse the first non-empty stdout line; anything but {"fitness": <number>} is a ProtocolError."""
    line = next((ln for ln in text.splitlines() if ln.strip()), None)
    if line is None:
        raise ProtocolError("evaluator produced no response line")
    try:
        payload = json.loads(line)
    except json.JSONDecodeError as e:
        raise ProtocolError(f"response is not valid JSON: {line[:200]!r}") from e
    if not isinstance(payload, dict) or "fitness" not in payload:
        raise ProtocolError(f"response lacks the 'fitness' key: {line[:200]!r}")
    value = payload["fitness"]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ProtocolError(f"'fitness' must be a number, got {value!r}")
    return float(value)


class ExternalEvaluator:
    """Runs the configured command once per request."""

    def __init__(self, config: ExternalEvaluatorConfig):
        self.config = config

    def evaluate(self, genome: Sequence[float], seed: int) -> float:
        request = encode_request(genome, seed)
        env = {**os.environ, **dict(self.config.env)} if self.config.env else None
        try:
            completed = subprocess.run(
                list(self.config.command),
                input=request,
                capture_output=True,
                text=True,
                encoding="utf-8",
                timeout=self.config.timeout_s,
                cwd=self.config.cwd,
                env=env,
            )
        except subprocess.TimeoutExpired as e:
            logger.error("External evaluator timed out after %.1f s (seed %s)", self.config.timeout_s, seed)
            raise EvaluatorTimeout(
                f"evaluator exceeded {self.config.timeout_s} s: {' '.join(self.config.command)}"
            ) from e
        except OSError as e:
            raise NonZeroExit(f"could not start evaluator {self.config.command[0]!r}: {e}") from e

        if completed.returncode != 0:
            stderr_tail = (completed.stderr or "").strip()[-500:]
            logger.error("External evaluator exited with status %s: %s", completed.returncode, stderr_tail)
            raise NonZeroExit(f"evaluator exited with status {completed.returncode}: {stderr_tail}")

        value = decode_response(completed.stdout)
        if not math.isfinite(value):
            logger.warning("External evaluator returned non-finite fitness %r for seed %s", value, seed)
        logger.debug("External evaluator seed=%s fitness=%r", seed, value)
        return value


def external_evaluate(cfg: ExternalEvaluatorConfig, g: Sequence[float], seed: int) -> float:
    return ExternalEvaluator(cfg).evaluate(g, seed)
