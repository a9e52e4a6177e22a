"""Registry of verifiers and the batch runner for JSON configs."""

from __future__ import annotations

import inspect
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from .brumer import verify_brumer_stark, verify_fitt0_cyclic
from .darmon import verify_darmon
from .report import VerificationReport
from .rse import verify_rse_cyclotomic
from .tori import verify_gross_tori

REGISTRY: dict[str, Callable[..., VerificationReport]] = {
    "brumer_stark": verify_brumer_stark,
    "fitt0_cyclic": verify_fitt0_cyclic,
    "darmon": verify_darmon,
    "gross_tori": verify_gross_tori,
    "rse_cyclotomic": verify_rse_cyclotomic,
}

DEFAULT_SUITE = Path(__file__).resolve().parent.parent / "data" / "default_suite.json"


class ConfigError(ValueError):
    """A config that cannot be run; `line` is 1-based when known."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        where = f"line {line}" + (f", column {column}" if column else "") if line else "config"
        super().__init__(f"{where}: {message}")
        self.line = line
        self.column = column


@dataclass
class RunResult:
    reports: list[VerificationReport] = field(default_factory=list)

    @property
    def exit_code(self) -> int:
        return 0 if all(r.passed for r in self.reports) else 1

    def summary(self) -> dict:
        n_pass = sum(r.passed for r in self.reports)
        return {"total": len(self.reports), "passed": n_pass, "failed": len(self.reports) - n_pass}

    def to_obj(self, include_timing: bool = False) -> dict:
        return {"summary": self.summary(),
                "reports": [r.to_obj(include_timing) for r in self.reports]}

    def to_json(self, include_timing: bool = False) -> str:
        return json.dumps(self.to_obj(include_timing), sort_keys=True, indent=2)


def _entry_lines(text: str) -> list[int]:
    """1-based line of each top-level list entry (best effort, used for diagnostics)."""
    lines, depth, line = [], 0, 1
    in_str = esc = False
    for ch in text:
        if ch == "\n":
            line += 1
        if in_str:
            if esc:
                esc = False
            elif ch == "\\":
                esc = True
            elif ch == '"':
                in_str = False
            continue
        if ch == '"':
            in_str = True
        elif ch in "[{":
            if depth == 1 and ch == "{":
                lines.append(line)
            depth += 1
        elif ch in "]}":
            depth -= 1
    return lines


def parse_config(text: str) -> list[tuple[str, dict, int | None]]:
    """Validate a config: a JSON list of {"verifier": name, "params": {...}} objects.

    Other keys (e.g. "note") are allowed and ignored.
    """
    if not text.strip():
        return []
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(exc.msg, exc.lineno, exc.colno) from None
    if not isinstance(data, list):
        raise ConfigError("top level must be a list of verifications", 1)
    lines = _entry_lines(text)
    out = []
    for i, entry in enumerate(data):
        line = lines[i] if i < len(lines) else None
        if not isinstance(entry, dict):
            raise ConfigError(f"entry {i} is not an object", line)
        name = entry.get("verifier")
        if name not in REGISTRY:
            raise ConfigError(f"unknown verifier {name!r}; known: {sorted(REGISTRY)}", line)
        params = entry.get("params", {})
        if not isinstance(params, dict):
            raise ConfigError(f"entry {i}: params must be an object", line)
        accepted = inspect.signature(REGISTRY[name]).parameters
        extra = sorted(set(params) - set(accepted))
        if extra:
            raise ConfigError(f"entry {i}: unknown parameters {extra} for {name}", line)
        out.append((name, params, line))
    return out


def run_verification(name: str, **params) -> VerificationReport:
    if name not in REGISTRY:
        raise ConfigError(f"unknown verifier {name!r}; known: {sorted(REGISTRY)}")
    return REGISTRY[name](**params)


def run_config(path: str | Path) -> RunResult:
    """Run every verification listed in the config, in order."""
    text = Path(path).read_text()
    result = RunResult()
    for name, params, _ in parse_config(text):
        result.reports.append(run_verification(name, **params))
    return result
