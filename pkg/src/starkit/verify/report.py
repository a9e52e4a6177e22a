"""Verification reports with deterministic JSON serialization."""

from __future__ import annotations

import json
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import mpmath

from ..cyclo.lfunctions import SIGN_CONVENTION
from ..quadfield.local import REC_NORMALIZATION

CONVENTIONS = {
    "stickelberger": SIGN_CONVENTION,
    "reciprocity": REC_NORMALIZATION,
    "L_values": "L(chi_-3, 0) = 1/3",
    "theta_in_identities": "theta(0) = sum_chi L_ST(chi^-1, 0) e_chi (negative of the stickelberger element)",
}


def fingerprint() -> dict[str, str]:
    return dict(CONVENTIONS)


def to_jsonable(x: Any) -> Any:
    """Exact values become strings ('p/q'), numerics become 20-digit strings."""
    if isinstance(x, bool) or x is None or isinstance(x, str):
        return x
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (mpmath.mpf, mpmath.mpc)):
        return mpmath.nstr(x, 20)
    if isinstance(x, float):
        return repr(x)
    if isinstance(x, dict):
        return {str(k): to_jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [to_jsonable(v) for v in x]
    return str(x)


@dataclass
class VerificationReport:
    """verdict is 'pass' iff lhs == rhs in the stated quotient."""

    verifier: str
    instance: dict
    tag: str
    lhs: Any
    rhs: Any
    quotient: str
    verdict: str
    details: dict = field(default_factory=dict)
    conventions: dict = field(default_factory=fingerprint)
    timing: float = 0.0

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def to_obj(self, include_timing: bool = False) -> dict:
        obj = {
            "verifier": self.verifier,
            "instance": to_jsonable(self.instance),
            "tag": self.tag,
            "lhs": to_jsonable(self.lhs),
            "rhs": to_jsonable(self.rhs),
            "quotient": self.quotient,
            "verdict": self.verdict,
            "details": to_jsonable(self.details),
            "conventions": self.conventions,
        }
        if include_timing:
            obj["timing"] = round(self.timing, 3)
        return obj

    def to_json(self, include_timing: bool = False) -> str:
        return json.dumps(self.to_obj(include_timing), sort_keys=True, indent=2)

    def summary_line(self) -> str:
        inst = ", ".join(f"{k}={v}" for k, v in sorted(to_jsonable(self.instance).items()))
        return f"[{self.verdict.upper()}] {self.verifier}({inst})"


def verdict(ok: bool) -> str:
    return "pass" if ok else "fail"


@contextmanager
def timed(report_box: list):
    start = time.perf_counter()
    yield
    if report_box:
        report_box[0].timing = time.perf_counter() - start
