"""Rubin-Stark elements over Q against cyclotomic units."""

from __future__ import annotations

import time
from typing import Iterable

import mpmath

from ..cyclo.characters import Subfield
from ..cyclo.lfunctions import is_admissible_T
from ..cyclo.units import cyclotomic_unit, rubin_stark_Q
from .report import VerificationReport, verdict


def verify_rse_cyclotomic(m: int, T: Iterable[int], precision: int = 9,
                          negative_control: bool = False) -> VerificationReport:
    """The numerically solved Rubin-Stark unit of Q(mu_m)^+ equals eps_{m,T} to 10^-precision.

    `negative_control` compares against eps_{m,T'} for a different T'.
    """
    t0 = time.perf_counter()
    T = sorted(set(int(t) for t in T))
    # T = {2} is not torsion-free for real fields, but the log-embedding identity still holds
    admissible = m % 4 != 2 and is_admissible_T(Subfield.plus(m), T)
    dps = max(30, 2 * precision + 10)
    other = None
    if negative_control:
        ell = next(p for p in (3, 5, 7, 11, 13, 17) if m % p and [p] != T)
        other = cyclotomic_unit(m, [ell])
    try:
        r = rubin_stark_Q(m, T, dps=dps, compare_with=other)
    except ValueError as exc:
        raise ValueError(f"precision unachievable: {exc}") from exc
    tol = mpmath.mpf(10) ** (-precision)
    ok = r.matches(tol)
    rep = VerificationReport(
        verifier="rse_cyclotomic",
        instance={"m": m, "T": T, "precision": precision, "negative_control": negative_control},
        tag="rank-one Rubin-Stark element over Q equals the cyclotomic unit",
        lhs={"coordinates_from_L": [mpmath.nstr(x, 15) for x in r.coordinates_from_L]},
        rhs={"coordinates_of_unit": [mpmath.nstr(x, 15) for x in r.coordinates_of_unit]},
        quotient=f"archimedean and finite log embeddings, tolerance 1e-{precision}",
        verdict=verdict(ok),
        details={
            "basis": r.basis,
            "arch_max_diff": mpmath.nstr(r.arch_max_diff, 5),
            "finite_max_diff": mpmath.nstr(r.finite_max_diff, 5),
            "coord_max_diff": mpmath.nstr(r.coord_max_diff, 5),
            "v0": r.v0,
            "T_admissible": admissible,
        },
    )
    rep.timing = time.perf_counter() - t0
    return rep
