"""Cyclotomic units and numeric Rubin-Stark elements for K = Q(mu_m)^+ over Q."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable

import mpmath
from sympy import factorint

from ..groupring import GroupRingElement
from .characters import Subfield, _crt, unit_group
from .lfunctions import _as_set, delta_T, leading_term_numeric


@dataclass(frozen=True)
class CyclotomicUnit:
    """prod_a (1 - zeta_m^a)^{c_a} for exponent = sum_a c_a sigma_a in Z[(Z/m)^x]."""

    m: int
    exponent: GroupRingElement

    def factors(self) -> list[tuple[int, int]]:
        """(a, c_a) pairs, a a residue mod m."""
        U = unit_group(self.m)
        return sorted((U.exp(g), int(c)) for g, c in self.exponent.coeffs.items())

    def log_abs(self, k: int = 1, dps: int = 30):
        """log |sigma_k(eps)| under zeta_m -> exp(2 pi i / m)."""
        with mpmath.workdps(dps + 10):
            total = mpmath.mpf(0)
            for a, c in self.factors():
                total += c * mpmath.log(abs(1 - mpmath.expjpi(mpmath.mpf(2 * a * k) / self.m)))
            return total

    def value(self, k: int = 1, dps: int = 30):
        with mpmath.workdps(dps + 10):
            out = mpmath.mpc(1)
            for a, c in self.factors():
                out *= (1 - mpmath.expjpi(mpmath.mpf(2 * a * k) / self.m)) ** c
            return out

    def conjugate_log_abs(self, dps: int = 30) -> list:
        return [self.log_abs(k, dps) for k in unit_group(self.m).residues]


def cyclotomic_unit(m: int, T: Iterable[int] = ()) -> CyclotomicUnit:
    """epsilon_{m,T} = (1 - zeta_m)^{delta_T}, delta_T = prod_{l in T} (1 - l sigma_l^{-1})."""
    if m < 2:
        raise ValueError("m >= 2 required")
    T = _as_set(T)
    if any(m % ell == 0 for ell in T):
        raise ValueError("T must be prime to m")
    return CyclotomicUnit(m, delta_T(unit_group(m), T))


# ---------------------------------------------------------------- Rubin-Stark over Q


@dataclass
class _Places:
    """Places of K = Q(mu_m)^+ above S = {infinity} + {p | m}."""

    K: Subfield
    primes: list[int]
    decomposition: dict[int, frozenset]  # p -> decomposition subgroup in Gal(K/Q)
    finite: list[tuple[int, tuple]]      # (p, coset representative)

    @property
    def arch(self) -> list[tuple]:
        return list(self.K.galois.elements)

    def size(self) -> int:
        return len(self.arch) + len(self.finite)


def _places(m: int) -> _Places:
    K = Subfield.plus(m)
    G = K.galois
    U = K.units
    primes = sorted(factorint(m))
    dec = {}
    finite = []
    for p in primes:
        pk = p ** factorint(m)[p]
        mp = m // pk
        gens = [a for a in U.residues if a % mp == 1 % mp]
        if mp > 1:
            gens.append(_crt([(1, pk), (p % mp, mp)]))
        D = G.subgroup([K.frobenius(a) for a in gens])
        dec[p] = frozenset(D.elements)
        reps = []
        seen = set()
        for g in G.elements:
            coset = frozenset(G.add(g, h) for h in D.elements)
            if coset not in seen:
                seen.add(coset)
                reps.append(min(coset))
        finite.extend((p, r) for r in sorted(reps))
    return _Places(K, primes, dec, finite)


def _lambda_of_log_data(pl: _Places, arch_log, finite_log) -> list:
    """lambda(a) = -sum_w log|a|_w w, given log|a| on each place."""
    return [-x for x in arch_log] + [-x for x in finite_log]


def _log_abs_arch(pl: _Places, m: int, terms: list[tuple[int, Fraction]], rational: dict[int, int], dps: int):
    """log|iota(tau^{-1} x)| for each tau, x = prod_b |1 - zeta_m^b|^{c_b} * prod p^{e_p}."""
    K = pl.K
    out = []
    with mpmath.workdps(dps + 10):
        for tau in pl.arch:
            t = K.units.exp(K.qmap.lift(K.galois.neg(tau)))
            s = mpmath.mpf(0)
            for b, c in terms:
                s += mpmath.mpf(c.numerator) / c.denominator * mpmath.log(
                    abs(1 - mpmath.expjpi(mpmath.mpf(2 * b * t) / m)))
            for p, e in rational.items():
                s += e * mpmath.log(p)
            out.append(s)
    return out


def _log_abs_finite(pl: _Places, m: int, terms: list[tuple[int, Fraction]], rational: dict[int, int], dps: int):
    """log|x|_w at finite places; every place above p has the same value for these x.

    ord_p N_{K/Q}(x) = (1/2) sum_b c_b ord_p N_{Q(mu_m)/Q}(1 - zeta_m^b) + [K:Q] e_p, and
    N_{Q(mu_m)/Q}(1 - zeta_m^b) = Phi_d(1)^{phi(m)/phi(d)}, d = m / gcd(m, b).
    """
    from .field import euler_phi

    K = pl.K
    out = []
    with mpmath.workdps(dps + 10):
        for p, _rep in pl.finite:
            g = K.galois.order // len(pl.decomposition[p])
            ordp = Fraction(0)
            for b, c in terms:
                d = m // gcd(m, b)
                fac = factorint(d)
                if len(fac) == 1 and p in fac:
                    ordp += c * Fraction(euler_phi(m), euler_phi(d)) / 2
            ordp += K.degree * rational.get(p, 0)
            out.append(-mpmath.mpf(ordp.numerator) / ordp.denominator / g * mpmath.log(p))
    return out


def _lambda_vector(pl, m, terms, rational, dps):
    return _lambda_of_log_data(pl, _log_abs_arch(pl, m, terms, rational, dps),
                               _log_abs_finite(pl, m, terms, rational, dps))


def _generators(m: int) -> list[tuple[str, list[tuple[int, Fraction]], dict[int, int]]]:
    """Cyclotomic S-units eta_{d,a} = |1 - zeta_d^a|^2 (d | m, d >= 3) and the primes p | m."""
    gens = []
    for d in range(3, m + 1):
        if m % d:
            continue
        seen = set()
        for a in range(1, d):
            if gcd(a, d) != 1 or a in seen:
                continue
            seen.update({a, d - a})
            b = a * (m // d)
            gens.append((f"eta({d},{a})", [(b, Fraction(1)), (m - b, Fraction(1))], {}))
    for p in sorted(factorint(m)):
        gens.append((f"{p}", [], {p: 1}))
    return gens


def _independent_rows(rows, tol):
    """Indices of a maximal independent subset (Gram-Schmidt with tolerance)."""
    basis, ortho = [], []
    for i, r in enumerate(rows):
        v = mpmath.matrix(r)
        for q in ortho:
            v = v - (q.T * v)[0] * q
        n = mpmath.norm(v)
        if n > tol:
            ortho.append(v / n)
            basis.append(i)
    return basis


def _solve(rows, target):
    """Least-squares coordinates c with sum c_j rows[j] = target; returns (c, residual)."""
    A = mpmath.matrix(rows).T
    b = mpmath.matrix(target)
    c = mpmath.lu_solve(A.T * A, A.T * b)
    res = mpmath.norm(A * c - b)
    return [c[i] for i in range(len(rows))], res


def theta_first_order(m: int, T: Iterable[int] = (), dps: int = 30) -> dict:
    """theta^{(1)}_{K,S,T} for K = Q(mu_m)^+, S = {infinity} + {p | m}, as {tau: real}."""
    K = Subfield.plus(m)
    S = sorted(factorint(m))
    T = _as_set(T)
    G = K.galois
    chis = K.characters()
    vals = {}
    with mpmath.workdps(dps + 10):
        Lstar = {c: leading_term_numeric(c.inverse(), S, T, r=1, dps=dps) for c in chis}
        for tau in G.elements:
            a = K.units.exp(K.qmap.lift(G.neg(tau)))
            s = mpmath.mpc(0)
            for c in chis:
                v = c.value(a)
                s += Lstar[c] * (v.embed(1, dps + 10) if hasattr(v, "embed") else v)
            vals[tau] = s / G.order
    return vals


@dataclass
class RubinStarkReport:
    m: int
    T: tuple
    v0: int
    rank: int
    basis: list[str]
    coordinates_from_L: list
    coordinates_of_unit: list
    arch_max_diff: object
    finite_max_diff: object
    coord_max_diff: object
    max_imag_part: object

    def matches(self, tol) -> bool:
        return self.arch_max_diff < tol and self.finite_max_diff < tol and self.coord_max_diff < tol


def rubin_stark_Q(m: int, T: Iterable[int], dps: int = 30, v0: int | None = None,
                  compare_with: CyclotomicUnit | None = None) -> RubinStarkReport:
    """Solve lambda(eps) = theta^{(1)} (w_infinity - w_0) numerically and compare with eps_{m,T}.

    K = Q(mu_m)^+, S = {infinity} + {p | m}, V = {infinity}; w_0 is a place above v0
    (default: the least prime dividing m).  `compare_with` replaces eps_{m,T} as the
    unit compared against (used for negative controls).
    """
    if m < 3 or m % 4 == 2:
        raise ValueError("m >= 3 with m not 2 mod 4 required")
    T = tuple(sorted(_as_set(T)))
    if not T or any(m % ell == 0 for ell in T):
        raise ValueError("T must be nonempty and prime to m")
    pl = _places(m)
    v0 = pl.primes[0] if v0 is None else v0
    if v0 not in pl.primes:
        raise ValueError("v0 must be a finite place of S")
    G = pl.K.galois
    with mpmath.workdps(dps + 10):
        theta = theta_first_order(m, T, dps)
        imag = max(abs(mpmath.im(x)) for x in theta.values())
        target = [mpmath.re(theta[tau]) for tau in pl.arch]
        D0 = pl.decomposition[v0]
        for p, rep in pl.finite:
            if p != v0:
                target.append(mpmath.mpf(0))
                continue
            coset = {G.add(rep, h) for h in D0}
            target.append(-sum(mpmath.re(theta[g]) for g in coset))

        gens = _generators(m)
        rows = [_lambda_vector(pl, m, terms, rat, dps) for _, terms, rat in gens]
        tol = mpmath.mpf(10) ** (-(dps // 2))
        idx = _independent_rows(rows, tol)
        if len(idx) != pl.size() - 1:
            raise ValueError("regulator matrix is ill-conditioned or the generators do not span")
        basis_rows = [rows[i] for i in idx]
        c_L, res_L = _solve(basis_rows, target)

        eps = cyclotomic_unit(m, T) if compare_with is None else compare_with
        terms = [(a, Fraction(c)) for a, c in eps.factors()]
        lam_eps = _lambda_vector(pl, m, terms, {}, dps)
        c_U, res_U = _solve(basis_rows, lam_eps)
        if max(res_L, res_U) > tol:
            raise ValueError("target outside the span of the regulator basis")

        na = len(pl.arch)
        arch = max(abs(a - b) for a, b in zip(target[:na], lam_eps[:na]))
        fin = max((abs(a - b) for a, b in zip(target[na:], lam_eps[na:])), default=mpmath.mpf(0))
        coord = max(abs(a - b) for a, b in zip(c_L, c_U))
    return RubinStarkReport(m, T, v0, len(idx), [gens[i][0] for i in idx], c_L, c_U, arch, fin, coord, imag)
