"""Signed logarithms as truncated distributions.

The plus/minus logarithms are infinite products over cyclotomic levels of one
parity,

    plus:   prod_{j} (1/p) prod_{n >= 1} Phi_{p^(2n)}  (u^{-j}(1+X)) / p
    minus:  prod_{j} (1/p) prod_{n >= 1} Phi_{p^(2n-1)}(u^{-j}(1+X)) / p

with j running over r consecutive twists starting at the shift.  Each level's
factor tends to 1 in the (p, X)-adic topology, so inside a window mod
(p^M, X^N) the product stabilizes: construction stops at the first level of
the right parity whose factor is indistinguishable from 1 in the window *and*
whose cyclotomic degree exceeds the window length.  Both facts are recorded.

All per-factor and per-twist 1/p normalizations are carried as a single
valuation offset over integral coefficient arithmetic, so nothing is lost to
division.  The unsigned logarithm is the product of classical p-adic
logarithm series log_p(u^{-j}(1+X)), assembled from exact rational
coefficients; the product identity tying the three together is checked
numerically by :func:`log_identity_check` (and, independently, in the test
suite against a rational-arithmetic oracle).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction

from ._kernel import geometric_sum, polymul, polypow
from .distributions import Distribution
from .scalars import PadicScalar, Precision, _vp
from .series import IwasawaElement, Series, u_for

__all__ = ["LogKind", "pollack_log", "log_identity_check", "log_p_unit"]

_KINDS = ("plus", "minus", "full")


@dataclass(frozen=True)
class LogKind:
    """Which logarithm: plus/minus/full, how many twists r, and the shift."""

    kind: str
    r: int
    shift: int = 0

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"kind must be one of {_KINDS}")
        if self.r < 1:
            raise ValueError("r must be a positive integer")
        if self.shift < 0:
            raise ValueError("shift must be nonnegative")

    @property
    def order(self) -> Fraction:
        return Fraction(self.r, 2) if self.kind != "full" else Fraction(self.r)


def _series_from_cells(cells, prec: Precision, W: int, caps=None) -> Series:
    """Wrap integer coefficients known mod p^W into a Series.

    ``caps`` optionally limits the claimed absolute precision per coefficient
    (used to account for the discarded tail of an infinite product).
    """
    p = prec.p
    pW = p**W
    coeffs = []
    for n, c in enumerate(cells):
        c %= pW
        a = W if caps is None else min(W, caps[n])
        if c == 0:
            coeffs.append(PadicScalar.inexact_zero(prec, a))
        else:
            coeffs.append(PadicScalar(prec, 0, c, W).reduce_abs(a))
    return Series(prec, tuple(coeffs), None, None, is_polynomial=False)


def _factor_is_trivial(cells, p: int, M: int) -> bool:
    """Phi/p == 1 in the window, i.e. Phi == p mod (p^(M+1), X^N)."""
    q = p ** (M + 1)
    if (cells[0] - p) % q:
        return False
    return all(c % q == 0 for c in cells[1:])


def _signed_product(kind: str, j: int, p: int, u: int, W: int, N: int, M: int):
    """One twist's worth of the plus/minus product, as integer cells.

    Returns (cells, included_count, stop_level): the product of every factor
    of the right parity below the stop level, computed mod (p^W, X^N).
    """
    pW = p**W
    uj = pow(pow(u, -1, pW), j, pW)
    x = [uj % pW, uj % pW][:N]  # u^{-j}(1+X), truncated
    want_even = kind == "plus"
    prod = [1]
    count = 0
    m = 0
    # levels certainly stabilize a little past M + log_p(N); 4M + 16 is a
    # generous safety margin, overrunning it means a genuine bug
    limit = 4 * M + 16
    while True:
        m += 1
        if m > limit:  # pragma: no cover - safety net
            raise RuntimeError(f"cyclotomic product did not stabilize by level {m}")
        if m > 1:
            x = polypow(x, p, pW, N)  # now (u^{-j}(1+X))^(p^(m-1))
        if (m % 2 == 0) != want_even:
            continue
        phi = geometric_sum(x, p, pW, N)
        deg = p ** (m - 1) * (p - 1)
        if deg > N and _factor_is_trivial(phi, p, M):
            return prod, count, m
        prod = polymul(prod, phi, pW, N)
        count += 1


def log_p_unit(t: int, p: int, rel: int, prec: Precision) -> PadicScalar:
    """log_p(1 + t) for p | t, from the alternating series, to rel digits."""
    if t % p:
        raise ValueError("argument must be a principal unit: p must divide t")
    n_max = rel + 16
    acc = Fraction(0)
    term = Fraction(1)
    for n in range(1, n_max + 1):
        term *= t
        acc += term * Fraction((-1) ** (n + 1), n)
    return PadicScalar.from_fraction(acc, prec, rel=rel)


def _classical_log_series(j: int, prec: Precision, W: int, u: int) -> Series:
    """log_p(u^{-j}(1+X)) = -j*log_p(u) + log(1+X), exact coefficients."""
    lam = log_p_unit(u - 1, prec.p, W + 4, prec)
    const = lam * (-j)
    coeffs: list = [const]
    for n in range(1, prec.x_prec):
        coeffs.append(
            PadicScalar.from_fraction(Fraction((-1) ** (n + 1), n), prec, rel=W)
        )
    return Series(prec, tuple(coeffs), None, None, is_polynomial=False)


def pollack_log(spec: LogKind, prec: Precision) -> Distribution:
    """Construct the requested logarithm in the window given by ``prec``.

    The body is diagonal (the same series in every tame component).  The
    returned distribution carries the cyclotomic factors that fit the window
    as certificates, the stabilization level, and a meta dict recording the
    truncation evidence per twist.
    """
    p, M, N = prec.p, prec.p_prec, prec.x_prec
    u = u_for(p)
    js = range(spec.shift, spec.shift + spec.r)

    if spec.kind == "full":
        W = M + spec.r * (_ceil_log(N, p) + 1) + 6
        body_series = Series.constant(1, prec, rel=W)
        for j in js:
            body_series = body_series * _classical_log_series(j, prec, W, u)
        factors = [
            (m, j)
            for j in js
            for m in range(0, _max_level_fitting(p, N) + 1)
        ]
        meta = {"kind": "full", "window": (M, N), "twists": list(js)}
        return Distribution(
            IwasawaElement.from_diagonal(body_series),
            spec.order,
            tuple(factors),
            None,
            meta,
        )

    # plus/minus: estimate the per-twist factor count to size the working
    # modulus, then build integrally and apply the whole offset at once
    est_levels = M + _ceil_log(max(N, 2), p) + 8
    W = M + spec.r * (est_levels // 2 + 3) + 6
    total = [1]
    offset = 0
    per_twist = []
    pW = p**W
    for j in js:
        cells, count, stop = _signed_product(spec.kind, j, p, u, W, N, M)
        total = polymul(total, cells, pW, N)
        offset += count + 1  # each factor's 1/p plus the twist's own 1/p
        per_twist.append({"twist": j, "factors": count, "stabilized_at": stop})
    if all(t["factors"] == 0 for t in per_twist):
        warnings.warn(
            "window too small to include any nontrivial cyclotomic factor; "
            "the logarithm degenerates to a constant",
            stacklevel=2,
        )
    # the discarded tail multiplies the integral product by 1 + O(p^M), so
    # coefficient n is only trusted to (min valuation through degree n) + M
    run = W
    caps = []
    for c in total:
        c %= pW
        if c:
            run = min(run, _vp(c, p))
        caps.append(min(W, run + M))
    body = _series_from_cells(total, prec, W, caps).shift_val(-offset)
    parity = 0 if spec.kind == "plus" else 1
    factors = [
        (m, j)
        for j in js
        for m in range(1, _max_level_fitting(p, N) + 1)
        if m % 2 == parity % 2
    ]
    meta = {
        "kind": spec.kind,
        "window": (M, N),
        "per_twist": per_twist,
        "valuation_offset": offset,
    }
    return Distribution(
        IwasawaElement.from_diagonal(body),
        spec.order,
        tuple(factors),
        min(t["stabilized_at"] for t in per_twist),
        meta,
    )


def _ceil_log(n: int, p: int) -> int:
    out = 0
    q = 1
    while q < n:
        q *= p
        out += 1
    return out


def _max_level_fitting(p: int, N: int) -> int:
    """Largest m with deg Phi_{p^m} + 1 <= N (0 when only the linear factor fits)."""
    m = 0
    while p**m * (p - 1) + 1 <= N:
        m += 1
    return m


def log_identity_check(p: int, r: int, prec: Precision | None = None) -> dict:
    """Verify p^(2r) * prod_j Tw_{-j}(X) * logplus_r * logminus_r = log_r.

    Everything is rebuilt at an internally elevated p-adic precision so the
    verdict covers the requested window.  The report carries the largest
    detected deviation ("exact-zero" when the difference is indistinguishable
    from zero) and the valuation depth to which zero-ness was confirmed.
    """
    if prec is None:
        prec = Precision(p, 30, 64)
    M, N = prec.p_prec, prec.x_prec
    # elevated enough that the signed products' truncation-tail caps still
    # leave at least M trusted digits on every coefficient
    lift = 6 + 2 * r * (1 + _ceil_log(max(N, 2), p))
    work = Precision(p, M + lift, N)
    plus = pollack_log(LogKind("plus", r), work)
    minus = pollack_log(LogKind("minus", r), work)
    full = pollack_log(LogKind("full", r), work)

    from .series import cyclotomic_factor

    lin = Series.constant(1, work, rel=M + 10)
    for j in range(r):
        lin = lin * cyclotomic_factor(0, j, work, rel=M + 10)
    lhs = (plus.body * minus.body).components[0] * lin
    lhs = lhs.shift_val(2 * r)
    diff = lhs - full.body.components[0]

    worst = None  # valuation of a known-nonzero coefficient, if any
    confirmed = None  # depth to which zero-ness is confirmed
    for n in range(min(len(diff.a), N)):
        c = diff.coeff(n)
        if c.is_exact_zero:
            continue
        if c.is_zero_to_precision:
            b = c.abs_prec
            confirmed = b if confirmed is None else min(confirmed, b)
        else:
            v = c.valuation()
            worst = v if worst is None else min(worst, v)
    ok = worst is None
    return {
        "p": p,
        "r": r,
        "window": {"p_prec": M, "x_prec": N},
        "ok": ok,
        "deviation": "exact-zero" if ok else str(worst),
        "zero_confirmed_to": None if confirmed is None else min(confirmed, M),
    }
