"""Dirichlet characters with values in Z_p^x, p-adic L-values and series,
and the Euler-factor bookkeeping for the symmetric square.

The cast, roughly in dependency order:

* :class:`DirichletCharacter` — characters of (Z/m)^x whose values are roots
  of unity of order dividing p-1, stored as exponents of a fixed Teichmuller
  generator.  Everything downstream (Bernoulli sums, interpolation factors,
  Euler factors) consumes characters in this form.
* :func:`gen_bernoulli` — generalized Bernoulli numbers B_{n,chi}.
* :func:`kl_value` — the interpolation formula for p-adic L-values at
  s = 1 - n.  This is the oracle of record: the series construction below is
  certified against it and never the other way around.
* :func:`smoothed_moment` / :func:`kl_series` — the measure-theoretic
  construction.  The c-smoothed regularization of the B_1 distribution is a
  genuine Z_p-measure; its twisted moments have a closed form, and the branch
  series is recovered by Newton interpolation through those moments at the
  points u^{-m} - 1.  Divided differences of an integral power series at
  points of pZ_p are p-integral, so every table entry is checked for
  integrality as a construction self-test, and the interpolation tail drops
  one digit per node past the window — the node budget makes the truncation
  error provably smaller than the requested precision.
* :func:`euler_factor_E` / :func:`euler_factor_Eprime` /
  :func:`exceptional_zero_report` — the three-factor products controlling
  trivial zeros of the symmetric square, with exact vanishing flags (each
  factor is 1 minus a root of unity times a power of p, so vanishing is
  decidable from exponents, not from numerics).
* :func:`remove_euler_factors`, :func:`geometric_product` — Iwasawa-algebra
  surgery: multiplying finitely many Euler factors back in, and forming the
  twisted product that factors a symmetric-square element through a
  Kubota-Leopoldt one.

Smoothing constants c are chosen odd, prime to the tame conductor, and
primitive roots mod p^2; for every branch except the trivial-character one
the constant 1 - chi omega^{-1}(c) c is a unit and the smoothing factor is
divided out exactly.  On the trivial branch that division is impossible (the
quotient has its pole on the closed unit disc), so the smoothed series itself
is returned and pointwise values divide the smoothing scalar out at each
evaluation point — costing at most two digits, never more.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import sympy

from .dieudonne import PhiModule
from .distributions import Distribution, divide_exact
from .pollack import log_p_unit
from .scalars import PadicScalar, Precision, PrecisionError, teichmuller
from .series import FiniteCharacter, IwasawaElement, Series, u_for

__all__ = [
    "DirichletCharacter",
    "EulerFactorReport",
    "gen_bernoulli",
    "kl_value",
    "smoothed_moment",
    "kl_series",
    "kl_series_report",
    "kl_branch_values",
    "euler_factor_E",
    "euler_factor_Eprime",
    "exceptional_zero_report",
    "c_smoothing_factor",
    "least_smoothing_c",
    "remove_euler_factors",
    "geometric_product",
    "geometric_ratio",
]


# ----------------------------------------------------------- small utilities


@lru_cache(maxsize=None)
def _primitive_root(p: int) -> int:
    return int(sympy.primitive_root(p))


@lru_cache(maxsize=None)
def _dlog_table(p: int) -> dict:
    """Discrete logarithms mod p with respect to the fixed generator."""
    g = _primitive_root(p)
    table, x = {}, 1
    for e in range(p - 1):
        table[x] = e
        x = x * g % p
    return table


def _ind(p: int, a: int) -> int:
    try:
        return _dlog_table(p)[a % p]
    except KeyError:
        raise ValueError(f"{a} is not a unit mod {p}") from None


def _vp_int(n: int, p: int) -> int:
    if n == 0:
        raise ValueError("valuation of zero")
    e = 0
    while n % p == 0:
        n //= p
        e += 1
    return e


@lru_cache(maxsize=None)
def _bernoulli_number(i: int) -> Fraction:
    # evaluate the polynomial at 0: pins B_1 = -1/2 regardless of which
    # sign convention the ambient sympy uses for the bare number
    return Fraction(sympy.bernoulli(i, 0))


def _bernoulli_poly(n: int, x: Fraction) -> Fraction:
    return sum(
        (math.comb(n, i) * _bernoulli_number(i) * x ** (n - i) for i in range(n + 1)),
        Fraction(0),
    )


def _omega_powers(p: int, prec: Precision, rel: int) -> list:
    """Powers of the fixed Teichmuller generator, index = exponent."""
    base = teichmuller(_primitive_root(p), prec, rel)
    out = [PadicScalar.from_int(1, prec, rel)]
    for _ in range(p - 2):
        out.append(out[-1] * base)
    return out


# -------------------------------------------------------------- characters


@dataclass(frozen=True)
class DirichletCharacter:
    """A character of (Z/modulus)^x with values of order dividing p - 1.

    Values are powers of a fixed generator of the (p-1)-st roots of unity in
    Z_p (the Teichmuller lift of the least primitive root mod p), and
    ``table[a]`` holds the exponent for each residue a, with None off the
    unit group.  Storing exponents keeps every identity exact: products,
    inverses, parity, and vanishing conditions are integer arithmetic mod
    p - 1, and a numeric value is only materialized on request.
    """

    p: int
    modulus: int
    table: tuple
    conductor: int = field(init=False, default=0)

    def __post_init__(self):
        if self.modulus < 1:
            raise ValueError("modulus must be positive")
        if len(self.table) != self.modulus:
            raise ValueError("value table must cover all residues")
        pm1 = self.p - 1
        norm = tuple(None if e is None else e % pm1 for e in self.table)
        object.__setattr__(self, "table", norm)
        for a in range(self.modulus):
            is_unit = math.gcd(a if self.modulus > 1 else 1, self.modulus) == 1
            if (norm[a] is None) == is_unit:
                raise ValueError("table support must be exactly the unit group")
        for a in range(self.modulus):
            if norm[a] is None:
                continue
            for b in range(a, self.modulus):
                if norm[b] is None:
                    continue
                if norm[a * b % self.modulus] != (norm[a] + norm[b]) % pm1:
                    raise ValueError("value table is not multiplicative")
        object.__setattr__(self, "conductor", self._conductor())

    # -- constructors ------------------------------------------------------

    @classmethod
    def trivial(cls, p: int, modulus: int = 1) -> "DirichletCharacter":
        table = tuple(
            0 if math.gcd(a if modulus > 1 else 1, modulus) == 1 else None
            for a in range(modulus)
        )
        return cls(p, modulus, table)

    @classmethod
    def teichmuller_power(cls, p: int, j: int) -> "DirichletCharacter":
        """omega^j as a character mod p."""
        table = [None] * p
        for a in range(1, p):
            table[a] = j * _ind(p, a)
        return cls(p, p, tuple(table))

    @classmethod
    def quadratic(cls, p: int, d: int) -> "DirichletCharacter":
        """The quadratic character of conductor d (d in {1, 3, 4, 8, odd squarefree})."""
        if d == 1:
            return cls.trivial(p)
        half = (p - 1) // 2
        table = [None] * d
        if d % 2 == 1:
            for a in range(1, d):
                if math.gcd(a, d) != 1:
                    continue
                s = int(sympy.jacobi_symbol(a, d))
                table[a] = 0 if s == 1 else half
        elif d == 4:
            table[1], table[3] = 0, half
        elif d == 8:
            table[1], table[3], table[5], table[7] = 0, half, half, 0
        else:
            raise ValueError(f"no quadratic character of conductor {d}")
        ch = cls(p, d, tuple(table))
        if ch.conductor != d:
            raise ValueError(f"{d} is not the conductor of a primitive quadratic character")
        return ch

    # -- structure ---------------------------------------------------------

    def _conductor(self) -> int:
        for dd in sorted(sympy.divisors(self.modulus)):
            ok = True
            for a in range(self.modulus):
                if self.table[a] is None or a % dd != 1 % dd:
                    continue
                if self.table[a] != 0:
                    ok = False
                    break
            if ok:
                return dd
        return self.modulus  # pragma: no cover - the full modulus always works

    def exponent(self, a: int):
        """The exponent of chi(a), or None when chi(a) = 0."""
        if self.modulus == 1:
            return 0
        if math.gcd(a, self.modulus) != 1:
            return None
        return self.table[a % self.modulus]

    def value(self, a: int, prec: Precision, rel: int | None = None) -> PadicScalar:
        e = self.exponent(a)
        if e is None:
            return PadicScalar.exact_zero(prec)
        rel = prec.p_prec if rel is None else rel
        return _omega_powers(self.p, prec, rel)[e]

    def value_fraction(self, a: int) -> Fraction:
        """chi(a) as an exact rational; requires a quadratic-valued character."""
        if not self.is_rational_valued:
            raise ValueError("character values are irrational; use value()")
        e = self.exponent(a)
        if e is None:
            return Fraction(0)
        return Fraction(1) if e == 0 else Fraction(-1)

    @property
    def is_rational_valued(self) -> bool:
        half = (self.p - 1) // 2
        return all(e in (0, half) for e in self.table if e is not None)

    @property
    def is_odd(self) -> bool:
        if self.modulus <= 2:
            return False
        e = self.table[self.modulus - 1]
        half = (self.p - 1) // 2
        if e not in (0, half):
            raise ValueError("value at -1 must be a square root of 1")
        return e == half

    @property
    def order(self) -> int:
        pm1 = self.p - 1
        o = 1
        for e in self.table:
            if e:
                o = math.lcm(o, pm1 // math.gcd(e, pm1))
        return o

    def primitive(self) -> "DirichletCharacter":
        """The primitive character inducing this one."""
        f = self.conductor
        if f == self.modulus:
            return self
        table = [None] * f
        for a in range(f):
            if math.gcd(a if f > 1 else 1, f) != 1:
                continue
            b = a
            while math.gcd(b if self.modulus > 1 else 1, self.modulus) != 1:
                b += f
            table[a] = self.table[b % self.modulus] if self.modulus > 1 else 0
        return DirichletCharacter(self.p, f, tuple(table))

    def __mul__(self, other):
        if not isinstance(other, DirichletCharacter):
            return NotImplemented
        if other.p != self.p:
            raise ValueError("characters live over different primes")
        m = math.lcm(self.modulus, other.modulus)
        table = [None] * m
        for a in range(m):
            if math.gcd(a if m > 1 else 1, m) != 1:
                continue
            e1 = self.exponent(a)
            e2 = other.exponent(a)
            table[a] = e1 + e2
        return DirichletCharacter(self.p, m, tuple(table))

    def inverse(self) -> "DirichletCharacter":
        table = tuple(None if e is None else -e for e in self.table)
        return DirichletCharacter(self.p, self.modulus, table)

    def split_at_p(self):
        """Factor the primitive character as (prime-to-p part, omega-exponent).

        The second entry is None when the conductor is prime to p.  Values of
        order dividing p - 1 cannot see conductor p^2, so the p-part is
        always a plain power of omega.
        """
        psi = self.primitive()
        f = psi.conductor
        vp = _vp_int(f, self.p) if f % self.p == 0 else 0
        if vp == 0:
            return psi, None
        if vp > 1:
            raise ValueError("conductor p^2 is impossible for values of order dividing p-1")
        p, f0 = self.p, f // self.p
        table = [None] * f0
        for a in range(f0):
            if math.gcd(a if f0 > 1 else 1, f0) != 1:
                continue
            b = a
            while b % p != 1 or math.gcd(b if f0 > 1 else 1, f0) != 1:
                b += f0
            table[a] = psi.exponent(b)
        eta0 = DirichletCharacter(p, f0, tuple(table))
        b = 1
        while b % f0 != 1 % f0 or b % p != _primitive_root(p):
            b += 1
        return eta0, psi.exponent(b)


# ------------------------------------------------- generalized Bernoulli


def gen_bernoulli(n: int, eta: DirichletCharacter, prec: Precision | None = None,
                  rel: int | None = None):
    """B_{n, eta} = f^{n-1} sum_a eta(a) B_n(a/f) over the conductor f.

    Quadratic-valued characters give an exact Fraction.  Characters with
    irrational values need a precision context and come back as a
    PadicScalar.  The parity convention is classical: the number vanishes
    unless eta(-1) = (-1)^n, except for the weight-one trivial case
    B_{1,triv} = 1/2.
    """
    if n < 0:
        raise ValueError("Bernoulli index must be nonnegative")
    psi = eta.primitive()
    F = psi.conductor
    units = [a for a in range(1, F + 1) if math.gcd(a, F) == 1] if F > 1 else [1]
    if psi.is_rational_valued:
        tot = Fraction(0)
        for a in units:
            tot += psi.value_fraction(a) * _bernoulli_poly(n, Fraction(a, F))
        return Fraction(F) ** (n - 1) * tot
    if prec is None:
        raise ValueError(
            "character values are irrational over Q; pass a precision context"
        )
    rel = prec.p_prec + 8 if rel is None else rel
    pw = _omega_powers(psi.p, prec, rel)
    tot = PadicScalar.exact_zero(prec)
    for a in units:
        e = psi.exponent(a)
        term = PadicScalar.from_fraction(_bernoulli_poly(n, Fraction(a, F)), prec, rel)
        tot = tot + pw[e] * term
    return tot * PadicScalar.from_fraction(Fraction(F) ** (n - 1), prec, rel)


def _as_scalar(x, prec: Precision, rel: int) -> PadicScalar:
    if isinstance(x, PadicScalar):
        return x
    return PadicScalar.from_fraction(Fraction(x), prec, rel)


# ------------------------------------------------------------ L-values


def kl_value(eta: DirichletCharacter, one_minus_n: int, prec: Precision,
             rel: int | None = None) -> PadicScalar:
    """The p-adic L-value at s = 1 - n, n >= 1, by the interpolation formula

        L_p(eta, 1-n) = -(1 - eta omega^{-n}(p) p^{n-1}) B_{n, eta omega^{-n}} / n.

    Odd characters give exact zero (every branch value vanishes; that is a
    result, not an error).  The only pole of the theory sits at s = 1 on the
    trivial branch, and asking for it raises.
    """
    n = 1 - one_minus_n
    if n <= 0:
        if n == 0 and eta.primitive().conductor == 1:
            raise ValueError(
                "s = 1 is the pole of the zeta branch; no value exists there"
            )
        raise ValueError("values are defined at s = 1 - n with n >= 1")
    if eta.is_odd:
        return PadicScalar.exact_zero(prec)
    rel = prec.p_prec + 6 if rel is None else rel
    p = eta.p
    psi = (eta * DirichletCharacter.teichmuller_power(p, -n)).primitive()
    B = _as_scalar(gen_bernoulli(n, psi, prec, rel), prec, rel)
    ep = psi.exponent(p)
    one = PadicScalar.from_int(1, prec, rel)
    if ep is None:
        euler = one
    else:
        pw = _omega_powers(p, prec, rel)
        euler = one - pw[ep] * PadicScalar.from_fraction(Fraction(p) ** (n - 1), prec, rel)
    return -(euler * B) / PadicScalar.from_int(n, prec, rel)


def smoothed_moment(eta: DirichletCharacter, omega_exponent: int, m: int, c: int,
                    prec: Precision, rel: int | None = None) -> PadicScalar:
    """The m-th moment of omega^a eta against the c-smoothed B_1 measure,

        int_{Zp^x} omega^a(x) eta(x) x^m dmu_c
            = (1 - psi(c) c^{m+1}) (1 - psi(p) p^m) B_{m+1, psi} / (m+1)

    for psi the primitive character inducing omega^a eta.  The closed form
    was pinned against finite-level Riemann sums of the regularized measure
    (see the companion tests); the c-factor kills the von Staudt denominator,
    so the result is always integral — callers rely on that.
    """
    if m < 0:
        raise ValueError("moment index must be nonnegative")
    p = eta.p
    if c <= 1 or math.gcd(c, p * eta.modulus) != 1:
        raise ValueError("smoothing constant must exceed 1 and be prime to p and the modulus")
    rel = prec.p_prec + 8 if rel is None else rel
    psi = (eta * DirichletCharacter.teichmuller_power(p, omega_exponent)).primitive()
    pw = _omega_powers(p, prec, rel)
    one = PadicScalar.from_int(1, prec, rel)

    B = _as_scalar(gen_bernoulli(m + 1, psi, prec, rel), prec, rel)
    ec = psi.exponent(c)
    smooth = one - pw[ec] * PadicScalar.from_fraction(Fraction(c) ** (m + 1), prec, rel)
    ep = psi.exponent(p)
    if ep is None:
        euler = one
    else:
        euler = one - pw[ep] * PadicScalar.from_fraction(Fraction(p) ** m, prec, rel)
    return smooth * euler * B / PadicScalar.from_int(m + 1, prec, rel)


# ------------------------------------------------------------ the series


_NODE_CAP = 400


def _kl_smoothing_c(p: int, eta0: DirichletCharacter, b: int, require_unit: bool) -> int:
    """Least admissible smoothing constant for the branch.

    Odd, prime to 6 and the tame conductor, a primitive root mod p^2, and —
    whenever the branch allows it — making 1 - eta0 omega^b(c) c a unit.
    """
    psi0 = eta0 * DirichletCharacter.teichmuller_power(p, b)
    g0 = _primitive_root(p)
    for c in range(2, 6 * p * p * max(eta0.modulus, 1)):
        if math.gcd(c, 6 * p * eta0.modulus) != 1:
            continue
        if not sympy.is_primitive_root(c, p * p):
            continue
        if require_unit:
            e = psi0.exponent(c)
            if e is None:
                continue
            # 1 - psi0(c) c mod p: teichmuller reduces to g0^e mod p
            if (1 - pow(g0, e, p) * c) % p == 0:
                continue
        return c
    raise ValueError("no admissible smoothing constant found")  # pragma: no cover


def _log_unit_ratio(c: int, p: int, prec: Precision, rel: int) -> PadicScalar:
    """log<c> / log(u): the exponent writing <c> as a power of u."""
    num = log_p_unit(c ** (p - 1) - 1, p, rel + 4, prec) / (p - 1)
    den = log_p_unit(u_for(p) - 1, p, rel + 4, prec)
    return num / den


def _binomial_series(exponent: PadicScalar, length: int, prec: Precision,
                     rel: int) -> list:
    """Coefficients of (1+X)^exponent to the given length."""
    out = [PadicScalar.from_int(1, prec, rel)]
    acc = PadicScalar.from_int(1, prec, rel)
    for k in range(1, length):
        acc = acc * (exponent - (k - 1)) / PadicScalar.from_int(k, prec, rel)
        out.append(acc)
    return out


def _kl_core(eta: DirichletCharacter, branch_i: int, prec: Precision) -> dict:
    """Everything shared by the series and the pointwise branch values."""
    p = prec.p
    pm1 = p - 1
    eta0, d = eta.split_at_p()
    i = branch_i % pm1
    if d is not None:
        if d % pm1 != i:
            raise ValueError(
                "the character already carries omega^%d; branch %d conflicts" % (d, i)
            )
    even = eta0.is_odd == (i % 2 == 1)
    b = (i - 1) % pm1
    pole = eta0.conductor == 1 and i == 0
    out = {
        "p": p,
        "i": i,
        "b": b,
        "eta0": eta0,
        "even": even,
        "pole": pole,
    }
    if not even:
        return out
    c = _kl_smoothing_c(p, eta0, b, require_unit=not pole)
    E = prec.x_prec + prec.p_prec + 4
    if E > _NODE_CAP:
        raise PrecisionError(
            f"window needs {E} interpolation nodes; the stabilization cap is {_NODE_CAP}"
        )
    rel = prec.p_prec + E + _vp_int(math.factorial(E), p) + 16
    wprec = prec.with_p_prec(rel)
    u = u_for(p)

    nodes = [
        PadicScalar.from_fraction(Fraction(u) ** (-m) - 1, wprec, rel)
        for m in range(E)
    ]
    dd = []
    for m in range(E):
        v = -smoothed_moment(eta0, b - m, m, c, wprec, rel)
        if v.val is not None and v.val < 0:
            raise ArithmeticError(
                "smoothed moment came out non-integral; the regularization is broken"
            )
        dd.append(v)
    for col in range(1, E):
        for row in range(E - 1, col - 1, -1):
            dd[row] = (dd[row] - dd[row - 1]) / (nodes[row] - nodes[row - col])
    for entry in dd:
        if entry.val is not None and entry.val < 0:
            raise ArithmeticError(
                "divided differences left Z_p; the moment formula is off"
            )

    N = prec.x_prec
    zero = PadicScalar.exact_zero(wprec)
    poly = [dd[E - 1]]
    for m in range(E - 2, -1, -1):
        nxt = [zero] * min(len(poly) + 1, N)
        for dg in range(len(poly)):
            if dg + 1 < N:
                nxt[dg + 1] = nxt[dg + 1] + poly[dg]
            nxt[dg] = nxt[dg] - nodes[m] * poly[dg]
        nxt[0] = nxt[0] + dd[m]
        poly = nxt

    comps = [Series.zero(wprec) for _ in range(pm1)]
    comps[i] = Series(wprec, tuple(poly), None, None, is_polynomial=False)
    smoothed = IwasawaElement(wprec, comps, u)

    psi0 = eta0 * DirichletCharacter.teichmuller_power(p, b)
    psi0_c = psi0.value(c, wprec, rel) * c
    e_c = _log_unit_ratio(c, p, wprec, rel)
    dcoeffs = _binomial_series(-e_c, N, wprec, rel)
    one = PadicScalar.from_int(1, wprec, rel)
    dser = [one - psi0_c * dcoeffs[0]] + [-(psi0_c * t) for t in dcoeffs[1:]]
    dcomp = [Series.zero(wprec) for _ in range(pm1)]
    dcomp[i] = Series(wprec, tuple(dser), None, None, is_polynomial=False)
    divisor = IwasawaElement(wprec, dcomp, u)

    bracket_c = PadicScalar.from_fraction(Fraction(c), wprec, rel) / teichmuller(
        c % p, wprec, rel
    )
    out.update(
        c=c,
        nodes=E,
        wprec=wprec,
        rel=rel,
        smoothed=smoothed,
        divisor=divisor,
        psi0_c=psi0_c,
        bracket_c=bracket_c,
    )
    return out


def kl_series_report(eta: DirichletCharacter, branch_i: int, prec: Precision):
    """The branch series together with its construction metadata.

    The metadata records the smoothing constant, the node budget, and whether
    the smoothing factor was divided out (every branch except the trivial
    one) or left in place (the trivial branch, whose de-smoothed quotient has
    a pole on the unit disc and is not an Iwasawa element).
    """
    core = _kl_core(eta, branch_i, prec)
    if not core["even"]:
        elem = IwasawaElement.zero(prec)
        return elem, {
            "branch": core["i"],
            "parity": "odd",
            "pole_branch": False,
            "smoothing_removed": True,
            "c": None,
            "nodes": 0,
            "tame_conductor": core["eta0"].conductor,
        }
    if core["pole"]:
        elem = core["smoothed"]
    else:
        quot = divide_exact(
            Distribution(core["smoothed"]), Distribution(core["divisor"])
        )
        elem = quot.body
    report = {
        "branch": core["i"],
        "parity": "even",
        "pole_branch": core["pole"],
        "smoothing_removed": not core["pole"],
        "c": core["c"],
        "nodes": core["nodes"],
        "tame_conductor": core["eta0"].conductor,
    }
    return elem.with_p_prec(prec.p_prec), report


def kl_series(eta: DirichletCharacter, branch_i: int, prec: Precision) -> IwasawaElement:
    """The omega^i-branch Iwasawa series of the p-adic L-function of eta.

    Component ``branch_i`` carries the series K with K(u^s - 1) = L_p(eta
    omega^i, s); all other components are zero.  Evaluation goes through
    ``evaluate_at_character`` with cyclotomic twist t = s = 1 - n, and the
    construction is certified against :func:`kl_value` at those points.  The
    trivial branch comes back still multiplied by its smoothing factor — see
    :func:`kl_series_report`, which says when that happened.
    """
    return kl_series_report(eta, branch_i, prec)[0]


def kl_branch_values(eta: DirichletCharacter, branch_i: int, s_points,
                     prec: Precision) -> list:
    """Branch values L_p(eta omega^i, s) at integers s <= 0, via the series.

    Uniform across branches: the integral smoothed series is evaluated at
    u^s - 1 and the smoothing scalar is divided out pointwise.  On the
    trivial branch this is the only route (the quotient series does not
    exist); elsewhere it agrees with evaluating :func:`kl_series` directly.
    The pointwise division can cost up to two digits, nothing else is lossy.
    """
    core = _kl_core(eta, branch_i, prec)
    if not core["even"]:
        return [PadicScalar.exact_zero(prec) for _ in s_points]
    one = PadicScalar.from_int(1, core["wprec"], core["rel"])
    out = []
    for s in s_points:
        if s > 0:
            raise ValueError("branch values are computed at integers s <= 0")
        num = core["smoothed"].evaluate_at_character(
            FiniteCharacter(core["i"], 0, s)
        )
        den = one - core["psi0_c"] * core["bracket_c"] ** (-s)
        if den.val is not None and den.unit == 0 and den.rel == 0:
            raise ArithmeticError("smoothing scalar vanished; s = 1 is the pole")
        out.append(num / den)
    return out


# ------------------------------------------------- symmetric-square factors


@dataclass(frozen=True)
class EulerFactorReport:
    """Three labelled scalar factors at twist j, with exact vanishing flags."""

    j: int
    labels: tuple
    values: tuple
    zero_flags: tuple
    product: PadicScalar

    def factors(self):
        return tuple(zip(self.labels, self.values, self.zero_flags))


def _one_minus(t: int, v: int, p: int, prec: Precision, rel: int):
    """1 - omega^t p^v with an exact zero test: zero iff v = 0 and t = 0."""
    is_zero = v == 0 and t % (p - 1) == 0
    if is_zero:
        return PadicScalar.exact_zero(prec), True
    u = _omega_powers(p, prec, rel)[t % (p - 1)]
    term = u * PadicScalar.from_fraction(Fraction(p) ** v, prec, rel)
    return PadicScalar.from_int(1, prec, rel) - term, False


def _report(j, specs, prec, rel, p) -> EulerFactorReport:
    labels, values, flags = [], [], []
    one = PadicScalar.from_int(1, prec, rel)
    prod = one
    for label, tv in specs:
        labels.append(label)
        if tv is None:  # chi(p) = 0: the factor collapses to 1
            values.append(one)
            flags.append(False)
            continue
        val, z = _one_minus(tv[0], tv[1], p, prec, rel)
        values.append(val)
        flags.append(z)
    for v in values:
        prod = prod * v
    return EulerFactorReport(j, tuple(labels), tuple(values), tuple(flags), prod)


def euler_factor_E(form: PhiModule, chi: DirichletCharacter, j: int,
                   rel: int | None = None) -> EulerFactorReport:
    """The three-factor product at twist 1 <= j <= k+1 (the left half-range).

    With lambda^2 = -eps(p) p^{k+1} the factors are
    (1 - p^{j-1} chi(p) lambda^{-2}) (1 + chi^{-1}(p) lambda^2 p^{-j})
    (1 - chi^{-1}(p) lambda^2 p^{-j}); the middle one is the classical
    trivial-zero suspect at j = k+1.
    """
    p, k = form.prec.p, form.weight
    if not 1 <= j <= k + 1:
        raise ValueError(f"left-range twist must satisfy 1 <= j <= {k + 1}")
    rel = form.prec.p_prec if rel is None else rel
    half = (p - 1) // 2
    ec = chi.exponent(p)
    ee = _ind(p, form.eps_seed % p)
    if ec is None:
        specs = [(lbl, None) for lbl in _E_LABELS]
    else:
        specs = [
            (_E_LABELS[0], (ec - ee + half, j - k - 2)),
            (_E_LABELS[1], (ee - ec, k + 1 - j)),
            (_E_LABELS[2], (ee - ec + half, k + 1 - j)),
        ]
    return _report(j, specs, form.prec, rel, p)


_E_LABELS = (
    "1 - p^(j-1) chi(p) lambda^(-2)",
    "1 + chi^(-1)(p) lambda^2 p^(-j)",
    "1 - chi^(-1)(p) lambda^2 p^(-j)",
)

_EPRIME_LABELS = (
    "1 - p^(j-1) chi(p) lambda^(-2)",
    "1 + p^(j-1) chi(p) lambda^(-2)",
    "1 - chi^(-1)(p) lambda^2 p^(-j)",
)


def euler_factor_Eprime(form: PhiModule, chi: DirichletCharacter, j: int,
                        rel: int | None = None) -> EulerFactorReport:
    """The three-factor product at twist k+2 <= j <= 2k+2 (the right half-range).

    Here the first two factors pair up as 1 -+ p^{j-1} chi(p) lambda^{-2};
    at j = k+2 exactly one of them vanishes according to the sign of
    chi eps^{-1}(p), and the report's flags say which.
    """
    p, k = form.prec.p, form.weight
    if not k + 2 <= j <= 2 * k + 2:
        raise ValueError(f"right-range twist must satisfy {k + 2} <= j <= {2 * k + 2}")
    rel = form.prec.p_prec if rel is None else rel
    half = (p - 1) // 2
    ec = chi.exponent(p)
    ee = _ind(p, form.eps_seed % p)
    if ec is None:
        specs = [(lbl, None) for lbl in _EPRIME_LABELS]
    else:
        specs = [
            (_EPRIME_LABELS[0], (ec - ee + half, j - k - 2)),
            (_EPRIME_LABELS[1], (ec - ee, j - k - 2)),
            (_EPRIME_LABELS[2], (ee - ec + half, k + 1 - j)),
        ]
    return _report(j, specs, form.prec, rel, p)


def exceptional_zero_report(form: PhiModule, chi: DirichletCharacter, j_range) -> dict:
    """Vanishing-factor survey over a range of twists.

    Flags the twists j = k+1 and j = k+2 as the exceptional pair whenever
    eps chi^{-1}(p) = 1 — the case where the vanishing is forced by the local
    factor rather than the L-value.  Vanishings arising from
    eps chi^{-1}(p) = -1 (the complementary factor of the same pair) are
    listed on their rows like any other; the report never suppresses a zero.
    """
    p, k = form.prec.p, form.weight
    js = sorted(set(int(j) for j in j_range))
    for j in js:
        if not 1 <= j <= 2 * k + 2:
            raise ValueError(f"twist {j} outside [1, {2 * k + 2}]")
    ec = chi.exponent(p)
    ee = _ind(p, form.eps_seed % p)
    exceptional = ec is not None and (ee - ec) % (p - 1) == 0
    rows = []
    for j in js:
        if j <= k + 1:
            rep = euler_factor_E(form, chi, j)
            branch = "E"
        else:
            rep = euler_factor_Eprime(form, chi, j)
            branch = "Eprime"
        rows.append(
            {
                "j": j,
                "branch": branch,
                "report": rep,
                "zero_factors": [
                    lbl for lbl, z in zip(rep.labels, rep.zero_flags) if z
                ],
            }
        )
    return {
        "p": p,
        "k": k,
        "chi_p_exponent": ec,
        "eps_exponent": ee,
        "exceptional": exceptional,
        "exceptional_js": [j for j in js if exceptional and j in (k + 1, k + 2)],
        "rows": rows,
    }


# ------------------------------------------------------------- smoothing


def c_smoothing_factor(c: int, j: int, k: int, chi_eps_at_c):
    """c^2 - c^{2j-2k-2} (chi eps)(c)^{-2}, the two-variable smoothing factor.

    ``chi_eps_at_c`` is the value of chi eps at c, as an exact rational for
    quadratic-valued characters or a PadicScalar otherwise; the return type
    follows the input.  At j = k+1 with (chi eps)(c) = 1 this is c^2 - 1.
    """
    if c <= 1:
        raise ValueError("smoothing constant must exceed 1")
    expo = 2 * j - 2 * k - 2
    if isinstance(chi_eps_at_c, PadicScalar):
        if chi_eps_at_c.val is None or chi_eps_at_c.val != 0:
            raise ValueError("(chi eps)(c) must be a unit")
        c2 = PadicScalar.from_int(c * c, chi_eps_at_c.prec, chi_eps_at_c.rel)
        cc = PadicScalar.from_fraction(
            Fraction(c) ** expo, chi_eps_at_c.prec, chi_eps_at_c.rel
        )
        return c2 - cc * chi_eps_at_c ** (-2)
    w = Fraction(chi_eps_at_c)
    if w == 0:
        raise ValueError("(chi eps)(c) must be a unit")
    return Fraction(c) ** 2 - Fraction(c) ** expo * w ** (-2)


def least_smoothing_c(chi_eps: DirichletCharacter, k: int, coprime_to: int = 1) -> int:
    """Least c > 1, prime to ``coprime_to`` and p, admissible for the even twists.

    Admissible means the smoothing factor is exactly nonzero at every even j
    with k+2 < j <= 2k+2.  The factor vanishes only when c^{2j-2k-4} equals a
    root of unity, which an integer power of c > 1 never is once the exponent
    is positive — so the per-twist check is exponent arithmetic, kept explicit
    rather than assumed.
    """
    p = chi_eps.p
    for c in range(2, 4 * p * p * max(coprime_to, chi_eps.modulus, 2)):
        if math.gcd(c, coprime_to) != 1 or math.gcd(c, p) != 1:
            continue
        e = chi_eps.exponent(c)
        if e is None:
            continue
        ok = True
        for j in range(k + 3, 2 * k + 3):
            if j % 2:
                continue
            # zero iff c^{2j-2k-4} is the root of unity (chi eps)(c)^{-2},
            # i.e. iff the power is trivial and the exponent cancels
            if 2 * j - 2 * k - 4 == 0 and (2 * e) % (p - 1) == 0:
                ok = False
                break
        if ok:
            return c
    raise ValueError("no admissible smoothing constant found")  # pragma: no cover


# ---------------------------------------------- Euler-factor surgery


def remove_euler_factors(F: IwasawaElement, primes, eta: DirichletCharacter,
                         s_shift: int = 0) -> IwasawaElement:
    """Multiply F by (1 - eta(l) l^{s_shift-1} [l]) for each listed prime l.

    [l] is the group element of l in the Iwasawa algebra: on the tame
    component omega^a it acts by omega^a(l), and on the wild variable by
    (1+X)^{e_l} with e_l the exponent writing <l> as a power of u.  Primes
    with eta(l) = 0 contribute the trivial factor; l = p is not an Euler
    factor of the algebra and is rejected.
    """
    p = F.prec.p
    pm1 = p - 1
    N = F.prec.x_prec
    rel = F.prec.p_prec + 8
    out = F
    pw = _omega_powers(p, F.prec, rel)
    for ell in primes:
        ell = int(ell)
        if ell % p == 0:
            raise ValueError(
                f"ell={ell} is divisible by p={p}; only primes away from p "
                "have removable Euler factors"
            )
        if ell < 2:
            raise ValueError("Euler factors are indexed by primes")
        e_eta = eta.exponent(ell)
        if e_eta is None:
            continue
        d = _ind(p, ell)
        e_l = _log_unit_ratio(ell, p, F.prec, rel)
        wild = _binomial_series(e_l, N, F.prec, rel)
        coef = pw[e_eta] * PadicScalar.from_fraction(
            Fraction(ell) ** (s_shift - 1), F.prec, rel
        )
        one = PadicScalar.from_int(1, F.prec, rel)
        comps = []
        for a in range(pm1):
            tame = pw[a * d % pm1]
            head = one - coef * tame * wild[0]
            tail = [-(coef * tame * wk) for wk in wild[1:]]
            comps.append(Series(F.prec, tuple([head] + tail), None, None))
        out = out * IwasawaElement(F.prec, comps, F.u)
    return out


def geometric_product(sym2: IwasawaElement, kl: IwasawaElement, k: int) -> IwasawaElement:
    """The factorization product: sym2 times the (-(k+1))-twist of kl."""
    return sym2 * kl.twist(-(k + 1))


def geometric_ratio(product: IwasawaElement, kl: IwasawaElement, k: int) -> IwasawaElement:
    """Recover sym2 from the factorization product; divisibility may fail.

    Division runs through divide_exact, so a product that is not actually a
    multiple of the twisted kl raises DivisibilityError with the offending
    coefficient named.
    """
    return divide_exact(
        Distribution(product), Distribution(kl.twist(-(k + 1)))
    ).body
