"""Packed integer polynomial arithmetic.

Everything here works on plain lists of nonnegative ints understood as
coefficients modulo ``mod`` (little-endian: index = X-degree).  Polynomial
products go through Kronecker substitution: coefficients are packed into one
big integer at a byte-aligned chunk width large enough that the raw
convolution cannot carry between chunks, multiplied as integers, and sliced
back out.  CPython's big-int multiply (or gmpy2's, when installed) then does
the heavy lifting in C at subquadratic cost, which is what makes series
products at x_prec ~ 600 cheap.

The same trick handles the multidimensional *cyclic* convolutions of the tame
group rings at Kolyvagin levels: each axis is padded to 2d-1 cells so the
acyclic product cannot wrap, then folded back mod d.
"""

from __future__ import annotations

from math import prod

try:  # gmpy2 is optional; plain ints are fine, just slower on huge operands
    from gmpy2 import mpz as _mpz
except ImportError:  # pragma: no cover - exercised only without gmpy2
    _mpz = None


def _bigmul(x: int, y: int) -> int:
    if _mpz is None:
        return x * y
    return int(_mpz(x) * _mpz(y))


def _pack(cells: list[int], cb: int) -> int:
    buf = bytearray(cb * len(cells))
    for i, v in enumerate(cells):
        if v:
            buf[i * cb : i * cb + (v.bit_length() + 7) // 8] = v.to_bytes(
                (v.bit_length() + 7) // 8, "little"
            )
    return int.from_bytes(buf, "little")


def polymul(A: list[int], B: list[int], mod: int, trunc: int | None = None) -> list[int]:
    """Coefficients of A*B mod ``mod``, truncated to ``trunc`` terms."""
    if not A or not B or mod == 1:
        n = 0 if (not A or not B) else len(A) + len(B) - 1
        if trunc is not None:
            n = min(n, trunc)
        return [0] * n
    out_len = len(A) + len(B) - 1
    if trunc is not None:
        out_len = min(out_len, trunc)
    if out_len <= 0:
        return []
    # chunk sizing assumes entries < mod; normalize so callers may pass
    # coefficients carried at a wider working modulus
    if any(a >= mod or a < 0 for a in A):
        A = [a % mod for a in A]
    if any(b >= mod or b < 0 for b in B):
        B = [b % mod for b in B]
    bound = (mod - 1) * (mod - 1) * min(len(A), len(B)) + 1
    cb = (bound.bit_length() + 7) // 8
    z = _bigmul(_pack(A, cb), _pack(B, cb))
    zb = z.to_bytes(cb * (len(A) + len(B)), "little")
    return [
        int.from_bytes(zb[i * cb : (i + 1) * cb], "little") % mod
        for i in range(out_len)
    ]


def polypow(A: list[int], e: int, mod: int, trunc: int | None = None) -> list[int]:
    """A**e mod (mod, X^trunc) by binary powering."""
    if e < 0:
        raise ValueError("negative exponent")
    out = [1 % mod]
    if e == 0:
        return out
    base = [a % mod for a in A]
    if trunc is not None:
        base = base[:trunc]
    while e:
        if e & 1:
            out = polymul(out, base, mod, trunc)
        e >>= 1
        if e:
            base = polymul(base, base, mod, trunc)
    return out


def polyadd(A: list[int], B: list[int], mod: int) -> list[int]:
    if len(A) < len(B):
        A, B = B, A
    out = list(A)
    for i, v in enumerate(B):
        out[i] = (out[i] + v) % mod
    return out


def polyscale(A: list[int], s: int, mod: int) -> list[int]:
    s %= mod
    return [a * s % mod for a in A]


def geometric_sum(Y: list[int], p: int, mod: int, trunc: int | None = None) -> list[int]:
    """1 + Y + ... + Y^(p-1) mod (mod, X^trunc), by Horner."""
    acc = [1 % mod]
    for _ in range(p - 1):
        acc = polymul(acc, Y, mod, trunc)
        if not acc:
            acc = [0]
        acc[0] = (acc[0] + 1) % mod
    return acc


def compose_affine(
    A: list[int], c: int, d: int, mod: int, trunc: int | None = None
) -> list[int]:
    """A(c + d*X) mod (mod, X^trunc), by Horner in (c + d*X)."""
    cap = len(A) if trunc is None else min(trunc, len(A))
    if cap <= 0 or not A:
        return []
    c %= mod
    d %= mod
    res: list[int] = []
    for coeff in reversed(A):
        L = min(len(res) + 1, cap)
        new = [0] * L
        for k in range(len(res)):
            v = res[k]
            if v:
                if k < L:
                    new[k] = (new[k] + v * c) % mod
                if k + 1 < L:
                    new[k + 1] = (new[k + 1] + v * d) % mod
        new[0] = (new[0] + coeff) % mod
        res = new
    return res


def cyclic_convolve(
    A: list[int], B: list[int], dims: tuple[int, ...], mod: int
) -> list[int]:
    """Cyclic convolution over Z[Z/d_1 x ... x Z/d_r], flat row-major lists.

    Axis i of the packed layout is padded to 2*d_i - 1 cells, so the acyclic
    integer product cannot wrap within an axis; wrapping is then applied
    explicitly by folding exponents mod d_i.
    """
    n = prod(dims) if dims else 1
    if len(A) != n or len(B) != n:
        raise ValueError("flat length does not match dims")
    if not dims:
        return [A[0] * B[0] % mod]
    ext = [2 * d - 1 for d in dims]
    stride = [1] * len(dims)
    for i in range(1, len(dims)):
        stride[i] = stride[i - 1] * ext[i - 1]
    total_cells = stride[-1] * ext[-1]
    bound = (mod - 1) * (mod - 1) * n + 1
    cb = (bound.bit_length() + 7) // 8

    def pack_nd(T: list[int]) -> int:
        buf = bytearray(cb * total_cells)
        for flat, v in enumerate(T):
            if v:
                f, cell = flat, 0
                for i, d in enumerate(dims):
                    cell += (f % d) * stride[i]
                    f //= d
                v %= mod
                buf[cell * cb : cell * cb + (v.bit_length() + 7) // 8] = v.to_bytes(
                    (v.bit_length() + 7) // 8, "little"
                )
        return int.from_bytes(buf, "little")

    z = _bigmul(pack_nd(A), pack_nd(B))
    zb = z.to_bytes(cb * (total_cells + 1), "little")
    out = [0] * n
    for cell in range(total_cells):
        v = int.from_bytes(zb[cell * cb : (cell + 1) * cb], "little")
        if v:
            f, idx, mult = cell, 0, 1
            for i, d in enumerate(dims):
                idx += ((f % ext[i]) % d) * mult
                f //= ext[i]
                mult *= d
            out[idx] = (out[idx] + v) % mod
    return out
