"""Arithmetic in GF(2^32) and the polynomial operations built on it.

Field elements are plain ints in [0, 2^32): bit i holds the coefficient
of x^i of a binary polynomial of degree < 32.  Addition is XOR.
Multiplication is a carry-less product reduced modulo an irreducible
degree-32 polynomial that is selected deterministically (lowest integer
encoding first), so every build works in the same field.

2^32 elements rule out log/exp tables, so multiplication is a
shift-and-xor loop and inversion runs the extended Euclidean algorithm
on bit-packed polynomials.
"""

from __future__ import annotations

from typing import Sequence

FIELD_BITS = 32
FIELD_MASK = 0xFFFFFFFF

# First monic irreducible polynomial of degree 32 in increasing integer
# encoding order, i.e. find_irreducible(32).  Pinned as a constant so
# importing this module does not redo the search; the regression test
# re-derives it.
REDUCTION_POLYNOMIAL = 0x10000008D

_OVERFLOW_BIT = 1 << FIELD_BITS


class ZeroInverse(ZeroDivisionError):
    """Raised when inverting the zero element."""


class DuplicateAbscissa(ValueError):
    """Raised when interpolation points share an x value."""


class ArityMismatch(ValueError):
    """Raised when the number of interpolation points does not fit the degree."""


def gf_add(a: int, b: int) -> int:
    """Sum in GF(2^32); characteristic 2 makes this plain XOR."""
    return a ^ b


def gf_mul(a: int, b: int) -> int:
    """Carry-less product of a and b reduced modulo REDUCTION_POLYNOMIAL."""
    p = 0
    while b:
        if b & 1:
            p ^= a
        b >>= 1
        a <<= 1
        if a & _OVERFLOW_BIT:
            a ^= REDUCTION_POLYNOMIAL
    return p


def gf_inv(a: int) -> int:
    """Multiplicative inverse via the extended Euclidean algorithm.

    Raises:
        ZeroInverse: for a == 0, which has no inverse.
    """
    if a == 0:
        raise ZeroInverse("0 has no multiplicative inverse")
    r0, r1 = REDUCTION_POLYNOMIAL, a
    t0, t1 = 0, 1
    while r1:
        # One polynomial division step: q, r = divmod(r0, r1) over GF(2).
        q = 0
        r = r0
        rb = r1.bit_length()
        while r.bit_length() >= rb:
            shift = r.bit_length() - rb
            q ^= 1 << shift
            r ^= r1 << shift
        r0, r1 = r1, r
        t0, t1 = t1, t0 ^ _clmul(q, t1)
    # r0 is gcd(modulus, a) == 1 because the modulus is irreducible.
    return t0


def poly_eval(coefficients: Sequence[int], x: int) -> int:
    """Evaluate a polynomial (index i = coefficient of x^i) by Horner's rule."""
    acc = 0
    for c in reversed(coefficients):
        acc = gf_mul(acc, x) ^ c
    return acc


def lagrange_interpolate(points: Sequence[tuple[int, int]], degree: int) -> list[int]:
    """Coefficients of the unique degree-<= degree polynomial through the points.

    Expects exactly degree + 1 points with pairwise distinct x values and
    returns degree + 1 coefficients, index i being the coefficient of x^i
    (the leading one may be zero).

    Raises:
        ArityMismatch: wrong number of points for the degree.
        DuplicateAbscissa: two points share an x value.
    """
    k = degree + 1
    if len(points) != k:
        raise ArityMismatch(f"need {k} points for degree {degree}, got {len(points)}")
    xs = [x for x, _ in points]
    if len(set(xs)) != k:
        raise DuplicateAbscissa("interpolation abscissas must be pairwise distinct")

    # Master polynomial prod_i (X + x_i), low-to-high coefficients, degree k.
    master = [1]
    for x in xs:
        nxt = [0] * (len(master) + 1)
        for j, c in enumerate(master):
            nxt[j] ^= gf_mul(c, x)
            nxt[j + 1] ^= c
        master = nxt

    result = [0] * k
    for x, y in points:
        # Synthetic division of master by (X + x): quotient q of degree k-1.
        q = [0] * k
        carry = master[k]
        for j in range(k - 1, -1, -1):
            q[j] = carry
            carry = master[j] ^ gf_mul(carry, x)
        denom = poly_eval(q, x)  # prod_{j != i} (x_i + x_j), never zero here
        scale = gf_mul(y, gf_inv(denom))
        for j in range(k):
            result[j] ^= gf_mul(q[j], scale)
    return result


def find_irreducible(degree: int) -> int:
    """First irreducible monic polynomial of the given degree over GF(2).

    Candidates are walked in increasing integer encoding order and tested
    with Rabin's irreducibility criterion, so the result is deterministic:
    two runs always agree.
    """
    if degree < 1:
        raise ValueError("degree must be >= 1")
    for enc in range(1 << degree, 1 << (degree + 1)):
        if _is_irreducible(enc):
            return enc
    raise AssertionError("unreachable: every degree has irreducible polynomials")


def _clmul(a: int, b: int) -> int:
    """Carry-less (GF(2)[x]) product of two bit-packed polynomials."""
    p = 0
    while a:
        if a & 1:
            p ^= b
        a >>= 1
        b <<= 1
    return p


def _poly_mod(a: int, f: int) -> int:
    fb = f.bit_length()
    while a.bit_length() >= fb:
        a ^= f << (a.bit_length() - fb)
    return a


def _poly_mulmod(a: int, b: int, f: int) -> int:
    return _poly_mod(_clmul(a, b), f)


def _poly_gcd(a: int, b: int) -> int:
    while b:
        a, b = b, _poly_mod(a, b)
    return a


def _prime_factors(n: int) -> set[int]:
    out = set()
    d = 2
    while d * d <= n:
        while n % d == 0:
            out.add(d)
            n //= d
        d += 1
    if n > 1:
        out.add(n)
    return out


def _is_irreducible(f: int) -> bool:
    """Rabin's criterion: x^(2^d) == x mod f, and for every prime p | d
    gcd(x^(2^(d/p)) - x, f) == 1."""
    d = f.bit_length() - 1
    x = _poly_mod(2, f)
    checkpoints = {d // p for p in _prime_factors(d)}
    t = x
    gcd_points = {}
    for k in range(1, d + 1):
        t = _poly_mulmod(t, t, f)
        if k in checkpoints:
            gcd_points[k] = t
    if t != x:
        return False
    for t_k in gcd_points.values():
        if _poly_gcd(t_k ^ x, f) != 1:
            return False
    return True
