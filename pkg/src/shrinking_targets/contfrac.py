"""Continued fractions of exact rationals and the return times they encode."""
from __future__ import annotations

import heapq
from fractions import Fraction
from typing import Iterator


def cf_terms(x) -> Iterator[int]:
    """Partial quotients a_0, a_1, ... of a rational (Euclid's algorithm)."""
    x = Fraction(x)
    p, q = x.numerator, x.denominator
    while q:
        a, r = divmod(p, q)
        yield a
        p, q = q, r


def convergents(x) -> Iterator[tuple[int, int]]:
    """Successive convergents (p_k, q_k) of ``x``."""
    p0, q0, p1, q1 = 0, 1, 1, 0
    for a in cf_terms(x):
        p0, q0, p1, q1 = p1, q1, a * p1 + p0, a * q1 + q0
        yield p1, q1


def best_return_denominators(theta) -> Iterator[int]:
    """Denominators n with ||n theta|| smaller than for every 1 <= m < n.

    These are the convergent denominators with the duplicated leading 1
    removed; the sequence stops once theta is hit exactly.
    """
    last = 0
    for _, q in convergents(Fraction(theta) % 1):
        if q > last:
            yield q
            last = q


def one_sided_records(theta, side: str) -> Iterator[int]:
    """Times n where ``{n theta}`` (side='above') or ``1 - {n theta}``
    (side='below') beats every earlier time: the intermediate fractions.

    With q_{-1} = 0, q_0 = 1, the upper records are q_k + j q_{k+1}
    (1 <= j <= a_{k+2}) for even k, the lower ones the same for odd k;
    n = 1 opens both lists.
    """
    theta = Fraction(theta) % 1
    yield 1
    if theta == 0:
        return
    terms = list(cf_terms(theta))[1:]  # a_1, a_2, ...
    qs = [0, 1]  # qs[i] = q_{i-1}
    for a in terms:
        qs.append(a * qs[-1] + qs[-2])
    parity = 1 if side == "above" else 0
    last = 1
    for k in range(-1, len(terms) - 1):
        if (k + 1) % 2 != parity:
            continue
        qk, qk1, a = qs[k + 1], qs[k + 2], terms[k + 1]
        for j in range(1, a + 1):
            n = qk + j * qk1
            if n > last:
                yield n
                last = n
    if qs[-1] > last:  # rational theta: the exact period closes both lists
        yield qs[-1]


def merged_records(theta) -> Iterator[int]:
    """Union of upper and lower one-sided records, increasing, no repeats."""
    last = 0
    for n in heapq.merge(one_sided_records(theta, "above"), one_sided_records(theta, "below")):
        if n > last:
            yield n
            last = n


def golden_dyadic(bits: int) -> Fraction:
    """(sqrt(5) - 1) / 2 rounded down to ``bits`` binary digits."""
    from math import isqrt
    s = isqrt(5 << (2 * bits))
    return Fraction((s - (1 << bits)) // 2, 1 << bits)


def fibonacci(n: int) -> int:
    a, b = 0, 1
    for _ in range(n):
        a, b = b, a + b
    return a
