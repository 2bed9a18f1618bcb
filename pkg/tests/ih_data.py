"""Random intersection-homology slices built from ``oracles.random_ih_data``."""

from __future__ import annotations

import random
from fractions import Fraction

from strata.exact_lin import QQ, FGAbGroup, GroupHom, IntMatrix
from strata.slice_models import IHSliceData

import oracles


def q(rows, n_rows: int, n_cols: int) -> IntMatrix:
    return IntMatrix([[Fraction(x) for x in r] for r in rows], rows=n_rows, cols=n_cols)


def random_ih_slice(rng: random.Random, a: int, r: int, d: int, low: int = 0, k: int = 4):
    """Slice with middle dimension ``a``, ``rank Var = r`` and a ``low``-dimensional pair in degree 0.

    Returns ``(slice, raw)`` where ``raw`` holds the plain-list matrices
    ``P, V, J, K`` and the low-degree pairing ``P0``.
    """
    P, V, J, K = oracles.random_ih_data(rng, a, r, d)
    Qa = FGAbGroup.free(a, QQ)
    rel = {d: Qa}
    ab = {d: Qa}
    pairing = {d: q(P, a, a)}
    P0 = None
    if low and d > 0:
        P0 = oracles.random_invertible(rng, low)
        ab[0] = FGAbGroup.free(low, QQ)
        rel[2 * d] = FGAbGroup.free(low, QQ)
        pairing[0] = q(P0, low, low)
    m = d + 2
    s = IHSliceData(n=m + k, k=k, d=d, rel_groups=rel, abs_groups=ab,
                    var=GroupHom(Qa, Qa, q(V, a, a)), jmap=GroupHom(Qa, Qa, q(J, a, a)),
                    pairing=pairing, label="random")
    return s, {"P": P, "V": V, "J": J, "K": K, "P0": P0}


def bilinear(alpha, P, beta) -> Fraction:
    return sum((Fraction(alpha[i]) * P[i][j] * beta[j] for i in range(len(alpha)) for j in range(len(beta))),
               Fraction(0))


def literal_sign(l: int, d: int) -> int:
    """``(-1)^(l(d + (l-1)/2))`` evaluated through a rational exponent."""
    e = Fraction(l) * (d + Fraction(l - 1, 2))
    assert e.denominator == 1
    return -1 if e.numerator % 2 else 1
