"""Acceptance suite: nine exact criteria, each reported as one PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py`` (the lines appear in the terminal
summary) or directly with ``python3 tests/test_acceptance.py``.
"""

from __future__ import annotations

import functools
import itertools
import random
import sys
import time
from fractions import Fraction
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

from strata.checks import Scenario, run_scenario  # noqa: E402
from strata.exact_lin import (QQ, ZZ, FGAbGroup, GroupHom, IntMatrix, hom_subquotients,  # noqa: E402
                              smith_normal_form)
from strata.ih_tower import (KERNEL, LOW, STAB, ih_pairing, ih_tower, orthogonality_check,  # noqa: E402
                             rho_compatibility)
from strata.ordinary_tower import (build_tower, iterated_variation, level_at, sigma_power,  # noqa: E402
                                   stab_power)
from strata.report import dumps_json, render_json, render_text  # noqa: E402
from strata.slice_io import dumps_slice, loads_slice, slices_equal  # noqa: E402
from strata.slice_models import (curve_germ_ih_slice, curve_germ_slice, smooth_base_ih_slice,  # noqa: E402
                                 smooth_pl_base_slice, transverse_morse_slice)

import oracles  # noqa: E402
from ih_data import bilinear, literal_sign, random_ih_slice  # noqa: E402

RESULTS: list[tuple[int, str, bool, str]] = []


def criterion(number: int, title: str):
    def deco(fn):
        @functools.wraps(fn)
        def wrapper(*args, **kwargs):
            start = time.perf_counter()
            try:
                fn(*args, **kwargs)
            except AssertionError as exc:
                RESULTS.append((number, title, False, str(exc).splitlines()[0] if str(exc) else ""))
                raise
            RESULTS.append((number, title, True, f"{time.perf_counter() - start:.2f}s"))
        return wrapper
    return deco


def _within(start: float, limit: float, what: str) -> None:
    took = time.perf_counter() - start
    assert took < limit, f"{what} took {took:.2f}s, limit {limit}s"


# -- 1 ------------------------------------------------------------------------------------------


def _mult_lists(max_s: int, max_u: int):
    for s in range(1, max_s + 1):
        for mults in itertools.combinations_with_replacement(range(1, max_u + 1), s):
            if sum(mults) <= max_u:
                yield mults


@criterion(1, "variation kernel of a curve germ has dimension s - 1 (s <= 3, u <= 6)")
def test_criterion_1_kernel_law():
    start = time.perf_counter()
    seen = 0
    for mults in _mult_lists(3, 6):
        for perm in set(itertools.permutations(mults)):
            s = curve_germ_slice(perm)
            ker = hom_subquotients(s.var_at(0)).kernel
            V, _, _ = oracles.germ_operators(perm)
            oracle_dim = (sum(perm) - 1) - (oracles.rank(V) if V else 0)
            assert ker.free_rank == len(perm) - 1 == oracle_dim, f"mults {perm}: kernel {ker.describe()}"
            seen += 1
    assert seen > 20
    _within(start, 1.0, "kernel law")


# -- 2 ------------------------------------------------------------------------------------------


def _germ_tower(nu: int, n: int):
    return build_tower(curve_germ_slice((nu,), n=n), n)


def _iterated_zero(nu: int, n: int, times: int) -> bool:
    top = _germ_tower(nu, n)[-1]
    return iterated_variation(top, times)[n - 2].is_zero()


@criterion(2, "germ trichotomy: iterated variations vanish; for nu=2, n=3 Var(Γ1) is the suspended difference and dies under J")
def test_criterion_2_trichotomy():
    for nu, n in ((2, 4), (4, 4)):
        start = time.perf_counter()
        assert _iterated_zero(nu, n, nu), f"{nu}-fold variation nonzero at nu={nu}, n={n}"
        _within(start, 1.0, f"case nu={nu}, n={n}")
    for nu, n in ((3, 3), (3, 5)):
        start = time.perf_counter()
        assert _iterated_zero(nu, n, 2 * nu), f"{2 * nu}-fold variation nonzero at nu={nu}, n={n}"
        _within(start, 1.0, f"case nu={nu}, n={n}")

    start = time.perf_counter()
    tower = _germ_tower(2, 3)
    top = tower[-1]
    gamma1 = (1,)                     # p_1 in the relative basis
    diff = (1,)                       # γ2 - γ1 = p_2 - p_1 in the absolute basis
    Gamma1 = stab_power(tower, 2, 1, 0)(gamma1)
    lhs = top.var_at(1)(Gamma1)
    rhs = sigma_power(tower, 2, 1, 0)(diff)
    assert top.abs(1).contains([a - b for a, b in zip(lhs, rhs)]), f"Var(Γ1) = {lhs}, expected {rhs}"
    assert top.rel(1).contains(top.jmap_at(1)(rhs)), "J of the class is not zero"
    _within(start, 1.0, "case nu=2, n=3")


# -- 3 ------------------------------------------------------------------------------------------


@criterion(3, "germ group shapes: H̄_{n-2}(n) ≅ Z^(nu-1) with sum Γj = 0, H_{n-2}(n) ≅ Z^(nu-1) (nu <= 4, n <= 5)")
def test_criterion_3_group_shapes():
    for nu in range(1, 5):
        for n in range(3, 6):
            tower = _germ_tower(nu, n)
            top = tower[-1]
            jt = n - 2
            want = FGAbGroup.free(nu - 1)
            assert top.rel(jt).isomorphic(want), f"nu={nu}, n={n}: H̄ = {top.rel(jt).describe()}"
            assert top.abs(jt).isomorphic(want), f"nu={nu}, n={n}: H = {top.abs(jt).describe()}"
            if nu == 1:
                continue
            g = nu - 1
            gammas = [tuple(int(i == t) for i in range(g)) for t in range(g)] + [tuple([-1] * g)]
            stab = stab_power(tower, 2, n - 2, 0)
            total = [sum(col) for col in zip(*(stab(x) for x in gammas))]
            assert top.rel(jt).contains(total), f"nu={nu}, n={n}: sum of Γj = {total}"


# -- 4 ------------------------------------------------------------------------------------------


@criterion(4, "smooth base parity: |var∘J| = 0 for odd l, 2 for even l (l = 1..6), closed form agrees, M̄^2 = id at even l")
def test_criterion_4_parity():
    base = smooth_pl_base_slice(7, QQ)
    tower = build_tower(base)
    x = base.var_at(0).matrix[0, 0] * base.jmap_at(0).matrix[0, 0]     # Var_m J_m on the generator
    for l in range(1, 7):
        lv = level_at(tower, 1 + l)
        vj = lv.var_at(l).compose(lv.jmap_at(l)).matrix[0, 0]
        assert abs(vj) == (0 if l % 2 else 2), f"l={l}: var∘J = {vj}"
        closed = -(2 + x) if l % 2 else x
        assert vj == closed, f"l={l}: recursion {vj}, closed form {closed}"
        if l % 2 == 0:
            M = lv.monodromy_rel(l)
            assert (M ** 2).equals(GroupHom.identity(lv.rel(l))), f"l={l}: M̄^2 != id"
            Ma = lv.monodromy_abs(l)
            assert (Ma ** 2).equals(GroupHom.identity(lv.abs(l))), f"l={l}: M^2 != id"


# -- 5 ------------------------------------------------------------------------------------------


@criterion(5, "Morse m=3: r-fold iterated variation = 2r (r = 1..4)")
def test_criterion_5_morse():
    lv = build_tower(transverse_morse_slice(3))[0]
    for r in range(1, 5):
        got = iterated_variation(lv, r)[1].matrix
        assert got == IntMatrix([[2 * r]]), f"r={r}: {got}"


# -- 6 ------------------------------------------------------------------------------------------


@criterion(6, "IH profile on 20 random rank-r variations: dimensions, signed middle pairing, preserved low/kernel pairings, Ker ⊥ Im")
def test_criterion_6_ih_profile():
    start = time.perf_counter()
    rng = random.Random(20260101)
    for trial in range(20):
        a = rng.randint(1, 4)
        r = rng.randint(0, a)
        d = rng.randint(0, 3)
        low = rng.randint(1, 2) if d else 0
        s, raw = random_ih_slice(rng, a, r, d, low)
        assert orthogonality_check(s).passed, f"trial {trial}: Ker not orthogonal to Im"
        PV = oracles.matmul(raw["P"], raw["V"])
        for lv in ih_tower(s):
            l = lv.l
            for i in range(0, d + 2 * l + d + 1):
                want_abs = {d: a - r, d + l: r}.get(i, low if i == 0 and d else 0)
                if i == d + l:
                    want_rel = r
                elif i == d + 2 * l:
                    want_rel = a - r
                elif i > d + 2 * l and i - 2 * l == 2 * d:
                    want_rel = low
                else:
                    want_rel = 0
                assert lv.abs(i).free_rank == want_abs, f"trial {trial}, l={l}: dim IH_{i}"
                assert lv.rel(i).free_rank == want_rel, f"trial {trial}, l={l}: dim IH̄_{i}"
            for _ in range(2):
                al = [rng.randint(-3, 3) for _ in range(a)]
                be = [rng.randint(-3, 3) for _ in range(a)]
                want = literal_sign(l, d) * bilinear(al, PV, be)
                assert ih_pairing(lv, al, be, STAB) == want, f"trial {trial}, l={l}: middle pairing"
                if low:
                    x = [rng.randint(-3, 3) for _ in range(low)]
                    y = [rng.randint(-3, 3) for _ in range(low)]
                    assert ih_pairing(lv, x, y, LOW, degree=0) == bilinear(x, raw["P0"], y)
                if a > r:
                    c = [rng.randint(-2, 2) for _ in range(a - r)]
                    k = oracles.matvec(raw["K"], c)
                    assert ih_pairing(lv, k, be, KERNEL) == bilinear(k, raw["P"], be)
    _within(start, 5.0, "IH profile")


# -- 7 ------------------------------------------------------------------------------------------


@criterion(7, "comparison identities on the smooth base with ρ = id at every level up to m + 4")
def test_criterion_7_rho():
    n = 1 + 4
    ordinary = build_tower(smooth_pl_base_slice(1).over(QQ), n)
    ih = smooth_base_ih_slice(n)
    v = rho_compatibility(ordinary, ih, IntMatrix([[1]]), IntMatrix([[1]]))
    assert v.passed, f"failing identities {sorted(v.failing_identities())}"
    levels = {c.r for c in v.checks}
    assert levels == set(range(1, n + 1)), f"levels checked {sorted(levels)}"
    assert {c.identity for c in v.checks} == {1, 2, 3}


# -- 8 ------------------------------------------------------------------------------------------


@criterion(8, "Smith form and subquotients agree with the brute-force oracle on 200 random matrices")
def test_criterion_8_oracle():
    start = time.perf_counter()
    rng = random.Random(8)
    for trial in range(200):
        rows, cols = rng.randint(1, 5), rng.randint(1, 5)
        A = [[rng.randint(-5, 5) for _ in range(cols)] for _ in range(rows)]
        M = IntMatrix(A)
        nf = smith_normal_form(M)
        assert nf.U @ M @ nf.V == nf.D, f"trial {trial}: U M V != D"
        assert [x for x in nf.diagonal if x] == oracles.invariant_factors(A), f"trial {trial}: invariant factors"
        sq = hom_subquotients(GroupHom(FGAbGroup.free(cols), FGAbGroup.free(rows), M))
        free, tors = oracles.cokernel_type(A, rows)
        assert (sq.cokernel.free_rank, sq.cokernel.invariant_factors) == (free, tors), f"trial {trial}: cokernel"
        K = sq.kernel_inclusion.matrix
        assert K.cols == cols - oracles.rank(A), f"trial {trial}: kernel rank"
        assert (M @ K).is_zero()
        Kl = oracles.mat(K)
        for v in oracles.kernel_by_enumeration(A, cols, 1):
            assert oracles.in_integer_span(Kl, v), f"trial {trial}: kernel vector {v} missed"
        assert sq.image.free_rank == oracles.rank(A)
    _within(start, 10.0, "oracle comparison")


# -- 9 ------------------------------------------------------------------------------------------


@criterion(9, "scenario files round-trip bit-exactly; repeated runs are byte-identical")
def test_criterion_9_determinism():
    slices = [curve_germ_slice((2, 1), 4), curve_germ_slice((3,), 5, QQ), transverse_morse_slice(3, 5),
              smooth_pl_base_slice(4), curve_germ_ih_slice((2, 1), 3), smooth_base_ih_slice(4)]
    rng = random.Random(9)
    slices += [random_ih_slice(rng, 3, 2, 1, 1)[0], random_ih_slice(rng, 2, 0, 2, 2)[0]]
    for s in slices:
        text = dumps_slice(s)
        back = loads_slice(text)
        assert dumps_slice(back) == text, f"{s.label}: round trip changed the file"
        assert slices_equal(s, back)
    scenarios = [Scenario(example="curve-germ", mults=(2, 1), ambient=4, ih=True),
                 Scenario(example="smooth-base", ambient=5, ih=True, checks=("thm9", "cor4")),
                 Scenario(example="morse", m=3, ambient=5, checks=("example2", "lemma5"))]
    for sc in scenarios:
        a, b = run_scenario(sc), run_scenario(sc)
        assert render_text(a) == render_text(b), f"{sc.describe()}: text differs"
        assert dumps_json(render_json(a)) == dumps_json(render_json(b)), f"{sc.describe()}: JSON differs"


def summary_lines() -> list[str]:
    lines = []
    for number, title, ok, detail in sorted(RESULTS):
        tail = f" ({detail})" if detail else ""
        lines.append(f"{'PASS' if ok else 'FAIL'} criterion {number}: {title}{tail}")
    return lines


if __name__ == "__main__":
    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_criterion_")]
    for t in tests:
        try:
            t()
        except AssertionError:
            pass
    print("\n".join(summary_lines()))
    sys.exit(0 if all(ok for _, _, ok, _ in RESULTS) else 1)
