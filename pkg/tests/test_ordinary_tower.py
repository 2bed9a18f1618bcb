import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from strata.exact_lin import QQ, ZZ, FGAbGroup, GroupHom, IntMatrix, hom_subquotients
from strata.ordinary_tower import (GENERAL, HALF, SPLIT, UNRESOLVED, TowerError, build_tower,
                                   global_monodromy, irreducible_germ_report, iterated_variation,
                                   level_at, link_complement_homology, periodicity_check,
                                   stab_power, stabilize_step)
from strata.slice_models import (SliceData, curve_germ_slice, smooth_pl_base_slice,
                                 transverse_morse_slice)

import oracles

mults_lists = st.lists(st.integers(1, 4), min_size=1, max_size=3).filter(lambda u: sum(u) <= 6)


def random_slice(rng: random.Random, coeff=ZZ) -> SliceData:
    d = rng.randint(0, 2)
    a, b = rng.randint(0, 3), rng.randint(0, 3)
    A, B = FGAbGroup.free(a), FGAbGroup.free(b)
    V = IntMatrix([[rng.randint(-3, 3) for _ in range(a)] for _ in range(b)], rows=b, cols=a)
    J = IntMatrix([[rng.randint(-3, 3) for _ in range(b)] for _ in range(a)], rows=a, cols=b)
    s = SliceData(n=d + 1 + 3, k=3, d=d, coeff=ZZ, rel_groups={d: A}, abs_groups={d: B},
                  var={d: GroupHom(A, B, V)}, jmap={d: GroupHom(B, A, J)})
    return s.over(coeff)


# -- curve germs against the point-permutation oracle ---------------------------------------


@settings(max_examples=40, deadline=None)
@given(mults_lists)
def test_germ_operators_match_oracle(mults):
    s = curve_germ_slice(mults)
    V, J, M = oracles.germ_operators(mults)
    u = sum(mults)
    if u == 1:
        assert s.rel(0).ngens == 0
        return
    assert oracles.mat(s.var_at(0).matrix) == V
    assert oracles.mat(s.jmap_at(0).matrix) == J
    lv = build_tower(s)[0]
    assert oracles.mat(lv.monodromy_rel(0).matrix) == M


@settings(max_examples=40, deadline=None)
@given(mults_lists)
def test_variation_kernel_has_one_dimension_less_than_branches(mults):
    s = curve_germ_slice(mults)
    V, _, _ = oracles.germ_operators(mults)
    want = (sum(mults) - 1) - oracles.rank(V) if V else 0
    ker = hom_subquotients(s.var_at(0)).kernel
    assert ker.free_rank == want == len(mults) - 1


@settings(max_examples=30, deadline=None)
@given(mults_lists)
def test_global_monodromy_localizes(mults):
    # ambient = the relative group itself, restriction = identity, inclusion = relativization
    s = curve_germ_slice(mults)
    if sum(mults) == 1:
        return
    lv = build_tower(s)[0]
    g = global_monodromy(lv, 0, GroupHom.identity(s.rel(0)), s.jmap_at(0))
    _, _, M = oracles.germ_operators(mults)
    assert oracles.mat(g.matrix) == M


def test_global_monodromy_shape_errors():
    lv = build_tower(curve_germ_slice((3,)))[0]
    with pytest.raises(TowerError):
        global_monodromy(lv, 0, GroupHom.identity(FGAbGroup.free(3)), GroupHom.identity(FGAbGroup.free(3)))


# -- algebraic identities at every level --------------------------------------------------------


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6), st.integers(0, 3), st.integers(0, 3), st.sampled_from([ZZ, QQ]))
def test_variation_cocycle(seed, a, b, coeff):
    s = random_slice(random.Random(seed), coeff)
    for lv in build_tower(s):
        for j in lv.degrees():
            M = lv.monodromy_rel(j)
            lhs = iterated_variation(lv, a + b)[j]
            rhs = iterated_variation(lv, a)[j] + iterated_variation(lv, b)[j].compose(M ** a)
            assert lhs.equals(rhs)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from([ZZ, QQ]))
def test_monodromy_intertwines_variation(seed, coeff):
    s = random_slice(random.Random(seed), coeff)
    for lv in build_tower(s):
        for j in lv.degrees():
            assert lv.monodromy_abs(j).compose(lv.var_at(j)).equals(lv.var_at(j).compose(lv.monodromy_rel(j)))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from([ZZ, QQ]))
def test_absolute_groups_stay_in_range(seed, coeff):
    s = random_slice(random.Random(seed), coeff)
    for lv in build_tower(s):
        top = s.d + (lv.r - s.m)
        assert all(lv.abs(j).is_trivial() for j in lv.degrees() if j > top)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from([ZZ, QQ]))
def test_stab_composes_with_variation(seed, coeff):
    s = random_slice(random.Random(seed), coeff)
    tower = build_tower(s)
    for prev, cur in zip(tower, tower[1:]):
        for j in prev.degrees():
            # Var∘stab = Σ∘Var in one step
            lhs = cur.var_at(j + 1).compose(cur.stab_at(j + 1, prev))
            rhs = cur.sigma_at(j + 1, prev).compose(prev.var_at(j))
            assert lhs.equals(rhs)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_link_ranks_and_extra_summand(seed):
    s = random_slice(random.Random(seed))
    link = link_complement_homology(s)
    nxt = build_tower(s)[1]
    for i, g in link.items():
        ex = nxt.extra.get(i + 1)
        assert (ex.rank if ex else 0) == g.rank


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10**6))
def test_ranks_agree_over_z_and_q(seed):
    s = random_slice(random.Random(seed))
    for lz, lq in zip(build_tower(s), build_tower(s.over(QQ))):
        for j in set(lz.degrees()) | set(lq.degrees()):
            assert lz.rel(j).free_rank == lq.rel(j).free_rank
            assert lz.abs(j).free_rank == lq.abs(j).free_rank


def test_extension_flag_over_z():
    # var = 2 on Z and a kernel below: coker Z/2 with a free kernel part is still split
    g = FGAbGroup.free(1)
    s = SliceData(n=4, k=2, d=1, coeff=ZZ, rel_groups={0: g, 1: g}, abs_groups={0: g, 1: g},
                  var={0: GroupHom.zero(g, g), 1: GroupHom(g, g, IntMatrix([[2]]))},
                  jmap={})
    nxt = build_tower(s)[1]
    assert nxt.extra[2].extension_flag == SPLIT
    assert nxt.extra[2].quotient_part.invariant_factors == (2,)
    assert nxt.extra[2].kernel_part.free_rank == 1


def test_unresolved_extension_flagged():
    # kernel part with torsion and a nontrivial cokernel part
    t = FGAbGroup(1, IntMatrix([[2]]))
    g = FGAbGroup.free(1)
    s = SliceData(n=4, k=2, d=1, coeff=ZZ, rel_groups={0: t, 1: g}, abs_groups={0: g, 1: g},
                  var={0: GroupHom.zero(t, g), 1: GroupHom(g, g, IntMatrix([[3]]))}, jmap={})
    nxt = build_tower(s)[1]
    assert nxt.extra[2].extension_flag == UNRESOLVED
    assert not nxt.is_extension_resolved()
    assert not link_complement_homology(s)[1].resolved


def test_embed_realizations():
    # zero variation: the whole old absolute group survives in the cokernel block
    tq = build_tower(transverse_morse_slice(4).over(QQ), 6)
    tz = build_tower(transverse_morse_slice(4), 6)
    prev, cur = tq[0], tq[1]
    j = prev.d + 1
    half = cur.embed_matrix(j, prev, HALF)
    general = cur.embed_matrix(j, prev, GENERAL)
    ex = cur.extra[j]
    assert ex.quotient_part.ngens == 1
    assert general[prev.abs(j - 1).ngens, 0] - half[prev.abs(j - 1).ngens, 0] == Fraction(1, 2)
    with pytest.raises(TowerError):
        tz[1].embed_matrix(j, tz[0], HALF)


def test_tower_bounds():
    s = curve_germ_slice((2,), n=3)
    with pytest.raises(TowerError):
        build_tower(s, 1)
    tower = build_tower(s)
    with pytest.raises(TowerError):
        stabilize_step(tower[-1])
    assert level_at(tower, 3) is tower[-1]


# -- the worked examples -------------------------------------------------------------------------


@pytest.mark.parametrize("r", range(0, 6))
def test_morse_three_iterated_variation(r):
    lv = build_tower(transverse_morse_slice(3))[0]
    assert iterated_variation(lv, r)[1].matrix == IntMatrix([[2 * r]])


def test_morse_even_variation_is_zero():
    s = transverse_morse_slice(4)
    assert s.var_at(2).is_zero()


@pytest.mark.parametrize("coeff", [ZZ, QQ])
def test_smooth_base_parity(coeff):
    tower = build_tower(smooth_pl_base_slice(7, coeff))
    for lv in tower[1:]:
        l = lv.r - tower[0].r
        vj = lv.var_at(l).compose(lv.jmap_at(l)).matrix
        assert abs(vj[0, 0]) == (0 if l % 2 else 2)
        if l % 2 == 0:
            assert (lv.monodromy_abs(l) ** 2).equals(GroupHom.identity(lv.abs(l)))


def test_smooth_base_periodicity():
    v = periodicity_check(build_tower(smooth_pl_base_slice(6)))
    assert v.applicable and v.start == 1 and v.passed


def test_periodicity_not_applicable_without_iso():
    v = periodicity_check(build_tower(transverse_morse_slice(4), 6))
    assert not v.applicable and v.passed


def test_stab_power_is_functorial():
    tower = build_tower(curve_germ_slice((3,), n=5))
    two_then_one = level_at(tower, 5).stab_at(3, level_at(tower, 4)).compose(stab_power(tower, 2, 2, 0))
    assert two_then_one.equals(stab_power(tower, 2, 3, 0))


@pytest.mark.parametrize("nu,n", [(nu, n) for nu in range(1, 5) for n in range(3, 6)])
def test_irreducible_germ_reports(nu, n):
    rep = irreducible_germ_report(nu, n)
    assert rep.passed, [c for c in rep.checks if not c.passed]
    assert rep.rel_group.free_rank == nu - 1 and rep.abs_group.free_rank == nu - 1
    assert rep.rel_group.invariant_factors == () == rep.abs_group.invariant_factors


def test_germ_report_cases():
    assert irreducible_germ_report(2, 4).case == "n even"
    assert irreducible_germ_report(3, 5).case == "n odd, ν odd"
    rep = irreducible_germ_report(2, 3)
    assert rep.case == "n odd, ν even"
    assert any(c.label == "Var(Γ_j) = alternating class" and c.passed for c in rep.checks)
    with pytest.raises(ValueError):
        irreducible_germ_report(2, 2)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from([ZZ, QQ]))
def test_cokernel_part_only_at_the_first_step(seed, coeff):
    s = random_slice(random.Random(seed), coeff)
    tower = build_tower(s)
    for lv in tower[2:]:
        assert all(ex.quotient_part.is_trivial() for ex in lv.extra.values())
        for j, ex in lv.extra.items():
            assert ex.rank == ex.quotient_part.free_rank + ex.kernel_part.free_rank
