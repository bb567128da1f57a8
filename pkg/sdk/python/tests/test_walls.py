import random
import sys
from fractions import Fraction
from math import floor, isqrt
from pathlib import Path

import pytest

# Ensure the SDK package is importable
sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from wallkit.errors import BadDivisor, BadParam, BadWitness, LatticeMismatch, NotPrimitive, OnWall, UnboundedWindow
from wallkit.isometries import eichler_transvection
from wallkit.lattice import make_lattice, orthogonal_complement, relative_divisibility, saturation_index, standard_lattice
from wallkit.linalg import inverse
from wallkit.walls import (
    Clause,
    ContractionType,
    ExactSquare,
    RangeSquare,
    bm_wall,
    chamber_separates,
    kummer_contraction_type,
    mukai_from_chern,
    mukai_vector,
    mz_wall,
    mz_wall_from_s,
    rank2_closure,
    rank2_solve,
    wall_preserving,
    yoshioka_wall,
)

K3 = standard_lattice("mukai_k3")
AB = standard_lattice("mukai_abelian")


def k3(r, s, **middle):
    """(r; ...; s) in the K3 Mukai lattice, middle entries given as i<index>=value."""
    coords = [0] * 24
    coords[0], coords[23] = r, s
    for key, value in middle.items():
        coords[int(key[1:])] = value
    return K3.vector(coords)


def ab(r, s, **middle):
    coords = [0] * 8
    coords[0], coords[7] = r, s
    for key, value in middle.items():
        coords[int(key[1:])] = value
    return AB.vector(coords)


def naive_solve(gram, v, mode):
    """Box enumeration bounded by the majorant 2(w,v)²/v² − w², which is positive definite on T."""
    (a, b), (_, c) = gram
    pv = (a * v[0] + b * v[1], b * v[0] + c * v[1])
    v_square = v[0] * pv[0] + v[1] * pv[1]
    majorant = [[Fraction(2 * pv[i] * pv[j], v_square) - gram[i][j] for j in range(2)] for i in range(2)]
    inv = inverse(majorant)
    if isinstance(mode, ExactSquare):
        top = max(abs(mode.lo), abs(mode.hi))
        bound = Fraction(2 * top * top, v_square) - mode.c
    else:
        bound = Fraction(2 * mode.hi * mode.hi, v_square)
    box = [isqrt(floor(bound * inv[i][i])) + 1 for i in range(2)]
    found = []
    for x in range(-box[0], box[0] + 1):
        for y in range(-box[1], box[1] + 1):
            p = x * pv[0] + y * pv[1]
            sq = a * x * x + 2 * b * x * y + c * y * y
            if isinstance(mode, ExactSquare):
                ok = sq == mode.c and mode.lo <= p <= mode.hi
            else:
                ok = 0 <= sq < p <= mode.hi
            if ok:
                found.append((x, y))
    return sorted(found)


def random_hyperbolic(rng):
    while True:
        a, b, c = rng.randint(-6, 6), rng.randint(-6, 6), rng.randint(-6, 6)
        if a * c - b * b >= 0:
            continue
        for _ in range(20):
            v = (rng.randint(-3, 3), rng.randint(-3, 3))
            v_square = a * v[0] * v[0] + 2 * b * v[0] * v[1] + c * v[1] * v[1]
            if 0 < v_square <= 20:
                return ((a, b), (b, c)), v, v_square


class TestMukaiVectors:
    def test_ideal_sheaf_abelian(self):
        assert mukai_from_chern("abelian", 1, [], 3) == ab(1, -3)

    def test_k3_rank_one(self):
        assert mukai_from_chern("K3", 1, [], 2) == k3(1, -1)

    def test_k3_rank_two(self):
        v = mukai_from_chern("K3", 2, [], 4)
        assert v == k3(2, -2)
        assert v.square == 8

    def test_conventions_differ(self):
        half = mukai_from_chern("K3", 1, [1, 1], 0)
        printed = mukai_from_chern("K3", 1, [1, 1], 0, convention="printed")
        assert half.coords[-1] == 2
        assert printed.coords[-1] == 3

    def test_padding(self):
        assert mukai_vector("abelian", 1, [1], 0).coords == (1, 1, 0, 0, 0, 0, 0, 0)
        with pytest.raises(BadParam):
            mukai_vector("abelian", 1, [0] * 7, 0)

    def test_unknown_surface(self):
        with pytest.raises(BadParam):
            mukai_vector("enriques", 1, [], 0)


class TestRank2:
    def test_closure_is_saturated(self):
        v, d = k3(1, -1), k3(1, 1)
        t = rank2_closure(K3, v, d)
        assert t.det == -1
        assert saturation_index(K3, [v, d]) == 2

    def test_og10_pair(self):
        w = k3(1, -1)
        s = k3(2, 1, i1=1, i2=1)
        t = rank2_closure(K3, w, s)
        assert t.induced_gram == ((2, 1), (1, -2))

    def test_kummer_pair(self):
        for n in range(1, 21):
            v, s = ab(1, -n - 1), ab(0, -1)
            t = rank2_closure(AB, v, s)
            assert t.induced_gram == ((2 * n + 2, 1), (1, 0))

    def test_isotropic_image(self):
        v = ab(1, -6)
        y = ab(5, 30, i1=12, i2=12)
        assert rank2_closure(AB, v, y).det == -1

    def test_root_pair(self):
        found = rank2_solve(make_lattice([[2, 0], [0, -2]]), (1, 0), ExactSquare(-2, 0, 1))
        assert set(found) == {(0, 1), (0, -1)}

    def test_modular_obstruction(self):
        assert rank2_solve(make_lattice([[2, 0], [0, -12]]), (1, 0), ExactSquare(-2, 0, 1)) == []

    def test_factored_form(self):
        found = rank2_solve(make_lattice([[12, -5], [-5, 2]]), (1, 0), RangeSquare(6))
        assert (1, 2) in found

    def test_empty_window(self):
        with pytest.raises(UnboundedWindow):
            rank2_solve(make_lattice([[2, 0], [0, -2]]), (1, 0), ExactSquare(-2, 3, 1))

    def test_matches_box_enumeration(self):
        rng = random.Random(2024)
        for _ in range(1000):
            gram, v, v_square = random_hyperbolic(rng)
            t = make_lattice(gram)
            hi = v_square // 2
            for mode in (ExactSquare(-2, 0, hi), RangeSquare(hi), ExactSquare(0, 1, 2)):
                assert sorted(rank2_solve(t, v, mode)) == naive_solve(gram, v, mode)

    def test_window_boundary_enforced(self):
        t = make_lattice([[2, 0], [0, -2]])
        inside = naive_solve(t.gram, (1, 0), RangeSquare(1))
        beyond = naive_solve(t.gram, (1, 0), RangeSquare(2))
        assert rank2_solve(t, (1, 0), RangeSquare(1)) == inside
        assert len(beyond) > len(inside)


class TestBMWall:
    def test_root_divisor(self):
        verdict = bm_wall(k3(1, -1), k3(1, 1))
        assert verdict.is_wall
        assert verdict.clause == Clause.BM1
        assert verdict.witness == k3(1, 1)

    def test_first_witness_and_exhaustive_list(self):
        verdict = bm_wall(k3(1, -2), k3(1, 2), exhaustive=True)
        assert verdict.clause == Clause.BM1
        assert verdict.witness == k3(1, 1)
        assert k3(1, 0) in verdict.candidates

    def test_not_wall(self):
        verdict = bm_wall(k3(1, -1), k3(0, 0, i3=2, i4=-3))
        assert not verdict.is_wall
        assert verdict.clause == Clause.NONE
        assert verdict.witness is None

    def test_every_root_is_a_wall(self):
        v = k3(1, -1)
        roots = [k3(1, 1), k3(0, 0, i1=1, i2=-1), k3(0, 0, i7=1), k3(0, 0, i3=1, i4=-1), k3(0, 0, i15=1, i17=1)]
        for d in roots:
            assert d.square == -2 and d.dot(v) == 0
            verdict = bm_wall(v, d)
            assert verdict.is_wall and verdict.clause == Clause.BM1

    def test_box_of_roots(self):
        v = k3(1, -2)
        for x in range(-2, 3):
            for y in range(-2, 3):
                d = k3(0, 0, i1=x, i2=y, i7=1)
                if d.square == -2:
                    assert bm_wall(v, d).is_wall

    def test_rejects_positive_divisor(self):
        with pytest.raises(BadDivisor):
            bm_wall(k3(1, -1), k3(0, 0, i1=1, i2=1))

    def test_rejects_imprimitive_v(self):
        with pytest.raises(NotPrimitive):
            bm_wall(k3(2, -2), k3(1, 1))

    def test_rejects_abelian_vectors(self):
        with pytest.raises(LatticeMismatch):
            bm_wall(ab(1, -3), ab(1, 3))


class TestYoshiokaWall:
    def test_isotropic_witness(self):
        verdict = yoshioka_wall(ab(1, -3), ab(1, 3))
        assert verdict.is_wall
        assert verdict.clause == Clause.YOSH
        assert verdict.witness == ab(0, -1)
        assert verdict.witness.dot(ab(1, -3)) == 1
        assert verdict.witness.square == 0

    def test_second_case(self):
        verdict = yoshioka_wall(ab(1, -2), ab(-1, -2), exhaustive=True)
        assert verdict.is_wall
        assert verdict.witness == ab(0, -1)
        assert verdict.candidates == (ab(0, -1), ab(1, 0), ab(0, -2))

    def test_asymmetry_with_k3(self):
        assert not yoshioka_wall(ab(1, -2), ab(0, 0, i1=1, i2=-1)).is_wall
        assert bm_wall(k3(1, -2), k3(0, 0, i1=1, i2=-1)).is_wall

    def test_rejects_k3_vectors(self):
        with pytest.raises(LatticeMismatch):
            yoshioka_wall(k3(1, -2), k3(1, 2))


class TestMZWall:
    def test_orthogonal_root(self):
        verdict = mz_wall(k3(1, -1), k3(0, 0, i7=1))
        assert verdict.is_wall
        assert verdict.clause == Clause.MZ0

    def test_og10_divisor(self):
        w, s = k3(1, -1), k3(2, 1, i1=1, i2=1)
        assert s.square == -2 and s.dot(w) == 1
        verdict = mz_wall(w, w - 2 * s)
        assert verdict.is_wall
        assert verdict.clause == Clause.MZ1
        assert verdict.witness == s

    def test_not_wall(self):
        assert not mz_wall(k3(1, -1), k3(0, 0, i3=2, i4=-3)).is_wall

    def test_needs_square_two(self):
        with pytest.raises(BadParam):
            mz_wall(k3(1, -2), k3(1, 2))

    def test_divisor_from_s(self):
        w, s = k3(1, -1), k3(2, 1, i1=1, i2=1)
        d = mz_wall_from_s(w, s)
        assert d == k3(3, 3, i1=2, i2=2)
        assert d.square == -10
        assert relative_divisibility(orthogonal_complement(K3, [w]), d) == 2

    def test_divisor_from_orthogonal_root(self):
        root = k3(0, 0, i7=1)
        assert mz_wall_from_s(k3(1, -1), root) == root

    def test_bad_witness(self):
        with pytest.raises(BadWitness):
            mz_wall_from_s(k3(1, -1), k3(0, 0, i1=1, i2=1))


# v, the ratio s/r keeping D ⊥ v, U-plane indices, definite indices
SETUPS = {
    "bm": (k3(1, -2), 2, range(1, 7), range(7, 23)),
    "mz": (k3(1, -1), 1, range(1, 7), range(7, 23)),
    "yoshioka": (ab(1, -3), 3, range(1, 7), ()),
}

DIVISORS = {
    "bm": [k3(1, 2), k3(0, 0, i3=2, i4=-3), k3(0, 0, i1=1, i2=-2), k3(2, 4, i1=2, i2=2)],
    "mz": [k3(1, 1), k3(0, 0, i3=2, i4=-3), k3(0, 0, i1=1, i2=-2), k3(3, 3, i1=2, i2=2)],
    "yoshioka": [ab(1, 3), ab(0, 0, i1=1, i2=-2), ab(0, 0, i3=2, i4=-3), ab(1, 3, i1=1, i2=1)],
}

CRITERION = {"bm": bm_wall, "mz": mz_wall, "yoshioka": yoshioka_wall}


def random_divisor(rng, criterion):
    """Nonzero D ⊥ v with D² < 0; D = (t; ...; k·t) keeps (v, D) = 0."""
    v, k, hyperbolic, definite = SETUPS[criterion]
    lattice = v.lattice
    while True:
        coords = [0] * lattice.rank
        t = rng.randint(-2, 2)
        coords[0], coords[-1] = t, k * t
        for i in rng.sample(list(hyperbolic), 2):
            coords[i] = rng.randint(-3, 3)
        if definite:
            for i in rng.sample(list(definite), 2):
                coords[i] = rng.randint(-2, 2)
        d = lattice.vector(coords)
        if not d.is_zero and d.square < 0:
            return d


def random_stabilizer(rng, v, definite):
    """Product of one to three Eichler transvections t(e, a) with e in a U-plane and a ⊥ e, v."""
    lattice = v.lattice
    g = None
    for _ in range(rng.randint(1, 3)):
        i = rng.choice([1, 2, 3, 4, 5, 6])
        partner = i + 1 if i % 2 else i - 1
        others = [j for j in list(range(1, 7)) + list(definite) if j not in (i, partner)]
        a = lattice.zero()
        for j in rng.sample(others, 2):
            a = a + rng.randint(-2, 2) * lattice.basis_vector(j)
        if a.is_zero:
            a = lattice.basis_vector(others[0])
        h = eichler_transvection(lattice, lattice.basis_vector(i), a)
        g = h if g is None else g @ h
    return g


class TestSignAndTransport:
    @pytest.mark.slow
    @pytest.mark.parametrize("criterion", ["bm", "yoshioka", "mz"])
    def test_sign_symmetry(self, criterion):
        rng = random.Random(17)
        v = SETUPS[criterion][0]
        classify = CRITERION[criterion]
        for _ in range(500):
            d = random_divisor(rng, criterion)
            assert classify(v, d).is_wall == classify(v, -d).is_wall

    @pytest.mark.slow
    @pytest.mark.parametrize("criterion", ["bm", "yoshioka", "mz"])
    def test_transport_under_transvections(self, criterion):
        rng = random.Random(23)
        v, _, _, definite = SETUPS[criterion]
        for _ in range(200):
            h = random_stabilizer(rng, v, definite)
            assert h.apply(v) == v
            assert wall_preserving(h, v, DIVISORS[criterion], criterion) is None

    def test_random_divisors_are_orthogonal(self):
        rng = random.Random(5)
        for criterion, (v, _, _, _) in SETUPS.items():
            for _ in range(20):
                d = random_divisor(rng, criterion)
                assert d.dot(v) == 0
                assert d.square < 0
            for d in DIVISORS[criterion]:
                assert d.dot(v) == 0
                assert d.square < 0


class TestKummerContraction:
    def test_type_one(self):
        result = kummer_contraction_type(2, ab(1, 3))
        assert result.type == ContractionType.TYPE_I
        assert result.w == ab(0, -1)

    def test_type_two(self):
        result = kummer_contraction_type(1, ab(-1, -2))
        assert result.type == ContractionType.TYPE_II
        assert result.w == ab(1, 0)

    def test_none(self):
        assert kummer_contraction_type(1, ab(0, 0, i1=1, i2=-1)).type == ContractionType.NONE

    def test_kummer_coordinates(self):
        lattice = standard_lattice("kummer(2)")
        assert kummer_contraction_type(2, lattice.basis_vector(6)).type == ContractionType.TYPE_I


    def test_relabeled_kummer_gram(self):
        gram = standard_lattice("kummer(2)").gram
        relabeled = make_lattice(gram, label="delta_lattice")
        assert kummer_contraction_type(2, relabeled.basis_vector(6)).type == ContractionType.TYPE_I

    def test_label_alone_does_not_select_kummer(self):
        mislabeled = make_lattice(AB.gram, label="kummer(2)")
        result = kummer_contraction_type(2, mislabeled.vector(ab(1, 3).coords))
        assert result.type == ContractionType.TYPE_I
        assert result.w == ab(0, -1)
    def test_image_of_order_five(self):
        result = kummer_contraction_type(5, ab(5, 30, i1=12, i2=12))
        assert result.type == ContractionType.TYPE_II
        assert result.w == ab(1, 4, i1=2, i2=2)


class TestChambers:
    def test_separated(self):
        lattice = standard_lattice("kummer(5)")
        delta = lattice.basis_vector(6)
        h1 = lattice.vector([2, 4, 0, 0, 0, 0, -1])
        h2 = lattice.vector([2, 4, 0, 0, 0, 0, 1])
        assert chamber_separates([delta], h1, h2)
        assert not chamber_separates([delta], h1, h1)

    def test_on_wall(self):
        lattice = standard_lattice("kummer(5)")
        h = lattice.vector([1, 1, 0, 0, 0, 0, 0])
        with pytest.raises(OnWall):
            chamber_separates([lattice.basis_vector(6)], h, h)
