import random
import sys
from fractions import Fraction
from pathlib import Path

import pytest

# Ensure the SDK package is importable
sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from wallkit.discriminant import DiscScalar, classify_pm1, disc_action, disc_image, discriminant_group
from wallkit.errors import Degenerate, NotIsometry, NotPrimitive
from wallkit.isometries import Isometry, eichler_transvection, identity, is_isometry, negation, reflection
from wallkit.lattice import IntegralLattice, make_lattice, standard_lattice
from wallkit.monodromy import sample_kummer_isometries
from wallkit.schemas import IsometryDocument, read_document
from wallkit.settings import fixture_path


def kummer5_isometry():
    doc = read_document(fixture_path("kummer5_isometry.json"), IsometryDocument)
    return is_isometry(standard_lattice(doc.lattice), doc.matrix)


class TestDiscriminantGroup:
    def test_unimodular(self):
        assert discriminant_group(standard_lattice("U")).is_trivial
        assert discriminant_group(standard_lattice("mukai_k3")).is_trivial

    def test_kummer_five(self):
        form = discriminant_group(standard_lattice("kummer(5)"))
        assert form.invariant_factors == (12,)
        assert form.generator_lifts[0].coords == (0, 0, 0, 0, 0, 0, Fraction(1, 12))
        assert form.q_values == (Fraction(23, 12),)

    def test_a2_negative(self):
        form = discriminant_group(standard_lattice("A2(-1)"))
        assert form.invariant_factors == (3,)
        assert form.q_values == (Fraction(4, 3),)

    def test_kummer_family(self):
        for n in range(1, 31):
            form = discriminant_group(standard_lattice(f"kummer({n})"))
            m = 2 * n + 2
            assert form.invariant_factors == (m,)
            assert form.q_values == (2 - Fraction(1, m),)

    def test_order_matches_determinant(self):
        rng = random.Random(5)
        checked = 0
        while checked < 100:
            n = rng.randint(1, 4)
            rows = [[0] * n for _ in range(n)]
            for i in range(n):
                for j in range(i, n):
                    rows[i][j] = rows[j][i] = rng.randint(-4, 4)
            try:
                lattice = make_lattice(rows)
            except Degenerate:
                continue
            form = discriminant_group(lattice)
            assert form.order == abs(lattice.det)
            checked += 1

    def test_pairing_values_in_unit_interval(self):
        form = discriminant_group(make_lattice([[2, 1], [1, -4]]))
        for row in form.pairing_values:
            assert all(0 <= value < 1 for value in row)

    def test_degenerate(self):
        with pytest.raises(Degenerate):
            discriminant_group(IntegralLattice(((1, 1), (1, 1))))


class TestDiscImage:
    def test_generator(self):
        lattice = standard_lattice("kummer(5)")
        assert disc_image(lattice, lattice.basis_vector(6)) == (1,)

    def test_kummer_image(self):
        lattice = standard_lattice("kummer(5)")
        y = lattice.vector([12, 12, 0, 0, 0, 0, 5])
        assert disc_image(lattice, y) == (5,)

    def test_unimodular(self):
        lattice = standard_lattice("U")
        u2 = make_lattice([[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]])
        assert disc_image(u2, u2.vector([3, 1, -2, 5])) == ()
        assert disc_image(lattice, lattice.vector([1, 0])) == ()

    def test_not_primitive(self):
        lattice = standard_lattice("kummer(5)")
        with pytest.raises(NotPrimitive):
            disc_image(lattice, lattice.vector([2, 0, 0, 0, 0, 0, 2]))


class TestDiscAction:
    def test_negation(self):
        lattice = standard_lattice("kummer(1)")
        action = disc_action(lattice, negation(lattice))
        assert action.is_scalar(-1)
        assert classify_pm1(action) == DiscScalar.MINUS

    def test_reflection_in_delta(self):
        lattice = standard_lattice("kummer(1)")
        sigma = reflection(lattice, lattice.basis_vector(6))
        assert classify_pm1(disc_action(lattice, sigma)) == DiscScalar.MINUS

    def test_transvection_is_stable(self):
        lattice = standard_lattice("kummer(3)")
        t = eichler_transvection(lattice, lattice.basis_vector(0), lattice.basis_vector(6))
        assert disc_action(lattice, t).is_identity

    def test_identity(self):
        lattice = standard_lattice("kummer(5)")
        assert classify_pm1(disc_action(lattice, identity(lattice))) == DiscScalar.PLUS

    def test_multiplication_by_five(self):
        action = kummer5_isometry().action
        assert action.scalar() == 5
        assert classify_pm1(action) == DiscScalar.OTHER

    def test_rejects_non_isometry(self):
        lattice = standard_lattice("U")
        fake = Isometry(lattice, ((0, 1), (2, 0)))
        with pytest.raises(NotIsometry):
            disc_action(lattice, fake)

    @pytest.mark.parametrize("n", [1, 2, 5])
    def test_homomorphism(self, n):
        samples = sample_kummer_isometries(n, 100, seed=3)
        for g, h in zip(samples[::2], samples[1::2]):
            assert (g @ h).action.matrix == g.action.compose(h.action).matrix

    def test_preserves_q(self):
        lattice = standard_lattice("kummer(5)")
        form = discriminant_group(lattice)
        for g in sample_kummer_isometries(5, 10, seed=4) + [kummer5_isometry()]:
            for x in ((1,), (5,), (7,)):
                assert form.q(g.action.apply(x)) == form.q(x)
