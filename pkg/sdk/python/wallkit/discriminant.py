"""Discriminant groups A_L = L∨/L with their finite quadratic forms, and induced isometry actions.

Elements are stored as residue vectors in generator coordinates, so equality is
decided by reduction rather than by comparing coset representatives.
"""
import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import cached_property

from . import linalg
from .errors import Degenerate, InvariantViolation, NotContained, NotIsometry, NotPrimitive
from .lattice import IntegralLattice, LatticeVector, RationalVector, divisibility

logger = logging.getLogger(__name__)


class DiscScalar(str, Enum):
    PLUS = "+1"
    MINUS = "-1"
    OTHER = "other"


def _mod2(value: Fraction) -> Fraction:
    return value - 2 * (value // 2)


def _mod1(value: Fraction) -> Fraction:
    return value - (value // 1)


def _fractional_lift(coords) -> tuple[Fraction, ...]:
    return tuple(_mod1(Fraction(c)) for c in coords)


@dataclass(frozen=True)
class DiscriminantForm:
    lattice: IntegralLattice
    invariant_factors: tuple[int, ...]
    generator_lifts: tuple[RationalVector, ...]
    # coordinate functional per generator: row of the left SNF transform, and the
    # unit that undoes generator normalisation
    coordinate_rows: tuple[tuple[int, ...], ...]
    units: tuple[int, ...]

    @property
    def order(self) -> int:
        order = 1
        for d in self.invariant_factors:
            order *= d
        return order

    @property
    def exponent(self) -> int:
        return self.invariant_factors[-1] if self.invariant_factors else 1

    @property
    def is_trivial(self) -> bool:
        return not self.invariant_factors

    @cached_property
    def q_values(self) -> tuple[Fraction, ...]:
        return tuple(_mod2(x.square) for x in self.generator_lifts)

    @cached_property
    def pairing_values(self) -> tuple[tuple[Fraction, ...], ...]:
        return tuple(tuple(_mod1(x.dot(y)) for y in self.generator_lifts) for x in self.generator_lifts)

    def reduce(self, coords) -> tuple[int, ...]:
        return tuple(int(c) % d for c, d in zip(coords, self.invariant_factors))

    def coordinates(self, y) -> tuple[int, ...]:
        """Generator coordinates of the class of y ∈ L∨ (an integral or rational vector)."""
        image = self.lattice.array @ linalg.as_vector(y.coords)
        dual = [Fraction(c) for c in image.tolist()]
        if not linalg.is_integral(dual):
            raise NotContained(f"{y.coords} is not in the dual lattice")
        dual = [int(c) for c in dual]
        return tuple(
            (sum(r * z for r, z in zip(row, dual)) * unit) % d
            for row, unit, d in zip(self.coordinate_rows, self.units, self.invariant_factors)
        )

    def lift(self, coords) -> RationalVector:
        total = self.lattice.rational([0] * self.lattice.rank)
        for c, x in zip(self.reduce(coords), self.generator_lifts):
            total = total + x * c
        return total

    def q(self, coords) -> Fraction:
        return _mod2(self.lift(coords).square)

    def b(self, coords_a, coords_b) -> Fraction:
        return _mod1(self.lift(coords_a).dot(self.lift(coords_b)))

    def zero(self) -> tuple[int, ...]:
        return tuple(0 for _ in self.invariant_factors)


def discriminant_group(lattice: IntegralLattice) -> DiscriminantForm:
    if lattice.det == 0:
        raise Degenerate(f"{lattice!r} is degenerate")
    snf = linalg.smith_form(lattice.gram)
    n = lattice.rank
    factors, lifts, rows, units = [], [], [], []
    for i, d in enumerate(snf.diagonal):
        if d == 1:
            continue
        column = tuple(Fraction(snf.right[k][i], d) for k in range(n))
        # among unit multiples of the generator keep the lexicographically smallest reduced lift
        best_unit, best_lift = None, None
        for u in range(1, d):
            if linalg.content([u, d]) != 1:
                continue
            candidate = _fractional_lift(u * c for c in column)
            if best_lift is None or candidate < best_lift:
                best_unit, best_lift = u, candidate
        factors.append(d)
        lifts.append(lattice.rational(best_lift))
        rows.append(snf.left[i])
        units.append(pow(best_unit, -1, d))
    form = DiscriminantForm(lattice, tuple(factors), tuple(lifts), tuple(rows), tuple(units))
    if form.order != abs(lattice.det):
        raise InvariantViolation(f"|A| = {form.order} but |det| = {abs(lattice.det)}")
    logger.debug("[disc] %r: invariant factors %s", lattice, form.invariant_factors)
    return form


def disc_image(lattice: IntegralLattice, x: LatticeVector, form: DiscriminantForm | None = None) -> tuple[int, ...]:
    """Class of x/div(x) in A_L."""
    if not x.is_primitive:
        raise NotPrimitive(f"{x.coords} is not primitive")
    form = form or discriminant_group(lattice)
    return form.coordinates(x / divisibility(lattice, x))


@dataclass(frozen=True)
class DiscAction:
    form: DiscriminantForm
    matrix: tuple[tuple[int, ...], ...]

    def apply(self, coords) -> tuple[int, ...]:
        return self.form.reduce(
            sum(self.matrix[j][i] * c for i, c in enumerate(coords)) for j in range(len(self.matrix))
        )

    def compose(self, other: "DiscAction") -> "DiscAction":
        """self ∘ other."""
        k = len(self.matrix)
        rows = tuple(
            tuple(
                sum(self.matrix[j][m] * other.matrix[m][i] for m in range(k)) % self.form.invariant_factors[j]
                for i in range(k)
            )
            for j in range(k)
        )
        return DiscAction(self.form, rows)

    def is_scalar(self, c: int) -> bool:
        return all(
            self.matrix[j][i] % d == (c if i == j else 0) % d
            for j, d in enumerate(self.form.invariant_factors)
            for i in range(len(self.matrix))
        )

    @property
    def is_identity(self) -> bool:
        return self.is_scalar(1)

    def scalar(self) -> int | None:
        """c with action = multiplication by c, when the action is scalar."""
        if not self.matrix:
            return 1
        for c in range(self.form.exponent):
            if self.is_scalar(c):
                return c
        return None


def disc_action(lattice: IntegralLattice, g, form: DiscriminantForm | None = None) -> DiscAction:
    """Induced action of g (anything with an integer `matrix` acting on columns) on A_L."""
    matrix = linalg.as_array(g.matrix)
    if linalg.to_int_rows((matrix.T @ lattice.array @ matrix).tolist()) != lattice.gram:
        raise NotIsometry("matrix does not preserve the Gram matrix")
    form = form or discriminant_group(lattice)
    columns = []
    for x in form.generator_lifts:
        image = lattice.rational((matrix @ linalg.as_vector(x.coords)).tolist())
        coords = form.coordinates(image)
        columns.append(coords)
    k = len(columns)
    action = DiscAction(form, tuple(tuple(columns[i][j] for i in range(k)) for j in range(k)))
    for i in range(k):
        if form.q(columns[i]) != form.q_values[i]:
            raise InvariantViolation(f"q not preserved on generator {i}")
    return action


def classify_pm1(action: DiscAction) -> DiscScalar:
    if action.is_identity:
        return DiscScalar.PLUS
    if action.is_scalar(-1):
        return DiscScalar.MINUS
    return DiscScalar.OTHER
