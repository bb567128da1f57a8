"""Lattice isometries: verification, reflections, Eichler transvections, orientation and Eichler reduction.

Matrices act on column coordinate vectors: g(x) = M·x, and g @ h is g ∘ h.
The constructive Eichler reduction assumes the lattice is even and declares a
U ⊕ U split on its first four coordinates (e₁, f₁, e₂, f₂).
"""
import logging
from dataclasses import dataclass, field
from functools import cached_property, lru_cache

import numpy as np
from sympy.core.intfunc import igcdex

from . import linalg
from .discriminant import DiscAction, disc_action, disc_image, discriminant_group
from .errors import (
    BadPair,
    BadParam,
    DivisibilityNotOne,
    InvariantViolation,
    IsotropicMirror,
    LatticeMismatch,
    NoSplitDeclared,
    NotEquivalent,
    NotIntegral,
    NotIsometry,
    NotPrimitive,
)
from .lattice import IntegralLattice, LatticeVector, RationalVector, divisibility, positive_basis

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Isometry:
    lattice: IntegralLattice
    matrix: linalg.IntMatrix
    # short description of how the isometry was built, for reports
    word: tuple[str, ...] = field(default=(), compare=False)

    @cached_property
    def array(self) -> np.ndarray:
        return linalg.as_array(self.matrix)

    @cached_property
    def det(self) -> int:
        return linalg.determinant(self.matrix)

    @cached_property
    def orientation(self) -> int:
        return 1 if is_orientation_preserving(self.lattice, self) else -1

    @cached_property
    def action(self) -> DiscAction:
        return disc_action(self.lattice, self, _form(self.lattice))

    @property
    def is_stable(self) -> bool:
        return self.action.is_identity

    def apply(self, x):
        if x.lattice != self.lattice:
            raise LatticeMismatch(f"vector of {x.lattice!r} under an isometry of {self.lattice!r}")
        coords = (self.array @ linalg.as_vector(x.coords)).tolist()
        if isinstance(x, RationalVector):
            return self.lattice.rational(coords)
        return self.lattice.vector(coords)

    __call__ = apply

    def __matmul__(self, other: "Isometry") -> "Isometry":
        if other.lattice != self.lattice:
            raise LatticeMismatch("composing isometries of different lattices")
        return Isometry(self.lattice, linalg.matmul(self.matrix, other.matrix), self.word + other.word)

    def inverse(self) -> "Isometry":
        inv = linalg.inverse(self.matrix)
        return Isometry(self.lattice, linalg.to_int_rows(inv), tuple(f"{w}^-1" for w in reversed(self.word)))

    def __pow__(self, k: int) -> "Isometry":
        result = identity(self.lattice)
        base = self if k >= 0 else self.inverse()
        for _ in range(abs(k)):
            result = result @ base
        return result

    def is_identity(self) -> bool:
        return self.matrix == linalg.identity_rows(self.lattice.rank)


@lru_cache(maxsize=64)
def _form(lattice: IntegralLattice):
    return discriminant_group(lattice)


@lru_cache(maxsize=64)
def _positive(lattice: IntegralLattice):
    return positive_basis(lattice)


def is_isometry(lattice: IntegralLattice, matrix, word=()) -> Isometry:
    try:
        rows = linalg.to_int_rows(matrix)
    except (TypeError, ValueError) as exc:
        raise NotIsometry(f"matrix is not an integer matrix: {exc}") from exc
    n = lattice.rank
    if len(rows) != n or any(len(row) != n for row in rows):
        raise NotIsometry(f"expected a {n}×{n} matrix")
    m = linalg.as_array(rows)
    if linalg.to_int_rows((m.T @ lattice.array @ m).tolist()) != lattice.gram:
        raise NotIsometry("MᵀGM != G")
    return Isometry(lattice, rows, tuple(word))


def identity(lattice: IntegralLattice) -> Isometry:
    return Isometry(lattice, linalg.identity_rows(lattice.rank), ("id",))


def negation(lattice: IntegralLattice) -> Isometry:
    n = lattice.rank
    return Isometry(lattice, tuple(tuple(-int(i == j) for j in range(n)) for i in range(n)), ("-id",))


def reflection(lattice: IntegralLattice, u: LatticeVector) -> Isometry:
    """σ_u(x) = x − (2(x,u)/u²)·u."""
    square = u.square
    if square == 0:
        raise IsotropicMirror(f"{u.coords} is isotropic")
    gu = (lattice.array @ linalg.as_vector(u.coords)).tolist()
    if any((2 * c) % square for c in gu):
        raise NotIntegral(f"reflection in {u.coords} is not integral")
    n = lattice.rank
    rows = tuple(
        tuple(int(i == j) - u.coords[i] * (2 * gu[j] // square) for j in range(n)) for i in range(n)
    )
    return is_isometry(lattice, rows, (f"s{list(u.coords)}",))


def _transvection_step(lattice: IntegralLattice, e, a, m: np.ndarray) -> np.ndarray:
    """t(e,a) applied to every column of m."""
    e_vec, a_vec = linalg.as_vector(e), linalg.as_vector(a)
    ge = e_vec @ lattice.array
    ga = a_vec @ lattice.array
    a_square = linalg.bilinear(lattice.array, a, a)
    em = ge @ m
    am = ga @ m
    half = np.array([(a_square * c) // 2 for c in em.tolist()], dtype=object)
    return m - np.outer(e_vec, am) + np.outer(a_vec, em) - np.outer(e_vec, half)


def eichler_transvection(lattice: IntegralLattice, e: LatticeVector, a: LatticeVector) -> Isometry:
    """t(x) = x − (a,x)e + (e,x)a − ½(a,a)(e,x)e for isotropic primitive e and a ⊥ e."""
    if e.square != 0 or not e.is_primitive:
        raise BadPair(f"{e.coords} is not primitive isotropic")
    if e.dot(a) != 0:
        raise BadPair(f"(e, a) = {e.dot(a)}")
    if (a.square * divisibility(lattice, e)) % 2:
        raise BadPair("½(a,a)(e,x) is not integral")
    m = _transvection_step(lattice, e.coords, a.coords, linalg.as_array(linalg.identity_rows(lattice.rank)))
    return is_isometry(lattice, m.tolist(), (f"t({list(e.coords)},{list(a.coords)})",))


def is_orientation_preserving(lattice: IntegralLattice, g, positive=None) -> bool:
    """Sign of det[(p_i, g p_j)] over a basis p of a maximal positive-definite subspace."""
    basis = positive if positive is not None else _positive(lattice)
    if not basis:
        return True
    images = [g.apply(p) for p in basis]
    pairing = [[p.dot(q) for q in images] for p in basis]
    return linalg.determinant(pairing) > 0


# ---- Eichler reduction ----

class _Reducer:
    """Tracks x and the accumulated matrix while transvections move x to e₁ + (x²/2)f₁."""

    def __init__(self, lattice: IntegralLattice, x: LatticeVector):
        self.lattice = lattice
        self.n = lattice.rank
        self.x = np.array([[c] for c in x.coords], dtype=object)
        self.m = linalg.as_array(linalg.identity_rows(self.n))
        self.steps = 0

    def unit(self, i: int, k: int = 1) -> list[int]:
        coords = [0] * self.n
        coords[i] = k
        return coords

    def t(self, e, a) -> None:
        if not any(a):
            return
        self.x = _transvection_step(self.lattice, e, a, self.x)
        self.m = _transvection_step(self.lattice, e, a, self.m)
        self.steps += 1

    @property
    def coords(self) -> list[int]:
        return [row[0] for row in self.x.tolist()]

    # X = [[α, γ], [−δ, β]] for x = αe₁ + βf₁ + γe₂ + δf₂ + m₀

    def abcd(self):
        c = self.coords
        return c[0], c[1], c[2], c[3]

    def row1_add(self, k: int) -> None:  # α −= kδ, γ += kβ
        self.t(self.unit(0), self.unit(2, k))

    def row2_add(self, k: int) -> None:  # δ −= kα, β += kγ
        self.t(self.unit(1), self.unit(3, -k))

    def col2_add(self, k: int) -> None:  # γ += kα, β −= kδ
        self.t(self.unit(1), self.unit(2, k))

    def col1_add(self, k: int) -> None:  # α += kγ, δ −= kβ
        self.t(self.unit(0), self.unit(3, -k))

    def row_swap(self) -> None:  # (r1, r2) -> (r2, −r1)
        self.row1_add(1)
        self.row2_add(-1)
        self.row1_add(1)

    def col_swap(self) -> None:  # (c1, c2) -> (c2, −c1)
        self.col1_add(1)
        self.col2_add(-1)
        self.col1_add(1)

    def diagonalize(self) -> None:
        """Euclid on X by elementary operations until X = diag(d₁, d₂) with d₁ | d₂."""
        while True:
            a, b, c, d = self.abcd()
            entries = {(0, 0): a, (0, 1): c, (1, 0): -d, (1, 1): b}
            nonzero = [(abs(v), pos) for pos, v in entries.items() if v]
            if not nonzero:
                return
            _, pos = min(nonzero)
            if pos[0] == 1:
                self.row_swap()
            if pos[1] == 1:
                self.col_swap()
            a, b, c, d = self.abcd()
            # X[1][0] = −δ, X[0][1] = γ
            self.row2_add(-((-d) // a))
            self.col2_add(-(c // a))
            a, b, c, d = self.abcd()
            if c == 0 and d == 0:
                if b % a == 0:
                    return
                self.row1_add(1)

    def absorb(self, lattice: IntegralLattice) -> None:
        """With δ = 0, shift γ by the gcd of the pairings of x with the L₀ basis."""
        gx = (lattice.array @ self.x).tolist()
        pairings = [row[0] for row in gx[4:]]
        coefficients, g = [], 0
        for c in pairings:
            u, w, g_new = igcdex(g, c)
            coefficients = [u * k for k in coefficients] + [w]
            g = g_new
        for j, k in enumerate(coefficients):
            if k:
                # t(e₂, −k·b_j): γ += k·c_j
                self.t(self.unit(2), self.unit(4 + j, -int(k)))

    def negate_plane(self) -> None:
        # row_swap twice is X -> −X
        self.row_swap()
        self.row_swap()

    def finish(self) -> None:
        """α = 1: clear γ, δ and the L₀ part, leaving e₁ + βf₁."""
        _, _, c, d = self.abcd()
        self.col2_add(-c)
        self.row2_add(d)
        tail = self.coords[4:]
        if any(tail):
            self.t(self.unit(1), [0, 0, 0, 0] + [-v for v in tail])


def eichler_reduce(lattice: IntegralLattice, x: LatticeVector) -> tuple[Isometry, LatticeVector]:
    """Stable g with g(x) = e₁ + (x²/2)·f₁, built from Eichler transvections."""
    if not lattice.split:
        raise NoSplitDeclared(f"{lattice!r} declares no U ⊕ U split")
    if not lattice.is_even:
        raise BadParam("Eichler reduction needs an even lattice")
    if x.lattice != lattice:
        raise LatticeMismatch("x is not a vector of this lattice")
    if x.is_zero or divisibility(lattice, x) != 1:
        raise DivisibilityNotOne(f"{x.coords} does not have divisibility 1")
    r = _Reducer(lattice, x)
    r.diagonalize()
    a, _, _, _ = r.abcd()
    if abs(a) != 1:
        r.absorb(lattice)
        r.diagonalize()
        a, _, _, _ = r.abcd()
    if abs(a) != 1:
        raise InvariantViolation(f"reduction of {x.coords} stalled at α = {a}")
    if a == -1:
        r.negate_plane()
    r.finish()
    target = lattice.vector([1, x.square // 2] + [0] * (lattice.rank - 2))
    g = is_isometry(lattice, r.m.tolist(), ("eichler",))
    if g.apply(x) != target:
        raise InvariantViolation(f"reduction of {x.coords} ended at {r.coords}")
    logger.debug("[isometries] reduced %s in %d transvections", x.coords, r.steps)
    return g, target


def orbit_equivalent(lattice: IntegralLattice, x: LatticeVector, y: LatticeVector) -> bool:
    """Eichler criterion: equal square, divisibility and discriminant image."""
    if not lattice.split:
        raise NoSplitDeclared(f"{lattice!r} declares no U ⊕ U split")
    for vec in (x, y):
        if not vec.is_primitive:
            raise NotPrimitive(f"{vec.coords} is not primitive")
    if x.square != y.square:
        return False
    if divisibility(lattice, x) != divisibility(lattice, y):
        return False
    form = _form(lattice)
    return disc_image(lattice, x, form) == disc_image(lattice, y, form)


def mapping_isometry(lattice: IntegralLattice, x: LatticeVector, y: LatticeVector) -> Isometry:
    """Orientation-preserving g with g(x) = y for divisibility-1 vectors in one orbit."""
    if not orbit_equivalent(lattice, x, y):
        raise NotEquivalent(f"{x.coords} and {y.coords} fail the Eichler criterion")
    if divisibility(lattice, x) != 1:
        raise DivisibilityNotOne("explicit construction needs divisibility 1")
    gx, canonical_x = eichler_reduce(lattice, x)
    gy, canonical_y = eichler_reduce(lattice, y)
    if canonical_x != canonical_y:
        raise InvariantViolation("canonical representatives differ")
    g = is_isometry(lattice, (gy.inverse() @ gx).matrix, ("eichler(y)^-1", "eichler(x)"))
    if g.apply(x) != y:
        raise InvariantViolation("g(x) != y")
    if g.orientation != 1:
        raise InvariantViolation("mapping isometry reverses orientation")
    return g
