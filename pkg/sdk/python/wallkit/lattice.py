"""Integral lattices, their vectors and sublattices.

A lattice is a nondegenerate symmetric integer Gram matrix. Vectors carry the
lattice they live in and refuse to mix with vectors of another lattice.
"""
import json
import logging
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from math import ceil, floor, isqrt, lcm
from pathlib import Path

from . import linalg
from .errors import (
    BadParam,
    Degenerate,
    DependentInput,
    FixtureInvalid,
    InvariantViolation,
    LatticeMismatch,
    NoSplitDeclared,
    NotContained,
    NotDefinite,
    NotIntegral,
    NotSymmetric,
    ZeroVector,
)
from .linalg import IntMatrix
from .schemas import LatticeDocument, VectorDocument, read_document
from .settings import fixture_path

logger = logging.getLogger(__name__)

_constants = json.loads((Path(__file__).resolve().parent.parent.parent / "constants.json").read_text())
SHORT_VECTOR_LIMIT = _constants["SHORT_VECTOR_LIMIT"]

U_GRAM = ((0, 1), (1, 0))
A2_GRAM = ((2, -1), (-1, 2))


@dataclass(frozen=True)
class IntegralLattice:
    gram: IntMatrix
    label: str = field(default="", compare=False)
    # first four coordinates form U ⊕ U, orthogonal to the rest
    split: bool = field(default=False, compare=False)
    # coordinate indices spanning a declared definite sublattice
    definite_block: tuple[int, ...] = field(default=(), compare=False)

    def __post_init__(self):
        object.__setattr__(self, "gram", linalg.to_int_rows(self.gram))
        object.__setattr__(self, "definite_block", tuple(int(i) for i in self.definite_block))

    def __repr__(self) -> str:
        return f"IntegralLattice({self.label or 'rank ' + str(self.rank)})"

    @property
    def rank(self) -> int:
        return len(self.gram)

    @property
    def is_even(self) -> bool:
        return all(self.gram[i][i] % 2 == 0 for i in range(self.rank))

    @cached_property
    def det(self) -> int:
        return linalg.determinant(self.gram)

    @property
    def is_unimodular(self) -> bool:
        return abs(self.det) == 1

    @cached_property
    def array(self):
        return linalg.as_array(self.gram)

    @cached_property
    def signature(self) -> tuple[int, int]:
        return signature(self)

    def pair(self, a, b):
        """Raw pairing of coordinate sequences (int or Fraction entries)."""
        return linalg.bilinear(self.array, a, b)

    def vector(self, coords) -> "LatticeVector":
        return LatticeVector(tuple(coords), self)

    def rational(self, coords) -> "RationalVector":
        return RationalVector(tuple(coords), self)

    def basis_vector(self, i: int) -> "LatticeVector":
        return self.vector(int(j == i) for j in range(self.rank))

    def zero(self) -> "LatticeVector":
        return self.vector([0] * self.rank)

    def sparse(self, entries: dict) -> "LatticeVector":
        coords = [0] * self.rank
        for index, value in entries.items():
            coords[int(index)] = int(value)
        return self.vector(coords)


def _check_lattice(lattice: IntegralLattice, *vectors) -> None:
    for vec in vectors:
        if vec.lattice is not lattice and vec.lattice != lattice:
            raise LatticeMismatch(f"vector of {vec.lattice!r} used in {lattice!r}")


@dataclass(frozen=True)
class LatticeVector:
    coords: tuple[int, ...]
    lattice: IntegralLattice = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(int(c) for c in self.coords))
        if len(self.coords) != self.lattice.rank:
            raise LatticeMismatch(f"{len(self.coords)} coordinates for a rank {self.lattice.rank} lattice")

    def _other(self, other) -> "LatticeVector":
        _check_lattice(self.lattice, other)
        return other

    def __add__(self, other):
        if isinstance(other, RationalVector):
            return self.to_rational() + other
        other = self._other(other)
        return LatticeVector(tuple(a + b for a, b in zip(self.coords, other.coords)), self.lattice)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self) -> "LatticeVector":
        return LatticeVector(tuple(-a for a in self.coords), self.lattice)

    def __mul__(self, k: int) -> "LatticeVector":
        return LatticeVector(tuple(k * a for a in self.coords), self.lattice)

    __rmul__ = __mul__

    def __truediv__(self, k) -> "RationalVector":
        return RationalVector(tuple(Fraction(a, 1) / k for a in self.coords), self.lattice)

    def dot(self, other) -> int:
        self._other(other)
        return self.lattice.pair(self.coords, other.coords)

    @property
    def square(self) -> int:
        return self.lattice.pair(self.coords, self.coords)

    @property
    def is_zero(self) -> bool:
        return not any(self.coords)

    @property
    def content(self) -> int:
        return linalg.content(self.coords)

    @property
    def is_primitive(self) -> bool:
        return self.content == 1

    def primitive(self) -> "LatticeVector":
        if self.is_zero:
            raise ZeroVector("zero vector has no primitive part")
        c = self.content
        return LatticeVector(tuple(a // c for a in self.coords), self.lattice)

    def to_rational(self) -> "RationalVector":
        return RationalVector(self.coords, self.lattice)

    def sign_normalized(self) -> "LatticeVector":
        """The representative of ±self with positive first nonzero coordinate."""
        lead = next((a for a in self.coords if a), 0)
        return -self if lead < 0 else self

    def is_parallel(self, other) -> bool:
        self._other(other)
        if self.is_zero or other.is_zero:
            return self.is_zero and other.is_zero
        return self.primitive().sign_normalized() == other.primitive().sign_normalized()


@dataclass(frozen=True)
class RationalVector:
    coords: tuple[Fraction, ...]
    lattice: IntegralLattice = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(Fraction(c) for c in self.coords))
        if len(self.coords) != self.lattice.rank:
            raise LatticeMismatch(f"{len(self.coords)} coordinates for a rank {self.lattice.rank} lattice")

    def __add__(self, other):
        _check_lattice(self.lattice, other)
        return RationalVector(tuple(a + b for a, b in zip(self.coords, other.coords)), self.lattice)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self) -> "RationalVector":
        return RationalVector(tuple(-a for a in self.coords), self.lattice)

    def __mul__(self, k) -> "RationalVector":
        return RationalVector(tuple(k * a for a in self.coords), self.lattice)

    __rmul__ = __mul__

    def __truediv__(self, k) -> "RationalVector":
        return RationalVector(tuple(a / k for a in self.coords), self.lattice)

    def dot(self, other) -> Fraction:
        _check_lattice(self.lattice, other)
        return Fraction(self.lattice.pair(self.coords, other.coords))

    @property
    def square(self) -> Fraction:
        return Fraction(self.lattice.pair(self.coords, self.coords))

    @property
    def is_integral(self) -> bool:
        return linalg.is_integral(self.coords)

    @property
    def denominator(self) -> int:
        return lcm(*(a.denominator for a in self.coords)) if self.coords else 1

    def to_lattice_vector(self) -> LatticeVector:
        if not self.is_integral:
            raise NotIntegral(f"{self} has denominator {self.denominator}")
        return LatticeVector(tuple(a.numerator for a in self.coords), self.lattice)


@dataclass(frozen=True)
class Sublattice:
    ambient: IntegralLattice
    basis: tuple[LatticeVector, ...]

    def __post_init__(self):
        object.__setattr__(self, "basis", tuple(self.basis))
        _check_lattice(self.ambient, *self.basis)
        if self.basis and linalg.smith_form([x.coords for x in self.basis]).rank < len(self.basis):
            raise DependentInput("sublattice basis is linearly dependent")

    @property
    def rank(self) -> int:
        return len(self.basis)

    @cached_property
    def induced_gram(self) -> IntMatrix:
        return tuple(tuple(x.dot(y) for y in self.basis) for x in self.basis)

    @cached_property
    def det(self) -> int:
        return linalg.determinant(self.induced_gram)

    def as_lattice(self, label: str = "") -> IntegralLattice:
        return make_lattice(self.induced_gram, label=label)

    def rational_coordinates(self, x) -> tuple[Fraction, ...]:
        _check_lattice(self.ambient, x)
        if not self.basis:
            if any(x.coords):
                raise NotContained("nonzero vector in the zero sublattice")
            return ()
        solution = linalg.solve_combination([b.coords for b in self.basis], x.coords)
        if solution is None:
            raise NotContained(f"{x.coords} is outside the rational span")
        return solution

    def coordinates(self, x) -> tuple[int, ...]:
        solution = self.rational_coordinates(x)
        if not linalg.is_integral(solution):
            raise NotContained(f"{x.coords} lies in the span but not in the sublattice")
        return tuple(int(c) for c in solution)

    def contains(self, x) -> bool:
        try:
            self.coordinates(x)
        except NotContained:
            return False
        return True

    def vector(self, coeffs) -> LatticeVector:
        total = [0] * self.ambient.rank
        for c, b in zip(coeffs, self.basis):
            for i, a in enumerate(b.coords):
                total[i] += int(c) * a
        return self.ambient.vector(total)


# ---- construction ----

def _validate_split(gram: IntMatrix) -> bool:
    n = len(gram)
    if n < 4:
        return False
    for i in range(4):
        for j in range(n):
            expected = 1 if (i < 4 and j < 4 and i // 2 == j // 2 and i != j) else 0
            if gram[i][j] != expected:
                return False
    return True


def make_lattice(gram, label: str = "", split: bool = False, definite_block=()) -> IntegralLattice:
    rows = linalg.to_int_rows(gram)
    n = len(rows)
    if n == 0 or any(len(row) != n for row in rows):
        raise NotSymmetric("gram must be a nonempty square matrix")
    if any(rows[i][j] != rows[j][i] for i in range(n) for j in range(i)):
        raise NotSymmetric("gram is not symmetric")
    lattice = IntegralLattice(rows, label=label, split=split, definite_block=tuple(definite_block))
    if lattice.det == 0:
        raise Degenerate(f"{label or 'gram'} has determinant 0")
    if split and not _validate_split(rows):
        raise NoSplitDeclared(f"{label or 'lattice'} does not start with U ⊕ U")
    if any(not 0 <= i < n for i in lattice.definite_block):
        raise BadParam("definite_block index out of range")
    return lattice


def direct_sum(*lattices: IntegralLattice, label: str = "", split: bool = False) -> IntegralLattice:
    n = sum(L.rank for L in lattices)
    rows = [[0] * n for _ in range(n)]
    offset = 0
    for L in lattices:
        for i in range(L.rank):
            for j in range(L.rank):
                rows[offset + i][offset + j] = L.gram[i][j]
        offset += L.rank
    name = label or " ⊕ ".join(L.label for L in lattices)
    return make_lattice(rows, label=name, split=split)


def scaled(lattice: IntegralLattice, k: int) -> IntegralLattice:
    if k == 0:
        raise BadParam("scale factor must be nonzero")
    if k == 1:
        return lattice
    return make_lattice([[k * e for e in row] for row in lattice.gram], label=f"{lattice.label}({k})")


def change_basis(lattice: IntegralLattice, matrix) -> IntegralLattice:
    """Gram in the basis given by the columns of a unimodular matrix."""
    if abs(linalg.determinant(matrix)) != 1:
        raise BadParam("basis change must be unimodular")
    p = linalg.as_array(matrix)
    return make_lattice((p.T @ lattice.array @ p).tolist(), label=lattice.label)


@lru_cache(maxsize=None)
def _e8_fixture(path: str) -> IntegralLattice:
    try:
        doc = read_document(Path(path), LatticeDocument)
        lattice = make_lattice(doc.gram, label="E8")
    except Exception as exc:
        raise FixtureInvalid(f"E8 fixture {path}: {exc}") from exc
    if not lattice.is_even or abs(lattice.det) != 1 or lattice.signature != (8, 0):
        raise FixtureInvalid(f"E8 fixture {path} is not even unimodular positive definite of rank 8")
    return lattice


def e8() -> IntegralLattice:
    return _e8_fixture(str(fixture_path("e8.json")))


def _mukai(e8_blocks: int) -> IntegralLattice:
    return _mukai_from(e8_blocks, e8())


@lru_cache(maxsize=None)
def _mukai_from(e8_blocks: int, e8_lattice: IntegralLattice) -> IntegralLattice:
    """(r; U³; E8(−1)^k; s) with (r, s) pairing to −1."""
    n = 8 + 8 * e8_blocks
    rows = [[0] * n for _ in range(n)]
    rows[0][n - 1] = rows[n - 1][0] = -1
    for start in (1, 3, 5):
        rows[start][start + 1] = rows[start + 1][start] = 1
    block = e8_lattice.gram
    for b in range(e8_blocks):
        offset = 7 + 8 * b
        for i in range(8):
            for j in range(8):
                rows[offset + i][offset + j] = -block[i][j]
    return make_lattice(rows, label="mukai_k3" if e8_blocks else "mukai_abelian")


@lru_cache(maxsize=None)
def kummer(n: int) -> IntegralLattice:
    if n < 1:
        raise BadParam(f"kummer needs n >= 1, got {n}")
    u = make_lattice(U_GRAM, label="U")
    return direct_sum(u, u, u, make_lattice([[-2 * n - 2]]), label=f"kummer({n})", split=True)


@lru_cache(maxsize=None)
def coxeter_todd() -> IntegralLattice:
    """K12 as {x in E^6 : x_i ≡ x_j mod θ, Σx_i ≡ 0 mod 3} with norm (2/3)Σ|x_i|², E = Z[ω], θ = 1 + 2ω.

    Coordinates are (a_1, b_1, ..., a_6, b_6) with x_i = a_i + b_i ω; x_i mod θ is a_i + b_i mod 3.
    """
    rows = []
    # free residues a_1, b_1, a_2..a_5; the rest is forced, then 3·e_p for each forced coordinate
    for free in (0, 1, 2, 4, 6, 8):
        a, b = [0] * 6, [0] * 6
        (a if free % 2 == 0 else b)[free // 2] = 1
        a[5] = -sum(a[:5]) % 3
        c = a[0] + b[0]
        for i in range(1, 6):
            b[i] = (c - a[i]) % 3
        rows.append([x for pair in zip(a, b) for x in pair])
    rows.extend([3 * (j == p) for j in range(12)] for p in (3, 5, 7, 9, 10, 11))
    a2_sum = [[A2_GRAM[i % 2][j % 2] if i // 2 == j // 2 else 0 for j in range(12)] for i in range(12)]
    scaled_gram = linalg.matmul(linalg.matmul(rows, a2_sum), [list(col) for col in zip(*rows)])
    if any(e % 3 for row in scaled_gram for e in row):
        raise InvariantViolation("K12 construction is not integral")
    return make_lattice([[e // 3 for e in row] for row in scaled_gram], label="K12")


def rank1(m: int) -> IntegralLattice:
    if m == 0 or m % 2:
        raise BadParam(f"rank1 needs a nonzero even m, got {m}")
    return make_lattice([[m]], label=f"rank1({m})")


_NAME = re.compile(r"^(?P<name>[A-Za-z_0-9]+?)(?:\((?P<param>-?\d+)\))?$")


def standard_lattice(name: str, param: int | None = None) -> IntegralLattice:
    """U, A2, E8, K12 (optionally scaled), rank1(m), mukai_k3, mukai_abelian, kummer(n)."""
    match = _NAME.match(name.strip().replace("−", "-"))
    if not match:
        raise BadParam(f"unknown lattice {name!r}")
    base = match.group("name")
    if match.group("param") is not None:
        param = int(match.group("param"))
    if base == "kummer":
        if param is None:
            raise BadParam("kummer needs n")
        return kummer(param)
    if base == "rank1":
        if param is None:
            raise BadParam("rank1 needs m")
        return rank1(param)
    if base in ("mukai_k3", "mukai_abelian"):
        if param is not None:
            raise BadParam(f"{base} takes no parameter")
        return _mukai(2 if base == "mukai_k3" else 0)
    if base == "U":
        lattice = make_lattice(U_GRAM, label="U")
    elif base == "A2":
        lattice = make_lattice(A2_GRAM, label="A2")
    elif base == "E8":
        lattice = e8()
    elif base == "K12":
        lattice = coxeter_todd()
    else:
        raise BadParam(f"unknown lattice {name!r}")
    return scaled(lattice, 1 if param is None else param)


# ---- pairing and divisibility ----

def inner(lattice: IntegralLattice, x, y):
    _check_lattice(lattice, x, y)
    return lattice.pair(x.coords, y.coords)


def divisibility(lattice: IntegralLattice, x: LatticeVector) -> int:
    _check_lattice(lattice, x)
    if x.is_zero:
        raise ZeroVector("divisibility of the zero vector")
    return linalg.content((lattice.array @ linalg.as_vector(x.coords)).tolist())


def dual_class(lattice: IntegralLattice, x: LatticeVector) -> RationalVector:
    return x / divisibility(lattice, x)


def relative_divisibility(sub: Sublattice, x: LatticeVector) -> int:
    """Divisibility of x as an element of the lattice `sub`, not of the ambient."""
    coeffs = sub.coordinates(x)
    if not any(coeffs):
        raise ZeroVector("divisibility of the zero vector")
    return linalg.content((linalg.as_array(sub.induced_gram) @ linalg.as_vector(coeffs)).tolist())


# ---- sublattices ----

def sublattice(lattice: IntegralLattice, vectors) -> Sublattice:
    return Sublattice(lattice, tuple(vectors))


def saturation(lattice: IntegralLattice, vectors) -> Sublattice:
    vectors = list(vectors)
    _check_lattice(lattice, *vectors)
    if not vectors:
        return Sublattice(lattice, ())
    rows, index = linalg.row_saturation([v.coords for v in vectors])
    if not rows:
        raise DependentInput("vectors are linearly dependent")
    if index == 1:
        return Sublattice(lattice, tuple(vectors))
    logger.debug("[lattice] saturation index %d for %d vectors", index, len(vectors))
    return Sublattice(lattice, tuple(lattice.vector(r) for r in rows))


def saturation_index(lattice: IntegralLattice, vectors) -> int:
    _, index = linalg.row_saturation([v.coords for v in vectors])
    if not index:
        raise DependentInput("vectors are linearly dependent")
    return index


def orthogonal_complement(lattice: IntegralLattice, vectors) -> Sublattice:
    vectors = list(vectors)
    _check_lattice(lattice, *vectors)
    rows = [tuple((linalg.as_vector(v.coords) @ lattice.array).tolist()) for v in vectors]
    kernel = linalg.integer_kernel(rows, lattice.rank)
    return Sublattice(lattice, tuple(lattice.vector(k) for k in kernel))


# ---- signature ----

def signature(lattice: IntegralLattice) -> tuple[int, int]:
    _, diag = linalg.diagonalize(lattice.gram)
    if any(d == 0 for d in diag):
        raise Degenerate(f"{lattice!r} is degenerate")
    return sum(1 for d in diag if d > 0), sum(1 for d in diag if d < 0)


def positive_basis(lattice: IntegralLattice) -> tuple[LatticeVector, ...]:
    """Integral basis of a maximal positive-definite subspace."""
    basis, diag = linalg.diagonalize(lattice.gram)
    result = []
    for vec, d in zip(basis, diag):
        if d > 0:
            scale = lcm(*(c.denominator for c in vec))
            result.append(lattice.vector(int(c * scale) for c in vec))
    return tuple(result)


# ---- short vectors ----

def _quadratic_coefficients(gram) -> list[list[Fraction]]:
    """Completed-square form: Q(x) = Σ q_ii (x_i + Σ_{j>i} q_ij x_j)²."""
    n = len(gram)
    q = [[Fraction(e) for e in row] for row in gram]
    for i in range(n):
        for j in range(i + 1, n):
            q[j][i] = q[i][j]
            q[i][j] = q[i][j] / q[i][i]
        for k in range(i + 1, n):
            for m in range(k, n):
                q[k][m] -= q[k][i] * q[i][m]
    return q


def _enumerate(q: list[list[Fraction]], bound: Fraction):
    """Yield (x, Q(x)) for every integer x with Q(x) <= bound, last coordinate outermost."""
    n = len(q)
    x = [0] * n

    def walk(i: int, remaining: Fraction):
        center = sum((q[i][j] * x[j] for j in range(i + 1, n)), Fraction(0))
        radius = remaining / q[i][i]
        span = isqrt(floor(radius)) + 1
        for value in range(floor(-center) - span, ceil(-center) + span + 1):
            t = value + center
            if t * t > radius:
                continue
            x[i] = value
            rest = remaining - q[i][i] * t * t
            if i == 0:
                yield tuple(x), bound - rest
            else:
                yield from walk(i - 1, rest)
        x[i] = 0

    yield from walk(n - 1, Fraction(bound))


def short_vectors(lattice: IntegralLattice, norm: int, limit: int = SHORT_VECTOR_LIMIT) -> list[LatticeVector]:
    """All vectors of square exactly `norm`, closed under negation, sorted lexicographically."""
    p, q = lattice.signature
    if q == 0:
        gram, target = lattice.gram, norm
    elif p == 0:
        gram, target = [[-e for e in row] for row in lattice.gram], -norm
    else:
        raise NotDefinite(f"{lattice!r} has signature ({p},{q})")
    if target <= 0:
        return []
    coefficients = _quadratic_coefficients(gram)
    found = []
    for coords, value in _enumerate(coefficients, Fraction(target)):
        if value != target:
            continue
        lead = next((c for c in coords if c), 0)
        if lead <= 0:
            continue
        found.append(coords)
        if 2 * len(found) >= limit:
            logger.warning("[lattice] short_vectors stopped at limit %d", limit)
            break
    logger.debug("[lattice] %d vectors of norm %d in %r", 2 * len(found), norm, lattice)
    everything = found + [tuple(-c for c in coords) for coords in found]
    return [lattice.vector(c) for c in sorted(everything)]


# ---- documents ----

_BLOCKS = {"U": lambda: make_lattice(U_GRAM, label="U"), "A2": lambda: make_lattice(A2_GRAM, label="A2"), "E8": e8, "K12": coxeter_todd}


def lattice_from_document(doc: LatticeDocument) -> IntegralLattice:
    if doc.standard is not None:
        lattice = standard_lattice(doc.standard)
        if doc.split and not lattice.split:
            raise NoSplitDeclared(f"{doc.standard} has no U ⊕ U split")
        return lattice
    if doc.gram is not None:
        return make_lattice(doc.gram, label=doc.label, split=doc.split, definite_block=doc.definite_block)
    parts = []
    for name, k in doc.blocks:
        if name == "rank1":
            parts.append(rank1(k))
        elif name in _BLOCKS:
            parts.append(scaled(_BLOCKS[name](), k))
        else:
            raise BadParam(f"unknown block {name!r}")
    combined = direct_sum(*parts, label=doc.label)
    return make_lattice(combined.gram, label=doc.label or combined.label, split=doc.split,
                        definite_block=doc.definite_block)


def load_lattice(source) -> IntegralLattice:
    """Lattice from a JSON file/dict, or a standard name such as "kummer(5)"."""
    if isinstance(source, str) and _NAME.match(source.strip()) and not Path(source).exists():
        return standard_lattice(source)
    return lattice_from_document(read_document(source, LatticeDocument))


def load_vector(source, lattice: IntegralLattice | None = None) -> LatticeVector:
    doc = read_document(source, VectorDocument)
    if lattice is None:
        lattice = standard_lattice(doc.lattice)
    elif doc.lattice != lattice.label:
        raise LatticeMismatch(f"vector declared in {doc.lattice!r}, expected {lattice.label!r}")
    return lattice.vector(doc.coords)
