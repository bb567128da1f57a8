"""Wall-divisor criteria for moduli of sheaves on K3 and abelian surfaces.

Each criterion is a finite search in the rank-2 saturated sublattice T spanned by
the Mukai vector and the candidate divisor. The search itself (`rank2_solve`)
decomposes w = (p/v²)·v + β·n₀ with n₀ spanning v^⊥ in T, so the window on
(w, v) bounds everything.
"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from math import isqrt
from typing import Callable, Sequence, Union

from . import linalg
from .errors import (
    BadDivisor,
    BadParam,
    BadWitness,
    LatticeMismatch,
    NotHyperbolic,
    NotPositive,
    NotPrimitive,
    OddSquare,
    OnWall,
    UnboundedWindow,
)
from .lattice import IntegralLattice, LatticeVector, Sublattice, saturation, standard_lattice

logger = logging.getLogger(__name__)


class Clause(str, Enum):
    BM1 = "BM1"
    BM2 = "BM2"
    YOSH = "YOSH"
    MZ0 = "MZ0"
    MZ1 = "MZ1"
    NONE = "none"


class ContractionType(str, Enum):
    TYPE_I = "Type I"
    TYPE_II = "Type II"
    NONE = "none"


@dataclass(frozen=True)
class ExactSquare:
    """w² = c and lo <= (w, v) <= hi."""

    c: int
    lo: int
    hi: int


@dataclass(frozen=True)
class RangeSquare:
    """0 <= w² < (w, v) <= hi."""

    hi: int


Window = Union[ExactSquare, RangeSquare]


@dataclass(frozen=True)
class WallVerdict:
    is_wall: bool
    clause: Clause
    witness: LatticeVector | None
    T: Sublattice
    candidates: tuple[LatticeVector, ...] = field(default=())


@dataclass(frozen=True)
class Contraction:
    type: ContractionType
    w: LatticeVector | None
    T: Sublattice


# ---- Mukai vectors ----

def _mukai_lattice(surface: str) -> IntegralLattice:
    key = surface.strip().lower()
    if key in ("k3", "mukai_k3"):
        return standard_lattice("mukai_k3")
    if key in ("abelian", "mukai_abelian"):
        return standard_lattice("mukai_abelian")
    raise BadParam(f"unknown surface {surface!r}")


def mukai_vector(surface: str, r: int, ell: Sequence[int], s: int) -> LatticeVector:
    """(r; ell; s) with ell padded by zeros to the middle block."""
    lattice = _mukai_lattice(surface)
    middle = lattice.rank - 2
    ell = list(ell)
    if len(ell) > middle:
        raise BadParam(f"{len(ell)} middle coordinates for a block of size {middle}")
    return lattice.vector([r, *ell, *([0] * (middle - len(ell))), s])


def mukai_from_chern(surface: str, r: int, c1: Sequence[int], c2: int, convention: str = "half") -> LatticeVector:
    """Mukai vector of a sheaf from rank and Chern classes.

    "half" uses c1²/2 and reproduces (1,0,−n−1) for ideal sheaves; "printed" uses c1².
    """
    lattice = _mukai_lattice(surface)
    middle = mukai_vector(surface, 0, list(getattr(c1, "coords", c1)), 0)
    c1_square = middle.square
    offset = r if lattice.rank == 24 else 0
    if convention == "half":
        if c1_square % 2:
            raise OddSquare(f"c1² = {c1_square} is odd")
        s = c1_square // 2 - c2 + offset
    elif convention == "printed":
        s = c1_square - c2 + offset
    else:
        raise BadParam(f"unknown convention {convention!r}")
    coords = list(middle.coords)
    coords[0], coords[-1] = r, s
    return lattice.vector(coords)


# ---- rank-2 machinery ----

def rank2_closure(lattice: IntegralLattice, v: LatticeVector, d: LatticeVector) -> Sublattice:
    t = saturation(lattice, [v, d])
    if t.det >= 0:
        raise NotHyperbolic(f"T has Gram {t.induced_gram}, not signature (1,1)")
    return t


def _gram_of(t) -> tuple[tuple[int, ...], ...]:
    return t.induced_gram if isinstance(t, Sublattice) else t.gram


def _rational_sqrt(value: Fraction) -> Fraction | None:
    if value < 0:
        return None
    num, den = isqrt(value.numerator), isqrt(value.denominator)
    if num * num != value.numerator or den * den != value.denominator:
        return None
    return Fraction(num, den)


def rank2_solve(t, v: Sequence[int], mode: Window) -> list[tuple[int, ...]]:
    """Every w in T (coordinates in T's basis) satisfying the window, sorted by ((w,v), w², w)."""
    gram = _gram_of(t)
    if len(gram) != 2:
        raise BadParam("T must have rank 2")
    if linalg.determinant(gram) >= 0:
        raise NotHyperbolic(f"T has Gram {gram}, not signature (1,1)")
    g = linalg.as_array(gram)
    v = tuple(int(c) for c in v)
    v_square = linalg.bilinear(g, v, v)
    if v_square <= 0:
        raise BadParam("v must have positive square")
    p1, p2 = (g @ linalg.as_vector(v)).tolist()
    c = linalg.content([p2, p1])
    n0 = (p2 // c, -p1 // c)
    n_abs = -linalg.bilinear(g, n0, n0)

    if isinstance(mode, ExactSquare):
        if mode.lo > mode.hi:
            raise UnboundedWindow(f"window [{mode.lo}, {mode.hi}] is empty")
        targets = [(p, mode.c) for p in range(mode.lo, mode.hi + 1)]
    else:
        targets = [(p, sq) for p in range(1, mode.hi + 1) for sq in range(0, p)]

    found = set()
    for p, sq in targets:
        beta = _rational_sqrt(Fraction(p * p - v_square * sq, v_square * n_abs))
        if beta is None:
            continue
        for b in {beta, -beta}:
            w = tuple(Fraction(p, v_square) * vi + b * ni for vi, ni in zip(v, n0))
            if linalg.is_integral(w):
                found.add((p, sq, tuple(int(x) for x in w)))
    return [w for _, _, w in sorted(found)]


def _ordered(lattice: IntegralLattice, v: LatticeVector, vectors) -> list[LatticeVector]:
    # (w, v) ascending, then w² ascending, then coordinates lexicographically descending
    return sorted(vectors, key=lambda w: (w.dot(v), w.square, tuple(-c for c in w.coords)))


def _check_pair(v: LatticeVector, d: LatticeVector, need_square: int | None = None, ambient: str | None = None) -> None:
    if v.lattice != d.lattice:
        raise LatticeMismatch("v and D live in different lattices")
    if ambient is not None and v.lattice != standard_lattice(ambient):
        raise LatticeMismatch(f"criterion needs a vector of {ambient}, got {v.lattice!r}")
    if not v.is_primitive:
        raise NotPrimitive(f"{v.coords} is not primitive")
    if need_square is not None and v.square != need_square:
        raise BadParam(f"expected square {need_square}, got {v.square}")
    if v.square <= 0:
        raise BadParam("v must have positive square")
    if d.square >= 0 or d.dot(v) != 0:
        raise BadDivisor(f"D² = {d.square}, (D, v) = {d.dot(v)}")


def _classify(v: LatticeVector, d: LatticeVector, clauses, exhaustive: bool) -> WallVerdict:
    lattice = v.lattice
    t = rank2_closure(lattice, v, d)
    v_in_t = t.coordinates(v)
    fired, witness, candidates = Clause.NONE, None, []
    for clause, mode in clauses:
        found = _ordered(lattice, v, [t.vector(c) for c in rank2_solve(t, v_in_t, mode)])
        if found and witness is None:
            fired, witness = clause, found[0]
            candidates.extend(found)
            if not exhaustive:
                break
        elif exhaustive:
            candidates.extend(found)
    logger.debug("[walls] v=%s D=%s -> %s", v.coords, d.coords, fired.value)
    return WallVerdict(witness is not None, fired, witness, t, tuple(candidates))


def bm_wall(v: LatticeVector, d: LatticeVector, exhaustive: bool = False) -> WallVerdict:
    """K3 criterion: a (−2)-class with 0 <= (w,v) <= v²/2, or w² >= 0 with w² < (w,v) <= v²/2."""
    _check_pair(v, d, ambient="mukai_k3")
    hi = v.square // 2
    return _classify(v, d, [(Clause.BM1, ExactSquare(-2, 0, hi)), (Clause.BM2, RangeSquare(hi))], exhaustive)


def yoshioka_wall(v: LatticeVector, d: LatticeVector, exhaustive: bool = False) -> WallVerdict:
    """Abelian criterion: only the w² >= 0 clause."""
    _check_pair(v, d, ambient="mukai_abelian")
    return _classify(v, d, [(Clause.YOSH, RangeSquare(v.square // 2))], exhaustive)


def mz_wall(w: LatticeVector, d: LatticeVector, exhaustive: bool = False) -> WallVerdict:
    """Singular moduli with w² = 2: a root s in T with (s, w) = 0 or 1."""
    _check_pair(w, d, need_square=2)
    return _classify(w, d, [(Clause.MZ0, ExactSquare(-2, 0, 0)), (Clause.MZ1, ExactSquare(-2, 1, 1))], exhaustive)


CRITERIA: dict[str, Callable[..., WallVerdict]] = {"bm": bm_wall, "yoshioka": yoshioka_wall, "mz": mz_wall}


def mz_wall_from_s(w: LatticeVector, s: LatticeVector) -> LatticeVector:
    """Primitive generator of ⟨w, s⟩ ∩ w^⊥ with positive first nonzero coordinate."""
    if s.square != -2 or s.dot(w) not in (0, 1):
        raise BadWitness(f"s² = {s.square}, (s, w) = {s.dot(w)}")
    d = w.square * s - s.dot(w) * w
    return d.primitive().sign_normalized()


# ---- Kummer type ----

def kummer_v(n: int) -> LatticeVector:
    return mukai_vector("abelian", 1, [], -n - 1)


def kummer_delta(n: int) -> LatticeVector:
    return mukai_vector("abelian", 1, [], n + 1)


def kummer_embedding(n: int) -> Sublattice:
    """kummer(n) = v^⊥ ⊂ Λ8 via (a; c) ↦ (c; a; c(n+1)); basis images in kummer coordinate order."""
    ambient = standard_lattice("mukai_abelian")
    basis = [ambient.basis_vector(i + 1) for i in range(6)]
    basis.append(kummer_delta(n))
    return Sublattice(ambient, tuple(basis))


def embed_kummer(n: int, x: LatticeVector) -> LatticeVector:
    if x.lattice != standard_lattice(f"kummer({n})"):
        raise LatticeMismatch(f"{x.lattice!r} is not kummer({n})")
    return kummer_embedding(n).vector(x.coords)


def contraction_divisor(n: int, w: LatticeVector) -> LatticeVector:
    v = kummer_v(n)
    pairing = v.dot(w)
    if pairing == 1:
        return v - (2 * n + 2) * w
    if pairing == 2:
        return v - (n + 1) * w
    raise BadWitness(f"(v, w) = {pairing}, expected 1 or 2")


def kummer_contraction_type(n: int, d: LatticeVector) -> Contraction:
    """Type II ((v,w) = 2) is checked before Type I ((v,w) = 1); D is compared up to sign."""
    if d.lattice == standard_lattice(f"kummer({n})"):
        d = embed_kummer(n, d)
    v = kummer_v(n)
    if not d.is_primitive:
        raise NotPrimitive(f"{d.coords} is not primitive")
    _check_pair(v, d)
    t = rank2_closure(v.lattice, v, d)
    isotropic = [t.vector(c) for c in rank2_solve(t, t.coordinates(v), ExactSquare(0, 1, 2))]
    isotropic = [w for w in _ordered(v.lattice, v, isotropic) if w.is_primitive]
    for pairing, kind in ((2, ContractionType.TYPE_II), (1, ContractionType.TYPE_I)):
        for w in isotropic:
            if w.dot(v) == pairing and contraction_divisor(n, w).is_parallel(d):
                return Contraction(kind, w, t)
    return Contraction(ContractionType.NONE, None, t)


# ---- chambers ----

def chamber_separates(walls: Sequence[LatticeVector], h1, h2) -> bool:
    if h1.square <= 0 or h2.square <= 0 or h1.dot(h2) <= 0:
        raise NotPositive("h1, h2 must be positive classes in the same cone component")
    pairings = [(wall.dot(h1), wall.dot(h2)) for wall in walls]
    if any(a == 0 or b == 0 for a, b in pairings):
        raise OnWall("a class lies on a wall")
    return any(a * b < 0 for a, b in pairings)


def wall_preserving(g, v: LatticeVector, divisors: Sequence[LatticeVector], criterion: str = "bm"):
    """First divisor whose wall verdict changes under g (g must fix v), or None."""
    classify = CRITERIA[criterion]
    if g.apply(v) != v:
        raise BadParam("g does not fix v")
    for d in divisors:
        if classify(v, d).is_wall != classify(v, g.apply(d)).is_wall:
            logger.warning("[walls] verdict of %s changes under g", d.coords)
            return d
    return None
