"""Kummer-type monodromy bookkeeping (χ, W, N) and the OG10 non-monodromy certificate."""
import json
import logging
import random
from dataclasses import dataclass
from pathlib import Path

from sympy import primefactors

from . import linalg
from .discriminant import DiscScalar, classify_pm1, discriminant_group
from .errors import (
    BadParam,
    FixtureInvalid,
    InvariantViolation,
    LatticeMismatch,
    NoSuchF,
    WallkitError,
)
from .isometries import (
    Isometry,
    eichler_transvection,
    mapping_isometry,
    negation,
    reflection,
)
from .lattice import (
    IntegralLattice,
    LatticeVector,
    Sublattice,
    divisibility,
    lattice_from_document,
    orthogonal_complement,
    relative_divisibility,
    saturation_index,
    short_vectors,
    standard_lattice,
    sublattice,
)
from .schemas import CoinvariantDocument, EmbeddingDocument, FixtureDocument, read_document
from .settings import fixture_path
from .walls import Clause, ContractionType, embed_kummer, kummer_contraction_type, kummer_v, mz_wall, mz_wall_from_s, yoshioka_wall

logger = logging.getLogger(__name__)

_constants = json.loads((Path(__file__).resolve().parent.parent.parent / "constants.json").read_text())
F_SEARCH_LIMIT = _constants["F_SEARCH_LIMIT"]
OG10_SQUARE = _constants["OG10_SQUARE"]
SAMPLE_WORD_MAX = _constants["SAMPLE_WORD_MAX"]
SAMPLE_COEFF_BOUND = _constants["SAMPLE_COEFF_BOUND"]

MARKMAN_CITATION = "Mon²(X) ∩ W_X = N_X (Markman; cited lower bound, not computed)"
KUMMER_RULE = "Mon²(X) = N_X for generalized Kummer type (decision rule)"
FALLBACK_PREMISE = "F lies outside any coinvariant lattice, so its non-wall status is assumed rather than inherited"


# ---- Kummer ----

def _kummer(n: int, g: Isometry) -> IntegralLattice:
    lattice = standard_lattice(f"kummer({n})")
    if g.lattice != lattice:
        raise LatticeMismatch(f"isometry of {g.lattice!r}, expected kummer({n})")
    return lattice


def chi(n: int, g: Isometry) -> DiscScalar:
    _kummer(n, g)
    return classify_pm1(g.action)


@dataclass(frozen=True)
class MonVerdict:
    in_monodromy: bool
    orientation: int
    chi: DiscScalar
    det: int
    reason: str


def mon_membership_kummer(n: int, g: Isometry) -> MonVerdict:
    """g ∈ N_X: orientation-preserving, χ = ±1 and det·χ = +1."""
    character = chi(n, g)
    orientation, det = g.orientation, g.det
    if orientation != 1:
        return MonVerdict(False, orientation, character, det, "orientation: g reverses the positive cone orientation")
    if character == DiscScalar.OTHER:
        return MonVerdict(False, orientation, character, det, "chi: action on the discriminant group is not ±1")
    product = det * (1 if character == DiscScalar.PLUS else -1)
    if product != 1:
        return MonVerdict(False, orientation, character, det, f"det·chi: det {det:+d} and chi {character.value} multiply to -1")
    return MonVerdict(True, orientation, character, det, "orientation +1, chi ±1, det·chi = +1")


def w_exponent(n: int) -> int:
    """a with a + 1 = number of distinct primes dividing n + 1."""
    if n < 1:
        raise BadParam(f"n must be >= 1, got {n}")
    return len(primefactors(n + 1)) - 1


def count_sqrt_units(n: int) -> int:
    """#{u ∈ (Z/(2n+2))^× : u² ≡ 1 mod 2(2n+2)} by direct loop."""
    if n < 1:
        raise BadParam(f"n must be >= 1, got {n}")
    m = 2 * n + 2
    return sum(1 for u in range(1, m) if linalg.content([u, m]) == 1 and (u * u) % (2 * m) == 1)


@dataclass(frozen=True)
class KummerProofTrace:
    n: int
    k: int
    l: LatticeVector
    t_integral: bool
    t_prime_integral: bool
    k_mod: int
    type_of_image: ContractionType
    div_of_image: int
    wall_clause: Clause
    pell: bool

    @property
    def is_unit_residue(self) -> bool:
        return self.k_mod in (1, 2 * self.n + 1)


def kummer_proof_trace(n: int, g: Isometry) -> KummerProofTrace:
    lattice = _kummer(n, g)
    m = 2 * n + 2
    delta = lattice.basis_vector(6)
    image = g.apply(delta)
    k = image.coords[6]
    head = image.coords[:6]
    if any(c % m for c in head):
        raise InvariantViolation(f"g(δ) = {image.coords} is not kδ + {m}·l")
    l = lattice.vector([c // m for c in head] + [0])
    pell = k * k - m * l.square == 1
    if not pell:
        raise InvariantViolation(f"k² − {m}·l² = {k * k - m * l.square}")

    v = kummer_v(n)
    image_ambient = embed_kummer(n, image)
    t = (v + image_ambient) / m
    t_prime = (v - image_ambient) / m
    verdict = yoshioka_wall(v, image_ambient)
    contraction = kummer_contraction_type(n, image_ambient)
    trace = KummerProofTrace(
        n=n,
        k=k,
        l=l,
        t_integral=t.is_integral,
        t_prime_integral=t_prime.is_integral,
        k_mod=k % m,
        type_of_image=contraction.type,
        div_of_image=divisibility(lattice, image),
        wall_clause=verdict.clause,
        pell=pell,
    )
    if verdict.is_wall and not trace.is_unit_residue:
        logger.warning("[monodromy] n=%d: g(δ) is a %s wall with k ≡ %d mod %d", n, contraction.type.value, trace.k_mod, m)
    if contraction.type == ContractionType.TYPE_I:
        expected = (trace.k_mod == 1 and trace.t_prime_integral) or (trace.k_mod == m - 1 and trace.t_integral)
        if not expected or trace.t_integral == trace.t_prime_integral:
            raise InvariantViolation(f"Type I image with k ≡ {trace.k_mod}, t {trace.t_integral}, t′ {trace.t_prime_integral}")
    return trace


def kummer_generators(n: int) -> list[Isometry]:
    """Reflections in δ and in (−2)-vectors, Eichler transvections between the hyperbolic planes, −Id."""
    lattice = standard_lattice(f"kummer({n})")
    unit = lattice.basis_vector
    delta = unit(6)
    gens = [reflection(lattice, delta)]
    for i in range(3):
        gens.append(reflection(lattice, unit(2 * i) - unit(2 * i + 1)))
    gens.append(reflection(lattice, unit(0) - unit(1) + unit(2)))
    for i in range(6):
        plane = i // 2
        other = (plane + 1) % 3
        for a in (unit(2 * other), unit(2 * other + 1), delta):
            gens.append(eichler_transvection(lattice, unit(i), a))
    gens.append(negation(lattice))
    return gens


def sample_kummer_isometries(n: int, count: int, seed: int) -> list[Isometry]:
    """Seeded random words of length 1..SAMPLE_WORD_MAX in the generators; transvections get random multiples."""
    rng = random.Random(seed)
    lattice = standard_lattice(f"kummer({n})")
    unit = lattice.basis_vector
    reflections = kummer_generators(n)[:5]
    samples = []
    for _ in range(count):
        g = None
        for _ in range(rng.randint(1, SAMPLE_WORD_MAX)):
            kind = rng.random()
            if kind < 0.45:
                letter = rng.choice(reflections)
            elif kind < 0.95:
                i = rng.randrange(6)
                others = [j for j in range(6) if j // 2 != i // 2] + [6]
                a = lattice.zero()
                for j in rng.sample(others, 2):
                    a = a + rng.randint(-SAMPLE_COEFF_BOUND, SAMPLE_COEFF_BOUND) * unit(j)
                if a.is_zero:
                    a = unit(6)
                letter = eichler_transvection(lattice, unit(i), a)
            else:
                letter = negation(lattice)
            g = letter if g is None else g @ letter
        samples.append(g)
    return samples


# ---- OG10 ----

@dataclass(frozen=True)
class OG10Embedding:
    """ι: w^⊥ → L given on a basis of w^⊥."""

    w: LatticeVector
    source: Sublattice
    image: Sublattice

    def apply(self, x: LatticeVector) -> LatticeVector:
        return self.image.vector(self.source.coordinates(x))


@dataclass(frozen=True)
class OG10Fixture:
    lattice: IntegralLattice
    embedding: OG10Embedding
    premises: tuple[str, ...]
    # basis images of the coinvariant lattice C ⊂ L, when the fixture ships one
    coinvariant: Sublattice | None = None


def _embedding(doc: EmbeddingDocument, lattice: IntegralLattice) -> OG10Embedding:
    source_lattice = standard_lattice(doc.source)
    w = source_lattice.sparse(doc.orthogonal_to)
    sources = [source_lattice.sparse(src) for src, _ in doc.pairs]
    images = [lattice.sparse(dst) for _, dst in doc.pairs]
    if any(x.dot(w) for x in sources):
        raise FixtureInvalid("embedding source is not orthogonal to w")
    complement = orthogonal_complement(source_lattice, [w])
    source = sublattice(source_lattice, sources)
    image = sublattice(lattice, images)
    if source.rank != complement.rank:
        raise FixtureInvalid(f"{source.rank} source vectors for a rank {complement.rank} complement")
    if source.induced_gram != image.induced_gram:
        raise FixtureInvalid("ι does not preserve the pairing")
    if source.det == 0 or abs(source.det) != abs(complement.det):
        raise FixtureInvalid("embedding sources do not form a basis of w^⊥")
    if saturation_index(lattice, images) != 1:
        raise FixtureInvalid("ι(w^⊥) is not primitive in L")
    return OG10Embedding(w, source, image)


def _coinvariant(doc: CoinvariantDocument, lattice: IntegralLattice) -> Sublattice:
    named = standard_lattice(doc.standard)
    if named.signature != (0, named.rank):
        raise FixtureInvalid(f"coinvariant lattice {doc.standard} is not negative definite")
    image = sublattice(lattice, [lattice.sparse(x) for x in doc.images])
    if image.induced_gram != named.gram:
        raise FixtureInvalid(f"coinvariant images do not realize the Gram of {doc.standard}")
    if saturation_index(lattice, image.basis) != 1:
        raise FixtureInvalid("coinvariant lattice is not primitive in L")
    logger.info("[monodromy] coinvariant %s of rank %d, det %d", doc.standard, image.rank, image.det)
    return image


def load_og10_fixture(path=None, embedding_path=None) -> OG10Fixture:
    path = path or fixture_path("og10.json")
    try:
        doc = read_document(Path(path), FixtureDocument)
        lattice = lattice_from_document(doc)
    except WallkitError as exc:
        raise FixtureInvalid(f"{path}: {exc}") from exc
    if not lattice.is_even or lattice.rank != 24 or lattice.signature != (3, 21):
        raise FixtureInvalid(f"{path}: need an even rank 24 lattice of signature (3,21)")
    if abs(lattice.det) != 3 or discriminant_group(lattice).order != 3:
        raise FixtureInvalid(f"{path}: discriminant group must have order 3, got |det| = {abs(lattice.det)}")
    if not lattice.split:
        raise FixtureInvalid(f"{path}: no U ⊕ U split declared")
    if embedding_path is not None:
        emb_doc = read_document(Path(embedding_path), EmbeddingDocument)
    elif doc.embedding is not None:
        emb_doc = doc.embedding
    else:
        raise FixtureInvalid(f"{path}: no embedding of w^⊥")
    try:
        embedding = _embedding(emb_doc, lattice)
        coinvariant = _coinvariant(doc.coinvariant, lattice) if doc.coinvariant is not None else None
    except FixtureInvalid:
        raise
    except WallkitError as exc:
        raise FixtureInvalid(f"{path}: {exc}") from exc
    return OG10Fixture(lattice, embedding, tuple(doc.premises), coinvariant)


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str = ""


@dataclass(frozen=True)
class OG10Certificate:
    w: LatticeVector
    s: LatticeVector
    D: LatticeVector
    D_hat: LatticeVector
    F: LatticeVector
    F_source: str
    g: Isometry
    checks: tuple[Check, ...]
    premises: tuple[str, ...]
    trivial: bool

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)


def _search(space: Sublattice, lattice: IntegralLattice, d_hat: LatticeVector, limit: int) -> LatticeVector | None:
    for candidate in short_vectors(space.as_lattice(), OG10_SQUARE, limit):
        f = space.vector(candidate.coords)
        if f.is_primitive and divisibility(lattice, f) == 1 and f not in (d_hat, -d_hat):
            return f
    return None


def find_F(fixture: OG10Fixture, d_hat: LatticeVector, limit: int = F_SEARCH_LIMIT) -> tuple[LatticeVector, str]:
    """First primitive divisibility-1 vector of square −10 other than ±D̂, and where it was found.

    The coinvariant lattice is searched when the fixture ships one; the declared definite block is the fallback.
    """
    lattice = fixture.lattice
    if fixture.coinvariant is not None:
        f = _search(fixture.coinvariant, lattice, d_hat, limit)
        if f is not None:
            return f, "coinvariant"
        logger.warning("[monodromy] no F in the coinvariant lattice, falling back to the definite block")
    if not lattice.definite_block:
        raise NoSuchF("fixture declares no definite block to search")
    block = sublattice(lattice, [lattice.basis_vector(i) for i in lattice.definite_block])
    f = _search(block, lattice, d_hat, limit)
    if f is None:
        raise NoSuchF(f"no vector of square {OG10_SQUARE} with divisibility 1 among the first {limit}")
    return f, "definite_block"


def og10_certificate(fixture: OG10Fixture, F: LatticeVector | None = None) -> OG10Certificate:
    lattice = fixture.lattice
    source = fixture.embedding.w.lattice
    w = fixture.embedding.w
    s = source.vector([2, 1, 1] + [0] * (source.rank - 4) + [1])
    d = mz_wall_from_s(w, s)
    w_perp = orthogonal_complement(source, [w])
    verdict = mz_wall(w, d)
    d_hat = fixture.embedding.apply(d)

    if F is None:
        F, F_source = find_F(fixture, d_hat)
    elif F.lattice != lattice:
        raise LatticeMismatch("F is not a vector of the fixture lattice")
    else:
        F_source = "given"
    premises = fixture.premises
    if F_source != "coinvariant":
        premises += (FALLBACK_PREMISE,)
    if F.square != OG10_SQUARE:
        raise NoSuchF(f"square mismatch: F² = {F.square}, expected {OG10_SQUARE}")
    if not F.is_primitive or divisibility(lattice, F) != 1:
        raise NoSuchF(f"F = {F.coords} does not have divisibility 1")
    trivial = F in (d_hat, -d_hat)
    if trivial:
        logger.warning("[monodromy] F = ±D̂; the certificate is trivial")

    g = mapping_isometry(lattice, d_hat, F)
    gram = linalg.as_array(lattice.gram)
    m = linalg.as_array(g.matrix)
    image = tuple((m @ linalg.as_vector(d_hat.coords)).tolist())
    checks = (
        Check("w^2 = 2", w.square == 2, str(w.square)),
        Check("s^2 = -2", s.square == -2, str(s.square)),
        Check("(s,w) = 1", s.dot(w) == 1, str(s.dot(w))),
        Check("D spans <w,s> ∩ w^⊥", d.dot(w) == 0 and d.is_primitive and d.is_parallel(w.square * s - s.dot(w) * w), str(d.coords)),
        Check("D^2 = -10", d.square == OG10_SQUARE, str(d.square)),
        Check("div_{w^⊥}(D) = 2", relative_divisibility(w_perp, d) == 2, str(relative_divisibility(w_perp, d))),
        Check("mz_wall(w, D) = MZ1", verdict.is_wall and verdict.clause == Clause.MZ1, verdict.clause.value),
        Check("D_hat^2 = -10", d_hat.square == OG10_SQUARE, str(d_hat.square)),
        Check("div_L(D_hat) = 1", divisibility(lattice, d_hat) == 1, str(divisibility(lattice, d_hat))),
        Check("F^2 = -10", F.square == OG10_SQUARE, str(F.square)),
        Check("div_L(F) = 1", divisibility(lattice, F) == 1, str(divisibility(lattice, F))),
        Check("g^T G g = G", linalg.to_int_rows((m.T @ gram @ m).tolist()) == lattice.gram),
        Check("g(D_hat) = F", image == F.coords, str(list(image))),
        Check("g orientation-preserving", g.orientation == 1),
        Check("det g = 1", g.det == 1, str(g.det)),
        Check("g acts trivially on A_L", g.is_stable),
    )
    for check in checks:
        if not check.passed:
            logger.warning("[monodromy] og10 check failed: %s (%s)", check.name, check.detail)
    return OG10Certificate(w, s, d, d_hat, F, F_source, g, checks, premises, trivial)
