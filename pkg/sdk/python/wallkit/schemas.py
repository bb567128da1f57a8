"""pydantic models for the JSON documents wallkit reads and the reports it writes."""
from fractions import Fraction
from pathlib import Path
from typing import Optional

from pydantic import BaseModel, Field, ValidationError, model_validator

from .errors import ParseError


def fraction_text(value: Fraction) -> str:
    value = Fraction(value)
    return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"


def read_document(source, model: type[BaseModel]):
    """Parse a path, JSON string or already-decoded dict into `model`, raising ParseError."""
    try:
        if isinstance(source, Path) or (isinstance(source, str) and not source.lstrip().startswith("{")):
            return model.model_validate_json(Path(source).read_text())
        if isinstance(source, str):
            return model.model_validate_json(source)
        return model.model_validate(source)
    except (OSError, ValidationError) as exc:
        raise ParseError(f"cannot read {model.__name__}: {exc}") from exc


# ---- input documents ----

class LatticeDocument(BaseModel):
    label: str = ""
    gram: Optional[list[list[int]]] = None
    blocks: Optional[list[tuple[str, int]]] = None
    standard: Optional[str] = None
    split: bool = False
    definite_block: list[int] = Field(default_factory=list)

    @model_validator(mode="after")
    def _one_source(self):
        given = [x for x in (self.gram, self.blocks, self.standard) if x is not None]
        if len(given) != 1:
            raise ValueError("exactly one of gram, blocks, standard is required")
        return self


class VectorDocument(BaseModel):
    lattice: str
    coords: list[int]


class IsometryDocument(BaseModel):
    lattice: str
    matrix: list[list[int]]


class EmbeddingDocument(BaseModel):
    """ι: w^⊥ → L given on a basis of w^⊥; vectors are sparse {index: coefficient} maps."""

    source: str = "mukai_k3"
    orthogonal_to: dict[int, int]
    pairs: list[tuple[dict[int, int], dict[int, int]]]


class CoinvariantDocument(BaseModel):
    """Negative-definite lattice C with the images of its basis in L, as sparse {index: coefficient} maps."""

    standard: str = "K12(-1)"
    images: list[dict[int, int]]


class FixtureDocument(LatticeDocument):
    embedding: Optional[EmbeddingDocument] = None
    coinvariant: Optional[CoinvariantDocument] = None
    premises: list[str] = Field(default_factory=list)


# ---- reports ----

class Report(BaseModel):
    tool_version: str
    inputs: dict[str, str] = Field(default_factory=dict)


class ErrorReport(Report):
    error: str
    message: str


class LatticeReport(Report):
    label: str
    rank: int
    det: int
    signature: tuple[int, int]
    even: bool
    disc: list[int]
    q: list[str]


class WallReport(Report):
    criterion: str
    is_wall: bool
    clause: str
    witness: Optional[list[int]] = None
    T_gram: list[list[int]]
    candidates: list[list[int]] = Field(default_factory=list)


class OrbitReport(Report):
    lattice: str
    x: list[int]
    y: list[int]
    squares: tuple[int, int]
    divisibilities: tuple[int, int]
    disc_images: tuple[list[int], list[int]]
    equivalent: bool
    matrix: Optional[list[list[int]]] = None
    determinant: Optional[int] = None
    orientation_preserving: Optional[bool] = None


class MonReport(Report):
    n: int
    in_monodromy: bool
    orientation: int
    chi: str
    det: int
    reason: str
    citations: list[str] = Field(default_factory=list)


class TraceReport(BaseModel):
    n: int
    k: int
    l: list[int]
    t_integral: bool
    t_prime_integral: bool
    k_mod: int
    type_of_image: str
    div_of_image: int
    wall_clause: str
    pell: bool
    word: list[str] = Field(default_factory=list)


class TraceBundle(Report):
    n: int
    seed: Optional[int] = None
    traces: list[TraceReport]
    findings: list[str] = Field(default_factory=list)


class CheckEntry(BaseModel):
    name: str
    passed: bool
    detail: str = ""


class CertificateReport(Report):
    w: list[int]
    s: list[int]
    D: list[int]
    D_hat: list[int]
    F: list[int]
    F_source: str
    matrix: list[list[int]]
    determinant: int
    orientation_preserving: bool
    disc_action: list[list[int]]
    trivial: bool
    checks: list[CheckEntry]
    premises: list[str]
    all_passed: bool
