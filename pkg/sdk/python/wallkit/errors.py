class WallkitError(Exception):
    """Root of every error raised by wallkit; `code` is the stable machine name."""

    code = "error"

    def __init__(self, message: str = ""):
        super().__init__(message or self.code)

    def to_dict(self) -> dict:
        return {"error": self.code, "message": str(self)}


class NotSymmetric(WallkitError):
    code = "not_symmetric"


class Degenerate(WallkitError):
    code = "degenerate"


class BadParam(WallkitError):
    code = "bad_param"


class LatticeMismatch(WallkitError):
    code = "lattice_mismatch"


class ZeroVector(WallkitError):
    code = "zero_vector"


class DependentInput(WallkitError):
    code = "dependent_input"


class NotDefinite(WallkitError):
    code = "not_definite"


class NotPrimitive(WallkitError):
    code = "not_primitive"


class NotContained(WallkitError):
    code = "not_contained"


class NotIsometry(WallkitError):
    code = "not_isometry"


class NotHyperbolic(WallkitError):
    code = "not_hyperbolic"


class UnboundedWindow(WallkitError):
    code = "unbounded_window"


class OddSquare(WallkitError):
    code = "odd_square"


class BadDivisor(WallkitError):
    code = "bad_divisor"


class BadWitness(WallkitError):
    code = "bad_witness"


class OnWall(WallkitError):
    code = "on_wall"


class NotPositive(WallkitError):
    code = "not_positive"


class NotIntegral(WallkitError):
    code = "not_integral"


class IsotropicMirror(WallkitError):
    code = "isotropic_mirror"


class BadPair(WallkitError):
    code = "bad_pair"


class DivisibilityNotOne(WallkitError):
    code = "divisibility_not_one"


class NoSplitDeclared(WallkitError):
    code = "no_split_declared"


class NotEquivalent(WallkitError):
    code = "not_equivalent"


class FixtureInvalid(WallkitError):
    code = "fixture_invalid"


class NoSuchF(WallkitError):
    code = "no_such_f"


class ParseError(WallkitError):
    code = "parse_error"


class InvariantViolation(WallkitError):
    code = "invariant_violation"
