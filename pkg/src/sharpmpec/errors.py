"""Exception hierarchy. Every error carries a stable ``code`` used by the CLI."""
from __future__ import annotations


class SharpMpecError(ValueError):
    code = "Error"


class DimensionMismatch(SharpMpecError):
    code = "DimensionMismatch"


class NotPointed(SharpMpecError):
    code = "NotPointed"


class NotMember(SharpMpecError):
    code = "NotMember"


class NotNormal(SharpMpecError):
    code = "NotNormal"


class NotNested(SharpMpecError):
    code = "NotNested"


class NotCritical(SharpMpecError):
    code = "NotCritical"


class NotPolarMember(SharpMpecError):
    code = "NotPolarMember"


class NotTangent(SharpMpecError):
    code = "NotTangent"


class NotNondegenerate(SharpMpecError):
    code = "NotNondegenerate"


class DecompositionNotUnique(SharpMpecError):
    code = "DecompositionNotUnique"


class InfeasiblePoint(SharpMpecError):
    code = "InfeasiblePoint"


class InfeasibleMultiplier(SharpMpecError):
    code = "InfeasibleMultiplier"


class AssumptionNotAsserted(SharpMpecError):
    code = "AssumptionNotAsserted"


class NotApplicable(SharpMpecError):
    code = "NotApplicable"


class TooManyRows(SharpMpecError):
    code = "TooManyRows"


class ParseError(SharpMpecError):
    code = "ParseError"


class ShapeError(SharpMpecError):
    code = "ShapeError"


class NonRationalLiteral(SharpMpecError):
    code = "NonRationalLiteral"
