"""Exception hierarchy. Every engine error carries a short machine code for the CLI."""


class RecurintError(Exception):
    code = "Error"


class DivisionByZeroPoly(RecurintError, ZeroDivisionError):
    code = "DivisionByZeroPoly"


class BothZero(RecurintError, ValueError):
    code = "BothZero"


class UnsupportedMerge(RecurintError):
    code = "UnsupportedMerge"


class UnsupportedForm(RecurintError):
    code = "UnsupportedForm"


class CofactorTooLarge(RecurintError):
    code = "CofactorTooLarge"


class UnsupportedDegeneracy(RecurintError):
    code = "UnsupportedDegeneracy"


class NoRuleForCase(RecurintError):
    code = "NoRuleForCase"


class GuardViolated(RecurintError):
    code = "GuardViolated"


class SolvedCoefficientZero(RecurintError):
    code = "SolvedCoefficientZero"


class NoLinearFactor(RecurintError):
    code = "NoLinearFactor"


class MaxStepsExceeded(RecurintError):
    code = "MaxStepsExceeded"


class CatalogDefect(RecurintError):
    code = "CatalogDefect"

    def __init__(self, rule_id, instantiation):
        super().__init__(f"nonzero residual for rule {rule_id} at {instantiation}")
        self.rule_id = rule_id
        self.instantiation = instantiation


class ExprSyntaxError(RecurintError, ValueError):
    code = "SyntaxError"

    def __init__(self, msg, pos=None, expected=()):
        where = f" at position {pos}" if pos is not None else ""
        exp = f" (expected {', '.join(expected)})" if expected else ""
        super().__init__(f"{msg}{where}{exp}")
        self.pos = pos
        self.expected = tuple(expected)


class SymbolicExponent(RecurintError, ValueError):
    code = "SymbolicExponent"
