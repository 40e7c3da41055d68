"""Exception types shared across the package."""


class DvrError(Exception):
    """Base class for all domain errors raised by this package."""


class NonUnitError(DvrError):
    """Inversion was requested for an element with positive valuation."""


class InsufficientPrecisionError(DvrError):
    """An operand does not carry enough digits for the requested operation."""


class PrecisionExhaustedError(DvrError):
    """A structural computation ran out of usable digits mid-way."""


class NotTorsionError(DvrError):
    """A divisible-quotient element exceeds the requested torsion level."""


class InconsistentLiftError(DvrError):
    """Prescribed functional values violate the relations of their domain."""


class BudgetExceededError(DvrError):
    """A brute-force enumeration would exceed the configured budget."""


class InfiniteCokernelError(DvrError):
    """The relation matrix does not have full column rank."""


class SpecParseError(DvrError):
    """A ring/module/matrix spec string or file could not be parsed."""
