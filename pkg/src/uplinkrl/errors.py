"""Exception hierarchy shared across the package.

Every failure that callers are expected to handle derives from UplinkError,
so harness code can distinguish our contract violations from genuine bugs.
"""


class UplinkError(Exception):
    """Base class for all package-level errors."""


class ShapeError(UplinkError):
    """An array argument has the wrong shape or dimensionality."""


class UsageError(UplinkError):
    """An API was called out of order or with inconsistent arguments."""


class NumericError(UplinkError):
    """A computation produced or received a non-finite value."""


class ConfigError(UplinkError):
    """A configuration value violates its documented constraints."""


class ContractError(UplinkError):
    """An environment or agent contract was violated at runtime."""


class InfeasibleActionError(ContractError):
    """No admissible action remains after masking."""


class DslError(UplinkError):
    """Base class for reward-expression failures."""


class DslSyntaxError(DslError):
    """The expression source does not parse; carries the source offset."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (position {position})")
        self.position = position


class UnknownFeatureError(DslError):
    """An identifier does not resolve against the feature schema."""


class EvalDomainError(DslError):
    """Evaluation hit a domain violation (divide by zero, log of a
    non-positive number, square root of a negative number)."""


class EstimationError(DslError):
    """A smoothness estimate could not be formed from the given samples."""


class BackendError(UplinkError):
    """A language-model backend failed to produce a usable reply."""


class MockExhaustedError(BackendError):
    """A scripted mock backend ran out of canned replies."""


class TransportError(BackendError):
    """An HTTP backend failed at the transport level after retries."""


class JsonExtractionError(BackendError):
    """No complete JSON object could be extracted from a reply."""

    def __init__(self, message: str, raw_text: str):
        super().__init__(message)
        self.raw_text = raw_text


class SchemaError(BackendError):
    """A reply parsed as JSON but violated the expected schema."""


class DesignError(UplinkError):
    """The reward-design pipeline produced no usable candidate."""
