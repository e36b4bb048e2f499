"""Custom exception classes for the SL(2) endoscopy library."""


class PrecisionError(ArithmeticError):
    """Raised when an answer depends on digits beyond the guaranteed precision."""

    def __init__(self, operation: str, message: str, original_error: Exception | None = None):
        """
        Initialize precision error.

        Args:
            operation: Name of the operation that ran out of digits
            message: Error message
            original_error: Original exception if any
        """
        self.operation = operation
        self.original_error = original_error
        super().__init__(f"Insufficient precision in {operation}: {message}")


class DivisionByZeroError(ZeroDivisionError):
    """Raised when an exact zero is inverted."""

    def __init__(self, operation: str = "inverse"):
        """
        Initialize division by zero error.

        Args:
            operation: Name of the operation attempting the division
        """
        self.operation = operation
        super().__init__(f"Division by zero in {operation}")


class NonIntegralError(ValueError):
    """Raised when a residue reduction is requested for a non-integral element."""

    def __init__(self, valuation: int, message: str = "element is not integral"):
        """
        Initialize non-integral error.

        Args:
            valuation: Valuation of the offending element
            message: Error message
        """
        self.valuation = valuation
        super().__init__(f"{message} (valuation {valuation})")


class ParseError(ValueError):
    """Raised when a field, extension, element or test-function spec cannot be parsed."""

    def __init__(self, text: str, position: int, message: str, original_error: Exception | None = None):
        """
        Initialize parse error.

        Args:
            text: The text being parsed
            position: Zero-based character offset of the problem
            message: Error message
            original_error: Original exception if any
        """
        self.text = text
        self.position = position
        self.original_error = original_error
        pointer = " " * position + "^"
        super().__init__(f"Cannot parse {text!r} at position {position}: {message}\n  {text}\n  {pointer}")


class FieldConstructionError(ValueError):
    """Raised when a residue field or local field cannot be built."""

    def __init__(self, message: str, original_error: Exception | None = None):
        """
        Initialize field construction error.

        Args:
            message: Error message
            original_error: Original exception if any
        """
        self.original_error = original_error
        super().__init__(f"Field construction failed: {message}")


class ExtensionError(ValueError):
    """Raised for invalid quadratic presentations or unsupported extension operations."""

    def __init__(self, message: str, original_error: Exception | None = None):
        """
        Initialize extension error.

        Args:
            message: Error message
            original_error: Original exception if any
        """
        self.original_error = original_error
        super().__init__(f"Quadratic extension error: {message}")


class RegularityError(ValueError):
    """Raised when a central torus element is passed where a regular one is required."""

    def __init__(self, operation: str):
        """
        Initialize regularity error.

        Args:
            operation: Operation requiring a regular element
        """
        self.operation = operation
        super().__init__(f"{operation} requires a regular element (b != 0); use the unipotent route at the center")


class KappaError(ValueError):
    """Raised when a character outside the allowed pair {1, eps_E} is supplied."""

    def __init__(self, message: str):
        """
        Initialize kappa error.

        Args:
            message: Error message
        """
        super().__init__(f"Invalid kappa: {message}")


class OracleSizeError(RuntimeError):
    """Raised when a brute-force enumeration would exceed the size guard."""

    def __init__(self, oracle: str, size: int, guard: int):
        """
        Initialize oracle size error.

        Args:
            oracle: Name of the oracle
            size: Number of elements the enumeration would visit
            guard: Configured guard
        """
        self.oracle = oracle
        self.size = size
        self.guard = guard
        super().__init__(f"Oracle '{oracle}' would enumerate {size} elements (guard {guard})")


class ShalikaUnavailableError(ValueError):
    """Raised when a square-class Fourier inversion is requested in residue characteristic 2."""

    def __init__(self, residue_characteristic: int):
        """
        Initialize Shalika unavailable error.

        Args:
            residue_characteristic: Residue characteristic of the base field
        """
        self.residue_characteristic = residue_characteristic
        self.reason = (
            "the unipotent orbits are indexed by F^x/(F^x)^2, which is not finite in "
            "characteristic 2; use the kappa-germ development instead"
        )
        super().__init__(f"Shalika comparison unavailable in residue characteristic {residue_characteristic}: {self.reason}")


class CheckExecutionError(Exception):
    """Raised when a verification check fails to execute."""

    def __init__(self, check_name: str, message: str, original_error: Exception | None = None):
        """
        Initialize check execution error.

        Args:
            check_name: Name of the check that failed
            message: Error message
            original_error: Original exception if any
        """
        self.check_name = check_name
        self.original_error = original_error
        super().__init__(f"Check '{check_name}' execution failed: {message}")


class SuiteExecutionError(Exception):
    """Raised when the verification suite fails."""

    def __init__(self, message: str, original_error: Exception | None = None):
        """
        Initialize suite execution error.

        Args:
            message: Error message
            original_error: Original exception if any
        """
        self.original_error = original_error
        super().__init__(f"Verification suite failed: {message}")
