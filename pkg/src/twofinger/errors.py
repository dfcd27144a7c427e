"""Exception types shared across the toolkit."""


class ToolkitError(Exception):
    """Base class for all toolkit errors."""


class ConfigError(ToolkitError):
    """Invalid parameter, option, or configuration value."""


class FormatError(ToolkitError):
    """A file does not conform to its documented format."""


class DecodeError(FormatError):
    """Input bytes are not valid UTF-8."""

    def __init__(self, message: str, byte_offset: int):
        super().__init__(f"{message} (byte offset {byte_offset})")
        self.byte_offset = byte_offset


class GeometryError(ToolkitError):
    """Keyboard geometry violates its invariants."""


class InvalidLayoutError(ToolkitError):
    """A layout failed validation where a valid one was required."""

    def __init__(self, violations):
        self.violations = list(violations)
        details = "; ".join(str(v) for v in self.violations)
        super().__init__(f"invalid layout: {details}")
