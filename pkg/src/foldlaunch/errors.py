"""Exception types raised across the package."""


class FoldLaunchError(Exception):
    """Base class for all package errors."""


class DegenerateFlow(FoldLaunchError):
    """The aerodynamic center is undefined (no net normal force)."""


class UnstableConfiguration(FoldLaunchError):
    """Static margin is not positive, so no restoring pitch oscillation exists."""


class OverCapacity(FoldLaunchError):
    """Required hover thrust exceeds what the motors can deliver."""


class NonFiniteState(FoldLaunchError):
    """The integrator produced NaN or inf."""


class ConfigError(FoldLaunchError):
    """Base class for configuration problems."""


class ParseError(ConfigError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ValidationError(ConfigError):
    def __init__(self, message, key=None, line=None):
        self.key = key
        self.line = line
        prefix = ""
        if line is not None:
            prefix += f"line {line}: "
        if key is not None:
            prefix += f"{key}: "
        super().__init__(prefix + message)


class UnknownKey(ValidationError):
    pass
