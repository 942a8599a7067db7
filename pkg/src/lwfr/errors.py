"""Exception types shared across the solver."""


class ConfigurationError(ValueError):
    """Invalid or contradictory run configuration."""


class AdmissibilityError(RuntimeError):
    """A state left the admissibility set where the scheme requires it.

    Carries enough context (constraint name, location, step/time when known)
    to emit a machine-parsable diagnostic line.
    """

    def __init__(self, message, constraint=None, step=None, time=None, element=None):
        super().__init__(message)
        self.constraint = constraint
        self.step = step
        self.time = time
        self.element = element

    def diagnostic_line(self) -> str:
        parts = ["ERROR admissibility"]
        if self.constraint is not None:
            parts.append(f"constraint={self.constraint}")
        if self.step is not None:
            parts.append(f"step={self.step}")
        if self.time is not None:
            parts.append(f"t={self.time:.9g}")
        if self.element is not None:
            parts.append(f"element={self.element}")
        parts.append(f"msg={str(self)!r}")
        return " ".join(parts)
