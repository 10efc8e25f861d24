"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class NumericError(RuntimeError):
    """A numerical routine failed to reach its stated tolerance.

    The achieved tolerance, when known, is carried in ``achieved``.
    """

    def __init__(self, message: str, achieved: float | None = None):
        super().__init__(message)
        self.achieved = achieved


class StructureError(ValueError):
    """A cluster violates a structural invariant (open loop, bad labels...)."""


class InfeasibleError(ValueError):
    """A disk configuration has overlapping disks (the hard-core constraint)."""


class ConstructionError(ValueError):
    """An explicit construction cannot be carried out for the given inputs."""


class ResourceLimitError(ValueError):
    """A brute-force routine was asked to exceed its hard size cap."""
