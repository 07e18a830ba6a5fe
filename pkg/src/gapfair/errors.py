"""Exception types shared across the package."""


class InstanceError(ValueError):
    """Malformed or invalid instance data. ``path`` names the offending field."""

    def __init__(self, message, path=""):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class AllocationError(ValueError):
    """An allocation breaks a structural or feasibility requirement."""


class CapExceeded(RuntimeError):
    """An exhaustive search would exceed its enumeration cap."""


class ContractViolation(RuntimeError):
    """An internal guarantee failed (a bug, or a broken precondition upstream)."""
