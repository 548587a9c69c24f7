"""Exception types shared across the toolkit."""


class CroftonkitError(RuntimeError):
    """Base class for runtime failures raised by samplers and estimators."""


class NonConvexityDetected(CroftonkitError):
    """A line crossed a convex-mode body's boundary more than twice."""


class TangentialContact(CroftonkitError):
    """A line grazed the boundary; the caller should resample."""


class ProposalBudgetExceeded(CroftonkitError):
    """Kinematic rejection sampling hit the consecutive-miss cap."""


class RejectionBudgetExceeded(CroftonkitError):
    """Patch sampling acceptance too low (estimated measure below 1e-6)."""


class MeshFormatError(ValueError):
    """Mesh file could not be parsed; message names the file and line."""
