"""Exception taxonomy shared by all modules.

Verdicts (a property holding or failing, with a witness) are ordinary return
values, never exceptions.  Exceptions are reserved for inputs that violate a
precondition, resource caps, and internal-consistency alarms.
"""


class NspaceError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInput(NspaceError):
    """A document or argument violates a structural precondition."""


class CapExceeded(NspaceError):
    """A computation would exceed the configured resource caps."""

    def __init__(self, what: str, needed, cap) -> None:
        super().__init__(f"{what}: needed {needed}, cap {cap}")
        self.what = what
        self.needed = needed
        self.cap = cap


class InternalConsistencyError(NspaceError):
    """A certified input produced a state the theory rules out.

    Raising this is the point: it is the regression tripwire for the
    structure theorems the certificates encode.
    """
