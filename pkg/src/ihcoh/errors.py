"""Exception hierarchy shared by all ihcoh modules.

Every error carries a stable machine-readable ``kind`` (the class name) so the
CLI can emit structured ``{"error": {"kind", "detail"}}`` payloads.
"""


class IhcohError(Exception):
    """Base class for all validation and input errors."""

    @property
    def kind(self) -> str:
        return type(self).__name__


# --- exact-linalg ---
class ZeroVector(IhcohError):
    pass


class NotInjective(IhcohError):
    pass


class NotSaturated(IhcohError):
    pass


class SuppliedSectionInvalid(IhcohError):
    pass


# --- polyhedra ---
class RankMismatch(IhcohError):
    pass


class NotStrictlyConvex(IhcohError):
    pass


# --- fans ---
class NotAFan(IhcohError):
    pass


class TauNotInFan(IhcohError):
    pass


class LinealityInInput(IhcohError):
    pass


class EmptyInput(IhcohError):
    pass


class NotComplete(IhcohError):
    pass


# --- ihpoly ---
class DepthExceeded(IhcohError):
    pass


# --- tvar ---
class InvalidDivisorialFan(IhcohError):
    pass


class SigmaZNotComplete(IhcohError):
    pass


class TailNotFullDim(IhcohError):
    pass


# --- trinomial ---
class NotHomogeneous(IhcohError):
    pass


class NotRelevant(IhcohError):
    pass


class NonIntegralGenus(IhcohError):
    pass


# --- cross-cutting ---
class InternalInconsistency(IhcohError):
    """A theorem-level invariant failed; signals a bug or malformed input."""
