"""Exception types raised across the package."""


class DiscordKitError(Exception):
    """Base class for all package errors."""


class NotSquare(DiscordKitError, ValueError):
    pass


class NotHermitian(DiscordKitError, ValueError):
    pass


class DimensionMismatch(DiscordKitError, ValueError):
    pass


class ShapeMismatch(DimensionMismatch):
    pass


class NotDistribution(DiscordKitError, ValueError):
    pass


class InvalidState(DiscordKitError, ValueError):
    pass


class InvalidObservable(DiscordKitError, ValueError):
    pass


class NotPure(DiscordKitError, ValueError):
    pass


class NotARefinement(DiscordKitError, ValueError):
    pass


class UnsupportedDimension(DiscordKitError, ValueError):
    pass


class BlocksDoNotCommute(DiscordKitError, ValueError):
    pass


class UnknownFixture(DiscordKitError, KeyError):
    pass


class InvariantViolation(DiscordKitError, AssertionError):
    """An identity that holds in exact arithmetic failed beyond tolerance.

    This signals a bug in the library (or a pathologically conditioned
    input), never a property of the physics.
    """
