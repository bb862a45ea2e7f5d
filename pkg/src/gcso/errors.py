"""Exception types shared by the library and the command line front end.

Each error carries the process exit code the CLI uses when it escapes.
"""


class GCError(Exception):
    exit_code = 1


class ValidationError(GCError, ValueError):
    """Malformed input: bad lambda ordering, wrong lengths, non-skew matrices."""

    exit_code = 2


class UsageError(GCError, ValueError):
    """An operation was called with arguments that do not fit together."""

    exit_code = 2


class ContainmentError(GCError, ValueError):
    """A point lies outside the polytope; the message names the inequality."""

    exit_code = 3


class CapacityError(GCError, RuntimeError):
    """The exact oracle was asked for an ambient dimension above its cap."""

    exit_code = 4
