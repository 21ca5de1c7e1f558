"""Shared exception types with stable CLI exit-code semantics.

Exit-code mapping used by the command-line front end:

* usage / parse problems        -> exit 1 (``ParseError`` or bad flags)
* precondition violations       -> exit 2 (``ValidationError``)
* enumeration guards exceeded   -> exit 3 (``GuardExceeded``)
* failed verification verdicts  -> exit 4 (``VerificationFailure``)
"""

from __future__ import annotations


class QgcError(Exception):
    """Base class for all workbench-specific errors."""


class ParseError(QgcError):
    """A configuration file could not be read or parsed."""


class ValidationError(QgcError):
    """An operation precondition was violated; the message names the offender."""


class GuardExceeded(QgcError):
    """A desk-scale enumeration guard (composition/sequence budget) was exceeded."""


class VerificationFailure(QgcError):
    """A verification oracle produced a failing verdict."""
