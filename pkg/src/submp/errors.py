"""Exception hierarchy.  ``exit_code`` is what the CLI returns for each class."""


class SubmpError(Exception):
    exit_code = 1


class MalformedInputError(SubmpError, ValueError):
    """Bad indices, negative weights, wrong table length, unparseable text."""

    exit_code = 2


class ParseError(MalformedInputError):
    def __init__(self, message, line=None, field=None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)
        self.line = line
        self.field = field


class CapabilityError(SubmpError):
    """Request exceeds an exhaustive-enumeration size limit."""

    exit_code = 3


# out-of-range arguments count as usage errors on the command line
class DomainError(SubmpError, ValueError):
    exit_code = 2


class PreconditionError(SubmpError, ValueError):
    exit_code = 4


class ParameterError(SubmpError, ValueError):
    exit_code = 2


class FeasibilityError(SubmpError, ValueError):
    """An allocation violates a relaxation constraint."""

    exit_code = 4


class UnsupportedInstanceError(SubmpError):
    """Scheme/oracle mismatch or an instance outside an operation's contract."""

    exit_code = 4


class VerificationError(SubmpError):
    """Two independently computed quantities that must agree do not."""

    exit_code = 5
