"""Exception hierarchy shared across the toolchain.

Two families matter to callers: CheckError covers semantic failures
(typing, name resolution, reduction budgets), FormatError covers
rejected input documents. The command line maps the families to exit
codes 1 and 2 respectively.
"""


class ProofportError(Exception):
    """Base class for every deliberate error in this package."""


class CheckError(ProofportError):
    """A term, declaration, morphism, or library failed a semantic check."""


class FormatError(ProofportError):
    """An input document violated its format contract."""


# ---------------------------------------------------------------------------
# semantic errors


class ReductionDepthExceeded(CheckError):
    """Reduction did not reach a head normal form within the step budget."""


class NotTyped(CheckError):
    """The term has no type (the kind `type`, or an unsynthesizable form)."""


class UnknownIdent(CheckError):
    """An identifier did not resolve to a visible declaration."""


class NotAFunction(CheckError):
    """Application head whose type is not a Pi after reduction."""


class Mismatch(CheckError):
    """Inferred and expected types are not definitionally equal."""


class SubtypeWitnessMissing(CheckError):
    """A term of the base type was used where the subtype requires a witness."""


class Cycle(CheckError):
    """The include graph contains a cycle."""


class DanglingIdent(CheckError):
    """Serialization found an identifier that does not resolve."""


class ArityMismatch(CheckError):
    """A pattern instance supplied the wrong number of arguments."""


class ArityUnsupported(CheckError):
    """Ground instantiation supports exactly one schematic variable."""


class UnassignedConstant(CheckError):
    """A morphism has no assignment for an undefined source constant."""


class UnificationFailure(CheckError):
    """Simple-type unification failed."""

    def __init__(self, where: str, message: str = ""):
        self.where = where
        super().__init__(f"{where}: {message}" if message else where)


class AmbiguousType(CheckError):
    """A type variable survived unification; no principal ground type."""

    def __init__(self, name: str):
        self.name = name
        super().__init__(name)


# ---------------------------------------------------------------------------
# format errors


class Malformed(FormatError):
    """Input is not syntactically valid for its format."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class SchemaViolation(FormatError):
    """Structurally valid input that breaks the schema; path names the spot."""

    def __init__(self, path: str, message: str = ""):
        self.path = path
        super().__init__(f"{path}: {message}" if message else path)


class UnsupportedVersion(FormatError):
    """The document declares a format version this tool does not speak."""


class EmptyCorpus(FormatError):
    """An operation that needs content received none."""
