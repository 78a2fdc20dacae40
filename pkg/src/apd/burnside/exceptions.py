class BurnsideError(ValueError):
    """Base class for errors raised when an algebraic operation
    cannot be carried out on the data it was given"""

    pass


class LoadError(BurnsideError):
    """A group could not be loaded, either because the catalog name
    is unknown or because a group file does not describe a group"""

    pass


class ParseError(LoadError):
    """An element literal or fusion specification on the command line
    could not be understood"""

    pass


class CapacityError(BurnsideError):
    """The configured order bound was exceeded"""

    pass


class PreconditionError(BurnsideError):
    """An operation was called with arguments that do not satisfy
    its precondition"""

    pass


class ClassificationError(BurnsideError):
    """A subgroup of a direct product was expected to be left-free
    but has a non-trivial first kernel"""

    pass


class CompositionError(BurnsideError):
    """Two objects were composed over different middle groups"""

    pass


class SystemClosureError(BurnsideError):
    """A result is supported outside the subgroup system it was
    declared to live in"""

    pass


class DomainError(BurnsideError):
    """An element is supported on subgroups the operation is not
    defined for"""

    pass
