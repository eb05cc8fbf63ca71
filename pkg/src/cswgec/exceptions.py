"""Exception hierarchy shared by all modules."""


class CswError(Exception):
    """Base class for every error raised by this package."""


class FormatError(CswError, ValueError):
    """Malformed input file or an invariant violation on a data structure."""

    def __init__(self, reason, line=None):
        self.reason = reason
        self.line = line
        if line is None:
            super().__init__(reason)
        else:
            super().__init__(f"line {line}: {reason}")


class AlignmentError(CswError, ValueError):
    """A sidecar file (trees, POS) does not line up with the corpus."""

    def __init__(self, reason, index=None):
        self.index = index
        if index is not None:
            reason = f"sentence {index}: {reason}"
        super().__init__(reason)


class SelectionError(CswError, ValueError):
    """A selection method is missing the annotations it needs."""


class TranslationError(CswError):
    """A backend failed to produce a translation."""

    def __init__(self, message, status=None):
        super().__init__(message)
        self.status = status
