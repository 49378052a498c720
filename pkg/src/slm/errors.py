"""Exception hierarchy shared by every slm module."""

from __future__ import annotations


class SlmError(Exception):
    """Base class for all slm errors."""


# --- loading -------------------------------------------------------------


class LoadError(SlmError):
    """A model or dictionary file could not be turned into a valid value."""

    def __init__(self, message: str, line: int = 0, column: int = 0, source: str | None = None):
        self.line = line
        self.column = column
        self.source = source
        self.detail = message
        super().__init__(self._format())

    def _format(self) -> str:
        where = self.source or "<text>"
        if self.line:
            where = f"{where}:{self.line}:{self.column}"
        return f"{where}: {self.detail}"

    def with_source(self, source: str) -> "LoadError":
        self.source = source
        self.args = (self._format(),)
        return self


class LexError(LoadError):
    pass


class ParseError(LoadError):
    def __init__(self, line: int, column: int, expected: str, found: str, source: str | None = None):
        self.expected = expected
        self.found = found
        super().__init__(f"expected {expected}, found {found}", line, column, source)


class ValidationError(LoadError):
    def __init__(self, path: str, message: str, line: int = 0, column: int = 0, source: str | None = None):
        self.path = path
        super().__init__(f"{path}: {message}", line, column, source)


class DuplicateEntry(LoadError):
    def __init__(self, name: str, line: int = 0, column: int = 0, source: str | None = None):
        self.name = name
        super().__init__(f"duplicate data store entry {name!r}", line, column, source)


# --- model queries -------------------------------------------------------


class UnresolvedPath(SlmError):
    def __init__(self, path):
        self.path = path
        super().__init__(f"no block at {path}")


class MalformedFunction(SlmError):
    def __init__(self, path):
        self.path = path
        super().__init__(f"{path}: subsystem holds more than one function trigger")


# --- resolution ----------------------------------------------------------


class ResolutionError(SlmError):
    """Something named in a model cannot be found where it must be."""


class UnknownFunction(ResolutionError):
    def __init__(self, name: str, caller):
        self.name = name
        self.caller = caller
        super().__init__(f"{caller}: no function named {name!r}")


class OutOfScope(ResolutionError):
    def __init__(self, name: str, caller, nearest):
        self.name = name
        self.caller = caller
        self.nearest = nearest
        super().__init__(f"{caller}: function {name!r} defined at {nearest} is not in scope here")


class AmbiguousCall(ResolutionError):
    def __init__(self, name: str, candidates):
        self.name = name
        self.candidates = list(candidates)
        joined = ", ".join(str(c) for c in self.candidates)
        super().__init__(f"call to {name!r} is ambiguous between {joined}")


class SignatureMismatch(ResolutionError):
    def __init__(self, expected, found):
        self.expected = expected
        self.found = found
        super().__init__(f"signature mismatch: definition is {expected}, call is {found}")


class UnresolvedDataStore(ResolutionError):
    def __init__(self, name: str, paths):
        self.name = name
        self.paths = list(paths)
        super().__init__(
            f"data store {name!r} has no local memory block and no dictionary entry "
            f"(accessed by {', '.join(str(p) for p in self.paths)})"
        )


class UnresolvedLibraryLink(ResolutionError):
    def __init__(self, source_block: str):
        self.source_block = source_block
        super().__init__(f"library link target {source_block!r} not found")


# --- refactoring ---------------------------------------------------------


class RefactorError(SlmError):
    """A transformation was refused; the input model is untouched."""


class WouldBreakCallers(RefactorError):
    def __init__(self, callers):
        self.callers = list(callers)
        super().__init__("conversion would leave callers out of scope: " + ", ".join(str(c) for c in self.callers))


class NameCollision(RefactorError):
    def __init__(self, system, name: str):
        self.system = system
        self.name = name
        super().__init__(f"{name!r} already exists in {system}")


class NotInScope(RefactorError):
    def __init__(self, name: str, at):
        self.name = name
        self.at = at
        super().__init__(f"{name!r} cannot be called from {at}")


class NotVirtual(RefactorError):
    def __init__(self, path):
        self.path = path
        super().__init__(f"{path} is not a virtual subsystem")


class ConnectedFunction(RefactorError):
    def __init__(self, path):
        self.path = path
        super().__init__(f"{path} has signal lines attached and cannot be moved")
