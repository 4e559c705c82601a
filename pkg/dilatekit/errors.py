# dilatekit/errors.py
from __future__ import annotations

from typing import Optional


class DilateKitError(Exception):
    """Base for every failure the toolkit reports on purpose."""

    exit_code = 2


class IntSetOverflowError(DilateKitError, OverflowError):
    pass


class EmptySetError(DilateKitError, ValueError):
    pass


class InvalidFormError(DilateKitError, ValueError):
    pass


class InvalidModulusError(DilateKitError, ValueError):
    pass


class ModulusMismatchError(DilateKitError, ValueError):
    pass


class PreconditionError(DilateKitError, ValueError):
    """A named hypothesis of a lemma or bound does not hold on the input."""

    def __init__(self, name: str, detail: str, element: Optional[int] = None):
        self.name = name
        self.detail = detail
        self.element = element
        msg = f"precondition '{name}' violated: {detail}"
        if element is not None:
            msg += f" (offending element {element})"
        super().__init__(msg)


class OutOfScopeError(PreconditionError):
    pass


class ClassIndexError(DilateKitError, IndexError):
    pass


class SourceMismatchError(DilateKitError, ValueError):
    pass


class BudgetExceededError(DilateKitError, ValueError):
    def __init__(self, count: int, budget: int):
        self.count = count
        self.budget = budget
        super().__init__(f"exhaustive search needs {count} candidate sets, budget is {budget}")


class UnknownBoundError(DilateKitError, LookupError):
    pass


class SetFileError(DilateKitError, ValueError):
    def __init__(self, path: str, detail: str, line: Optional[int] = None):
        self.path = path
        self.line = line
        where = f"{path}:{line}" if line is not None else path
        super().__init__(f"{where}: {detail}")


class ConfigError(DilateKitError, ValueError):
    pass
