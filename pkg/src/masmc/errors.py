"""Exception and warning types shared across the package."""


class MasmcError(Exception):
    """Base class for all simulator errors."""


class ConfigError(MasmcError, ValueError):
    pass


class DomainError(MasmcError, ValueError):
    pass


class InvalidFragmentCount(MasmcError, ValueError):
    pass


class EmptyShareVector(MasmcError, ValueError):
    pass


class NonceReuse(MasmcError):
    pass


class AuthFailure(MasmcError):
    pass


class DuplicateFragment(MasmcError):
    pass


class MissingFragments(MasmcError):
    def __init__(self, missing):
        self.missing = list(missing)
        super().__init__(f"missing fragments: {self.missing}")


class InsufficientAgents(MasmcError):
    pass


class EmptyTally(MasmcError, ValueError):
    pass


class TopologyWarning(UserWarning):
    """Parameter choice is legal but weakens the privacy or trust layout."""
