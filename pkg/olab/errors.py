class OlabError(ValueError):
    """Base class for every error raised by olab."""


class ConfigError(OlabError):
    """Invalid run configuration or malformed input file."""


class CapacityError(OlabError):
    """A computation would exceed a configured size limit."""


class WindowError(OlabError):
    """A computation would consult vertices outside the truncation."""


class PreconditionError(OlabError):
    """An operation was called on inputs outside its hypotheses."""


class KernelMismatchError(OlabError):
    """The setwise stabilizer does not model the normalizer of the fixator."""


class CharacterError(OlabError):
    """A character computation produced a non-integral or inconsistent value."""


class LiftFailureError(CharacterError):
    """Modular character values could not be lifted for the chosen prime."""
