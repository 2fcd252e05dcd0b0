import os
from dataclasses import dataclass

from olab.errors import ConfigError

_DEFAULT_MAX_GROUP_ORDER = 10**6
_DEFAULT_MAX_VERTICES = 5000
_DEFAULT_MAX_ORBIT = 10**6
_DEFAULT_MAX_INDEX = 10**5
_DEFAULT_MAX_CLASSES = 200
_DEFAULT_PRIME_ATTEMPTS = 5


@dataclass(frozen=True)
class Limits:
    """Capacity limits shared by every computation."""

    max_group_order: int = _DEFAULT_MAX_GROUP_ORDER  # element enumeration, tables
    max_vertices: int = _DEFAULT_MAX_VERTICES
    max_orbit: int = _DEFAULT_MAX_ORBIT
    max_index: int = _DEFAULT_MAX_INDEX
    max_classes: int = _DEFAULT_MAX_CLASSES
    prime_attempts: int = _DEFAULT_PRIME_ATTEMPTS


_ENV_FIELDS = {
    "OLAB_MAX_GROUP_ORDER": "max_group_order",
    "OLAB_MAX_VERTICES": "max_vertices",
    "OLAB_MAX_ORBIT": "max_orbit",
    "OLAB_MAX_INDEX": "max_index",
}


def load_limits(environ: dict[str, str] | None = None) -> Limits:
    """Read capacity limits from the environment.

    Raises:
        ConfigError: If a variable is set to something other than a positive integer.
    """
    env = os.environ if environ is None else environ
    values: dict[str, int] = {}
    for var, field_name in _ENV_FIELDS.items():
        raw = env.get(var)
        if raw is None or raw == "":
            continue
        try:
            value = int(raw)
        except ValueError:
            raise ConfigError(f"{var} must be an integer, got {raw!r}") from None
        if value <= 0:
            raise ConfigError(f"{var} must be positive, got {value}")
        values[field_name] = value
    return Limits(**values)
