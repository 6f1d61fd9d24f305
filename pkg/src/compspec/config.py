"""Process-wide numeric defaults."""

import os

DEFAULT_PRECISION = 256
PRECISION_ENV_VAR = "COMPSPEC_PRECISION"


def default_precision() -> int:
    raw = os.environ.get(PRECISION_ENV_VAR)
    if raw:
        try:
            value = int(raw)
            if value >= 16:
                return value
        except ValueError:
            pass
    return DEFAULT_PRECISION
