import logging, os

THREADS_ENV_VARIABLE = "HETERODYN_THREADS"

logger = logging.getLogger(__name__)

def worker_count() -> int:
    """
    Number of worker threads for parallel column work.

    Reads HETERODYN_THREADS (loaded from .env by the CLI); falls back to the CPU count.
    """
    value = os.getenv(THREADS_ENV_VARIABLE)
    default = os.cpu_count() or 1

    if value is None:
        return default

    try:
        count = int(value)
    except ValueError:
        logger.warning(f"Ignoring non-integer {THREADS_ENV_VARIABLE}={value!r}; using {default} workers.")
        return default

    return max(count, 1)
