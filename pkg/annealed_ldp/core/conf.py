from typing import Any

from django.conf import settings


def setting(name: str, default: Any) -> Any:
    """
    Read a project setting, falling back to ``default``.

    The numerical core is importable without a configured Django project;
    in that case every lookup returns the default.
    """
    if not settings.configured:
        return default
    return getattr(settings, name, default)


def worker_count() -> int:
    """Number of threads used for grid sweeps and oracle outer loops."""
    return max(1, int(setting("ANNEALED_LDP_THREADS", 1)))
