from .base import *  # noqa: F403
from .base import LOGGING
from .base import env

# GENERAL
# ------------------------------------------------------------------------------
# https://docs.djangoproject.com/en/dev/ref/settings/#secret-key
SECRET_KEY = env("DJANGO_SECRET_KEY")

# ANNEALED LDP
# ------------------------------------------------------------------------------
ANNEALED_LDP_THREADS = env.int("ANNEALED_LDP_THREADS", default=4)

# LOGGING
# ------------------------------------------------------------------------------
# Workers ship JSON lines to the log collector.
LOGGING["handlers"]["annealed_ldp_console"]["formatter"] = "structured"
LOGGING["loggers"]["annealed_ldp"]["level"] = env("ANNEALED_LDP_LOG_LEVEL", default="INFO")

# Celery
# ------------------------------------------------------------------------------
# https://docs.celeryq.dev/en/stable/userguide/configuration.html#task-always-eager
CELERY_TASK_ALWAYS_EAGER = False
# https://docs.celeryq.dev/en/stable/userguide/configuration.html#result-backend-always-retry
CELERY_RESULT_BACKEND_ALWAYS_RETRY = True
# https://docs.celeryq.dev/en/stable/userguide/configuration.html#result-backend-max-retries
CELERY_RESULT_BACKEND_MAX_RETRIES = 10
