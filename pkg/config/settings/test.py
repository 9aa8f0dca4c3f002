"""
With these settings, tests run faster.
"""

from .base import *  # noqa: F403

# GENERAL
# ------------------------------------------------------------------------------
# https://docs.djangoproject.com/en/dev/ref/settings/#secret-key
SECRET_KEY = "test-annealed-ldp-fixed-secret"
# https://docs.djangoproject.com/en/dev/ref/settings/#test-runner
TEST_RUNNER = "django.test.runner.DiscoverRunner"

# ANNEALED LDP
# ------------------------------------------------------------------------------
ANNEALED_LDP_THREADS = 1
ANNEALED_LDP_MC_BATCHES = 20

# Celery
# ------------------------------------------------------------------------------
# https://docs.celeryq.dev/en/stable/userguide/configuration.html#task-always-eager
CELERY_TASK_ALWAYS_EAGER = True
# https://docs.celeryq.dev/en/stable/userguide/configuration.html#task-eager-propagates
CELERY_TASK_EAGER_PROPAGATES = True

# LOGGING
# ------------------------------------------------------------------------------
# Let records reach the root logger, where pytest's caplog listens.
LOGGING["loggers"]["annealed_ldp"] = {"level": "DEBUG", "propagate": True}  # noqa: F405
LOGGING["root"] = {"level": "WARNING", "handlers": []}  # noqa: F405
