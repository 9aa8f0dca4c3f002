"""
Celery application for Monte Carlo seed runs.

``annealed_ldp.mc.tasks`` runs one Glauber chain per task; the routes in
settings send those tasks to the ``monte_carlo`` queue, so a worker only
needs ``celery -A config.celery_app worker -Q monte_carlo``. Local and
test settings run the tasks eagerly in-process.
"""

import os

from celery import Celery
from celery.signals import setup_logging

os.environ.setdefault("DJANGO_SETTINGS_MODULE", "config.settings.local")

app = Celery("annealed_ldp")

# CELERY_-prefixed settings: broker, eager mode, time limits and queue routes.
app.config_from_object("django.conf:settings", namespace="CELERY")


@setup_logging.connect
def config_loggers(*args, **kwargs):
    """Workers log through the project's LOGGING dict, including the structured formatter."""
    from logging.config import dictConfig  # noqa: PLC0415

    from django.conf import settings  # noqa: PLC0415

    dictConfig(settings.LOGGING)


app.autodiscover_tasks(["annealed_ldp.mc"])
