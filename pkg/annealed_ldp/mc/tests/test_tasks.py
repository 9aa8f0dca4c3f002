from fnmatch import fnmatch

from celery.result import EagerResult

from annealed_ldp.mc.glauber import McConfig
from annealed_ldp.mc.glauber import glauber_run
from annealed_ldp.mc.tasks import glauber_run_task
from annealed_ldp.mc.tasks import run_seeds
from config.celery_app import app

CONFIG = McConfig(counts=(50, 50), atoms=(1.0, 3.0), theta=0.4, B=0.3, sweeps=300, burn_in=20, seed=5)


def test_glauber_task_runs_eagerly(settings):
    settings.CELERY_TASK_ALWAYS_EAGER = True
    task_result = glauber_run_task.delay(CONFIG.to_dict())
    assert isinstance(task_result, EagerResult)
    assert task_result.result == glauber_run(CONFIG).to_dict()
    assert task_result.result["rng"] == "Philox"


def test_run_seeds_keeps_seed_order(settings):
    settings.CELERY_TASK_ALWAYS_EAGER = True
    results = run_seeds(CONFIG, [3, 1, 2])
    assert [r["seed_echo"] for r in results] == [3, 1, 2]
    assert len({r["mean_magnetization"] for r in results}) == 3


def test_seed_runs_are_routed_to_the_monte_carlo_queue():
    assert app.main == "annealed_ldp"
    assert glauber_run_task.name in app.tasks
    routes = {pattern: route["queue"] for pattern, route in app.conf.task_routes.items()}
    assert [queue for pattern, queue in routes.items() if fnmatch(glauber_run_task.name, pattern)] == ["monte_carlo"]
