import logging
from collections.abc import Iterable
from dataclasses import replace

from celery import group
from celery import shared_task

from annealed_ldp.mc.glauber import McConfig
from annealed_ldp.mc.glauber import glauber_run

logger = logging.getLogger(__name__)


@shared_task
def glauber_run_task(config: dict) -> dict:
    """
    Run one seeded Glauber chain.

    Args:
        config: ``McConfig.to_dict()`` output

    Returns:
        ``McResult.to_dict()`` of the run
    """
    result = glauber_run(McConfig.from_dict(config))
    logger.info(f"Seed {result.seed_echo}: m = {result.mean_magnetization:.6f} +/- {result.std_error:.2e}")
    return result.to_dict()


def run_seeds(config: McConfig, seeds: Iterable[int], timeout: float = 3600) -> list[dict]:
    """Run one chain per seed concurrently; results come back in seed order."""
    seeds = list(seeds)
    logger.info(f"Dispatching {len(seeds)} Glauber runs")
    jobs = group(glauber_run_task.s(replace(config, seed=seed).to_dict()) for seed in seeds)
    return jobs.apply_async().get(timeout=timeout)
