import logging
import math

import pandas as pd

from annealed_ldp.cli.base import AnnealedCommand
from annealed_ldp.cli.grids import parse_integers
from annealed_ldp.cli.grids import parse_list
from annealed_ldp.mc.glauber import RNG_NAME
from annealed_ldp.mc.glauber import McConfig
from annealed_ldp.mc.glauber import glauber_run
from annealed_ldp.mc.tasks import run_seeds
from annealed_ldp.thermo.services import ModelPoint
from annealed_ldp.thermo.services import magnetization

logger = logging.getLogger(__name__)

COLUMNS = [
    "seed",
    "n",
    "theta",
    "B",
    "mean_magnetization",
    "std_error",
    "mean_weighted_magnetization",
    "weighted_std_error",
    "samples_used",
    "weighted_sum_drift",
    "limit_magnetization",
]


class Command(AnnealedCommand):
    help = "Heat-bath Glauber sampling of the inhomogeneous Curie-Weiss model, one row per seed"
    defaults = {"sweeps": "10000", "burn_in": "1000", "thin": "1", "seed": "0", "B": "0"}

    def add_command_arguments(self, parser):
        parser.add_argument("--beta", help="Inverse temperature; the coupling is sinh(beta)")
        parser.add_argument("--theta", help="Curie-Weiss coupling, instead of --beta")
        parser.add_argument("--B", dest="B", help="External field")
        parser.add_argument("--sweeps", help="Total sweeps of n single-site updates")
        parser.add_argument("--burn-in", dest="burn_in", help="Sweeps discarded before recording")
        parser.add_argument("--thin", help="Keep every thin-th recorded sweep")
        parser.add_argument("--seeds", help="Comma list of seeds run concurrently; overrides --seed")

    def compute(self, options):
        if not options.get("counts"):
            msg = "--counts is required"
            raise ValueError(msg)
        if bool(options.get("beta")) == bool(options.get("theta")):
            msg = "Give exactly one of --beta and --theta"
            raise ValueError(msg)
        model = self.model_from(options)
        theta = math.sinh(float(options["beta"])) if options.get("beta") else float(options["theta"])
        config = McConfig(
            counts=tuple(parse_integers(options["counts"])),
            atoms=tuple(parse_list(options["atoms"])),
            theta=theta,
            B=float(options["B"]),
            sweeps=int(options["sweeps"]),
            burn_in=int(options["burn_in"]),
            seed=int(options["seed"]),
            thin=int(options["thin"]),
        )
        limit = magnetization(ModelPoint(beta=math.asinh(theta), B=config.B, model=model))

        if options.get("seeds"):
            results = run_seeds(config, parse_integers(options["seeds"]))
        else:
            results = [glauber_run(config).to_dict()]
        n = sum(config.counts)
        rows = [
            [
                result["seed_echo"],
                n,
                theta,
                config.B,
                result["mean_magnetization"],
                result["std_error"],
                result["mean_weighted_magnetization"],
                result["weighted_std_error"],
                result["samples_used"],
                result["weighted_sum_drift"],
                limit,
            ]
            for result in results
        ]
        parameters = {
            **self.model_parameters(model),
            "counts": list(config.counts),
            "theta": theta,
            "B": config.B,
            "sweeps": config.sweeps,
            "burn_in": config.burn_in,
            "thin": config.thin,
            "rng": RNG_NAME,
        }
        return pd.DataFrame(rows, columns=COLUMNS), parameters
