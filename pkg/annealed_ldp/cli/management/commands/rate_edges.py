import itertools
import logging

import pandas as pd

from annealed_ldp.cli.base import AnnealedCommand
from annealed_ldp.core.numerics import parallel_map
from annealed_ldp.edge_ldp.cgf import edge_cgf
from annealed_ldp.edge_ldp.cgf import edge_rate
from annealed_ldp.edge_ldp.cgf import typical_edge_density
from annealed_ldp.thermo.services import ModelPoint

logger = logging.getLogger(__name__)


class Command(AnnealedCommand):
    help = "Edge-count cumulant generating function (--t) or rate function (--y)"

    def add_command_arguments(self, parser):
        parser.add_argument("--beta", help="Inverse temperatures")
        parser.add_argument("--B", dest="B", help="External fields")
        parser.add_argument("--t", help="Tilt grid for the cumulant generating function")
        parser.add_argument("--y", help="Edges-per-vertex grid for the rate function")

    def compute(self, options):
        model = self.model_from(options)
        if bool(options.get("t")) == bool(options.get("y")):
            msg = "Give exactly one of --t and --y"
            raise ValueError(msg)
        points = [
            ModelPoint(beta=beta, B=B, model=model)
            for beta, B in itertools.product(self.values(options, "beta"), self.values(options, "B"))
        ]
        parameters = {**self.model_parameters(model), "beta": options["beta"], "B": options["B"]}

        if options.get("t"):
            tilts = self.values(options, "t")

            def cgf_row(job):
                point, t = job
                result = edge_cgf(t, point)
                return [point.beta, point.B, t, result.value, result.derivative, result.z_star_t]

            rows = parallel_map(cgf_row, [(p, t) for p in points for t in tilts])
            columns = ["beta", "B", "t", "phi", "phi_prime", "z_star_t"]
            return pd.DataFrame(rows, columns=columns), parameters

        densities = self.values(options, "y")

        def rate_row(job):
            point, y = job
            result = edge_rate(y, point)
            return [point.beta, point.B, y, result.value, result.duals[0], typical_edge_density(point)]

        rows = parallel_map(rate_row, [(p, y) for p in points for y in densities])
        columns = ["beta", "B", "y", "rate", "tilt", "typical_density"]
        return pd.DataFrame(rows, columns=columns), parameters
