import itertools
import logging

import pandas as pd

from annealed_ldp.cli.base import AnnealedCommand
from annealed_ldp.core.numerics import parallel_map
from annealed_ldp.thermo.services import ModelPoint
from annealed_ldp.thermo.services import thermo_report

logger = logging.getLogger(__name__)

COLUMNS = ["beta", "B", "z_star", "psi_an", "magnetization", "susceptibility", "beta_c"]


class Command(AnnealedCommand):
    help = "Tabulate z*, the annealed pressure, magnetization and susceptibility over a (beta, B) grid"

    def add_command_arguments(self, parser):
        parser.add_argument("--beta", help="Inverse temperatures, start:stop:step or a comma list")
        parser.add_argument("--B", dest="B", help="External fields, start:stop:step or a comma list")

    def compute(self, options):
        model = self.model_from(options)
        grid = list(itertools.product(self.values(options, "beta"), self.values(options, "B")))
        logger.info(f"phase: {len(grid)} grid points")

        def row(params):
            beta, B = params
            report = thermo_report(ModelPoint(beta=beta, B=B, model=model))
            return [beta, B, report.z_star, report.psi_an, report.magnetization, report.susceptibility, report.beta_c]

        frame = pd.DataFrame(parallel_map(row, grid), columns=COLUMNS)
        return frame, {**self.model_parameters(model), "beta": options["beta"], "B": options["B"]}
