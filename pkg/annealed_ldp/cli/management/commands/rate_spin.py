import itertools
import logging

import pandas as pd

from annealed_ldp.cli.base import AnnealedCommand
from annealed_ldp.spin_ldp.curves import RateMethod
from annealed_ldp.spin_ldp.curves import spin_rate_curve
from annealed_ldp.thermo.services import ModelPoint

logger = logging.getLogger(__name__)


class Command(AnnealedCommand):
    help = "Spin magnetization rate function I(m), one value column per method"
    defaults = {"method": RateMethod.CONTRACTION}

    def add_command_arguments(self, parser):
        parser.add_argument("--beta", help="Inverse temperatures")
        parser.add_argument("--B", dest="B", help="External fields")
        parser.add_argument("--m", help="Magnetization grid, e.g. -0.95:0.95:0.05")
        parser.add_argument("--method", help=f"Comma list of {', '.join(RateMethod)}")

    def compute(self, options):
        model = self.model_from(options)
        methods = [m.strip() for m in str(options["method"]).split(",") if m.strip()]
        unknown = [m for m in methods if m not in RateMethod]
        if unknown or not methods:
            msg = f"Unknown rate method(s) {unknown}; choose from {', '.join(RateMethod)}"
            raise ValueError(msg)
        grid = self.values(options, "m")

        columns = {"beta": [], "B": [], "m": []} | {method: [] for method in methods}
        flags = []
        for beta, B in itertools.product(self.values(options, "beta"), self.values(options, "B")):
            point = ModelPoint(beta=beta, B=B, model=model)
            columns["beta"] += [beta] * len(grid)
            columns["B"] += [B] * len(grid)
            columns["m"] += grid
            for method in methods:
                curve = spin_rate_curve(grid, point, method)
                columns[method] += list(curve.values)
                if method == RateMethod.HIGHT_LEGENDRE:
                    flags += list(curve.non_exposed)
        if RateMethod.HIGHT_LEGENDRE in methods:
            columns["non_exposed"] = flags
        parameters = {**self.model_parameters(model), "beta": options["beta"], "B": options["B"], "method": methods}
        return pd.DataFrame(columns), parameters
