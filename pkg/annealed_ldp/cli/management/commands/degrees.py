import itertools
import logging

import pandas as pd

from annealed_ldp.cli.base import AnnealedCommand
from annealed_ldp.cli.grids import parse_integers
from annealed_ldp.degrees.laws import degree_mgf
from annealed_ldp.degrees.laws import degree_mixture
from annealed_ldp.degrees.laws import degree_pmf
from annealed_ldp.thermo.services import ModelPoint

logger = logging.getLogger(__name__)


class Command(AnnealedCommand):
    help = "Degree moment generating function (--t) or mixed Poisson pmf (--d) of a vertex of weight w"

    def add_command_arguments(self, parser):
        parser.add_argument("--beta", help="Inverse temperatures")
        parser.add_argument("--B", dest="B", help="External fields")
        parser.add_argument("--w", help="Vertex weights")
        parser.add_argument("--t", help="Tilt grid for the moment generating function")
        parser.add_argument("--d", help="Degrees for the pmf, e.g. 0,1,2 or 0:20:1")
    def compute(self, options):
        model = self.model_from(options)
        if bool(options.get("t")) == bool(options.get("d")):
            msg = "Give exactly one of --t and --d"
            raise ValueError(msg)
        weights = self.values(options, "w")
        fields = list(itertools.product(self.values(options, "beta"), self.values(options, "B")))
        tilts = self.values(options, "t") if options.get("t") else None
        degrees = parse_integers(options["d"]) if tilts is None else None

        rows = []
        for beta, B in fields:
            point = ModelPoint(beta=beta, B=B, model=model)
            for w in weights:
                if tilts is not None:
                    mixture = degree_mixture(w, point)
                    rows += [[beta, B, w, t, degree_mgf(t, w, point), mixture.mgf(t)] for t in tilts]
                else:
                    rows += [[beta, B, w, d, degree_pmf(d, w, point)] for d in degrees]

        parameters = {**self.model_parameters(model), "beta": options["beta"], "B": options["B"], "w": weights}
        if tilts is not None:
            return pd.DataFrame(rows, columns=["beta", "B", "w", "t", "mgf", "mixture_mgf"]), parameters
        return pd.DataFrame(rows, columns=["beta", "B", "w", "d", "pmf"]), parameters
