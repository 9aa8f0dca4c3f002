import itertools
import logging
import math

import numpy as np
import pandas as pd

from annealed_ldp.cli.base import AnnealedCommand
from annealed_ldp.cli.grids import parse_integers
from annealed_ldp.oracle.enumeration import ExactInstance
from annealed_ldp.oracle.enumeration import exact_degree_mgf
from annealed_ldp.oracle.enumeration import exact_log_edge_mgf
from annealed_ldp.oracle.enumeration import exact_log_partition
from annealed_ldp.oracle.enumeration import exact_spin_distribution

logger = logging.getLogger(__name__)

QUANTITIES = ("partition", "spin", "edges", "degree")


class Command(AnnealedCommand):
    help = "Exact finite-n quantities of the annealed model on a type-count instance"
    defaults = {"quantity": "partition", "type": "0"}

    def add_command_arguments(self, parser):
        parser.add_argument("--beta", help="Inverse temperatures")
        parser.add_argument("--B", dest="B", help="External fields")
        parser.add_argument("--quantity", help=f"One of {', '.join(QUANTITIES)}")
        parser.add_argument("--t", help="Tilt grid for edges and degree")
        parser.add_argument("--type", help="Type index of the singled-out vertex for degree")

    def compute(self, options):
        if not options.get("counts"):
            msg = "--counts is required"
            raise ValueError(msg)
        quantity = options["quantity"]
        if quantity not in QUANTITIES:
            msg = f"Unknown quantity {quantity!r}; choose from {', '.join(QUANTITIES)}"
            raise ValueError(msg)
        model = self.model_from(options)
        counts = parse_integers(options["counts"])
        parameters = {
            **self.model_parameters(model),
            "counts": counts,
            "beta": options.get("beta"),
            "B": options.get("B"),
            "quantity": quantity,
        }

        frames = []
        for beta, B in itertools.product(self.values(options, "beta"), self.values(options, "B")):
            inst = ExactInstance(tuple(counts), model.atoms, beta, B)
            logger.info(f"oracle: {quantity} at n={inst.n} beta={beta!r} B={B!r}")
            frame = getattr(self, f"_{quantity}")(inst, options)
            frame.insert(0, "B", B)
            frame.insert(0, "beta", beta)
            frames.append(frame)
        return pd.concat(frames, ignore_index=True), parameters

    def _partition(self, inst, options):
        log_z = exact_log_partition(inst)
        return pd.DataFrame({"n": [inst.n], "log_partition": [log_z], "pressure": [log_z / inst.n]})

    def _spin(self, inst, options):
        law = exact_spin_distribution(inst)
        return pd.DataFrame(
            {
                "S": law.totals,
                "m": law.totals / inst.n,
                "probability": law.probabilities,
                "scaled_rate": -law.log_probabilities / inst.n,
            },
        )

    def _edges(self, inst, options):
        tilts = self.values(options, "t")
        log_mgf = np.array([exact_log_edge_mgf(t, inst) for t in tilts])
        return pd.DataFrame({"t": tilts, "log_mgf": log_mgf, "scaled_cgf": log_mgf / inst.n})

    def _degree(self, inst, options):
        vertex_type = int(options["type"])
        tilts = self.values(options, "t")
        values = [exact_degree_mgf(t, vertex_type, inst) for t in tilts]
        return pd.DataFrame(
            {
                "type": vertex_type,
                "w": inst.atoms[vertex_type] if 0 <= vertex_type < inst.size else math.nan,
                "t": tilts,
                "mgf": values,
            },
        )
