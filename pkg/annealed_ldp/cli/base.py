"""
Shared plumbing for the annealed_ldp management commands: model flags,
flat ``key=value`` config files, output formats and error mapping.
"""

import logging
from pathlib import Path
from typing import Any

import environ
import pandas as pd
from django.core.management.base import BaseCommand
from django.core.management.base import CommandError

from annealed_ldp.cli.grids import parse_integers
from annealed_ldp.cli.grids import parse_list
from annealed_ldp.cli.grids import parse_values
from annealed_ldp.cli.io import OutputFormat
from annealed_ldp.cli.io import build_metadata
from annealed_ldp.cli.io import write_table
from annealed_ldp.core.exceptions import AnnealedLDPError
from annealed_ldp.weights.distributions import WeightModel
from annealed_ldp.weights.distributions import counts_to_model
from annealed_ldp.weights.distributions import make_finite_type

logger = logging.getLogger(__name__)

USAGE_ERROR = 2
VALIDATION_FAILURE = 1


def read_config_file(path: str | Path) -> dict[str, str]:
    """
    Read a flat ``key=value`` file with django-environ's dotenv parser.

    Keys mirror the long command flags; hyphens and underscores are
    interchangeable.
    """
    path = Path(path)
    if not path.is_file():
        msg = f"Config file {path} does not exist"
        raise CommandError(msg, returncode=USAGE_ERROR)

    class FileEnv(environ.Env):
        ENVIRON: dict[str, str] = {}

    FileEnv.read_env(path, overwrite=True)
    return {key.strip().replace("-", "_"): value for key, value in FileEnv.ENVIRON.items()}


def _as_bool(value: Any) -> bool:
    if isinstance(value, bool):
        return value
    return str(value).strip().lower() in environ.Env.BOOLEAN_TRUE_STRINGS


class AnnealedCommand(BaseCommand):
    """
    Base class for commands that evaluate a finite-type weight model and
    emit a table.

    Subclasses declare their own flags in ``add_command_arguments``, give
    fallbacks in ``defaults`` and implement ``compute``. Every option is
    parsed as a string so that config-file values and flags go through the
    same conversion.
    """

    defaults: dict[str, Any] = {}
    requires_system_checks: list[str] = []

    def add_arguments(self, parser):
        parser.add_argument("--atoms", help="Weight atoms, e.g. 1,3")
        parser.add_argument("--probs", help="Atom probabilities, e.g. 0.5,0.5")
        parser.add_argument("--counts", help="Per-type vertex counts; sets the probabilities to n_k / n")
        parser.add_argument("--config", help="Flat key=value file mirroring the flags; flags take precedence")
        parser.add_argument("--output", help="Output path; the table goes to stdout when omitted")
        parser.add_argument("--format", choices=OutputFormat.values, help="Output format (default csv)")
        parser.add_argument("--seed", help="Integer seed, echoed in the metadata")
        parser.add_argument(
            "--deterministic",
            action="store_const",
            const=True,
            help="Leave the timestamp out of the metadata",
        )
        self.add_command_arguments(parser)

    def add_command_arguments(self, parser):
        pass

    def compute(self, options: dict[str, Any]) -> tuple[pd.DataFrame, dict[str, Any]]:
        raise NotImplementedError

    def merge_options(self, options: dict[str, Any]) -> dict[str, Any]:
        """Flags override the config file, which overrides ``defaults``."""
        merged = {"format": OutputFormat.CSV, "deterministic": False, **self.defaults}
        if options.get("config"):
            merged.update(read_config_file(options["config"]))
        merged.update({key: value for key, value in options.items() if value is not None})
        merged["deterministic"] = _as_bool(merged["deterministic"])
        if merged["format"] not in OutputFormat.values:
            msg = f"Unknown output format {merged['format']!r}"
            raise CommandError(msg, returncode=USAGE_ERROR)
        return merged

    def model_from(self, options: dict[str, Any]) -> WeightModel:
        if not options.get("atoms"):
            msg = "--atoms is required"
            raise CommandError(msg, returncode=USAGE_ERROR)
        atoms = parse_list(options["atoms"])
        if options.get("counts"):
            model, _ = counts_to_model(parse_integers(options["counts"]), atoms)
            return model
        if not options.get("probs"):
            msg = "Give either --probs or --counts together with --atoms"
            raise CommandError(msg, returncode=USAGE_ERROR)
        return make_finite_type(atoms, parse_list(options["probs"]))

    def values(self, options: dict[str, Any], key: str) -> list[float]:
        if options.get(key) in (None, ""):
            msg = f"--{key.replace('_', '-')} is required"
            raise CommandError(msg, returncode=USAGE_ERROR)
        return parse_values(options[key])

    def handle(self, *args, **options):
        merged = self.merge_options(options)
        command = self.__module__.rsplit(".", 1)[-1]
        try:
            if merged.get("seed") not in (None, ""):
                merged["seed"] = int(merged["seed"])
            frame, parameters = self.compute(merged)
        except CommandError:
            raise
        except (AnnealedLDPError, ValueError) as exc:
            raise CommandError(str(exc), returncode=USAGE_ERROR) from exc

        if isinstance(merged.get("seed"), int):
            parameters = {**parameters, "seed": merged["seed"]}
        metadata = build_metadata(command, parameters, deterministic=merged["deterministic"])
        logger.info(f"{command}: writing {len(frame)} rows")
        try:
            write_table(frame, metadata, output=merged.get("output"), fmt=merged["format"], stream=self.stdout)
        except OSError as exc:
            msg = f"Cannot write {merged.get('output')}: {exc}"
            raise CommandError(msg, returncode=USAGE_ERROR) from exc
        if merged.get("output"):
            self.stdout.write(self.style.SUCCESS(f"Wrote {len(frame)} rows to {merged['output']}"))

    @staticmethod
    def model_parameters(model: WeightModel) -> dict[str, Any]:
        return {"atoms": list(model.atoms), "probs": list(model.probs)}
