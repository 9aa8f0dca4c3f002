import logging

import pandas as pd
from django.core.management.base import CommandError

from annealed_ldp.cli.base import VALIDATION_FAILURE
from annealed_ldp.cli.base import AnnealedCommand
from annealed_ldp.cli.validation import Suite
from annealed_ldp.cli.validation import run_suite

logger = logging.getLogger(__name__)


class Command(AnnealedCommand):
    help = "Run the self-checks and print a PASS/FAIL table; exits 1 when any check fails"
    defaults = {"suite": Suite.QUICK}

    def add_command_arguments(self, parser):
        parser.add_argument("--suite", choices=Suite.values, help="quick (default) or acceptance")

    def compute(self, options):
        seed = options.get("seed")
        checks = run_suite(options["suite"], seed=seed if isinstance(seed, int) else 0)
        self.failures = [check for check in checks if not check.passed]
        frame = pd.DataFrame(
            {
                "criterion": [check.criterion for check in checks],
                "check": [check.name for check in checks],
                "status": [check.status for check in checks],
                "detail": [check.detail for check in checks],
                "seconds": [round(check.seconds, 3) for check in checks],
            },
        )
        return frame, {"suite": options["suite"]}

    def handle(self, *args, **options):
        self.failures = []
        super().handle(*args, **options)
        if self.failures:
            names = ", ".join(f"{check.criterion} ({check.name})" for check in self.failures)
            msg = f"{len(self.failures)} check(s) failed: {names}"
            raise CommandError(msg, returncode=VALIDATION_FAILURE)
