"""
Console entry point: ``annealed-ldp <command> [flags]``.

Dispatches to the management commands of this app without going through
``manage.py`` and maps every failure onto exit status 1 (validation) or 2
(usage) with a one-line diagnostic on stderr.
"""

import logging
import os
import sys
from collections.abc import Sequence

import django
from django.core.management import load_command_class
from django.core.management.base import CommandError
from django.core.management.base import handle_default_options

from annealed_ldp.cli.base import USAGE_ERROR

logger = logging.getLogger(__name__)

APP = "annealed_ldp.cli"
COMMANDS = ("phase", "rate_spin", "rate_edges", "degrees", "oracle", "mc", "validate")
PROG = "annealed-ldp"


def _usage() -> str:
    names = ", ".join(name.replace("_", "-") for name in COMMANDS)
    return f"usage: {PROG} <command> [flags]; commands: {names}"


def run(argv: Sequence[str]) -> int:
    """
    Execute one command.

    Returns:
        0 on success, 1 when a validation check fails, 2 on usage errors
    """
    if not argv or argv[0] in ("-h", "--help"):
        sys.stderr.write(_usage() + "\n")
        return 0 if argv else USAGE_ERROR
    name = argv[0].replace("-", "_")
    if name not in COMMANDS:
        sys.stderr.write(f"{PROG}: unknown command {argv[0]!r}\n")
        return USAGE_ERROR

    command = load_command_class(APP, name)
    parser = command.create_parser(PROG, argv[0])
    try:
        options = parser.parse_args(argv[1:])
    except SystemExit as exc:
        # argparse has already printed its own message.
        return 0 if exc.code == 0 else USAGE_ERROR
    except CommandError as exc:
        sys.stderr.write(f"{PROG} {argv[0]}: {exc}\n")
        return USAGE_ERROR

    handle_default_options(options)
    arguments = vars(options)
    positional = arguments.pop("args", ())
    try:
        command.execute(*positional, **arguments)
    except CommandError as exc:
        sys.stderr.write(f"{PROG} {argv[0]}: {exc}\n")
        return exc.returncode
    return 0


def main() -> None:
    os.environ.setdefault("DJANGO_SETTINGS_MODULE", "config.settings.local")
    django.setup()
    sys.exit(run(sys.argv[1:]))
