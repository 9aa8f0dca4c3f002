from django.apps import AppConfig


class CliConfig(AppConfig):
    name = "annealed_ldp.cli"
    verbose_name = "Command line"
