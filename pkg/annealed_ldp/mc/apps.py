from django.apps import AppConfig


class MonteCarloConfig(AppConfig):
    name = "annealed_ldp.mc"
    verbose_name = "Glauber Monte Carlo"
