from django.apps import AppConfig


class DpstConfig(AppConfig):
    name = "dpst"
    verbose_name = "DPST deep-unfolded detector"
