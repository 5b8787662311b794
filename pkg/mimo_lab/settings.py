import os

from environs import Env


env = Env()
env.read_env()

BASE_DIR = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))

# Nothing is signed or served; Django only requires the setting to be present.
SECRET_KEY = env.str("SECRET_KEY", "mimo-lab-insecure-0if40nf4nf93n4")
DEBUG = env.bool("DEBUG", False)

INSTALLED_APPS = [
    "dpst.apps.DpstConfig",
    "bench.apps.BenchConfig",
    "rest_framework",
]

TEMPLATES = [
    {
        "BACKEND": "django.template.backends.django.DjangoTemplates",
        "DIRS": [],
        "APP_DIRS": True,
        "OPTIONS": {
            "autoescape": True,
        },
    },
]

DATABASES = {}

LOG_LEVEL = env.str("LOG_LEVEL", "INFO")

LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "plain": {
            "format": "%(asctime)s %(levelname)s %(name)s: %(message)s",
        },
    },
    "handlers": {
        "console": {
            "class": "logging.StreamHandler",
            "formatter": "plain",
        },
    },
    "loggers": {
        name: {"handlers": ["console"], "level": LOG_LEVEL, "propagate": False}
        for name in ("cplx", "sysmodel", "detectors", "dpst", "bench")
    },
}

MIMO_WORKERS = env.int("MIMO_WORKERS", os.cpu_count() or 1)

# Experiment grid of the reference 4x8 study. Deliberately not read from the
# environment: identical flags must mean identical runs.
MIMO_DEFAULTS = {
    "nt": 4,
    "nr": 8,
    "mod_order": 4,
    "p": 0.5,
    "batch": 24,
    "steps": 10000,
    "lr": 0.001,
    "snr_set": [0.0, 5.0, 10.0, 15.0, 20.0, 25.0],
    "loss": "supervised",
    "seed": 0,
    "frames": 10000,
    "detectors": ["zf", "mmse", "zf-sic", "mmse-sic", "ml"],
    "log_every": 100,
}
