"""
Django settings for the prhr project.

The project has no web surface: Django provides the settings layer, the
management-command CLI and the test runner around the `prhr` app.
"""

import environ
import os

from pathlib import Path

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent


env = environ.Env(
    DEBUG=(bool, False),
    PRHR_MAX_WORKERS=(int, os.cpu_count() or 1),
)

environ.Env.read_env(os.path.join(BASE_DIR, ".env"))

SECRET_KEY = env("SECRET_KEY", default="prhr-local-only-not-a-secret")

DEBUG = env("DEBUG")

ALLOWED_HOSTS: list[str] = []

# Application definition

DJANGO_APPS = [
    "django.contrib.contenttypes",
    "django.contrib.auth",
]

LOCAL_APPS = [
    "prhr",
]

THIRD_PARTY_APPS = [
    "rest_framework",
]

INSTALLED_APPS = DJANGO_APPS + LOCAL_APPS + THIRD_PARTY_APPS

# No database: every computation is a pure function of its inputs.
DATABASES: dict = {}

USE_TZ = True

DEFAULT_AUTO_FIELD = "django.db.models.BigAutoField"


# Logging setup start
DJANGO_LOG_LEVEL = env.str("DJANGO_LOG_LEVEL", "ERROR")
LOG_LEVEL = env.str("LOG_LEVEL", "WARNING")

LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "console": {
            "format": "[{asctime} | {levelname} | {pathname}:{lineno}] {message}",
            "style": "{",
            "datefmt": "%Y-%m-%d %H:%M:%S",
        },
    },
    "handlers": {
        "console": {
            "class": "logging.StreamHandler",
            "formatter": "console",
        },
    },
    "loggers": {
        "django": {
            "handlers": ["console"],
            "level": DJANGO_LOG_LEVEL,
            "propagate": False,
        },
        "prhr": {
            "level": LOG_LEVEL,
            "handlers": ["console"],
            "propagate": False,
        },
    },
}

# Logging setup end


REST_FRAMEWORK = {
    "UNAUTHENTICATED_USER": None,
    "DEFAULT_AUTHENTICATION_CLASSES": [],
    "DEFAULT_PERMISSION_CLASSES": [],
}


# PRHR test defaults. None of these is read from the environment except the
# worker count, which never changes a result.
PRHR = {
    "DEFAULT_ALPHA": 0.05,
    "DEFAULT_ALPHAS": (0.01, 0.05, 0.10),
    "DEFAULT_REPS": 10000,
    "DEFAULT_SEED": 20240601,
    "SOLVER_MAX_ITER": 200,
    "SOLVER_RESIDUAL_TOL": 1e-10,
    "FLOAT_FORMAT": "%.17g",
    "MAX_WORKERS": env("PRHR_MAX_WORKERS"),
}
