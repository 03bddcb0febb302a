"""
Django settings for spannerweave.

The project has no web surface: Django hosts the `spannerweave` management command,
the policy dict below and the logging setup.
"""

import os
from pathlib import Path
from dotenv import load_dotenv

# Load environment variables
load_dotenv()

BASE_DIR = Path(__file__).resolve().parent.parent

SECRET_KEY = os.getenv("SECRET_KEY", "django-insecure-dev-key-change-in-production")

DEBUG = os.getenv("DJANGO_DEBUG", "0") in ("1", "True", "true", "YES")

ALLOWED_HOSTS = []

INSTALLED_APPS = [
    "core",
    "api.apps.ApiConfig",
]

# Nothing is persisted; an in-memory database keeps Django's checks quiet
DATABASES = {
    'default': {
        'ENGINE': 'django.db.backends.sqlite3',
        'NAME': ':memory:',
    }
}

LANGUAGE_CODE = "en-us"
TIME_ZONE = "UTC"
USE_I18N = False
USE_TZ = True

DEFAULT_AUTO_FIELD = "django.db.models.BigAutoField"


def _flag(name: str, default: str = "1") -> bool:
    return os.getenv(name, default) in ("1", "True", "true", "YES")


# Spanner construction and verification policy
SPANNER_POLICY = {
    # Largest k accepted without an explicit --k-cap override
    'k_cap': int(os.getenv('SPANNERWEAVE_K_CAP', '3')),
    # Exact all-pairs verification is refused above this many vertices
    'apsp_limit': int(os.getenv('SPANNERWEAVE_APSP_LIMIT', '5000')),
    'threads': int(os.getenv('SPANNERWEAVE_THREADS', '1')),
    # Leaves up to this size get an exhaustive optimal tree spanner
    'small_spanner_cap': int(os.getenv('SPANNERWEAVE_SMALL_SPANNER_CAP', '8')),

    # Exact k-breadth of decomposition bags
    'breadth_k_cap': int(os.getenv('SPANNERWEAVE_BREADTH_K_CAP', '3')),
    'breadth_bag_cap': int(os.getenv('SPANNERWEAVE_BREADTH_BAG_CAP', '24')),
    # Brute-force tree-breadth size caps per k; larger k use the largest listed k
    'brute_tb_cap': {
        1: int(os.getenv('SPANNERWEAVE_BRUTE_TB_CAP_K1', '7')),
        2: int(os.getenv('SPANNERWEAVE_BRUTE_TB_CAP_K2', '6')),
    },

    # Guarantee checks; switch one off with SPANNERWEAVE_CHECK_<NAME>=0
    'bounds': {
        'depth': _flag('SPANNERWEAVE_CHECK_DEPTH'),
        'radius_certificate': _flag('SPANNERWEAVE_CHECK_RADIUS_CERTIFICATE'),
        'tree_count': _flag('SPANNERWEAVE_CHECK_TREE_COUNT'),
        'edge_count': _flag('SPANNERWEAVE_CHECK_EDGE_COUNT'),
        'spanning_trees': _flag('SPANNERWEAVE_CHECK_SPANNING_TREES'),
        'surplus': _flag('SPANNERWEAVE_CHECK_SURPLUS'),
        'stretch_vs_surplus': _flag('SPANNERWEAVE_CHECK_STRETCH_VS_SURPLUS'),
        'lift_breadth': _flag('SPANNERWEAVE_CHECK_LIFT_BREADTH'),
    },
}

# Logging configuration; stdout carries results, so logs go to stderr
LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "verbose": {
            "format": "{levelname} {asctime} {module} {message}",
            "style": "{",
        },
    },
    "handlers": {
        "console": {
            "level": "DEBUG",
            "class": "logging.StreamHandler",
            "stream": "ext://sys.stderr",
            "formatter": "verbose",
        },
    },
    "root": {
        "handlers": ["console"],
        "level": os.getenv("SPANNERWEAVE_LOG_LEVEL", "WARNING"),
    },
}
