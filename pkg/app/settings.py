"""
Django settings for the lattice project.

Every tunable of the lattice toolkit (default extents, boundary mode, scalar
field, seed, tolerances, output directory) is read from the environment here
so a run is fully described by its .env file plus command-line flags.

For the full list of settings and their values, see
https://docs.djangoproject.com/en/5.2/ref/settings/
"""

from pathlib import Path
import os
from dotenv import load_dotenv

load_dotenv()

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

# Environment Configuration
ENVIRONMENT = os.getenv('ENVIRONMENT', 'development')
IS_PRODUCTION = ENVIRONMENT == 'production'

# SECURITY WARNING: keep the secret key used in production secret!
SECRET_KEY = os.getenv('SECRET_KEY', 'django-insecure-change-this-in-production')

DEBUG = os.getenv('DEBUG', 'True').lower() == 'true' and not IS_PRODUCTION

ALLOWED_HOSTS = []

# Application definition
INSTALLED_APPS = [
    'rest_framework',
    'cochains',
    'dirac_kahler',
    'spectra',
    'verification',
]

# Nothing is persisted; the database only keeps Django's machinery happy.
DATABASES = {
    'default': {
        'ENGINE': 'django.db.backends.sqlite3',
        'NAME': BASE_DIR / 'db.sqlite3',
    }
}

# Internationalization
LANGUAGE_CODE = 'en-us'
TIME_ZONE = 'UTC'
USE_I18N = True
USE_TZ = True


def _extents(name, default):
    raw = os.getenv(name, default)
    return tuple(int(part) for part in raw.split(','))


# Lattice configuration
LATTICE_EXTENTS = _extents('LATTICE_EXTENTS', '3,3,3,3')
LATTICE_BOUNDARY = os.getenv('LATTICE_BOUNDARY', 'zero')
LATTICE_SCALAR = os.getenv('LATTICE_SCALAR', 'integer')
LATTICE_SEED = int(os.getenv('LATTICE_SEED', 42))

# Spectral runs need a torus
SPECTRAL_EXTENTS = _extents('SPECTRAL_EXTENTS', '2,2,2,2')
SPECTRAL_BOUNDARY = os.getenv('SPECTRAL_BOUNDARY', 'periodic')

MARCH_EXTENTS = _extents('MARCH_EXTENTS', '6,4,4,4')

# Tolerances
TOL_IDENTITY = float(os.getenv('TOL_IDENTITY', 1e-12))
TOL_EIGEN = float(os.getenv('TOL_EIGEN', 1e-8))
TOL_KERNEL = float(os.getenv('TOL_KERNEL', 1e-10))

# Dense factorizations refuse matrices wider than this
DENSE_COLUMN_LIMIT = int(os.getenv('DENSE_COLUMN_LIMIT', 5000))

# Random samples per property check in the verification suites
PROPERTY_SAMPLES = int(os.getenv('PROPERTY_SAMPLES', 200))

LATTICE_OUTPUT_DIR = Path(os.getenv('LATTICE_OUTPUT_DIR', BASE_DIR / 'output'))

# Logging configuration
LATTICE_LOGGERS = ('cochains', 'dirac_kahler', 'spectra', 'verification')

if IS_PRODUCTION:
    LOGGING = {
        'version': 1,
        'disable_existing_loggers': False,
        'formatters': {
            'verbose': {
                'format': '{levelname} {asctime} {module} {process:d} {message}',
                'style': '{',
            },
        },
        'handlers': {
            'console': {
                'class': 'logging.StreamHandler',
                'formatter': 'verbose',
            },
        },
        'root': {
            'handlers': ['console'],
            'level': 'WARNING',
        },
        'loggers': {
            name: {
                'handlers': ['console'],
                'level': 'INFO',
                'propagate': False,
            }
            for name in LATTICE_LOGGERS
        },
    }
else:
    # Development logging
    LOGGING = {
        'version': 1,
        'disable_existing_loggers': False,
        'formatters': {
            'simple': {
                'format': '{levelname} {module} {message}',
                'style': '{',
            },
        },
        'handlers': {
            'console': {
                'class': 'logging.StreamHandler',
                'formatter': 'simple',
                'level': os.getenv('LATTICE_CONSOLE_LEVEL', 'WARNING'),
            },
        },
        'loggers': {
            name: {
                'handlers': ['console'],
                'level': 'DEBUG',
                'propagate': False,
            }
            for name in LATTICE_LOGGERS
        },
    }

    if os.getenv('LATTICE_LOG_FILE'):
        LOGGING['handlers']['file'] = {
            'class': 'logging.FileHandler',
            'filename': os.getenv('LATTICE_LOG_FILE'),
            'formatter': 'simple',
        }
        for name in LATTICE_LOGGERS:
            LOGGING['loggers'][name]['handlers'].append('file')
