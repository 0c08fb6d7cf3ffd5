"""
artri configuration
===================
Environment-driven defaults shared by every engine module.

Usage:
  from tools.artri import config
  config.MAX_PATH_LEN        # default nilpotency search bound for build_algebra
  config.default_field()     # Field chosen by ARTRI_FIELD, or None when unset
"""

from __future__ import annotations

import logging
import os

# ═══════════════════════════════════════════════════════════════
# Configuration
# ═══════════════════════════════════════════════════════════════

FIELD_OVERRIDE = os.environ.get("ARTRI_FIELD", "").strip()
DEFAULT_PRIME = int(os.environ.get("ARTRI_PRIME", "32003"))
MAX_PATH_LEN = int(os.environ.get("ARTRI_MAX_PATH_LEN", "32"))
MAX_RESOLUTION = int(os.environ.get("ARTRI_MAX_RESOLUTION", "16"))
SEED = int(os.environ.get("ARTRI_SEED", "20240917"))
RANDOM_TRIES = int(os.environ.get("ARTRI_RANDOM_TRIES", "24"))
LOG_LEVEL = os.environ.get("ARTRI_LOG_LEVEL", "WARNING").upper()

LOG_FORMAT = "%(asctime)s %(name)s %(levelname)s %(message)s"


def setup_logging(level: str = "") -> None:
    """Entry points call this once; library modules only fetch loggers."""
    logging.basicConfig(level=getattr(logging, level or LOG_LEVEL, logging.WARNING),
                        format=LOG_FORMAT)


def default_field():
    """The field forced by ARTRI_FIELD, or None."""
    if not FIELD_OVERRIDE:
        return None
    from .linalg import Field
    return Field.parse(FIELD_OVERRIDE)
