import logging
import os
import sys

_CONFIGURED = False

def get_logger(name: str) -> logging.Logger:
    """Module logger; installs one stderr handler on first use.
    Level comes from LSIRM_LOG_LEVEL (default INFO).
    """
    global _CONFIGURED
    if not _CONFIGURED:
        root = logging.getLogger("lsirm")
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter("%(asctime)s %(levelname)s %(name)s: %(message)s"))
        root.addHandler(handler)
        root.setLevel(os.getenv("LSIRM_LOG_LEVEL", "INFO").upper())
        root.propagate = False
        _CONFIGURED = True
    return logging.getLogger(f"lsirm.{name}")

def set_log_level(level: str):
    get_logger(__name__)  # make sure the handler exists
    logging.getLogger("lsirm").setLevel((level or "INFO").upper())
