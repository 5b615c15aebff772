"""
Configuration module for the privacy-constrained signal toolkit
"""

import logging
import os
from pathlib import Path

from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv(override=False)


def _flag(name: str, default: str = "false") -> bool:
    return os.getenv(name, default).strip().lower() in ("1", "true", "yes", "on")


class AppConfig:
    """Application configuration settings"""

    # Logging
    LOG_LEVEL: str = os.getenv("PRIVSIG_LOG_LEVEL", "WARNING").upper()

    # Output rendering
    DECIMAL_DIGITS: int = int(os.getenv("PRIVSIG_DECIMAL_DIGITS", "12"))  # used by a bare --decimals
    JSON_INDENT: int = int(os.getenv("PRIVSIG_JSON_INDENT", "2"))

    # Solver knobs
    DEBUG_CHECKS: bool = _flag("PRIVSIG_DEBUG_CHECKS")  # re-verify garblings with check_mps
    SPLIT_HALVINGS: int = int(os.getenv("PRIVSIG_SPLIT_HALVINGS", "64"))  # inferential split size search

    # Data Paths
    BASE_DIR: Path = Path(__file__).resolve().parent.parent
    PROBLEMS_DIR: Path = Path(os.getenv("PRIVSIG_PROBLEMS_DIR", str(BASE_DIR / "data" / "problems")))
    GOLDEN_DIR: Path = Path(os.getenv("PRIVSIG_GOLDEN_DIR", str(BASE_DIR / "tests" / "golden")))

    @classmethod
    def validate(cls) -> bool:
        """
        Validate the configuration.

        Returns:
            bool: True if configuration is valid

        Raises:
            ValueError: if a setting is malformed
        """
        if not isinstance(logging.getLevelName(cls.LOG_LEVEL), int):
            raise ValueError(f"PRIVSIG_LOG_LEVEL is not a logging level: {cls.LOG_LEVEL}")
        if cls.DECIMAL_DIGITS <= 0:
            raise ValueError("PRIVSIG_DECIMAL_DIGITS must be positive")
        if cls.SPLIT_HALVINGS <= 0:
            raise ValueError("PRIVSIG_SPLIT_HALVINGS must be positive")
        if cls.JSON_INDENT < 0:
            raise ValueError("PRIVSIG_JSON_INDENT must be non-negative")
        return True

    @classmethod
    def get_summary(cls) -> str:
        """
        Get a summary of current configuration.

        Returns:
            str: Configuration summary
        """
        return f"""
Configuration Summary:
  - Log Level: {cls.LOG_LEVEL}
  - Decimal Digits: {cls.DECIMAL_DIGITS}
  - JSON Indent: {cls.JSON_INDENT}
  - Debug Checks: {'On' if cls.DEBUG_CHECKS else 'Off'}
  - Split Halvings: {cls.SPLIT_HALVINGS}
  - Problems Directory: {cls.PROBLEMS_DIR}
  - Golden Directory: {cls.GOLDEN_DIR}
"""
