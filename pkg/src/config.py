"""Configuration settings for the SEB channel toolkit.

This module centralizes configuration values and settings
for easy maintenance and extension.
"""

from pathlib import Path


class Config:
    """Application configuration."""

    # Application info
    APP_NAME = "SEB Channel Toolkit"
    VERSION = "1.0.0"
    LOGGER_NAME = "seb_toolkit"

    # Logging
    LOG_LEVEL = "WARNING"  # DEBUG, INFO, WARNING, ERROR, CRITICAL
    LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'

    # Numerical tolerances (double-precision headroom at dims <= 32)
    EPS_HERM = 1e-10  # Hermiticity residual bound
    EPS_PSD = 1e-9  # allowed negative-eigenvalue magnitude
    EPS_COMM = 1e-8  # relative commutator bound
    EPS_RECON = 1e-8  # reconstruction bound
    EPS_RANK = 1e-9  # singular-value cutoff for rank decisions

    # Representation limits
    MAX_TERMS = 4096  # cap on Kraus operators / Holevo pairs
    CHOI_CERTIFY_MAX_DIM = 16  # sigma is materialized for certification up to this d
    DEFAULT_SEED = 0

    # Output settings
    JSON_INDENT = 2
    FLOAT_DIGITS = 17  # significant digits in canonical JSON

    # Paths
    PROJECT_ROOT = Path(__file__).parent.parent
    TESTS_DIR = PROJECT_ROOT / "tests"
    FIXTURES_DIR = TESTS_DIR / "fixtures"

    @classmethod
    def default_tolerances(cls):
        """Build the default Tolerances model."""
        from .models.schema import Tolerances

        return Tolerances(
            eps_herm=cls.EPS_HERM,
            eps_psd=cls.EPS_PSD,
            eps_comm=cls.EPS_COMM,
            eps_recon=cls.EPS_RECON,
            eps_rank=cls.EPS_RANK,
        )
