import threading
import logging
from os import environ
from typing import Optional

from opentelemetry.sdk.trace import SpanProcessor

from gradedkit._internal.tracer import GradedKitTracerProvider

logger = logging.getLogger(__name__)


_DEFAULT_SEED = 0
_DEFAULT_SAMPLES = 8
_DEFAULT_MAX_WORKERS = 1
_DEFAULT_MODE = "strict"
_VALID_MODES = ("strict", "sampled")
_ENV_VAR_INT_VALUE_ERROR_MESSAGE = "Unable to parse value for %s as integer. Defaulting to %s."

GRADEDKIT_SEED = "GRADEDKIT_SEED"
GRADEDKIT_SAMPLES = "GRADEDKIT_SAMPLES"
GRADEDKIT_MODE = "GRADEDKIT_MODE"
GRADEDKIT_MAX_WORKERS = "GRADEDKIT_MAX_WORKERS"


class GradedKitConfig:
    """
    Configuration for verification runs

    Args:
        seed: Seed for pseudorandom sample points and randomized probes. Can also be set via GRADEDKIT_SEED
        samples: Number of pseudorandom sample points besides the origin. Can also be set via GRADEDKIT_SAMPLES
        mode: "strict" or "sampled" nondegeneracy checking. Can also be set via GRADEDKIT_MODE
        max_workers: Worker threads used for per-tuple identity checks. Can also be set via GRADEDKIT_MAX_WORKERS
        span_processor: Optional extra span processor attached to the isolated tracer provider
    """

    def __init__(
        self,
        seed: int | None = None,
        samples: int | None = None,
        mode: str | None = None,
        max_workers: int | None = None,
        span_processor: Optional[SpanProcessor] = None,
        opentelemetry_log_level: int = logging.ERROR,
    ):
        self.seed = seed if seed is not None else GradedKitConfig._default_seed()
        self.samples = samples if samples is not None else GradedKitConfig._default_samples()
        self.mode = (mode or environ.get(GRADEDKIT_MODE) or _DEFAULT_MODE).lower()
        self.max_workers = max_workers or GradedKitConfig._default_max_workers()
        self.span_processor = span_processor

        if self.mode not in _VALID_MODES:
            raise ValueError(f"Unknown verification mode {self.mode!r}; expected one of {_VALID_MODES}")

        if self.samples < 1:
            raise ValueError("At least one pseudorandom sample point is required")

        if self.max_workers < 1:
            raise ValueError("max_workers must be a positive integer")

        logging.getLogger("opentelemetry").setLevel(opentelemetry_log_level)

    @staticmethod
    def _default_seed():
        try:
            return int(environ.get(GRADEDKIT_SEED, _DEFAULT_SEED))
        except ValueError:
            logger.exception(_ENV_VAR_INT_VALUE_ERROR_MESSAGE, GRADEDKIT_SEED, _DEFAULT_SEED)
            return _DEFAULT_SEED

    @staticmethod
    def _default_samples():
        try:
            return int(environ.get(GRADEDKIT_SAMPLES, _DEFAULT_SAMPLES))
        except ValueError:
            logger.exception(_ENV_VAR_INT_VALUE_ERROR_MESSAGE, GRADEDKIT_SAMPLES, _DEFAULT_SAMPLES)
            return _DEFAULT_SAMPLES

    @staticmethod
    def _default_max_workers():
        try:
            return int(environ.get(GRADEDKIT_MAX_WORKERS, _DEFAULT_MAX_WORKERS))
        except ValueError:
            logger.exception(_ENV_VAR_INT_VALUE_ERROR_MESSAGE, GRADEDKIT_MAX_WORKERS, _DEFAULT_MAX_WORKERS)
            return _DEFAULT_MAX_WORKERS


class GradedKitSDK:
    """Singleton holding the active configuration and tracer provider"""

    _instance: Optional["GradedKitSDK"] = None
    _lock = threading.Lock()

    def __new__(cls):
        if cls._instance is None:
            with cls._lock:
                if cls._instance is None:
                    cls._instance = super().__new__(cls)
                    cls._instance._initialized = False
                    cls._instance.config: GradedKitConfig | None = None
                    cls._instance.tracer_provider: GradedKitTracerProvider | None = None
        return cls._instance

    def configure(
        self,
        *,
        seed: int | None = None,
        samples: int | None = None,
        mode: str | None = None,
        max_workers: int | None = None,
        span_processor: SpanProcessor | None = None,
        opentelemetry_log_level: int = logging.ERROR,
    ) -> GradedKitConfig:
        """
        Configures the global gradedkit settings.

        The first call wins: later calls return the existing configuration unchanged, so a
        library user and the command-line front-end never fight over the seed.

        Parameters:
        seed: int | None
            Seed for sample points and randomized probes. Defaults to GRADEDKIT_SEED or 0.
        samples: int | None
            Number of pseudorandom sample points besides the origin. Defaults to 8.
        mode: str | None
            "strict" or "sampled". Defaults to GRADEDKIT_MODE or "strict".
        max_workers: int | None
            Threads used for per-tuple identity checks. Defaults to 1.
        span_processor: SpanProcessor | None
            Extra span processor for the isolated tracer provider, e.g. an in-memory exporter.
        opentelemetry_log_level: int
            Level applied to the opentelemetry logger.

        Returns:
        GradedKitConfig
            The active configuration.
        """
        with self._lock:
            if self._initialized:
                logger.debug("gradedkit already configured, returning existing configuration")
                return self.config

            self.config = GradedKitConfig(
                seed=seed,
                samples=samples,
                mode=mode,
                max_workers=max_workers,
                span_processor=span_processor,
                opentelemetry_log_level=opentelemetry_log_level,
            )
            self.tracer_provider = GradedKitTracerProvider(self.config)

            self._initialized = True
            logger.info(
                "gradedkit configured with seed=%s samples=%s mode=%s",
                self.config.seed,
                self.config.samples,
                self.config.mode,
            )
            return self.config

    def get_config(self) -> GradedKitConfig:
        """Get the global configuration, configuring defaults on first use"""
        if not self._initialized:
            return self.configure()
        return self.config

    def get_tracer_provider(self) -> GradedKitTracerProvider:
        """Get the tracer provider, configuring defaults on first use"""
        if not self._initialized:
            self.configure()
        return self.tracer_provider

    def is_configured(self) -> bool:
        """Check if gradedkit is configured"""
        return self._initialized

    def override(
        self, *, seed: int | None = None, samples: int | None = None, mode: str | None = None
    ) -> GradedKitConfig:
        """
        Replace individual settings of the active configuration, keeping the tracer provider.
        Used by the command-line front-end, whose flags take precedence over the environment.
        """
        config = self.get_config()
        with self._lock:
            self.config = GradedKitConfig(
                seed=config.seed if seed is None else seed,
                samples=config.samples if samples is None else samples,
                mode=mode or config.mode,
                max_workers=config.max_workers,
                span_processor=config.span_processor,
                opentelemetry_log_level=logging.getLogger("opentelemetry").level,
            )
            logger.info("gradedkit settings overridden: seed=%s samples=%s mode=%s", seed, samples, mode)
            return self.config


# Create the singleton instance
_sdk = GradedKitSDK()


def configure(**kwargs) -> GradedKitConfig:
    """Configure the global gradedkit instance"""
    return _sdk.configure(**kwargs)


def get_tracer_provider() -> GradedKitTracerProvider:
    """Get the configured tracer provider"""
    return _sdk.get_tracer_provider()


def get_config() -> GradedKitConfig:
    """Get the global gradedkit configuration"""
    return _sdk.get_config()


def override(**kwargs) -> GradedKitConfig:
    """Override settings of the global gradedkit configuration"""
    return _sdk.override(**kwargs)
