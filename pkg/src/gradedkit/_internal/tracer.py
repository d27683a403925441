"""
Tracer module for the isolated verification tracer provider
"""

import functools
import logging
import typing

from opentelemetry.sdk.trace import TracerProvider
from opentelemetry.sdk.resources import Resource
from opentelemetry.sdk.trace.sampling import ALWAYS_ON

from gradedkit._internal.constants import GRADEDKIT_NAMESPACE, GRADEDKIT_SERVICE_NAME

if typing.TYPE_CHECKING:
    from .config import GradedKitConfig

logger = logging.getLogger(__name__)


class GradedKitTracerProvider:
    """Manages the isolated tracer provider used for verification spans"""

    _instance = None
    _provider: TracerProvider | None = None

    def __new__(cls, *args, **kwargs):
        if not cls._instance:
            cls._instance = super().__new__(GradedKitTracerProvider)
        return cls._instance

    def __init__(self, config: "GradedKitConfig"):
        self._config = config
        self._provider = self.create_isolated_provider(GRADEDKIT_SERVICE_NAME)

    @property
    def provider(self) -> TracerProvider:
        return self._provider

    def create_isolated_provider(self, service_name: str) -> TracerProvider:
        """
        Create an isolated TracerProvider that never replaces the global one

        Args:
            service_name: Name for the service in traces

        Returns:
            A new TracerProvider instance
        """
        if not self._config:
            raise RuntimeError("gradedkit not configured")

        provider = TracerProvider(sampler=ALWAYS_ON, resource=Resource.create({"service.name": service_name}))
        if self._config.span_processor is not None:
            provider.add_span_processor(self._config.span_processor)

        logger.debug(f"Created isolated tracer provider for service: {service_name}")
        return provider


def traced(span_name: str):
    """
    Run the decorated verifier inside a span named span_name.

    When the result exposes a ``verdict`` (a Check or a CheckReport) the verdict and the
    number of checks are recorded as span attributes.
    """

    def decorator(func):
        @functools.wraps(func)
        def wrapper(*args, **kwargs):
            from gradedkit._internal.config import get_config, get_tracer_provider

            provider = get_tracer_provider().provider
            with provider.get_tracer(__name__).start_as_current_span(span_name) as span:
                span.set_attribute(f"{GRADEDKIT_NAMESPACE}.mode", get_config().mode)
                result = func(*args, **kwargs)
                verdict = getattr(result, "verdict", None)
                if verdict is not None:
                    span.set_attribute(f"{GRADEDKIT_NAMESPACE}.verdict", str(verdict))
                    span.set_attribute(f"{GRADEDKIT_NAMESPACE}.check_count", len(getattr(result, "checks", [result])))
                return result

        return wrapper

    return decorator
