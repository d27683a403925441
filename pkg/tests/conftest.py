"""Shared fixtures for gradedkit tests."""

from pathlib import Path

import pytest
from opentelemetry.sdk.trace.export import SimpleSpanProcessor
from opentelemetry.sdk.trace.export.in_memory_span_exporter import InMemorySpanExporter

import gradedkit
from gradedkit._internal.config import GradedKitSDK, _sdk
from gradedkit._internal.core.algebroid import LinftyAlgebroid
from gradedkit._internal.core.ring import BaseRing, VectorField
from gradedkit._internal.tracer import GradedKitTracerProvider

FIXTURES = Path(gradedkit.__file__).parent / "fixtures"


def reset_sdk():
    """Forget any configuration made by a previous test"""
    GradedKitSDK._instance = _sdk
    _sdk._initialized = False
    _sdk.config = None
    _sdk.tracer_provider = None
    GradedKitTracerProvider._instance = None


@pytest.fixture(autouse=True)
def clean_sdk(monkeypatch):
    """Run every test against a fresh configuration with no gradedkit environment variables"""
    for name in ("GRADEDKIT_SEED", "GRADEDKIT_SAMPLES", "GRADEDKIT_MODE", "GRADEDKIT_MAX_WORKERS"):
        monkeypatch.delenv(name, raising=False)
    reset_sdk()
    yield
    reset_sdk()


@pytest.fixture
def in_memory_span_exporter():
    """Create an InMemorySpanExporter wired into the gradedkit tracer provider."""
    exporter = InMemorySpanExporter()
    gradedkit.configure(span_processor=SimpleSpanProcessor(exporter))
    return exporter


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def plane() -> BaseRing:
    return BaseRing(["x", "y"])


@pytest.fixture
def space() -> BaseRing:
    return BaseRing(["x", "y", "z"])


def make_sl2(ring: BaseRing, label: str = "sl2") -> LinftyAlgebroid:
    return LinftyAlgebroid(
        ring,
        modules=[["h", "e", "f"]],
        brackets={
            ("h", "e"): {"e": 2},
            ("h", "f"): {"f": -2},
            ("e", "f"): {"h": 1},
        },
        label=label,
    )


@pytest.fixture
def sl2(plane) -> LinftyAlgebroid:
    return make_sl2(plane)


@pytest.fixture
def action(plane) -> LinftyAlgebroid:
    """Translations and dilations along x acting on the plane"""
    return LinftyAlgebroid(
        plane,
        modules=[["p", "q"]],
        anchor={
            "p": VectorField.coordinate(plane, "x"),
            "q": VectorField.from_mapping(plane, {"x": plane.gen("x")}),
        },
        brackets={("p", "q"): {"p": 1}},
        label="action",
    )
