"""Conformance analysis between static architecture models and the
runtime behavior of microservice applications."""

__version__ = "0.1.0"
