from ._core import generate, inject, oracle_serializable, verify

__all__ = ["generate", "inject", "oracle_serializable", "verify"]
