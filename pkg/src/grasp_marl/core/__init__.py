"""
Core numerical functionality.

This module contains the consensus solver and its certificates, policies and
their gradients, cooperative environments, the global critic and advantage
estimation.
"""

# Core functionality is available through submodules
# Import specific components as needed to avoid circular imports

__all__ = []
