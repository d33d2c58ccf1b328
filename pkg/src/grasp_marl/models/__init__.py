"""
Data models and structures.

Gradient sets and consensus outcomes, rollout batches, configuration and
metrics records used throughout the package.
"""

# Data models are available through submodules
# Import specific models as needed to avoid circular imports

__all__ = []
