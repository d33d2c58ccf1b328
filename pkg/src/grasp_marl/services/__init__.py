"""
Training, verification and run services.

This module contains configuration management, rollout collection, the
training loop, the verification suites, the ablation runner and metrics
output.
"""

# Services are available through submodules
# Import specific services as needed to avoid circular imports

__all__ = []
