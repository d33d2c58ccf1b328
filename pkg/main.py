"""
GRASP-MARL - Development Entry Point

Runs the command-line interface from a source checkout without installing
the package: ``python main.py train --config run.json``.
"""

import sys
from pathlib import Path


def setup_path():
    """Put ``src`` on the module path when running from the repository."""
    src_path = Path(__file__).parent / "src"
    sys.path.insert(0, str(src_path))


setup_path()

from grasp_marl.__main__ import main  # noqa: E402

if __name__ == "__main__":
    sys.exit(main())
