"""Entry point for python -m nuspectra."""
import sys

from .cli import main

sys.exit(main())
