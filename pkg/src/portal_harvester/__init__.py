"""Scholarly-article metadata harvester.

Searches academic portals through declarative scrape templates, caches
extracted bibliographic records in a persistent store with cache-first
lookup, and exposes the results through a CLI and an HTTP service.
"""

from pathlib import Path

__version__ = "0.1.0"

DATA_DIR = Path(__file__).parent / "data"
DEFAULT_REGISTRY_PATH = DATA_DIR / "portals.json"
DEFAULT_CORPUS_DIR = DATA_DIR / "fixtures"
