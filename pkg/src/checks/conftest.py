"""Shared pytest fixtures for check tests.

Ensures src and repo root are on sys.path. Provides check discovery and a
callable that loads a check module (cached per directory name).
"""

import importlib.util
import sys
from pathlib import Path

import pytest

CHECKS_DIR = Path(__file__).resolve().parent
SRC_DIR = CHECKS_DIR.parent
REPO_ROOT = SRC_DIR.parent

for path in (SRC_DIR, REPO_ROOT):
    if str(path) not in sys.path:
        sys.path.insert(0, str(path))


def _discover_check_dirs():
    """Check dirs that have both manifest.json and check.py."""
    if not CHECKS_DIR.exists():
        return []
    return sorted(
        d
        for d in CHECKS_DIR.iterdir()
        if d.is_dir() and (d / "manifest.json").exists() and (d / "check.py").exists()
    )


check_dirs_list = _discover_check_dirs()

_check_module_cache = {}


def load_check(dir_name: str):
    """Load and return a check's module. Cached per directory name."""
    if dir_name in _check_module_cache:
        return _check_module_cache[dir_name]
    check_path = CHECKS_DIR / dir_name / "check.py"
    if not check_path.exists():
        raise FileNotFoundError(f"Check '{dir_name}': check.py not found")
    spec = importlib.util.spec_from_file_location(f"check_{dir_name}", check_path)
    if spec is None or spec.loader is None:
        raise RuntimeError(f"Check '{dir_name}': failed to create spec for check.py")
    module = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(module)
    _check_module_cache[dir_name] = module
    return module


@pytest.fixture(scope="session")
def check_dirs():
    return list(check_dirs_list)
