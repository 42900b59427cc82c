"""Python interface to the glmg C++ core."""

import json

from . import _core
from ._core import *  # noqa: F401,F403
from ._core import ResourceLimitError


def diagonalize_model(model, N):
    """Sector spectrum (and ground-state report when small enough) for a model dict."""
    return json.loads(_core.diagonalize(json.dumps(model), N))


def cli(*args):
    """Run a CLI subcommand in-process; returns (exit_code, stdout, stderr)."""
    return _core.run_cli([str(a) for a in args])


__all__ = [name for name in dir(_core) if not name.startswith("_")] + [
    "ResourceLimitError",
    "diagonalize_model",
    "cli",
]
