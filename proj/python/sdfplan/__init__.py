"""Inspection planning on learned truncated signed-distance fields.

The heavy lifting lives in the compiled ``_core`` module; this package
re-exports it. When running against a plain CMake build tree (tests, notebooks)
the extension may sit on ``PYTHONPATH`` as a top-level module instead of inside
the package, so fall back to that spelling.
"""

try:
    from ._core import *  # noqa: F401,F403
    from ._core import __version__  # noqa: F401
except ImportError:  # pragma: no cover - build-tree layout
    from _core import *  # type: ignore # noqa: F401,F403
    from _core import __version__  # type: ignore # noqa: F401
