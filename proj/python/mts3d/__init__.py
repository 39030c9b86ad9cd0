"""Multi-perspective next-best-view servoing simulator."""

try:
    from ._mts3d import *  # noqa: F401,F403
    from ._mts3d import __doc__  # noqa: F401
except ImportError:  # extension on PYTHONPATH next to the package (build tree)
    from _mts3d import *  # noqa: F401,F403
