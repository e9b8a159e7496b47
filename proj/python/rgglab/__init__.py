"""Random geometric graph laboratory (python surface of the C++ core)."""

try:
    from ._rgglab import *  # noqa: F401,F403  (installed layout)
    from ._rgglab import __version__  # noqa: F401
except ImportError:  # build-tree layout: _rgglab.so on PYTHONPATH
    from _rgglab import *  # noqa: F401,F403
    from _rgglab import __version__  # noqa: F401
