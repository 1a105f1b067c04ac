try:
    from ._core import *  # noqa: F401,F403  (installed layout)
except ImportError:  # build-tree layout: _core sits on PYTHONPATH
    from _core import *  # noqa: F401,F403

__version__ = "0.1.0"
