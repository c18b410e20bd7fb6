"""Parametric Fokker-Planck gradient-flow solver."""

try:
    from ._pfflow import *  # noqa: F401,F403
    from ._pfflow import __doc__  # noqa: F401
except ImportError:  # build-tree layout: extension next to the package dir
    from _pfflow import *  # noqa: F401,F403
