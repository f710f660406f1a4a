"""Stationary laws of interacting diffusions on regular trees.

Thin package wrapper around the compiled module; everything useful lives
in the extension and is re-exported here.
"""

from treelaw._core import *  # noqa: F401,F403
from treelaw._core import __version__  # noqa: F401
