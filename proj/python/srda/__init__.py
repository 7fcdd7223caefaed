"""Smoothness-regularized unsupervised domain adaptation.

Thin wrapper around the compiled _srda extension. Works both as an installed
package (the extension lives inside the package) and against a build tree
(the extension is found on PYTHONPATH).
"""

try:
    from ._srda import *  # noqa: F401,F403
    from ._srda import __doc__  # noqa: F401
except ImportError:  # build-tree layout
    from _srda import *  # noqa: F401,F403
    from _srda import __doc__  # noqa: F401

__version__ = "0.1.0"
