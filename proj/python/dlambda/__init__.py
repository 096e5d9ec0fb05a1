"""Lambda-symmetry workbench for difference schemes.

Thin wrapper over the compiled extension; the heavy lifting lives in C++.
The report-producing calls (check, find, reduce, limit) return parsed JSON
dictionaries.
"""

import json as _json

try:
    from ._dlambda import *  # noqa: F401,F403
    from . import _dlambda as _ext
except ImportError:  # in-tree builds place the module on sys.path directly
    from _dlambda import *  # noqa: F401,F403
    import _dlambda as _ext

__version__ = _ext.__version__


def check(scheme, chi, phi="1", **kw):
    """Check a candidate lambda-symmetry; returns the run report as a dict."""
    return _json.loads(_ext.check(scheme, chi, phi, **kw))


def find(scheme, degree, **kw):
    """Polynomial-ansatz search; returns the run report as a dict."""
    return _json.loads(_ext.find(scheme, degree, **kw))


def reduce(scheme, chi, **kw):
    """Invariant construction and order reduction; returns a dict."""
    return _json.loads(_ext.reduce(scheme, chi, **kw))


def limit(lam, xi="0", phi="1", **kw):
    """Continuum-limit convergence check; returns a dict."""
    return _json.loads(_ext.limit(lam, xi=xi, phi=phi, **kw))
