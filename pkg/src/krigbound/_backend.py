"""Select the compiled core when importable, else the numpy fallback.

Set ``KRIGBOUND_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _fallback

if os.environ.get("KRIGBOUND_PURE_PYTHON"):
    core = _fallback
else:
    try:
        from . import _core as core
    except ImportError:
        core = _fallback

NAME = "fallback" if core is _fallback else "compiled"

bessel_k = core.bessel_k
matern_scaled = core.matern_scaled
matern_matrix = core.matern_matrix
matern_gram = core.matern_gram
gaussian_matrix = core.gaussian_matrix
nearest_distance = core.nearest_distance
maximin_search = core.maximin_search
