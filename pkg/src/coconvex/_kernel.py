"""Select the double-description clip kernel at import time.

The compiled extension is used when it imports; setting the environment
variable ``COCONVEX_PURE_PYTHON=1`` forces the numpy fallback.
"""
import os

from . import _dd

clip_python = _dd.clip

try:
    from ._ddext import clip as clip_compiled
except ImportError:  # extension not built
    clip_compiled = None

if clip_compiled is not None and os.environ.get("COCONVEX_PURE_PYTHON", "") not in ("1", "true", "yes"):
    clip = clip_compiled
    BACKEND = "compiled"
else:
    clip = clip_python
    BACKEND = "python"

OK, REDUNDANT, NO_INTERIOR = _dd.OK, _dd.REDUNDANT, _dd.NO_INTERIOR
