"""Static analysis of mode-dependent real-time dataflow specifications.

The heavy lifting lives in the _rmdf extension module; this package
re-exports its surface.
"""

from _rmdf import *  # noqa: F401,F403
from _rmdf import __doc__  # noqa: F401
