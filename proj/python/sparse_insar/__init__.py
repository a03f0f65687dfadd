"""Back-projection InSAR imaging and sparse interferogram reconstruction."""

from ._core import *  # noqa: F401,F403
from ._core import __doc__  # noqa: F401
