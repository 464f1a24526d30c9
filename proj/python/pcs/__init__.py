from ._pcs import *  # noqa: F401,F403
from ._pcs import __doc__  # noqa: F401
