from ._veilaudit import *  # noqa: F401,F403
from ._veilaudit import __doc__  # noqa: F401
