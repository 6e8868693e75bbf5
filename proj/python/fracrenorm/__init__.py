from ._fracrenorm import *  # noqa: F401,F403
from ._fracrenorm import __version__  # noqa: F401
