from annulus_conformal import core  # noqa: F401
from annulus_conformal.core import *  # noqa: F401,F403
