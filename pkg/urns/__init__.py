import importlib.metadata

from . import commands  # noqa: F401
from . import experiments  # noqa: F401
from . import tables  # noqa: F401


__version__ = importlib.metadata.version("urn-fixpoint")
