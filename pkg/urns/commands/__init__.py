from . import defaults  # noqa: F401
from . import diagnose  # noqa: F401
from . import fixed_points  # noqa: F401
from . import simulate  # noqa: F401
from . import verify  # noqa: F401
