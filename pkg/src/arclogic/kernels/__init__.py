"""Kernel selection: compiled extension when built, pure Python otherwise.

Set ARCLOGIC_PURE=1 to force the pure implementation.
"""

import os

if os.environ.get("ARCLOGIC_PURE") == "1":
    from arclogic.kernels._pure import *  # noqa: F401,F403
    from arclogic.kernels._pure import IMPL  # noqa: F401
else:
    try:
        from arclogic.kernels._native import *  # noqa: F401,F403
        from arclogic.kernels._native import IMPL  # noqa: F401
    except ImportError:
        from arclogic.kernels._pure import *  # noqa: F401,F403
        from arclogic.kernels._pure import IMPL  # noqa: F401
