"""Hot numerical kernels.

The compiled extension ``_ckernels`` is used when it was built; otherwise the
pure-Python module ``_pykernels`` provides identical functions. ``use_backend``
switches explicitly (tests and the benchmark compare both).
"""

from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

OMEGA_SYSTEM = 0
SECOND_ORDER_SYSTEM = 1

_NAMES = ("family_rhs", "dp54_step", "christoffel_contract", "ricci_contract")


def available_backends():
    return ("compiled", "python") if _ckernels is not None else ("python",)


def use_backend(name):
    """Select ``"compiled"`` or ``"python"`` kernels for subsequent calls."""
    global BACKEND
    if name == "compiled":
        if _ckernels is None:
            raise ImportError("compiled kernels are not built; run `pip install -e . --no-build-isolation`")
        module = _ckernels
    elif name == "python":
        module = _pykernels
    else:
        raise ValueError(f"unknown kernel backend {name!r}")
    for attr in _NAMES:
        globals()[attr] = getattr(module, attr)
    BACKEND = name


BACKEND = None
use_backend("compiled" if _ckernels is not None else "python")
