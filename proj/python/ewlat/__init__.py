from ._core import (
    PhysParams,
    ValidationError,
    __version__,
    from_couplings,
    from_masses,
    landau_levels,
    reduce_tau,
    shape_functions,
    stability,
    verify,
)

__all__ = [
    "PhysParams",
    "ValidationError",
    "__version__",
    "from_couplings",
    "from_masses",
    "landau_levels",
    "reduce_tau",
    "shape_functions",
    "stability",
    "verify",
]
