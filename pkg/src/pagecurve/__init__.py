"""Page curve of a filled box leaking into a reservoir through a junction defect.

Exact free-fermion numerics, generalized hydrodynamics, their closed-form
limits and a CSV-producing harness.
"""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    AlignmentError,
    ConfigError,
    DomainError,
    NumericError,
    ParameterError,
    QuadratureWarning,
    RangeError,
    ResourceError,
    UnsupportedDefectError,
    ValidityWindowWarning,
)
from .model import DefectKind, ModelSpec, build_hamiltonian, page_time  # noqa: E402
from .exact import ExactPropagator  # noqa: E402
from .hydro import QuadratureSpec  # noqa: E402
from .estimators import ExactDynamics, HydroDynamics, PowerLawTail  # noqa: E402

__all__ = [
    "__version__",
    "AlignmentError",
    "ConfigError",
    "DomainError",
    "NumericError",
    "ParameterError",
    "QuadratureWarning",
    "RangeError",
    "ResourceError",
    "UnsupportedDefectError",
    "ValidityWindowWarning",
    "DefectKind",
    "ModelSpec",
    "build_hamiltonian",
    "page_time",
    "ExactPropagator",
    "QuadratureSpec",
    "ExactDynamics",
    "HydroDynamics",
    "PowerLawTail",
]
