"""Fischer spaces, their Matsuo algebras, and exact Jordan-property checks."""

__version__ = "0.1.0"

from .scalar import FieldSpec, Scalar, delta_default
from .incidence import TripleSystem
from .matsuo import MatsuoAlgebra, is_jordan

__all__ = ["FieldSpec", "Scalar", "delta_default", "TripleSystem",
           "MatsuoAlgebra", "is_jordan", "__version__"]
