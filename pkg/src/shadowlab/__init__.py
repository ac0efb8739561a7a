"""
shadowlab: numerical ranges and numerical shadows of complex matrices.

The numerical range ``W(A)`` is the set of expectation values
``<psi|A|psi>`` over unit vectors; the numerical shadow is the probability
density of that value for a uniformly random pure state.  Submodules:

``linalg``      Hermitian eigensolver and Hilbert-Schmidt geometry
``normalize``   centring and rescaling of ``A`` to the standard frame
``sampling``    random states, unitaries and density matrices
``numrange``    support function, boundary and flat parts of ``W(A)``
``shadow``      Monte Carlo shadow histograms and cross-sections
``dynamics``    unitary trajectories and the trajectory spaces
``randshadow``  Beta laws for random matrices and KS statistics
``registry``    builtin example matrices and the matrix file format
``cli``         the ``shadowlab`` command
"""
__version__ = "0.1.0"

from .errors import (  # noqa: E402
    ContractViolation,
    DegenerateProjectionError,
    DimensionError,
    DomainError,
    EmptySectionError,
    FrameError,
    ParseError,
    ShadowlabError,
)
from .linalg import eigh, expm_hermitian, hermitian_parts, hs_distance, hs_inner, hs_norm  # noqa: E402
from .normalize import frame_to_matrix, natural_rescale, normalization_constants  # noqa: E402
from .numrange import boundary, contains, ellipse_2x2, support_point  # noqa: E402
from .sampling import (  # noqa: E402
    RngStream,
    random_haar_unitary,
    random_induced_density,
    random_pure_state,
    random_simplex_point,
)
from .shadow import cross_section, mixed_shadow, normal_shadow, pure_shadow, tensor_shadow_swap_check  # noqa: E402
from .dynamics import period, trajectory, trajectory_spaces, trajectories_identical  # noqa: E402
from .randshadow import BetaLaw, beta_cdf, density_diag_law, ks_test, unitary_overlap_law  # noqa: E402
from .registry import get_builtin, parse_matrix  # noqa: E402
