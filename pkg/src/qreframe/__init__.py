"""Logit QRE, weak-selection assessments and framing effects for bimatrix games."""

__version__ = "0.1.0"

from .games import (  # noqa: E402
    Game,
    GameError,
    MixedProfile,
    Side,
    canonical_form,
    duplicate_column,
    equivalent,
    expected_payoffs,
    gen_coordination,
    gen_coordination_eps,
    gen_travelers,
    load_game,
    pure_nash,
    reduce,
    save_game,
    strictly_dominated,
)
from .qre import (  # noqa: E402
    BranchTrace,
    FixedPointResult,
    limit_equilibrium,
    logit_response,
    solve_fixed_point,
    trace_branch,
)
from .evolution import (  # noqa: E402
    MoranConfig,
    MoranEstimate,
    abundance_order,
    moran_simulate,
    phi_assessment,
    phi_vs_moran_report,
    selection_favors,
)
from .framing import (  # noqa: E402
    Assessor,
    FramingReport,
    constant_assessor,
    derivative_probe,
    frame_sensitivity,
    get_assessor,
    theorem_enactment,
    theorem_matrices,
)
