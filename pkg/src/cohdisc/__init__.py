"""Relative-entropy coherence and discord on small multipartite density matrices."""

__version__ = "0.1.0"

from .qcore import (  # noqa: E402
    INFINITE, Gate, InvariantError, ProductBasis, QState, apply_gate, bloch_basis, dephase,
    haar_unitary, is_infinite, negativity, partial_trace, partial_transpose, random_density,
    random_product_state, random_state, rel_entropy, tensor, vn_entropy,
)
from .measures import (  # noqa: E402
    MeasureResult, OptimizerConfig, asym_discord, asym_discord_at, coherence,
    coherence_b_given_a, consumption, global_discord, global_discord_at, rel_entropy_discord,
)
from .channels import (  # noqa: E402
    KrausChannel, apply_channel, check_a_incoherent, check_kraus_incoherent, check_mio,
    depolarize_mix, make_controlled_u, make_cx, make_cz, make_hadamard,
)
from .protocols import (  # noqa: E402
    BoundReport, DQC1Config, StatePrepConfig, dqc1_final_state, dqc1_report,
    dqc1_trace_estimate, stateprep_bound_series, stateprep_marginal_control, stateprep_state,
    summarize, verify_result, werner_demo, werner_state,
)
