"""Standard qudit teleportation through an arbitrary bipartite resource state.

The channel, its Kraus form, a literal protocol simulator, fidelity and
entanglement-fidelity measures, Haar Monte Carlo estimators and numerical
checks of the twirling identities behind the closed-form averages.
"""
__version__ = "0.1.0"

from .matrix import (
    Tolerances,
    ValidationError,
    dagger,
    get_tolerances,
    hermitian_sqrt,
    kron,
    matmul,
    partial_trace,
    set_tolerances,
    swap_operator,
    tolerances,
    trace,
    trace_distance,
)
from .weyl import bell_basis, bell_state, max_entangled, weyl_unitary
from .channel import (
    GeneralProtocol,
    TeleportChannel,
    apply_channel,
    channel_kraus,
    outcome_probs,
    simulate_protocol,
    singlet_fraction,
    standard_protocol,
    teleport_channel,
)
from .fidelity import (
    avg_ent_fidelity_closed,
    avg_fidelity_closed,
    ent_fidelity_lambda,
    entanglement_fidelity,
    pure_fidelity,
    purify,
    uhlmann_fidelity,
)
from .sampling import (
    McEstimate,
    RngState,
    haar_pure,
    haar_unitary,
    hs_mixed,
    make_rng,
    mc_estimate,
    random_density,
)
from .twirl import (
    TwirlCoefficients,
    alpha_beta,
    alpha_beta_explicit,
    mu_nm,
    twirl_integral_mc,
    verify_trace_identities,
)
from .resources import bell_resource, isotropic, maximally_mixed
