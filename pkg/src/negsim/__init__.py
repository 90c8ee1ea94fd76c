"""Mixed-state stabilizer simulation of open monitored circuits, with the
dense-matrix oracle, directed-polymer effective model, and scaling analysis
used to study measurement-induced negativity transitions."""

from .pauli import PauliString, commutes, multiply, phase_product, restrict, support_interval
from .stabilizer import (
    StabilizerState,
    canonicalize,
    clipped_endpoint_counts,
    product_state,
    purity,
    validate,
)
from .channels import (
    CliffordGate,
    apply_clifford,
    cnot_gate,
    dephase,
    hadamard_on_first,
    make_rng,
    measure_pauli,
    sample_two_qubit_clifford,
    swap_gate,
    symplectic_group_order,
    symplectic_matrix,
    trajectory_rng,
)
from .entanglement import (
    Bipartition,
    ObservableRecord,
    entropy,
    length_distribution,
    mutual_information,
    negativity,
    purity_log2,
    record_observables,
    window_mass,
)
from .circuit import (
    CircuitConfig,
    MonteCarloResult,
    TrajectoryResult,
    monte_carlo,
    run_trajectory,
    write_summary_csv,
    write_trajectory_csv,
)
from .oracle import (
    DenseState,
    clifford_unitary,
    haar_unitary,
    log_negativity,
    oracle_check_suite,
    page_negativity_check,
    partial_transpose,
    pauli_matrix,
    renyi_negativity,
    replica_trace_identity_check,
)
from .polymer import (
    Permutation,
    PathQuery,
    PolymerLattice,
    block_cyclic,
    cayley_distance,
    domain_wall_negativity,
    enumerate_path_energies,
    find_intermediate_D,
    kpz_scan,
    min_path_energy,
)
from .analysis import (
    CollapseFit,
    Curve,
    SweepSpec,
    collapse_objective,
    optimize_collapse,
    power_law_fit,
    reproduce_figure,
    run_sweep,
    scaling_model_comparison,
)

__version__ = "0.1.0"
