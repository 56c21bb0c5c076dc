"""Multi-state two-well boson models: exact diagonalization, integrable
structure verification, and Bethe-ansatz solutions."""

from .bethe import (
    BetheSolution,
    MatchReport,
    SolveResult,
    bae_residual,
    bethe_energy,
    bethe_vector,
    match_spectrum,
    solve_bae,
    transfer_eigenvalue,
)
from .fock import (
    FockSector,
    Mode,
    TruncatedLadder,
    a_mode,
    b_mode,
    dimension,
    enumerate_sector,
    hopping_operator,
    number_operator,
    total_number_operator,
    truncated_ladder,
)
from .model import (
    ConservationReport,
    ModelParams,
    SpectrumResult,
    build_hamiltonian,
    conservation_report,
    decoupled_energies,
    eigensolve,
)
from .yangbaxter import (
    IdentificationReport,
    IntegrableParams,
    conserved_charges,
    default_integrable_params,
    hamiltonian_from_transfer,
    identify_parameters,
    lax_operator,
    r_matrix,
    rll_residual,
    transfer_commutator_residual,
    transfer_matrix,
    validate_model,
    ybe_residual,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
