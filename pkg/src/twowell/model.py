"""Physical two-well Hamiltonians: construction, diagonalization, conservation.

The Hamiltonian for n on-well states per well is

    H = sum_p sum_j U_pp[j,j] N_pj^2
      + 1/2 sum_p sum_{j!=k} U_pp[j,k] N_pj N_pk
      + sum_{j,k} U_ab[j,k] N_aj N_bk
      - sum_j mu[j] (N_aj - N_bj)
      + sum_j eps_a[j] N_aj + sum_j eps_b[j] N_bj
      - sum_{j,k} Omega[j,k] (a_j^dag b_k + b_k^dag a_j)

with p in {a, b}.  Same-well couplings are stored in the symmetric
general form; for n = 2 the conventional single-count cross coupling
equals the stored off-diagonal entry (the 1/2 and the double count cancel).
All couplings share one arbitrary energy unit.
"""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.linalg import eigh

from .fock import FockSector, Mode, hopping_operator

__all__ = [
    "ModelParams",
    "SpectrumResult",
    "ConservationReport",
    "build_hamiltonian",
    "decoupled_energies",
    "eigensolve",
    "conservation_report",
]

HERMITICITY_TOL = 1e-12


def _as_square(name, value, n):
    m = np.asarray(value, dtype=float)
    if m.shape != (n, n):
        raise ValueError(f"{name} must have shape ({n}, {n}), got {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{name} contains non-finite entries")
    return m


def _as_vector(name, value, n):
    v = np.asarray(value, dtype=float)
    if v.shape != (n,):
        raise ValueError(f"{name} must have shape ({n},), got {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError(f"{name} contains non-finite entries")
    return v


@dataclass
class ModelParams:
    """Physical couplings of the two-well model.

    U_aa, U_bb : (n, n) same-well scattering, symmetric in the level indices.
    U_ab       : (n, n) cross-well scattering.
    mu         : (n,) relative external potentials.
    eps_a/b    : (n,) on-well state energies.
    Omega      : (n, n) tunneling amplitudes, Omega[j, k] for a_j <-> b_k.
    """

    n_levels: int
    U_aa: np.ndarray
    U_bb: np.ndarray
    U_ab: np.ndarray
    mu: np.ndarray
    eps_a: np.ndarray
    eps_b: np.ndarray
    Omega: np.ndarray

    def __post_init__(self):
        n = self.n_levels
        if n < 1:
            raise ValueError(f"n_levels must be >= 1, got {n}")
        self.U_aa = _as_square("U_aa", self.U_aa, n)
        self.U_bb = _as_square("U_bb", self.U_bb, n)
        self.U_ab = _as_square("U_ab", self.U_ab, n)
        self.Omega = _as_square("Omega", self.Omega, n)
        self.mu = _as_vector("mu", self.mu, n)
        self.eps_a = _as_vector("eps_a", self.eps_a, n)
        self.eps_b = _as_vector("eps_b", self.eps_b, n)
        for name, m in (("U_aa", self.U_aa), ("U_bb", self.U_bb)):
            skew = np.max(np.abs(m - m.T)) if n > 1 else 0.0
            if skew > 1e-12 * max(1.0, np.max(np.abs(m))):
                raise ValueError(f"{name} must be symmetric in the level indices")
        # store exactly symmetric copies
        self.U_aa = (self.U_aa + self.U_aa.T) / 2.0
        self.U_bb = (self.U_bb + self.U_bb.T) / 2.0


def _diagonal_energy(params: ModelParams, occ: np.ndarray) -> np.ndarray:
    """Diagonal of H over an array of occupation rows (shape (d, 2n))."""
    n = params.n_levels
    na = occ[:, :n].astype(float)
    nb = occ[:, n:].astype(float)

    def same_well(nvec, U):
        quad = 0.5 * np.einsum("ij,jk,ik->i", nvec, U, nvec)
        quad += 0.5 * nvec**2 @ np.diag(U)
        return quad

    diag = same_well(na, params.U_aa) + same_well(nb, params.U_bb)
    diag += np.einsum("ij,jk,ik->i", na, params.U_ab, nb)
    diag += na @ (params.eps_a - params.mu) + nb @ (params.eps_b + params.mu)
    return diag


def build_hamiltonian(params: ModelParams, sector: FockSector) -> sp.csr_matrix:
    """Real symmetric Hamiltonian matrix on the given sector."""
    if params.n_levels != sector.n_levels:
        raise ValueError(
            f"params have {params.n_levels} levels, sector has {sector.n_levels}"
        )
    n = params.n_levels
    occ = sector.occupations()
    H = sp.csr_matrix(sp.diags(_diagonal_energy(params, occ), shape=(sector.dim,) * 2))
    for j in range(n):
        for k in range(n):
            w = params.Omega[j, k]
            if w == 0.0:
                continue
            hop = hopping_operator(sector, Mode("a", j + 1), Mode("b", k + 1))
            H = H - w * (hop + hop.T)
    return sp.csr_matrix(H)


def decoupled_energies(params: ModelParams, state) -> tuple[float, float]:
    """(E_a, E_b) of a product state when the tunneling is switched off.

    E_a + E_b equals the diagonal Hamiltonian element minus the cross-well
    density-density contribution.
    """
    occ = np.asarray(state, dtype=np.int64).reshape(1, -1)
    n = params.n_levels
    if occ.shape[1] != 2 * n:
        raise ValueError(f"state must have {2 * n} occupations, got {occ.shape[1]}")
    na = occ[:, :n].astype(float)[0]
    nb = occ[:, n:].astype(float)[0]

    def well(nvec, U, lin):
        e = 0.5 * nvec @ U @ nvec + 0.5 * nvec**2 @ np.diag(U)
        return float(e + nvec @ lin)

    e_a = well(na, params.U_aa, params.eps_a - params.mu)
    e_b = well(nb, params.U_bb, params.eps_b + params.mu)
    return e_a, e_b


@dataclass
class SpectrumResult:
    """Eigenvalues in ascending order, optionally with eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray | None = None
    max_residual: float = 0.0


def _check_hermitian(H: np.ndarray):
    gap = H - H.conj().T
    worst = np.max(np.abs(gap))
    if worst > HERMITICITY_TOL:
        i, j = np.unravel_index(np.argmax(np.abs(gap)), gap.shape)
        raise ValueError(
            f"matrix is not Hermitian: |H[{i},{j}] - conj(H[{j},{i}])| = {worst:.3e}"
        )


def eigensolve(H, want_vectors: bool = False, dense_threshold: int = 2000) -> SpectrumResult:
    """Spectral decomposition of a Hermitian operator.

    Dense full diagonalization up to `dense_threshold`; above it only the
    ground state is computed iteratively (deterministic fixed starting
    vector).  Eigenvalues are always ascending.
    """
    dense = H.toarray() if sp.issparse(H) else np.asarray(H)
    if dense.ndim != 2 or dense.shape[0] != dense.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {dense.shape}")
    _check_hermitian(dense)
    d = dense.shape[0]

    if d <= dense_threshold:
        if np.iscomplexobj(dense):
            dense = (dense + dense.conj().T) / 2.0
        vals, vecs = eigh(dense)
        spectrum = SpectrumResult(eigenvalues=vals, eigenvectors=vecs if want_vectors else None)
    else:
        Hs = sp.csr_matrix(H) if not sp.issparse(H) else H.tocsr()
        v0 = np.full(d, 1.0 / np.sqrt(d))
        vals, vecs = spla.eigsh(Hs, k=1, which="SA", v0=v0)
        spectrum = SpectrumResult(
            eigenvalues=vals, eigenvectors=vecs if want_vectors else None
        )
        vals, vecs = spectrum.eigenvalues, spectrum.eigenvectors

    if spectrum.eigenvectors is not None:
        resid = dense @ spectrum.eigenvectors - spectrum.eigenvectors * spectrum.eigenvalues
        spectrum.max_residual = float(np.max(np.abs(resid)))
    return spectrum


@dataclass
class ConservationReport:
    """Max-abs commutator entries of H with candidate conserved quantities.

    `total_number` is ||[H, N_total]||_max (always zero), `per_mode` maps each
    mode to ||[H, N_pj]||_max, and `per_level` maps level j to
    ||[H, N_aj + N_bj]||_max.
    """

    total_number: float
    per_mode: dict
    per_level: dict

    def conserved_modes(self):
        return sorted(str(m) for m, r in self.per_mode.items() if r == 0.0)

    def conserved_levels(self):
        return sorted(j for j, r in self.per_level.items() if r == 0.0)


def _comm_norm(A, B) -> float:
    C = (A @ B - B @ A)
    if sp.issparse(C):
        return 0.0 if C.nnz == 0 else float(np.max(np.abs(C.data)))
    return float(np.max(np.abs(C)))


def conservation_report(params: ModelParams, sector: FockSector) -> ConservationReport:
    from .fock import number_operator, total_number_operator

    H = build_hamiltonian(params, sector)
    n_tot = total_number_operator(sector)
    per_mode = {}
    per_level = {}
    for level in range(1, params.n_levels + 1):
        na = number_operator(sector, Mode("a", level))
        nb = number_operator(sector, Mode("b", level))
        per_mode[Mode("a", level)] = _comm_norm(H, na)
        per_mode[Mode("b", level)] = _comm_norm(H, nb)
        per_level[level] = _comm_norm(H, na + nb)
    return ConservationReport(
        total_number=_comm_norm(H, n_tot),
        per_mode=per_mode,
        per_level=per_level,
    )
