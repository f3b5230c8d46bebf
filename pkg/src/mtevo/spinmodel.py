"""Long-range transverse-field Ising chain.

    H(B) = sum_{i<j} J_ij Z_i Z_j + B sum_i X_i,    J_ij = 1 / |i - j|**alpha

Basis convention: bit i (little endian) of the index z holds spin i, and a
zero bit is the Z = +1 eigenstate.  States are plain complex numpy vectors
of length 2**n.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp

MIN_SITES = 2
MAX_SITES = 14


class CapacityError(ValueError):
    """Requested system is too large (or too small) for dense state vectors."""


@dataclass(frozen=True, eq=False)
class IsingModel:
    n_sites: int
    couplings: np.ndarray
    coupling_exponent: float = 1.0
    target_field: float = 0.1

    def __post_init__(self):
        J = np.asarray(self.couplings, dtype=float)
        n = self.n_sites
        if not MIN_SITES <= n <= MAX_SITES:
            raise CapacityError(f"n_sites={n} outside {MIN_SITES}..{MAX_SITES}")
        if J.shape != (n, n):
            raise ValueError(f"couplings must be {n}x{n}, got {J.shape}")
        if not np.array_equal(J, J.T):
            raise ValueError("couplings must be symmetric")
        if np.any(np.diag(J) != 0):
            raise ValueError("couplings must have a zero diagonal")
        off = J[~np.eye(n, dtype=bool)]
        if np.any(off <= 0):
            raise ValueError("couplings must be antiferromagnetic (J_ij > 0)")
        if not np.array_equal(J, J[::-1, ::-1]):
            raise ValueError("couplings must be invariant under spatial inversion")
        J.setflags(write=False)
        object.__setattr__(self, "couplings", J)

    @property
    def dim(self) -> int:
        return 1 << self.n_sites

    @cached_property
    def diagonal(self) -> np.ndarray:
        d = diagonal_energies(self)
        d.setflags(write=False)
        return d

    @cached_property
    def space(self) -> "ModelSpace":
        """Full 2**n representation used by the propagators."""
        return full_space(self)

    def to_dict(self) -> dict:
        return {
            "n_sites": self.n_sites,
            "alpha": self.coupling_exponent,
            "B_target": self.target_field,
            "couplings": self.couplings.tolist(),
        }


def build_model(n: int, alpha: float = 1.0, B_target: float = 0.1) -> IsingModel:
    if not MIN_SITES <= n <= MAX_SITES:
        raise CapacityError(f"n={n} outside {MIN_SITES}..{MAX_SITES}")
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    idx = np.arange(n)
    dist = np.abs(idx[:, None] - idx[None, :]).astype(float)
    J = np.zeros((n, n))
    mask = dist > 0
    J[mask] = 1.0 / dist[mask] ** alpha
    return IsingModel(n, J, float(alpha), float(B_target))


def load_model(path) -> IsingModel:
    """Read a model from a JSON or ``key = value`` config file.

    Recognised keys: ``n_sites``, ``alpha``, ``B_target`` and optionally
    ``couplings_csv`` (path, relative to the config file, of an n x n matrix).
    """
    path = Path(path)
    text = path.read_text()
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError:
        cfg = {}
        for line in text.splitlines():
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, _, value = line.partition("=")
            cfg[key.strip()] = value.strip()
    return model_from_config(cfg, base=path.parent)


def model_from_config(cfg: dict, base=".") -> IsingModel:
    n = int(cfg["n_sites"])
    alpha = float(cfg.get("alpha", 1.0))
    B_target = float(cfg.get("B_target", 0.1))
    if "couplings" in cfg:
        return IsingModel(n, np.asarray(cfg["couplings"], float), alpha, B_target)
    if cfg.get("couplings_csv"):
        J = np.loadtxt(Path(base) / cfg["couplings_csv"], delimiter=",", ndmin=2)
        return IsingModel(n, J, alpha, B_target)
    return build_model(n, alpha, B_target)


def spins(n: int) -> np.ndarray:
    """(2**n, n) array of Z eigenvalues, +1 for a zero bit."""
    z = np.arange(1 << n)
    bits = (z[:, None] >> np.arange(n)[None, :]) & 1
    return 1 - 2 * bits


def diagonal_energies(model: IsingModel) -> np.ndarray:
    s = spins(model.n_sites).astype(float)
    # s J s^T counts each pair twice
    return 0.5 * np.einsum("zi,ij,zj->z", s, model.couplings, s)


def _flip_sum(v: np.ndarray, n: int) -> np.ndarray:
    """sum_i X_i v via reshaped bit flips (no matrix)."""
    out = np.zeros_like(v)
    for i in range(n):
        view = v.reshape(1 << (n - 1 - i), 2, 1 << i)
        out.reshape(1 << (n - 1 - i), 2, 1 << i)[...] += view[:, ::-1, :]
    return out


def apply_hamiltonian(state: np.ndarray, B: float, model: IsingModel) -> np.ndarray:
    state = np.asarray(state)
    if state.shape != (model.dim,):
        raise ValueError(f"state shape {state.shape} does not match 2**{model.n_sites}")
    return model.diagonal * state + B * _flip_sum(state, model.n_sites)


def apply_mixer(state: np.ndarray, n: int) -> np.ndarray:
    """sum_i X_i applied to a full-space state."""
    state = np.asarray(state)
    if state.shape != (1 << n,):
        raise ValueError(f"state shape {state.shape} does not match 2**{n}")
    return _flip_sum(state, n)


def mixer_matrix(n: int) -> sp.csr_matrix:
    """Sparse sum_i X_i, n nonzeros per row."""
    dim = 1 << n
    rows = np.repeat(np.arange(dim), n)
    cols = (np.arange(dim)[:, None] ^ (1 << np.arange(n))[None, :]).ravel()
    m = sp.csr_matrix((np.ones(dim * n), (rows, cols)), shape=(dim, dim))
    m.sort_indices()
    return m


def dense_hamiltonian(model: IsingModel, B: float) -> np.ndarray:
    return np.diag(model.diagonal) + B * mixer_matrix(model.n_sites).toarray()


# -- symmetry sectors ---------------------------------------------------------

def _bit_reverse(z: np.ndarray, n: int) -> np.ndarray:
    out = np.zeros_like(z)
    for i in range(n):
        out |= ((z >> i) & 1) << (n - 1 - i)
    return out


@dataclass(frozen=True, eq=False)
class SectorBasis:
    """Joint eigenspace of global spin flip (z -> ~z) and inversion (i -> n+1-i)."""

    n_sites: int
    spin_parity: int
    spatial_parity: int
    vectors: sp.csc_matrix = field(repr=False)

    @property
    def dimension(self) -> int:
        return self.vectors.shape[1]

    @property
    def label(self) -> tuple[int, int]:
        return (self.spin_parity, self.spatial_parity)

    def project(self, state: np.ndarray) -> np.ndarray:
        return self.vectors.T @ state

    def lift(self, coords: np.ndarray) -> np.ndarray:
        return self.vectors @ coords


def build_sector_basis(model: IsingModel, spin_parity: int, spatial_parity: int) -> SectorBasis:
    if spin_parity not in (1, -1) or spatial_parity not in (1, -1):
        raise ValueError("parities must be +1 or -1")
    n = model.n_sites
    dim = 1 << n
    z = np.arange(dim)
    images = np.stack([z, z ^ (dim - 1), _bit_reverse(z, n), _bit_reverse(z ^ (dim - 1), n)])
    reps = np.unique(images.min(axis=0))
    chars = np.array([1, spin_parity, spatial_parity, spin_parity * spatial_parity], float)

    rows = images[:, reps].ravel()
    cols = np.tile(np.arange(len(reps)), 4)
    vals = np.repeat(chars, len(reps))
    V = sp.csc_matrix((vals, (rows, cols)), shape=(dim, len(reps)))
    V.eliminate_zeros()
    norms = np.sqrt(np.asarray(V.multiply(V).sum(axis=0)).ravel())
    keep = norms > 1e-12
    V = V[:, np.flatnonzero(keep)] @ sp.diags(1.0 / norms[keep])
    V = sp.csc_matrix(V)
    V.sort_indices()
    return SectorBasis(n, spin_parity, spatial_parity, V)


def all_sectors(model: IsingModel) -> list[SectorBasis]:
    return [build_sector_basis(model, s, r) for s in (1, -1) for r in (1, -1)]


# -- representations of the model in a basis ----------------------------------

@dataclass(frozen=True, eq=False)
class ModelSpace:
    """H(B) = diag(ha) + B * hb in some orthonormal basis.

    ``basis`` is None for the full 2**n space, otherwise the sector whose
    coordinates are used.  ``hb_norm`` bounds the spectral radius of ``hb``.
    """

    ha: np.ndarray
    hb: sp.csr_matrix
    hb_norm: float
    basis: SectorBasis | None = None

    @property
    def dim(self) -> int:
        return self.ha.shape[0]

    def apply(self, v: np.ndarray, B: float) -> np.ndarray:
        return self.ha * v + B * (self.hb @ v)

    def dense(self, B: float) -> np.ndarray:
        return np.diag(self.ha) + B * self.hb.toarray()

    def to_local(self, state: np.ndarray) -> np.ndarray:
        return state if self.basis is None else self.basis.project(state).astype(complex)

    def to_full(self, coords: np.ndarray) -> np.ndarray:
        return coords if self.basis is None else self.basis.lift(coords)


def full_space(model: IsingModel) -> ModelSpace:
    n = model.n_sites
    return ModelSpace(np.array(model.diagonal), mixer_matrix(n), float(n))


def sector_space(model: IsingModel, sector: SectorBasis) -> ModelSpace:
    V = sector.vectors
    # ha is diagonal in the sector: the Ising energy is constant on each orbit
    ha = np.asarray((V.multiply(V)).T @ model.diagonal).ravel()
    hb = sp.csr_matrix(V.T @ (mixer_matrix(model.n_sites) @ V))
    hb.eliminate_zeros()
    hb.sort_indices()
    return ModelSpace(ha, hb, float(model.n_sites), sector)


# -- spectra ------------------------------------------------------------------

def sector_hamiltonian(model: IsingModel, B: float, sector: SectorBasis) -> np.ndarray:
    return sector_space(model, sector).dense(B)


def sector_spectrum(model: IsingModel, B: float, sector: SectorBasis, k: int | None = None):
    """Ascending eigenvalues of H(B) restricted to ``sector``, eigenvectors in 2**n coordinates.

    ``k`` limits the computation to the lowest k eigenpairs.
    """
    if sector.dimension < 1:
        raise ValueError("empty sector")
    H = sector_hamiltonian(model, B, sector)
    subset = None if k is None else [0, min(k, sector.dimension) - 1]
    w, U = la.eigh(H, subset_by_index=subset)
    return w, np.asarray(sector.lift(U))


def ground_sector(model: IsingModel, B: float) -> SectorBasis:
    """Sector holding the lowest eigenvalue of H(B)."""
    best, best_e = None, np.inf
    for sec in all_sectors(model):
        if sec.dimension == 0:
            continue
        e = la.eigh(sector_hamiltonian(model, B, sec), eigvals_only=True, subset_by_index=[0, 0])[0]
        if e < best_e - 1e-12:
            best, best_e = sec, e
    return best


def ground_state(model: IsingModel, B: float | None = None):
    """(energy, full-space state) of the lowest eigenvector of H(B); B defaults to the target field."""
    B = model.target_field if B is None else B
    sec = ground_sector(model, B)
    w, U = sector_spectrum(model, B, sec, k=1)
    return float(w[0]), U[:, 0].astype(complex)


@dataclass(frozen=True)
class GapProfile:
    fields: np.ndarray
    gaps: np.ndarray
    sector: tuple[int, int]

    @property
    def samples(self) -> list[tuple[float, float]]:
        return list(zip(self.fields.tolist(), self.gaps.tolist()))

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["B", "gap"])
            for b, g in zip(self.fields, self.gaps):
                w.writerow([repr(float(b)), repr(float(g))])

    @classmethod
    def from_csv(cls, path, sector=(1, 1)) -> "GapProfile":
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        return cls(data[:, 0], data[:, 1], tuple(sector))


def default_field_grid(B_max: float = 20.0, B_min: float = 0.1, points: int = 400) -> np.ndarray:
    """Geometric grid, dense where the gap is small."""
    return np.geomspace(B_max, B_min, points)


def gap_profile(model: IsingModel, B_grid, sector: SectorBasis | None = None) -> GapProfile:
    """E1 - E0 inside the ground-state sector along a decreasing field grid.

    The sector is the one holding the ground state at the smallest field
    unless given explicitly.
    """
    B_grid = np.asarray(B_grid, dtype=float)
    if B_grid.ndim != 1 or len(B_grid) < 2:
        raise ValueError("need at least two grid points")
    if np.any(np.diff(B_grid) >= 0):
        raise ValueError("B_grid must be strictly decreasing")
    if np.any(B_grid <= 0):
        raise ValueError("B_grid entries must be positive")
    if sector is None:
        sector = ground_sector(model, B_grid[-1])
    if sector.dimension < 2:
        raise ValueError("sector too small for a gap")
    space = sector_space(model, sector)
    HA = np.diag(space.ha)
    HB = space.hb.toarray()
    gaps = np.empty_like(B_grid)
    for k, B in enumerate(B_grid):
        w = la.eigh(HA + B * HB, eigvals_only=True, subset_by_index=[0, 1])
        gaps[k] = w[1] - w[0]
    return GapProfile(B_grid, gaps, sector.label)
