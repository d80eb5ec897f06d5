"""Truncated S-symmetric Fock space over quadrature grids.

Sectors are dense complex arrays over grid^n, keyed by the species tuple
(k1..kn).  The S-symmetrization projecting onto physical states is

    (P_n Psi)^{k}(th) = (1/n!) sum_pi S^pi_k(th) Psi^{k o pi}(th o pi),

with S^pi the product over inversion pairs (i<j, pi^-1(i) > pi^-1(j)) of
S_{k_i k_j}(th_j - th_i).  This convention is fixed by the smeared
Zamolodchikov-Faddeev exchange relation

    zd_k(th) zd_l(th') = S_{kl}(th - th') zd_l(th') zd_k(th)

(the opposite argument sign fails it; see the relation checks).  Creation
prepends the new particle: zd_k(h) Psi |_(n+1) = sqrt(n+1) P_(n+1)(h (x) Psi_n);
annihilation is its quadrature adjoint and acts on S-symmetric vectors by
first-slot contraction, linear in the wavefunction, with
z(h)* = zd(conj h).
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import amplitudes as amp
from .errors import BudgetExceeded, InterpolationWarning, TruncationOverflow
from .model import ScatteringModel, momentum
from .report import Check, VerificationReport


@dataclass(frozen=True)
class RapidityGrid:
    """Gauss-Legendre nodes/weights on [-theta_max, theta_max]."""

    theta_max: float = 5.0
    n: int = 128
    nodes: np.ndarray = field(default=None, compare=False)
    weights: np.ndarray = field(default=None, compare=False)

    def __post_init__(self):
        x, w = np.polynomial.legendre.leggauss(self.n)
        object.__setattr__(self, "nodes", x * self.theta_max)
        object.__setattr__(self, "weights", w * self.theta_max)

    def quad(self, values: np.ndarray) -> complex:
        return complex(np.sum(self.weights * values))


class SMatrixCache:
    """Pairwise S-matrix values at node differences, diagonal regularized.

    M[(k,l)][i,j] = S_kl(nodes[j] - nodes[i]); removable singularities on
    the diagonal (pole/zero cancellations at zero rapidity difference) are
    replaced by the exact regularized limit.
    """

    def __init__(self, model: ScatteringModel, grid: RapidityGrid):
        self.model = model
        self.grid = grid
        self._cache: dict[tuple[int, int], np.ndarray] = {}

    def pair(self, k: int, l: int) -> np.ndarray:
        key = (min(k, l), max(k, l))
        if key not in self._cache:
            th = self.grid.nodes
            dif = th[None, :] - th[:, None]
            with np.errstate(divide="ignore", invalid="ignore"):
                m = self.model.s_matrix_real(*key, dif)
            bad = ~np.isfinite(m)
            if bad.any():
                val = amp.regularized_value(self.model.amplitude(*key), 0.0)
                m[np.where(bad)] = val
            self._cache[key] = m
        return self._cache[key]


@dataclass
class FockVector:
    """Value-semantic truncated Fock vector; sectors keyed by species tuple."""

    grid: RapidityGrid
    nspecies: int
    nmax: int = 3
    sectors: dict = field(default_factory=dict)

    def copy(self) -> "FockVector":
        return FockVector(self.grid, self.nspecies, self.nmax,
                          {k: v.copy() for k, v in self.sectors.items()})

    def sector(self, key: tuple) -> np.ndarray:
        n = len(key)
        shape = (self.grid.n,) * n
        return self.sectors.get(tuple(key), np.zeros(shape, dtype=complex))

    def set_sector(self, key: tuple, arr) -> None:
        self.sectors[tuple(key)] = np.asarray(arr, dtype=complex)

    def add_sector(self, key: tuple, arr) -> None:
        key = tuple(key)
        if key in self.sectors:
            self.sectors[key] = self.sectors[key] + arr
        else:
            self.sectors[key] = np.asarray(arr, dtype=complex)

    def levels(self) -> set[int]:
        return {len(k) for k in self.sectors}

    def max_level(self) -> int:
        return max((len(k) for k, v in self.sectors.items() if np.any(v)), default=0)

    def scaled(self, c: complex) -> "FockVector":
        return FockVector(self.grid, self.nspecies, self.nmax,
                          {k: c * v for k, v in self.sectors.items()})

    def __add__(self, other: "FockVector") -> "FockVector":
        out = self.copy()
        for k, v in other.sectors.items():
            out.add_sector(k, v)
        return out

    def __sub__(self, other: "FockVector") -> "FockVector":
        return self + other.scaled(-1.0)

    def norm(self) -> float:
        return math.sqrt(max(inner_product(self, self).real, 0.0))


def vacuum(grid: RapidityGrid, nspecies: int, nmax: int = 3) -> FockVector:
    v = FockVector(grid, nspecies, nmax)
    v.set_sector((), np.array(1.0 + 0.0j))
    return v


def one_particle(grid: RapidityGrid, nspecies: int, species: int, values,
                 nmax: int = 3) -> FockVector:
    v = FockVector(grid, nspecies, nmax)
    v.set_sector((species,), np.asarray(values, dtype=complex))
    return v


def _weight_tensor_apply(grid: RapidityGrid, arr: np.ndarray) -> np.ndarray:
    out = arr
    for ax in range(arr.ndim):
        shape = [1] * arr.ndim
        shape[ax] = grid.n
        out = out * grid.weights.reshape(shape)
    return out


def inner_product(phi: FockVector, psi: FockVector) -> complex:
    """Sector-wise quadrature pairing, conjugate-linear in the first slot."""
    acc = 0.0 + 0.0j
    for key, a in phi.sectors.items():
        b = psi.sectors.get(key)
        if b is None:
            continue
        acc += complex(np.sum(np.conj(a) * _weight_tensor_apply(phi.grid, b)))
    return acc


# ---------------------------------------------------------------------------
# S-symmetrization

def _inversion_pairs(pi: tuple[int, ...]) -> list[tuple[int, int]]:
    n = len(pi)
    inv = [0] * n
    for pos, val in enumerate(pi):
        inv[val] = pos
    return [(i, j) for i in range(n) for j in range(i + 1, n) if inv[i] > inv[j]]


def s_symmetrize(smat: SMatrixCache, sectors: dict, n: int,
                 budget: int = 4) -> dict:
    """Apply P_n to the given raw level-n sectors (species tuples mix)."""
    if n > budget:
        raise BudgetExceeded(f"n={n} exceeds the n! symmetrization budget ({budget})")
    if n == 0:
        return {k: np.asarray(v, dtype=complex) for k, v in sectors.items()}
    G = smat.grid.n
    perms = list(itertools.permutations(range(n)))
    # targets: every reordering of a present tuple can receive weight
    targets = set()
    for src in sectors:
        for pi in perms:
            targets.add(tuple(src[p] for p in pi))
    out = {}
    for kappa in sorted(targets):
        acc = np.zeros((G,) * n, dtype=complex)
        hit = False
        for pi in perms:
            src_key = tuple(kappa[p] for p in pi)
            a = sectors.get(src_key)
            if a is None:
                continue
            hit = True
            term = np.transpose(a, axes=pi)
            for (i, j) in _inversion_pairs(pi):
                m = smat.pair(kappa[i], kappa[j])
                shape = [1] * n
                shape[i] = G
                shape[j] = G
                term = term * m.reshape(shape)
            acc += term
        if hit:
            out[tuple(kappa)] = acc / math.factorial(n)
    return out


def _inverse(pi: tuple[int, ...]) -> list[int]:
    inv = [0] * len(pi)
    for pos, val in enumerate(pi):
        inv[val] = pos
    return inv


def project(smat: SMatrixCache, psi: FockVector, budget: int = 4) -> FockVector:
    """P applied level by level."""
    out = FockVector(psi.grid, psi.nspecies, psi.nmax)
    for n in sorted(psi.levels()):
        level = {k: v for k, v in psi.sectors.items() if len(k) == n}
        for k, v in s_symmetrize(smat, level, n, budget).items():
            out.add_sector(k, v)
    return out


# ---------------------------------------------------------------------------
# ZF operators

def create(smat: SMatrixCache, species: int, h, psi: FockVector) -> FockVector:
    """zd_species(h) psi = sqrt(n+1) P_{n+1}(h tensor psi_n), species prepended."""
    h = np.asarray(h, dtype=complex)
    out = FockVector(psi.grid, psi.nspecies, psi.nmax)
    for n in sorted(psi.levels()):
        level = {k: v for k, v in psi.sectors.items() if len(k) == n}
        if not any(np.any(v) for v in level.values()):
            continue
        if n + 1 > psi.nmax:
            raise TruncationOverflow(
                f"creation onto level {n + 1} exceeds truncation {psi.nmax}")
        raw = {}
        for key, arr in level.items():
            raw[(species,) + key] = np.multiply.outer(h, arr)
        for key, arr in s_symmetrize(smat, raw, n + 1).items():
            out.add_sector(key, math.sqrt(n + 1) * arr)
    return out


def annihilate(grid: RapidityGrid, species: int, h, psi: FockVector) -> FockVector:
    """z_species(h) psi: first-slot contraction, sqrt(n) int h(th) psi(th, .).

    Linear in h; the quadrature adjoint of create with conj h.  Valid on
    S-symmetric vectors (all vectors produced by P or zd are)."""
    h = np.asarray(h, dtype=complex)
    wh = grid.weights * h
    out = FockVector(psi.grid, psi.nspecies, psi.nmax)
    for key, arr in psi.sectors.items():
        n = len(key)
        if n == 0 or key[0] != species:
            continue
        contracted = np.tensordot(wh, arr, axes=(0, 0)) * math.sqrt(n)
        out.add_sector(key[1:], contracted)
    return out


# ---------------------------------------------------------------------------
# Poincare and CPT

def cpt(psi: FockVector) -> FockVector:
    """J: reverse the slots and conjugate; antiunitary, J^2 = 1."""
    out = FockVector(psi.grid, psi.nspecies, psi.nmax)
    for key, arr in psi.sectors.items():
        n = len(key)
        rev = tuple(reversed(key))
        out.add_sector(rev, np.conj(np.transpose(arr, axes=tuple(reversed(range(n))))))
    return out


def _lagrange_matrix(nodes: np.ndarray, targets: np.ndarray, order: int = 4) -> np.ndarray:
    """Rows: cubic Lagrange interpolation weights from nodes to targets."""
    n = len(nodes)
    L = np.zeros((len(targets), n))
    for r, t in enumerate(targets):
        i = np.searchsorted(nodes, t)
        lo = min(max(i - order // 2, 0), n - order)
        idx = range(lo, lo + order)
        for a in idx:
            w = 1.0
            for b in idx:
                if b != a:
                    w *= (t - nodes[b]) / (nodes[a] - nodes[b])
            L[r, a] = w
    return L


def poincare(model: ScatteringModel, a: tuple[float, float], lam: float,
             psi: FockVector, interp_tol: float = 1e-8) -> FockVector:
    """(U(a,lam) psi)_n = prod_j exp(i p_{k_j}(th_j).a) psi_n(th_1 - lam, ...).

    Boosts interpolate off-grid (cubic); the estimated interpolation error
    triggers InterpolationWarning when above interp_tol."""
    grid = psi.grid
    out = FockVector(grid, psi.nspecies, psi.nmax)
    L = None
    if lam != 0.0:
        targets = grid.nodes - lam
        if targets[0] < grid.nodes[0] or targets[-1] > grid.nodes[-1]:
            warnings.warn("boost shifts nodes outside the grid; edge values extrapolated",
                          InterpolationWarning)
        L = _lagrange_matrix(grid.nodes, targets)
        # error estimate: compare cubic vs quintic interpolation on a smooth probe
        probe = np.exp(-0.5 * grid.nodes ** 2) * np.cos(grid.nodes)
        est = float(np.max(np.abs((L - _lagrange_matrix(grid.nodes, targets, 6)) @ probe)))
        if est > interp_tol:
            warnings.warn(f"boost interpolation error estimate {est:.2e}", InterpolationWarning)
    for key, arr in psi.sectors.items():
        n = len(key)
        new = arr
        if L is not None:
            for ax in range(n):
                new = np.tensordot(L, new, axes=(1, ax))
                new = np.moveaxis(new, 0, ax)
        for ax, k in enumerate(key):
            p0 = model.mass(k) * np.cosh(grid.nodes)
            p1 = model.mass(k) * np.sinh(grid.nodes)
            phase = np.exp(1j * (p0 * a[0] - p1 * a[1]))
            shape = [1] * n
            shape[ax] = grid.n
            new = new * phase.reshape(shape)
        out.add_sector(key, new)
    return out


# ---------------------------------------------------------------------------
# relation checks

def zf_relation_check(model: ScatteringModel, grid: RapidityGrid,
                      h1, h2, seed: int = 5, tol: float = 1e-9,
                      wrong_twist: bool = False, two_particle: bool = True) -> VerificationReport:
    """Residuals of the three smeared ZF relations on vacuum, one- and
    two-particle vectors.

    The delta distribution is never materialized: each relation is paired
    with smooth wavefunctions h1, h2 and compared in L2.  ``wrong_twist``
    replaces S by conj S inside the twists; with an interacting model that
    must fail (negative control)."""
    smat = SMatrixCache(model, grid)
    rng = np.random.default_rng(seed)
    K = model.K
    report = VerificationReport("zf-relations", meta={"nu": model.nu, "grid": grid.n})

    h1 = np.asarray(h1, dtype=complex)
    h2 = np.asarray(h2, dtype=complex)
    wh1 = grid.weights * h1
    wh2 = grid.weights * h2

    def maybe_conj(m):
        return np.conj(m) if wrong_twist else m

    def rand_one(k):
        return one_particle(grid, K, k, _gauss(grid, rng), nmax=3)

    def rand_two(k, l):
        raw = {(k, l): np.multiply.outer(_gauss(grid, rng), _gauss(grid, rng))}
        v = FockVector(grid, K, 3)
        for key, arr in s_symmetrize(smat, raw, 2).items():
            v.add_sector(key, arr)
        return v

    # relation 1: zd_k(h1) zd_l(h2) = smeared S_kl(th - th') zd_l(th') zd_k(th).
    # Twisted kernel on the raw (l,k) tensor: h2(th1) h1(th2) S_kl(th2 - th1).
    worst1 = 0.0
    for k in range(1, K + 1):
        for l in range(1, K + 1):
            lhs = create(smat, k, h1, create(smat, l, h2, vacuum(grid, K)))
            m = smat.pair(k, l)                       # m[i,j] = S(th_j - th_i)
            raw = {(l, k): np.multiply.outer(h2, h1) * maybe_conj(m)}
            rhs = FockVector(grid, K, 3)
            for key, arr in s_symmetrize(smat, raw, 2).items():
                rhs.add_sector(key, math.sqrt(2.0) * arr)
            worst1 = max(worst1, (lhs - rhs).norm())
    report.add(Check("relation1_exchange_create", worst1, tol))

    # relation 2: z_k(h1) z_l(h2) Psi2 = smeared S_kl(th - th') z_l(th') z_k(th) Psi2,
    # both sides scalars; z_l(th') z_k(th) Psi2 = sqrt2 Psi2^{(k,l)}(th, th').
    worst2 = 0.0
    for k in range(1, K + 1):
        for l in range(1, K + 1):
            psi = rand_two(min(k, l), max(k, l))
            lhs = complex(annihilate(grid, k, h1, annihilate(grid, l, h2, psi)).sector(()))
            arr = psi.sector((k, l))
            m_ij = maybe_conj(smat.pair(k, l)).T      # entry (i,j) = S(th_i - th_j)
            rhs = math.sqrt(2.0) * complex(np.einsum("i,j,ij,ij->", wh1, wh2, m_ij, arr))
            worst2 = max(worst2, abs(lhs - rhs))
    report.add(Check("relation2_exchange_annihilate", worst2, tol))

    # relation 3: z_k(h1) zd_l(h2) = smeared S_kl(th' - th) zd_l(th') z_k(th)
    #             + delta_kl (int h1 h2).
    worst3 = 0.0
    for k in range(1, K + 1):
        for l in range(1, K + 1):
            delta = complex(np.sum(wh1 * h2)) if k == l else 0.0
            lhs0 = annihilate(grid, k, h1, create(smat, l, h2, vacuum(grid, K)))
            worst3 = max(worst3, abs(complex(lhs0.sector(())) - delta))
            for kx in range(1, K + 1):
                xi = rand_one(kx)
                lhs = annihilate(grid, k, h1, create(smat, l, h2, xi))
                rhs = xi.scaled(delta)
                if kx == k:
                    # component l: h2(th'') int h1(th) S_kl(th'' - th) xi(th) dth
                    m_ppt = maybe_conj(smat.pair(k, l)).T     # (i,j) = S(th_i - th_j)
                    inner = (m_ppt * wh1[None, :]) @ xi.sector((kx,))
                    rhs.add_sector((l,), h2 * inner)
                worst3 = max(worst3, (lhs - rhs).norm())
            if two_particle:
                psi = rand_two(min(k, l), max(k, l))
                lhs = annihilate(grid, k, h1, create(smat, l, h2, psi))
                rhs = psi.scaled(delta)
                twist = _relation3_twist(smat, grid, k, l, wh1, h2, psi, wrong_twist)
                rhs = rhs + twist
                worst3 = max(worst3, (lhs - rhs).norm())
    report.add(Check("relation3_mixed", worst3, tol))
    return report


def _relation3_twist(smat: SMatrixCache, grid: RapidityGrid, k: int, l: int,
                     wh1, h2, psi: FockVector, wrong_twist: bool) -> FockVector:
    """Smeared S_kl(th'-th) zd_l(th') z_k(th) applied to a two-particle vector."""
    K = psi.nspecies
    m_ppt = smat.pair(k, l).T            # (i,j) = S(th_i - th_j)
    if wrong_twist:
        m_ppt = np.conj(m_ppt)
    raw = {}
    for key, arr in psi.sectors.items():
        if len(key) != 2 or key[0] != k:
            continue
        # z_k(th) psi = sqrt2 psi^{(k,m)}(th, .); then create at th' with the
        # S_kl(th' - th) weight folded into the contraction over th.
        inner = math.sqrt(2.0) * (m_ppt * wh1[None, :]) @ arr    # [th', x]
        raw_key = (l, key[1])
        raw[raw_key] = raw.get(raw_key, 0.0) + h2[:, None] * inner
    out = FockVector(grid, K, psi.nmax)
    if raw:
        for key, arr in s_symmetrize(smat, raw, 2).items():
            out.add_sector(key, math.sqrt(2.0) * arr)
    return out


def _gauss(grid: RapidityGrid, rng) -> np.ndarray:
    a = 0.5 + rng.random()
    mu = -1.0 + 2.0 * rng.random()
    c = rng.standard_normal() + 1j * rng.standard_normal()
    return c * np.exp(-a * (grid.nodes - mu) ** 2)


# ---------------------------------------------------------------------------
# portable dump

def dump_vector(psi: FockVector) -> str:
    """Text dump: per sector one header line and row-major complex pairs."""
    lines = [f"grid {psi.grid.theta_max!r} {psi.grid.n}",
             f"nspecies {psi.nspecies}", f"nmax {psi.nmax}"]
    for key in sorted(psi.sectors):
        arr = psi.sectors[key]
        keytxt = ",".join(map(str, key)) if key else "-"
        shapetxt = ",".join(map(str, arr.shape)) if arr.shape else "-"
        lines.append(f"sector {keytxt} shape {shapetxt}")
        flat = arr.reshape(-1)
        lines.extend(f"{v.real!r} {v.imag!r}" for v in flat)
    return "\n".join(lines) + "\n"


def load_vector(text: str) -> FockVector:
    lines = text.strip().splitlines()
    it = iter(lines)
    head = next(it).split()
    grid = RapidityGrid(float(head[1]), int(head[2]))
    nspecies = int(next(it).split()[1])
    nmax = int(next(it).split()[1])
    v = FockVector(grid, nspecies, nmax)
    key, shape, buf = None, None, []

    def flush():
        if key is not None:
            arr = np.array([complex(float(r), float(i)) for r, i in buf])
            v.set_sector(key, arr.reshape(shape))

    for line in it:
        parts = line.split()
        if parts[0] == "sector":
            flush()
            key = tuple(int(x) for x in parts[1].split(",")) if parts[1] != "-" else ()
            shape = tuple(int(x) for x in parts[3].split(",")) if parts[3] != "-" else ()
            buf = []
        else:
            buf.append((parts[0], parts[1]))
    flush()
    return v
