"""Complex balancing equilibria of generalized mass action systems.

Structural decisions (kernels, signs, lattices) are exact; equilibrium
values are 64-bit floats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .exactla import (
    direct_deficiencies,
    kinetic_order_subspace,
    orthogonal_complement,
    stoichiometric_subspace,
    structural_deficiencies,
)
from .graph import NotWeaklyReversibleError, circulation_rates, decompose
from .netmodel import GeneralizedNetwork, NetworkValidationError, build_network, kinetic_matrix
from .rational import RationalMatrix, nullspace, primitive_integer, rank, to_fraction
from .signspace import (
    SignVector,
    enumerate_sign_vectors,
    face_lattice,
    find_dominant_lattice_iso,
    positive_vector,
    realize,
    sign_sets_equal,
)

EXP_CAP = 700.0


class RateError(ValueError):
    pass


class DegeneracyError(RuntimeError):
    """Exact kernel dimension of A differs from the number of terminal classes."""


class HypothesisNotMetError(ValueError):
    pass


class TransformError(ValueError):
    pass


class BirchOverflowError(OverflowError):
    pass


def resolve_rates(net: GeneralizedNetwork, rates: Sequence | None = None) -> list:
    """Rates in reaction order: explicit ``rates`` or those stored on the network."""
    if rates is None:
        rates = net.rates()
        if rates is None:
            missing = [net.describe_reaction(j) for j, rx in enumerate(net.reactions) if rx.rate is None]
            raise RateError(f"missing rate constant for {missing[0]}")
    rates = list(rates)
    if len(rates) != net.r:
        raise RateError(f"expected {net.r} rates, got {len(rates)}")
    for j, k in enumerate(rates):
        if not k > 0:
            raise RateError(f"nonpositive rate {k} for {net.describe_reaction(j)}")
    return rates


# --- the rate matrix A -------------------------------------------------------


def laplacian(net: GeneralizedNetwork, rates: Sequence | None = None) -> RationalMatrix:
    """Exact m x m matrix A with A_{y'y} = k_{y->y'} off the diagonal and zero column sums.

    Float rates are converted to the exactly equal rationals.
    """
    ks = [to_fraction(k) for k in resolve_rates(net, rates)]
    A = [[Fraction(0)] * net.m for _ in range(net.m)]
    for rx, k in zip(net.reactions, ks):
        A[rx.target][rx.source] += k
        A[rx.source][rx.source] -= k
    return RationalMatrix(A, cols=net.m)


def laplacian_float(net: GeneralizedNetwork, rates: Sequence | None = None) -> np.ndarray:
    ks = resolve_rates(net, rates)
    A = np.zeros((net.m, net.m))
    for rx, k in zip(net.reactions, ks):
        A[rx.target, rx.source] += float(k)
        A[rx.source, rx.source] -= float(k)
    return A


def kernel_positive_basis(net: GeneralizedNetwork, rates: Sequence | None = None) -> list[tuple[Fraction, ...]]:
    """One nonnegative kernel vector of A per terminal strong linkage class, supported on it."""
    A = laplacian(net, rates)
    dec = decompose(net)
    if net.m - rank(A.entries, net.m) != dec.t:
        raise DegeneracyError("dim ker A differs from the number of terminal strong linkage classes")
    chis = []
    for cls in dec.terminal_classes:
        sub = [[A[i, j] for j in cls] for i in cls]
        kern = nullspace(sub, len(cls))
        if len(kern) != 1:
            raise DegeneracyError(f"terminal class {cls} has a {len(kern)}-dimensional local kernel")
        v = primitive_integer(kern[0])
        if v[0] < 0:
            v = [-x for x in v]
        if any(x <= 0 for x in v):
            raise DegeneracyError(f"kernel vector on terminal class {cls} is not positive")
        chi = [Fraction(0)] * net.m
        for y, x in zip(cls, v):
            chi[y] = Fraction(x)
        chis.append(tuple(chi))
    return chis


# --- monomials ---------------------------------------------------------------


def _exponents(net: GeneralizedNetwork) -> np.ndarray:
    """m x n array of kinetic exponents (row y is the kinetic complex of y)."""
    return kinetic_matrix(net).to_numpy().T


def psi_tilde(net: GeneralizedNetwork, c: Sequence[float]) -> np.ndarray:
    c = np.asarray(c, dtype=float)
    if c.shape != (net.n,):
        raise ValueError(f"expected {net.n} concentrations")
    if np.any(c < 0):
        raise ValueError("negative concentration")
    with np.errstate(divide="ignore"):
        return np.prod(c[None, :] ** _exponents(net), axis=1)  # 0.0**0.0 == 1.0


def flux_scale(net: GeneralizedNetwork, rates: Sequence, c: Sequence[float]) -> float:
    psi = psi_tilde(net, c)
    ks = np.array([float(k) for k in rates])
    src = np.array([rx.source for rx in net.reactions])
    return max(1.0, float(np.max(ks * psi[src]))) if net.r else 1.0


def balance_residual(net: GeneralizedNetwork, rates: Sequence, c: Sequence[float]) -> float:
    """max-norm of A Psi~(c)."""
    return float(np.max(np.abs(laplacian_float(net, rates) @ psi_tilde(net, c))))


def find_complex_balancing(net: GeneralizedNetwork, rates: Sequence | None = None) -> np.ndarray | None:
    """A positive c with A Psi~(c) = 0, or None if the log-linear system is inconsistent.

    With x = ln c and one scalar mu_L per linkage class, the kinetic-complex
    monomials must be proportional to the kernel vectors of A:
    <y~, x> - mu_L(y) = ln chi_L(y),y. The minimum-norm solution is returned.
    """
    dec = decompose(net)
    if not dec.weakly_reversible:
        raise NotWeaklyReversibleError(
            "no complex balancing equilibrium: the network is not weakly reversible"
        )
    rates = resolve_rates(net, rates)
    chis = kernel_positive_basis(net, rates)
    Yt = _exponents(net)
    l = dec.l
    M = np.zeros((net.m, net.n + l))
    rhs = np.zeros(net.m)
    for i, chi in enumerate(chis):
        for y in dec.terminal_classes[i]:
            M[y, : net.n] = Yt[y]
            M[y, net.n + i] = -1.0
            rhs[y] = math.log(chi[y])
    sol, *_ = np.linalg.lstsq(M, rhs, rcond=None)
    if np.max(np.abs(M @ sol - rhs), initial=0.0) > 1e-9 * (1.0 + np.max(np.abs(rhs), initial=0.0)):
        return None
    c = np.exp(sol[: net.n])
    if balance_residual(net, rates, c) > 1e-9 * flux_scale(net, rates, c):
        return None
    return c


# --- the map F ---------------------------------------------------------------


def _full_column_rank(M: np.ndarray) -> bool:
    return M.shape[1] == 0 or np.linalg.matrix_rank(M) == M.shape[1]


@dataclass(frozen=True)
class BirchMap:
    """lam -> sum_k c*_k exp(<lam, w~^k>) w^k for row configurations V, V~."""

    cstar: np.ndarray
    V: np.ndarray
    Vt: np.ndarray

    def __post_init__(self):
        cstar = np.asarray(self.cstar, dtype=float)
        V = np.asarray(self.V, dtype=float).reshape(len(cstar), -1)
        Vt = np.asarray(self.Vt, dtype=float).reshape(len(cstar), -1)
        if np.any(cstar <= 0):
            raise ValueError("c* must be strictly positive")
        if not (_full_column_rank(V) and _full_column_rank(Vt)):
            raise ValueError("V and V~ must have full column rank")
        object.__setattr__(self, "cstar", cstar)
        object.__setattr__(self, "V", V)
        object.__setattr__(self, "Vt", Vt)

    @property
    def d(self) -> int:
        return self.V.shape[1]

    @property
    def d_tilde(self) -> int:
        return self.Vt.shape[1]

    def _weights(self, lam) -> np.ndarray:
        expo = self.Vt @ np.asarray(lam, dtype=float)
        if np.any(expo > EXP_CAP):
            raise BirchOverflowError(f"exponent {expo.max():.1f} exceeds {EXP_CAP}")
        return self.cstar * np.exp(expo)

    def evaluate(self, lam) -> np.ndarray:
        return self.V.T @ self._weights(lam)

    def jacobian(self, lam) -> np.ndarray:
        """d x d~ matrix with entries sum_k c*_k e^{<lam,w~^k>} w~^k_j w^k_i."""
        return (self.V * self._weights(lam)[:, None]).T @ self.Vt

    def point(self, lam) -> np.ndarray:
        """The concentration c* o exp(V~ lam)."""
        return self._weights(lam)

    def target(self, cprime) -> np.ndarray:
        return self.V.T @ np.asarray(cprime, dtype=float)


def evaluate_F(bm: BirchMap, lam) -> np.ndarray:
    return bm.evaluate(lam)


def jacobian_F(bm: BirchMap, lam) -> np.ndarray:
    return bm.jacobian(lam)


@dataclass
class NewtonResult:
    lam: np.ndarray
    converged: bool
    iterations: int
    residual: float


def newton_solve(bm: BirchMap, gamma, lam0, max_iter: int = 100, tol: float = 1e-10, max_halvings: int = 40) -> NewtonResult:
    """Damped Newton on F(lam) = gamma; least-squares steps when J is not square or singular."""
    gamma = np.asarray(gamma, dtype=float)
    lam = np.array(lam0, dtype=float)
    thresh = tol * max(np.max(np.abs(gamma), initial=0.0), np.finfo(float).tiny)

    def resid(x):
        try:
            return bm.evaluate(x) - gamma
        except BirchOverflowError:
            return None

    r = resid(lam)
    if r is None:
        return NewtonResult(lam, False, 0, math.inf)
    norm = float(np.linalg.norm(r))
    for it in range(1, max_iter + 1):
        if np.max(np.abs(r), initial=0.0) <= thresh:
            lam, r = _polish(bm, gamma, lam, r)
            return NewtonResult(lam, True, it - 1, float(np.max(np.abs(r), initial=0.0)))
        if bm.d_tilde == 0:
            break
        step, *_ = np.linalg.lstsq(bm.jacobian(lam), -r, rcond=None)
        alpha = 1.0
        for _ in range(max_halvings + 1):
            cand = lam + alpha * step
            rc = resid(cand)
            if rc is not None and np.all(np.isfinite(rc)) and np.linalg.norm(rc) < norm:
                break
            alpha /= 2
        else:
            break
        lam, r, norm = cand, rc, float(np.linalg.norm(rc))
    ok = np.max(np.abs(r), initial=0.0) <= thresh
    if ok:
        lam, r = _polish(bm, gamma, lam, r)
    return NewtonResult(lam, bool(ok), max_iter, float(np.max(np.abs(r), initial=0.0)))


def _polish(bm, gamma, lam, r, steps: int = 3):
    """A few undamped Newton steps, kept only while the residual shrinks."""
    for _ in range(steps):
        if bm.d_tilde == 0:
            break
        step, *_ = np.linalg.lstsq(bm.jacobian(lam), -r, rcond=None)
        try:
            rc = bm.evaluate(lam + step) - gamma
        except BirchOverflowError:
            break
        if not np.linalg.norm(rc) < np.linalg.norm(r):
            break
        lam, r = lam + step, rc
    return lam, r


def birch_map(net: GeneralizedNetwork, cstar) -> BirchMap:
    V = orthogonal_complement(stoichiometric_subspace(net)).to_numpy()
    Vt = orthogonal_complement(kinetic_order_subspace(net)).to_numpy()
    return BirchMap(np.asarray(cstar, dtype=float), V, Vt)


@dataclass
class ClassSolution:
    cprime: np.ndarray
    gamma: np.ndarray
    equilibria: list[np.ndarray]
    class_residuals: list[float]
    balance_residuals: list[float]
    failed_starts: int
    starts: int


def solve_in_class(
    net: GeneralizedNetwork,
    cstar,
    cprime,
    starts: int = 32,
    seed: int = 0,
    rates: Sequence | None = None,
) -> ClassSolution:
    """Complex balancing equilibria in the compatibility class of ``cprime``.

    Every equilibrium is c* o exp(V~ lam) for some lam, so this solves
    F(lam) = V^T c' by multi-start damped Newton from lam = 0 and
    ``starts - 1`` uniform points in [-5, 5]^d~, then deduplicates.
    """
    cstar = np.asarray(cstar, dtype=float)
    cprime = np.asarray(cprime, dtype=float)
    if cstar.shape != (net.n,) or np.any(cstar <= 0):
        raise ValueError("c* must be a positive vector of species length")
    if cprime.shape != (net.n,) or np.any(cprime <= 0):
        raise ValueError("c' must be a positive vector of species length")
    rates = resolve_rates(net, rates)
    if balance_residual(net, rates, cstar) > 1e-9 * flux_scale(net, rates, cstar):
        raise ValueError("c* is not a complex balancing equilibrium for these rates")
    bm = birch_map(net, cstar)
    gamma = bm.target(cprime)
    rng = np.random.default_rng(seed)
    inits = [np.zeros(bm.d_tilde)] + [rng.uniform(-5.0, 5.0, bm.d_tilde) for _ in range(max(starts, 1) - 1)]

    found: list[np.ndarray] = []
    failed = 0
    for lam0 in inits:
        res = newton_solve(bm, gamma, lam0)
        if not res.converged:
            failed += 1
            continue
        c = bm.point(res.lam)
        if not any(np.max(np.abs(c - f)) <= 1e-6 * (1.0 + np.max(np.abs(f))) for f in found):
            found.append(c)
        if bm.d == 0:
            break
    found.sort(key=lambda c: tuple(c))
    scale = 1.0 + np.max(np.abs(gamma), initial=0.0)
    class_res = [float(np.max(np.abs(bm.target(c) - gamma), initial=0.0) / scale) for c in found]
    bal_res = [balance_residual(net, rates, c) / flux_scale(net, rates, c) for c in found]
    return ClassSolution(cprime, gamma, found, class_res, bal_res, failed, len(inits))


# --- sign conditions -----------------------------------------------------------


@dataclass(frozen=True)
class UniquenessResult:
    unique: bool
    witness: SignVector | None = None

    def __bool__(self) -> bool:
        return self.unique


def check_uniqueness(net: GeneralizedNetwork, limit: int | None = None) -> UniquenessResult:
    """Is sigma(S) ∩ sigma(S~-perp) = {0}? Otherwise report a common nonzero sign vector."""
    S = stoichiometric_subspace(net)
    St_perp = orthogonal_complement(kinetic_order_subspace(net))
    common = enumerate_sign_vectors(S, limit).intersection(enumerate_sign_vectors(St_perp, limit))
    nonzero = [v for v in common if not v.is_zero()]
    if not nonzero:
        return UniquenessResult(True)
    return UniquenessResult(False, min(nonzero))


@dataclass(frozen=True)
class AnalysisVerdict:
    weakly_reversible: bool
    deficiency_zero: bool
    kinetic_deficiency_zero: bool
    sign_sets_equal: bool
    conservative: bool
    uniqueness: bool
    surjectivity_hypothesis: bool
    genthm_applies: bool
    witness_sign_vector: SignVector | None = None
    conservation_witness: tuple[int, ...] | None = None
    pointed: bool = False
    dominant_lattice_iso: dict | None = field(default=None, compare=False)


def deficiencies(net: GeneralizedNetwork):
    """Structural deficiencies when t = l, otherwise direct ones (network rates or unit rates)."""
    dec = decompose(net)
    if dec.t == dec.l:
        return structural_deficiencies(net)
    rates = net.rates() or [1] * net.r
    return direct_deficiencies(net, rates)


def check_genthm(net: GeneralizedNetwork, limit: int | None = None) -> AnalysisVerdict:
    dec = decompose(net)
    defs = deficiencies(net)
    S = stoichiometric_subspace(net)
    St = kinetic_order_subspace(net)
    V = orthogonal_complement(S)
    Vt = orthogonal_complement(St)
    equal = sign_sets_equal(S, St, limit=limit)
    witness = positive_vector(V)
    uniq = check_uniqueness(net, limit)
    pointed = witness is not None
    iso = None
    if pointed:
        iso = find_dominant_lattice_iso(face_lattice(Vt, limit), face_lattice(V, limit))
    return AnalysisVerdict(
        weakly_reversible=dec.weakly_reversible,
        deficiency_zero=defs.delta == 0,
        kinetic_deficiency_zero=defs.delta_tilde == 0,
        sign_sets_equal=equal,
        conservative=pointed,
        uniqueness=uniq.unique,
        surjectivity_hypothesis=pointed and iso is not None,
        genthm_applies=equal and pointed,
        witness_sign_vector=uniq.witness,
        conservation_witness=witness,
        pointed=pointed,
        dominant_lattice_iso=iso,
    )


# --- multistationarity -----------------------------------------------------------


@dataclass
class MultistationarityWitness:
    tau: SignVector
    rates: list[float]
    cstar: np.ndarray
    cprime: np.ndarray
    equilibria: tuple[np.ndarray, np.ndarray]
    balance_residuals: tuple[float, float]
    class_residual: float


def multistationarity_witness(net: GeneralizedNetwork, limit: int | None = None) -> MultistationarityWitness:
    """Rates with two complex balancing equilibria in one compatibility class.

    From tau in sigma(S) ∩ sigma(S~-perp): u in S and v1 in S~-perp with sign
    tau, v2 = v1/2, c* solving u = c* o (e^v1 - e^v2) (free entries 1), and
    rates k = kappa / (c*)^y~ for a circulation kappa, so that c* balances.
    The equilibria are c' = c* o e^v1 and c' - u = c* o e^v2.
    """
    if not decompose(net).weakly_reversible:
        raise HypothesisNotMetError("network is not weakly reversible")
    uniq = check_uniqueness(net, limit)
    if uniq.unique:
        raise HypothesisNotMetError("sigma(S) and sigma(S~-perp) meet only in 0: equilibria are unique")
    tau = uniq.witness
    S = stoichiometric_subspace(net)
    St_perp = orthogonal_complement(kinetic_order_subspace(net))
    u = np.array([float(x) for x in realize(S, tau)])
    v1 = np.array([float(x) for x in realize(St_perp, tau)])
    v1 /= np.max(np.abs(v1))
    v2 = v1 / 2
    gap = np.exp(v1) - np.exp(v2)
    cstar = np.ones(net.n)
    mask = np.array(tau.entries) != 0
    cstar[mask] = u[mask] / gap[mask]

    kappa = circulation_rates(net)
    psi = psi_tilde(net, cstar)
    rates = [float(kap) / psi[rx.source] for kap, rx in zip(kappa, net.reactions)]
    c1 = cstar * np.exp(v1)
    c2 = cstar * np.exp(v2)
    V = orthogonal_complement(S).to_numpy()
    class_res = float(np.max(np.abs(V.T @ (c1 - c2)), initial=0.0))
    return MultistationarityWitness(
        tau=tau,
        rates=rates,
        cstar=cstar,
        cprime=c1,
        equilibria=(c1, c2),
        balance_residuals=(balance_residual(net, rates, c1), balance_residual(net, rates, c2)),
        class_residual=class_res,
    )


# --- pseudo reactions --------------------------------------------------------


def pseudo_reaction_transform(net: GeneralizedNetwork) -> GeneralizedNetwork:
    """Classical network with each y -> y' replaced by y~ -> y~ + (y' - y)."""
    reactions = []
    for j, rx in enumerate(net.reactions):
        src = net.kinetic_complexes[rx.source].vector(net.n)
        tgt = [a + b for a, b in zip(src, net.reaction_vector(j))]
        if any(x < 0 for x in tgt):
            raise TransformError(
                f"pseudo-reaction for {net.describe_reaction(j)} has a negative coefficient"
            )
        reactions.append((src, tgt))
    try:
        return build_network(net.species_names, reactions, rates=[rx.rate for rx in net.reactions])
    except NetworkValidationError as exc:
        raise TransformError(f"transformed network is invalid: {exc}") from exc
