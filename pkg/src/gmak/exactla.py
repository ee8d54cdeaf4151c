"""Exact subspaces and deficiencies.

Everything here is done over ``Fraction``; there are no rank thresholds.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .graph import decompose
from .netmodel import GeneralizedNetwork, complex_matrix, kinetic_matrix
from .rational import RationalMatrix, nullspace, rank, rref, to_fraction


class PreconditionError(ValueError):
    pass


@dataclass(frozen=True)
class SubspaceBasis:
    """Column basis of a subspace of Q^n, kept in reduced echelon form.

    The basis vectors are the rows of the reduced row echelon form of any
    spanning set, so two equal subspaces always get identical bases.
    """

    ambient_dim: int
    basis: RationalMatrix

    @classmethod
    def span(cls, vectors: Sequence[Sequence], ambient_dim: int) -> SubspaceBasis:
        vecs = [[to_fraction(x) for x in v] for v in vectors]
        if any(len(v) != ambient_dim for v in vecs):
            raise ValueError("vector length differs from ambient dimension")
        red, _ = rref(vecs, ambient_dim) if vecs else ([], [])
        return cls(ambient_dim, RationalMatrix.from_columns(red, ambient_dim))

    @classmethod
    def whole(cls, n: int) -> SubspaceBasis:
        return cls.span([[int(i == j) for j in range(n)] for i in range(n)], n)

    @property
    def dim(self) -> int:
        return self.basis.cols

    def vectors(self) -> list[tuple[Fraction, ...]]:
        return self.basis.columns()

    def rows(self) -> list[tuple[Fraction, ...]]:
        """Row configuration w^1..w^n of the basis matrix."""
        return list(self.basis.entries)

    def contains(self, x: Sequence) -> bool:
        x = [to_fraction(v) for v in x]
        return rank([*self.vectors(), x], self.ambient_dim) == self.dim

    def equals(self, other: SubspaceBasis) -> bool:
        if self.ambient_dim != other.ambient_dim or self.dim != other.dim:
            return False
        joint = rank([*self.vectors(), *other.vectors()], self.ambient_dim)
        return joint == self.dim

    def to_numpy(self):
        return self.basis.to_numpy()


def kernel_basis(M: RationalMatrix) -> SubspaceBasis:
    return SubspaceBasis.span(nullspace(M.entries, M.cols), M.cols)


def image_basis(M: RationalMatrix) -> SubspaceBasis:
    return SubspaceBasis.span(M.columns(), M.rows)


def orthogonal_complement(B: SubspaceBasis) -> SubspaceBasis:
    return SubspaceBasis.span(nullspace(B.vectors(), B.ambient_dim), B.ambient_dim)


def intersection_dim(U: SubspaceBasis, W: SubspaceBasis) -> int:
    joint = rank([*U.vectors(), *W.vectors()], U.ambient_dim)
    return U.dim + W.dim - joint


def stoichiometric_subspace(net: GeneralizedNetwork) -> SubspaceBasis:
    return SubspaceBasis.span([net.reaction_vector(j) for j in range(net.r)], net.n)


def kinetic_order_subspace(net: GeneralizedNetwork) -> SubspaceBasis:
    return SubspaceBasis.span([net.kinetic_reaction_vector(j) for j in range(net.r)], net.n)


@dataclass(frozen=True)
class DeficiencyReport:
    m: int
    l: int  # noqa: E741
    s: int
    s_tilde: int
    delta: int
    delta_tilde: int
    method: str


def structural_deficiencies(net: GeneralizedNetwork) -> DeficiencyReport:
    dec = decompose(net)
    if dec.t != dec.l:
        raise PreconditionError(f"t != l ({dec.t} != {dec.l}): structural formula inapplicable")
    s = stoichiometric_subspace(net).dim
    st = kinetic_order_subspace(net).dim
    return DeficiencyReport(net.m, dec.l, s, st, net.m - dec.l - s, net.m - dec.l - st, "structural")


def direct_deficiencies(net: GeneralizedNetwork, rates: Sequence | None = None) -> DeficiencyReport:
    """dim(ker Y ∩ im A) and dim(ker Ỹ ∩ im A) computed from the rate matrix."""
    from .equilibria import laplacian

    A = laplacian(net, rates)
    im_A = image_basis(A)
    ker_Y = kernel_basis(complex_matrix(net))
    ker_Yt = kernel_basis(kinetic_matrix(net))
    return DeficiencyReport(
        net.m,
        decompose(net).l,
        stoichiometric_subspace(net).dim,
        kinetic_order_subspace(net).dim,
        intersection_dim(ker_Y, im_A),
        intersection_dim(ker_Yt, im_A),
        "direct",
    )
