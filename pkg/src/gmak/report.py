"""Report assembly: JSON-ready dictionaries and a fixed-width text rendering."""

from __future__ import annotations

from fractions import Fraction
from typing import Any

import numpy as np

from .equilibria import AnalysisVerdict, ClassSolution, MultistationarityWitness, check_genthm, deficiencies
from .exactla import SubspaceBasis, kinetic_order_subspace, orthogonal_complement, stoichiometric_subspace
from .graph import decompose
from .netmodel import GeneralizedNetwork
from .rational import format_fraction
from .signspace import enumerate_sign_vectors, face_lattice


def jsonable(obj: Any) -> Any:
    """Rationals become "p/q" strings, numpy values plain floats/lists."""
    if isinstance(obj, Fraction):
        return format_fraction(obj)
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [jsonable(v) for v in obj.tolist()]
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def _basis(B: SubspaceBasis) -> list[list[str]]:
    return [[format_fraction(x) for x in v] for v in B.vectors()]


def _verdict(v: AnalysisVerdict) -> dict:
    return {
        "weakly_reversible": v.weakly_reversible,
        "deficiency_zero": v.deficiency_zero,
        "kinetic_deficiency_zero": v.kinetic_deficiency_zero,
        "sign_sets_equal": v.sign_sets_equal,
        "conservative": v.conservative,
        "uniqueness": v.uniqueness,
        "surjectivity_hypothesis": v.surjectivity_hypothesis,
        "genthm_applies": v.genthm_applies,
        "witness_sign_vector": None if v.witness_sign_vector is None else str(v.witness_sign_vector),
    }


def analysis_report(net: GeneralizedNetwork, limit: int | None = None) -> dict:
    dec = decompose(net)
    S = stoichiometric_subspace(net)
    St = kinetic_order_subspace(net)
    V, Vt = orthogonal_complement(S), orthogonal_complement(St)
    defs = deficiencies(net)
    verdict = check_genthm(net, limit)
    sigma_S = enumerate_sign_vectors(S, limit)
    sigma_Vt = enumerate_sign_vectors(Vt, limit)
    common = sigma_S.intersection(sigma_Vt)
    return {
        "network": {
            "n": net.n,
            "m": net.m,
            "reactions": net.r,
            "species": net.species_names,
            "reaction_list": [net.describe_reaction(j) for j in range(net.r)],
        },
        "graph": {
            "l": dec.l,
            "t": dec.t,
            "weakly_reversible": dec.weakly_reversible,
            "linkage_classes": [list(c) for c in dec.linkage_classes],
            "strong_linkage_classes": [list(c) for c in dec.strong_linkage_classes],
            "terminal_classes": [list(c) for c in dec.terminal_classes],
        },
        "subspaces": {
            "s": S.dim,
            "s_tilde": St.dim,
            "d": V.dim,
            "d_tilde": Vt.dim,
            "S": _basis(S),
            "S_tilde": _basis(St),
            "S_perp": _basis(V),
            "S_tilde_perp": _basis(Vt),
        },
        "deficiency": {"m": defs.m, "l": defs.l, "delta": defs.delta, "delta_tilde": defs.delta_tilde, "method": defs.method},
        "signs": {
            "sigma_S": sigma_S.strings(),
            "sigma_S_tilde_perp": sigma_Vt.strings(),
            "intersection": common.strings(),
            "face_lattice_S_perp": face_lattice(V, limit).strings(),
            "face_lattice_S_tilde_perp": face_lattice(Vt, limit).strings(),
            "conservation_witness": None if verdict.conservation_witness is None else list(verdict.conservation_witness),
        },
        "verdict": _verdict(verdict),
    }


def _rates_map(net: GeneralizedNetwork, rates) -> dict:
    return {net.describe_reaction(j): jsonable(k) for j, k in enumerate(rates)}


def equilibria_report(net: GeneralizedNetwork, rates, cstar, sol: ClassSolution) -> dict:
    return {
        "rates": _rates_map(net, rates),
        "cstar": jsonable(cstar),
        "class": {"init": jsonable(sol.cprime), "gamma": jsonable(sol.gamma)},
        "equilibria": jsonable(sol.equilibria),
        "residuals": jsonable(sol.balance_residuals),
        "class_residuals": jsonable(sol.class_residuals),
        "starts": sol.starts,
        "failed_starts": sol.failed_starts,
    }


def witness_report(net: GeneralizedNetwork, w: MultistationarityWitness) -> dict:
    V = orthogonal_complement(stoichiometric_subspace(net)).to_numpy()
    return {
        "tau": str(w.tau),
        "rates": _rates_map(net, w.rates),
        "cstar": jsonable(w.cstar),
        "class": {"init": jsonable(w.cprime), "gamma": jsonable(V.T @ w.cprime)},
        "equilibria": jsonable(w.equilibria),
        "residuals": jsonable(w.balance_residuals),
        "class_residual": w.class_residual,
    }


def render_text(report: dict, title: str = "") -> str:
    """Fixed-width rendering of a nested report."""
    lines = [title] if title else []

    def walk(obj, indent):
        pad = " " * indent
        for key, val in obj.items():
            if isinstance(val, dict):
                lines.append(f"{pad}{key}:")
                walk(val, indent + 2)
            elif isinstance(val, list) and val and isinstance(val[0], list):
                lines.append(f"{pad}{key + ':':<28}")
                for item in val:
                    lines.append(f"{pad}  {_fmt(item)}")
            else:
                lines.append(f"{pad}{key + ':':<28}{_fmt(val)}")

    walk(report, 0)
    return "\n".join(lines) + "\n"


def _fmt(val) -> str:
    if isinstance(val, bool):
        return "yes" if val else "no"
    if val is None:
        return "-"
    if isinstance(val, float):
        return f"{val:.12g}"
    if isinstance(val, list):
        return "[" + ", ".join(_fmt(v) for v in val) + "]"
    return str(val)
