import math

import numpy as np
import pytest

from gmak.equilibria import (
    BirchMap,
    HypothesisNotMetError,
    TransformError,
    balance_residual,
    birch_map,
    check_genthm,
    check_uniqueness,
    deficiencies,
    find_complex_balancing,
    flux_scale,
    jacobian_F,
    kernel_positive_basis,
    laplacian,
    multistationarity_witness,
    newton_solve,
    pseudo_reaction_transform,
    psi_tilde,
    solve_in_class,
)
from gmak.exactla import kinetic_order_subspace, stoichiometric_subspace
from gmak.graph import NotWeaklyReversibleError, decompose
from gmak.netmodel import complex_matrix, parse_network

from _factories import autocatalytic, power_law_ab, random_network, random_pointed_configuration, random_rates


def quadratic_roots(K, s_ac, s_bc):
    """Positive equilibria of A + 2B <=> B + C with K = k+/k-: C^2 - (K + s_bc) C + K s_ac = 0."""
    half = (K + s_bc) / 2
    disc = half * half - K * s_ac
    if disc < 0:
        return []
    roots = sorted({half - math.sqrt(disc), half + math.sqrt(disc)}, reverse=True)
    # larger C means smaller A, so this matches lexicographic order of (A, B, C)
    return [np.array([s_ac - C, s_bc - C, C]) for C in roots if 0 < C < min(s_ac, s_bc)]


def test_laplacian_columns_sum_to_zero():
    rng = np.random.default_rng(1)
    for _ in range(30):
        net = random_network(rng)
        A = laplacian(net, random_rates(rng, net.r))
        for j in range(net.m):
            assert sum(A[i, j] for i in range(net.m)) == 0


def test_kernel_vectors_supported_on_terminal_classes():
    rng = np.random.default_rng(2)
    for _ in range(40):
        net = random_network(rng)
        rates = random_rates(rng, net.r)
        chis = kernel_positive_basis(net, rates)
        dec = decompose(net)
        assert len(chis) == dec.t
        A = laplacian(net, rates)
        for chi, cls in zip(chis, dec.terminal_classes):
            assert {y for y, v in enumerate(chi) if v != 0} == set(cls)
            assert all(v == 0 for v in A @ chi)


def test_formation_rate_decomposition():
    rng = np.random.default_rng(3)
    for _ in range(20):
        net = random_network(rng)
        rates = [float(k) for k in random_rates(rng, net.r)]
        c = rng.uniform(0.1, 3.0, net.n)
        Y = complex_matrix(net).to_numpy()
        A = laplacian(net, rates).to_numpy()
        lhs = Y @ A @ psi_tilde(net, c)
        psi = psi_tilde(net, c)
        rhs = sum(
            k * psi[rx.source] * np.array([float(x) for x in net.reaction_vector(j)])
            for j, (k, rx) in enumerate(zip(rates, net.reactions))
        )
        assert np.allclose(lhs, rhs, rtol=1e-12, atol=1e-12 * np.max(np.abs(rhs)))


def test_complex_balancing_of_examples():
    net = autocatalytic([1, 1])
    c = find_complex_balancing(net)
    assert balance_residual(net, [1, 1], c) <= 1e-12
    net = power_law_ab("1/2", "3/2", "2")
    c = find_complex_balancing(net, [2, 3])
    assert balance_residual(net, [2, 3], c) <= 1e-9 * flux_scale(net, [2, 3], c)


def test_complex_balancing_random_weakly_reversible():
    rng = np.random.default_rng(4)
    found = 0
    for _ in range(40):
        net = random_network(rng, weakly_reversible=True)
        rates = random_rates(rng, net.r)
        c = find_complex_balancing(net, rates)
        if deficiencies(net).delta_tilde == 0:
            # kinetic deficiency zero: a balancing point exists for all rates
            assert c is not None
        if c is not None:
            found += 1
            assert np.all(c > 0)
            assert balance_residual(net, rates, c) <= 1e-9 * flux_scale(net, rates, c)
    assert found > 10


def test_complex_balancing_requires_weak_reversibility():
    with pytest.raises(NotWeaklyReversibleError):
        find_complex_balancing(parse_network("A -> B"), [1])


def test_birch_jacobian_matches_finite_differences():
    rng = np.random.default_rng(5)
    for _ in range(20):
        n = int(rng.integers(2, 6))
        d = int(rng.integers(1, n + 1))
        bm = BirchMap(rng.uniform(0.5, 2, n), rng.normal(size=(n, d)), rng.normal(size=(n, d)))
        lam = rng.normal(size=d) * 0.5
        J = jacobian_F(bm, lam)
        h = 1e-6
        fd = np.column_stack(
            [(bm.evaluate(lam + h * e) - bm.evaluate(lam - h * e)) / (2 * h) for e in np.eye(d)]
        )
        assert np.max(np.abs(J - fd)) <= 1e-6 * max(1.0, np.max(np.abs(J)))


def test_birch_map_of_classical_network_is_class_target():
    net = parse_network("A + B <=> C")
    bm = birch_map(net, [1, 1, 1])
    lam = np.array([0.3, -0.2])
    assert np.allclose(bm.evaluate(lam), bm.target(bm.point(lam)))


def test_autocatalytic_counts_match_quadratic():
    net = autocatalytic([1, 1])
    cstar = find_complex_balancing(net)
    for s_ac, s_bc in [(5, 4), (2, 3), (2, 1)]:
        expect = quadratic_roots(1.0, s_ac, s_bc)
        # any positive point in the class: A + C = s_ac, B + C = s_bc
        C0 = min(s_ac, s_bc) / 2
        sol = solve_in_class(net, cstar, [s_ac - C0, s_bc - C0, C0], starts=32, seed=0)
        assert len(sol.equilibria) == len(expect)
        for got, ref in zip(sol.equilibria, expect):
            assert np.max(np.abs(got - ref) / ref) <= 1e-8


def test_classical_pair_has_single_equilibrium():
    net = parse_network("A + B <=> C")
    cstar = find_complex_balancing(net, [1, 1])
    sol = solve_in_class(net, cstar, [1, 1, 1], rates=[1, 1])
    assert len(sol.equilibria) == 1 and sol.failed_starts == 0
    a, b, c = sol.equilibria[0]
    assert a * b == pytest.approx(c, rel=1e-10)
    assert a + c == pytest.approx(2) and b + c == pytest.approx(2)


def test_equilibria_lie_on_kinetic_log_coset():
    net = power_law_ab("1/2", "3/2", "2")
    rates = [2, 3]
    cstar = find_complex_balancing(net, rates)
    sol = solve_in_class(net, cstar, [0.7, 2.0, 1.1], rates=rates)
    assert len(sol.equilibria) == 1
    St = kinetic_order_subspace(net).to_numpy()
    diff = np.log(sol.equilibria[0]) - np.log(cstar)
    # component of diff inside S~ must vanish
    proj = St @ np.linalg.lstsq(St, diff, rcond=None)[0]
    assert np.max(np.abs(proj)) <= 1e-8


def test_unique_networks_give_one_solution_random():
    rng = np.random.default_rng(6)
    checked = 0
    for _ in range(60):
        net = random_network(rng, n_max=4, m_max=5, weakly_reversible=True)
        if not check_uniqueness(net):
            continue
        rates = random_rates(rng, net.r)
        cstar = find_complex_balancing(net, rates)
        if cstar is None:
            continue
        sol = solve_in_class(net, cstar, rng.uniform(0.5, 2.0, net.n), rates=rates, seed=1)
        assert len(sol.equilibria) <= 1
        checked += 1
    assert checked > 5


def test_uniqueness_examples():
    res = check_uniqueness(autocatalytic())
    assert not res and str(res.witness) == "--+"
    assert check_uniqueness(power_law_ab("1/2", "3/2", "2"))
    # S = span(-1, 1), S~ = span(-1, 0): trivial intersection although sign sets differ
    net = parse_network("A -> B\nB -> A\nA ~ A + B\nB ~ B")
    assert stoichiometric_subspace(net).contains([-1, 1])
    assert kinetic_order_subspace(net).contains([-1, 0])
    assert check_uniqueness(net)
    assert not check_genthm(net).sign_sets_equal


def test_verdicts_of_examples():
    for abc in [("1", "1", "1"), ("1/2", "3/2", "2")]:
        v = check_genthm(power_law_ab(*abc))
        assert v.genthm_applies and v.sign_sets_equal and v.conservative and v.uniqueness
        assert v.conservation_witness == (1, 1, 2)
    v = check_genthm(autocatalytic())
    assert not v.genthm_applies and not v.uniqueness and not v.surjectivity_hypothesis
    assert v.dominant_lattice_iso is None


def test_classical_networks_have_equal_sign_sets():
    rng = np.random.default_rng(8)
    for _ in range(15):
        net = random_network(rng, generalized=False)
        v = check_genthm(net)
        assert v.sign_sets_equal and v.uniqueness


def test_multistationarity_witness_of_autocatalytic_network():
    net = autocatalytic()
    w = multistationarity_witness(net)
    c1, c2 = w.equilibria
    assert np.max(np.abs(c1 - c2)) > 1e-3
    assert max(w.balance_residuals) <= 1e-9
    S = stoichiometric_subspace(net).to_numpy()
    diff = c1 - c2
    assert np.max(np.abs(S @ np.linalg.lstsq(S, diff, rcond=None)[0] - diff)) <= 1e-8
    # same class and both found by the solver
    sol = solve_in_class(net, w.cstar, w.cprime, rates=w.rates)
    assert len(sol.equilibria) == 2


def test_multistationarity_needs_non_uniqueness():
    with pytest.raises(HypothesisNotMetError):
        multistationarity_witness(parse_network("A + B <=> C"))


def test_transform_of_power_law_example():
    net = power_law_ab("2", "3/2", "2")
    t = pseudo_reaction_transform(net)
    dec = decompose(t)
    assert (t.m, dec.l, dec.weakly_reversible) == (4, 2, False)
    assert stoichiometric_subspace(t).equals(stoichiometric_subspace(net))


def test_transform_rejects_negative_coefficients():
    with pytest.raises(TransformError):
        pseudo_reaction_transform(power_law_ab("1/2", "3/2", "2"))


def test_transform_of_classical_network_is_relabeling():
    rng = np.random.default_rng(9)
    for _ in range(10):
        net = random_network(rng, generalized=False)
        assert pseudo_reaction_transform(net).structurally_equal(net)


def test_newton_solves_pointed_base_case():
    rng = np.random.default_rng(10)
    for _ in range(10):
        n, d = 5, 2
        V = random_pointed_configuration(rng, n, d)
        bm = BirchMap(np.ones(n), V, V)
        gamma = V.T @ rng.uniform(0.2, 3.0, n)
        res = newton_solve(bm, gamma, np.zeros(d))
        assert res.converged
        assert np.allclose(bm.evaluate(res.lam), gamma, rtol=1e-9)
