import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from geoch import catalog as cat
from geoch import quantum as q

CHM = cat.make_probability("geometric_tripartite_ch")
Z = q.BlochVector(0, 0, 1)
X = q.BlochVector(1, 0, 0)

unit_vectors = st.tuples(st.floats(0, math.pi), st.floats(0, 2 * math.pi)).map(
    lambda a: q.BlochVector.from_angles(*a))


def test_bloch_vector_must_be_unit():
    with pytest.raises(ValueError):
        q.BlochVector(1, 1, 0)


def test_projectors():
    assert np.allclose(q.projector(Z), np.diag([1, 0]))
    assert np.allclose(q.projector(X), 0.5 * np.ones((2, 2)))
    assert np.allclose(q.projector(Z, 0.5), np.diag([0.5, 0]))


def test_symdiff_operator_examples():
    zz = q.symdiff_operator([q.projector(Z)] * 2)
    assert np.allclose(zz, 0.5 * (np.eye(4) - np.kron(q.SZ, q.SZ)))
    xxx = q.symdiff_operator([q.projector(X)] * 3)
    assert np.allclose(xxx, 0.5 * (np.eye(8) + q.kron_all([q.SX] * 3)))
    product = np.zeros(4)
    product[0] = 1
    assert q.expectation(np.outer(product, product), zz) == pytest.approx(0.0)


@settings(max_examples=100, deadline=None)
@given(unit_vectors, unit_vectors, unit_vectors)
def test_symdiff_closed_forms(a, b, c):
    two = q.symdiff_operator([q.projector(a), q.projector(b)])
    assert np.allclose(two, 0.5 * (np.eye(4) - np.kron(a.sigma(), b.sigma())), atol=1e-12)
    three = q.symdiff_operator([q.projector(v) for v in (a, b, c)])
    assert np.allclose(three, 0.5 * (np.eye(8) + q.kron_all([a.sigma(), b.sigma(), c.sigma()])), atol=1e-12)


def test_states():
    ghz = q.state_vector("ghz", [math.pi / 4])
    assert np.allclose(ghz[[0, 7]], [1 / math.sqrt(2)] * 2)
    w = q.state_vector("w", [math.acos(1 / math.sqrt(3)), math.pi / 4])
    assert np.allclose(np.abs(w[[1, 2, 4]]), [1 / math.sqrt(3)] * 3)
    assert np.allclose(q.make_state("ghz", [0.3], visibility=0.0), np.eye(8) / 8)
    with pytest.raises(ValueError):
        q.state_vector("bell")
    with pytest.raises(ValueError):
        q.density(ghz, 1.5)


def test_expectation_basics():
    rho = q.make_state("ghz", [math.pi / 4])
    assert q.expectation(rho, np.eye(8)) == pytest.approx(1.0)
    assert q.expectation(rho, q.kron_all([q.SX] * 3)) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        q.expectation(rho, np.triu(np.ones((8, 8))))


@pytest.mark.parametrize("eta", [0.25, 0.5, 0.75, 1.0])
def test_white_noise_oracle(eta):
    rng = np.random.default_rng(int(eta * 100))
    s = q.settings_from_angles(rng.uniform(0, 2 * math.pi, 12), 3, 2)
    got = q.expectation(np.eye(8) / 8, q.bell_operator(CHM, s, eta))
    assert got == pytest.approx(1.5 * eta - 1.5 * eta ** 2 + 0.5 * eta ** 3, abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.floats(0.05, 1.0))
def test_bell_operator_matches_joint_probability_sum(seed, eta):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
    rho = a @ a.conj().T
    rho /= np.trace(rho).real
    s = q.settings_from_angles(rng.uniform(0, 2 * math.pi, 12), 3, 2)
    joint = q.joint_probabilities(rho, s, eta, CHM)
    expected = sum(float(c) * joint[k] for k, c in CHM.terms().items())
    assert q.expectation(rho, q.bell_operator(CHM, s, eta)) == pytest.approx(expected, abs=1e-10)


def test_joint_probabilities_scale_with_eta():
    rho = q.make_state("w", [0.7, 0.4])
    s = q.settings_from_angles(np.linspace(0.1, 2.0, 12), 3, 2)
    full = q.joint_probabilities(rho, s, 1.0, CHM)
    part = q.joint_probabilities(rho, s, 0.6, CHM)
    for k in full:
        assert part[k] == pytest.approx(0.6 ** len(k) * full[k], abs=1e-14)


def test_lowest_eig():
    lam, v = q.lowest_eig(np.diag([3.0, 1.0, 2.0]).astype(complex))
    assert lam == pytest.approx(1.0) and abs(abs(v[1]) - 1) < 1e-12
    zz = q.symdiff_operator([q.projector(Z)] * 2)
    lam, v = q.lowest_eig(zz)
    assert lam == pytest.approx(0.0, abs=1e-12)
    assert abs(v[1]) < 1e-12 and abs(v[2]) < 1e-12


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.sampled_from([2, 4, 8, 16, 32]))
def test_eigen_reconstruction(seed, n):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    h = a + a.conj().T
    lam, v = q.lowest_eig(h)
    assert np.linalg.norm(h @ v - lam * v) < 1e-9
    assert np.allclose(q.eigenvalues(h), np.linalg.eigvalsh(h), atol=1e-10)


def test_restrict_subspace():
    basis = np.eye(8)[:, [3, 5]]
    assert np.allclose(q.restrict_subspace(np.eye(8), basis), np.eye(2))
    zzz = q.kron_all([q.SZ] * 3)
    assert np.allclose(q.restrict_subspace(zzz, q.W_EPR_BASIS), np.diag([-1, -1, -1, -1]))
    with pytest.raises(ValueError):
        q.restrict_subspace(np.eye(8), np.ones((8, 2)))


def test_ghz_subspace_eigenvalue_at_theta_zero():
    for eta in (0.3, 0.6, 0.9, 1.0):
        row = [q.BlochVector.in_plane(0.0, "xy"), q.BlochVector.in_plane(math.pi / 2, "xy")]
        op = q.restrict_subspace(q.bell_operator(CHM, [row] * 3, eta), q.GHZ_BASIS)
        assert q.lowest_eig(op)[0] / eta == pytest.approx(1.5 - 1.5 * eta - eta ** 2 / 2, abs=1e-12)


def test_outcome_distribution_sums_to_one():
    rho = q.make_state("w", [0.9, 0.3], visibility=0.8)
    s = q.settings_from_angles(np.linspace(0.2, 3.0, 12), 3, 2)
    for st_ in itertools.product((1, 2), repeat=3):
        d = q.outcome_distribution(rho, s, 0.7, st_)
        assert len(d) == 27 and sum(d.values()) == pytest.approx(1.0, abs=1e-12)


def test_sampling_lost_events():
    rho = q.make_state("ghz", [math.pi / 4])
    s = [[Z, Z]] * 3
    table = q.sample_counts(rho, s, 0.0, 500, seed=1, setting_tuples=[(1, 1, 1)])
    assert table.counts[(1, 1, 1)] == {"uuu": 500}


def test_sampling_ghz_z_outcomes():
    rho = q.make_state("ghz", [math.pi / 4])
    n = 100_000
    table = q.sample_counts(rho, [[Z, Z]] * 3, 1.0, n, seed=7, setting_tuples=[(1, 1, 1)])
    row = table.counts[(1, 1, 1)]
    assert set(row) == {"+++", "---"}
    assert abs(row["+++"] - n / 2) <= 4 * math.sqrt(n)


def test_sampling_is_reproducible():
    rho = q.make_state("w", [0.6, 0.8])
    s = q.settings_from_angles(np.linspace(0.3, 2.5, 12), 3, 2)
    a = q.sample_counts(rho, s, 0.8, 2000, seed=3)
    b = q.sample_counts(rho, s, 0.8, 2000, seed=3)
    c = q.sample_counts(rho, s, 0.8, 2000, seed=4)
    assert a.dumps() == b.dumps() != c.dumps()
    assert all(sum(row.values()) == 2000 for row in a.counts.values())
    with pytest.raises(ValueError):
        q.sample_counts(rho, s, 0.8, 0, seed=3)


def test_correlation_tensor_sign():
    mermin = cat.to_correlation_form(cat.make_separation("geometric_tripartite_ch"))
    xy = [[X, q.BlochVector(0, 1, 0)]] * 3
    op = q.correlation_operator(mermin, xy)
    ghz = q.state_vector("ghz", [math.pi / 4])
    # E = 2 P(xor) - 1 = (-1)^(k+1) <product>, so + for three parties
    e111 = np.vdot(ghz, q.kron_all([q.SX] * 3) @ ghz).real
    e122 = np.vdot(ghz, q.kron_all([q.SX, q.SY, q.SY]) @ ghz).real
    assert np.vdot(ghz, op @ ghz).real == pytest.approx(3 * e122 - e111) == -4.0
    pair = cat.CorrelationInequality("p", cat.BIPARTITE, (((1, 1), 1),), -1)
    epr = np.array([0, 1, 1, 0]) / math.sqrt(2)
    zz = q.correlation_operator(pair, [[Z, Z]] * 2)
    assert np.vdot(epr, zz @ epr).real == pytest.approx(1.0)
