import itertools

import numpy as np
import pytest

from psqm import qsim, verify
from psqm.protocols import dj_protocol, geq_protocol, sum2_protocol
from psqm.verify import (
    _kary_nondegenerate,
    check_collision_bound,
    check_correctness,
    check_privacy,
    check_purity_bounds,
    check_weight_sums,
    communication_cost,
)

from _oracles import sum2_overlap_sq
from test_protocols import bitstrings, geq_masked_bits


def sum2_class_state(k: int, output) -> np.ndarray:
    """Uniform mixture of the basis states with matching parity tag,
    assembled directly from the measurement basis."""
    p = k if k % 2 == 0 else k + 1
    basis = qsim.phi_basis(p)
    members = []
    for y in range(1 << (p - 1)):
        parity = bin(y).count("1") & 1
        if parity == output[0]:
            members.append((y << 1) | output[1])
    mats = [
        np.outer(basis.vectors[i].amplitudes, basis.vectors[i].amplitudes.conj())
        for i in members
    ]
    return sum(mats) / len(mats)


@pytest.mark.parametrize("k", [2, 4])
def test_sum2_privacy_class_states(k):
    proto = sum2_protocol(k)
    report = check_privacy(proto)
    assert report.passed
    assert report.max_distance <= 1e-9
    assert report.cross_orthogonality <= 1e-9
    for output, cls in report.classes.items():
        expected = sum2_class_state(k, output)
        assert np.abs(cls.representative.matrix - expected).max() < 1e-10
        assert abs(cls.purity - 2.0 ** -(k - 2)) < 1e-9
        assert cls.size == 4 ** k // 4


def test_sum2_averaged_message_direct():
    proto = sum2_protocol(2)
    rho = proto.averaged_message(("01", "10"))
    expected = sum2_class_state(2, (1, 1))
    assert np.abs(rho.matrix - expected).max() < 1e-12


@pytest.mark.parametrize("k,l", [(2, 1), (3, 1)])
def test_geq_privacy_classes(k, l):
    proto = geq_protocol(k, l)
    report = check_privacy(proto)
    assert report.passed
    p = proto.cost()[0] // l
    sizes = {y: cls.size for y, cls in report.classes.items()}
    assert sizes[1] == (1 << (2 * l)) ** (k - 1)
    assert sizes[0] == (1 << (2 * l)) ** k - sizes[1]
    # accept class: uniform over 2^((p-2)l) orthogonal pure states
    accept_purity = report.classes[1].purity
    assert abs(accept_purity - 2.0 ** -((p - 2) * l)) < 1e-9


def test_correctness_reports():
    proto = sum2_protocol(2)
    rep = check_correctness(proto)
    assert rep.passed and abs(rep.min_mass - 1.0) < 1e-9
    assert rep.coverage == "exhaustive:16 x randomness-exhaustive:2"
    assert rep.cases == 16 * 2
    w = rep.witnesses(proto)
    assert set(w) == {"min_mass", "worst_input", "worst_randomness", "cases"}


def test_correctness_catches_a_wrong_reference():
    proto = sum2_protocol(2)
    rep = check_correctness(proto, reference=lambda inputs: (0, 0))
    assert not rep.passed
    assert rep.min_mass < 0.5


# ------------------------------------------------------------ dj classes


def test_dj_accept_class_distribution():
    proto = dj_protocol(4)
    rho = proto.averaged_message(("0101", "0101"))
    diag = np.diag(rho.matrix).real
    expected = np.zeros(16)
    for a in range(4):
        expected[a * 4 + a] = 0.25
    assert np.abs(diag - expected).sum() < 1e-9  # total variation x2
    assert np.abs(rho.matrix - np.diag(diag)).max() < 1e-12


def test_dj_reject_class_distribution():
    proto = dj_protocol(4)
    rho = proto.averaged_message(("0000", "0011"))
    diag = np.diag(rho.matrix).real
    expected = np.full((4, 4), 1.0 / 12)
    np.fill_diagonal(expected, 0.0)
    assert np.abs(diag - expected.reshape(-1)).sum() < 1e-9


def test_dj_privacy_report():
    proto = dj_protocol(4)
    report = check_privacy(proto)
    assert report.passed
    assert report.note is not None and "0.25" in report.note
    assert abs(report.classes[1].purity - 0.25) < 1e-9
    assert abs(report.classes[0].purity - 1.0 / 12) < 1e-9


# ------------------------------------------------------------ weight sums


def test_sum2_weight_sums_match_closed_form():
    proto = sum2_protocol(2)
    domain = proto.resource.randomness_domain
    for party in (0, 1):
        for r in domain:
            for rp in domain:
                states = {
                    x: proto.party_message_state(party, x, r).amplitudes
                    for x in bitstrings(2)
                }
                states_p = {
                    z: proto.party_message_state(party, z, rp).amplitudes
                    for z in bitstrings(2)
                }
                for x in bitstrings(2):
                    for z in bitstrings(2):
                        got = abs(np.vdot(states[x], states_p[z])) ** 2
                        want = sum2_overlap_sq(x, z, r, rp, party)
                        assert abs(got - want) < 1e-12


def geq_overlap_sq(x, z, r, rp, party, l):
    """Closed form for one single-qubit party: per block, X and Z
    exponents of the masked inputs must both agree."""
    blocks_r, mask_r = r
    blocks_rp, mask_rp = rp
    a = geq_masked_bits(x, mask_r)
    c = geq_masked_bits(z, mask_rp)
    out = 1.0
    for b in range(l):
        ex = int(a[2 * b]) ^ int(blocks_r[b][party])
        ez = int(c[2 * b]) ^ int(blocks_rp[b][party])
        out *= float(ex == ez and a[2 * b + 1] == c[2 * b + 1])
    return out


@pytest.mark.parametrize("l", [1, 2])
def test_geq_weight_sums_match_closed_form(l):
    proto = geq_protocol(2, l)
    domain = proto.resource.randomness_domain[:: 7 if l == 2 else 1]
    inputs = bitstrings(2 * l)
    for party in (0, 1):
        for r in domain:
            for rp in domain:
                for x in inputs[:: 3 if l == 2 else 1]:
                    sx = proto.party_message_state(party, x, r).amplitudes
                    for z in inputs[:: 3 if l == 2 else 1]:
                        sz = proto.party_message_state(party, z, rp).amplitudes
                        got = abs(np.vdot(sx, sz)) ** 2
                        want = geq_overlap_sq(x, z, r, rp, party, l)
                        assert abs(got - want) < 1e-12


@pytest.mark.parametrize("k", [2, 3, 4])
def test_sum2_weight_sum_check(k):
    proto = sum2_protocol(k)
    dom = len(proto.resource.randomness_domain)
    for party in range(k):
        rep = check_weight_sums(proto, party)
        assert rep.passed and not rep.skipped
        assert rep.pair_count == dom * dom
        assert rep.max_excluding_self <= 1.0 + 1e-9
        assert rep.max_including_self <= 1.0 + 1e-9


def test_weight_sum_party_range():
    with pytest.raises(ValueError):
        check_weight_sums(sum2_protocol(2), 2)


def test_dj_weight_sums_skipped_with_witnesses():
    proto = dj_protocol(4)
    rep = check_weight_sums(proto, 0)
    assert rep.skipped and rep.passed
    assert "partial" in rep.reason
    # the purified pre-measurement overlaps genuinely break the bound:
    # sum_z (1 - 2 d(x,z)/n)^2 = 3 excluding self at n = 4
    assert abs(rep.max_excluding_self - 3.0) < 1e-9
    assert rep.pair_count == 1


# ------------------------------------------------- purity and collisions


@pytest.mark.parametrize("k", [2, 3, 4])
def test_sum2_purity_floor_is_exact(k):
    proto = sum2_protocol(k)
    rep = check_purity_bounds(proto)
    assert rep.passed
    # averaging over everything hits the maximally mixed state
    assert abs(rep.purity - 1.0 / rep.dim) < 1e-12


def test_geq_purity_bounds():
    rep = check_purity_bounds(geq_protocol(2, 1))
    assert rep.passed
    assert 1.0 / rep.dim - 1e-10 <= rep.purity <= 1.0 + 1e-10


def test_purity_with_supplied_mu():
    proto = sum2_protocol(2)
    inputs = list(proto.input_domain())
    mu = {x: 0.0 for x in inputs}
    mu[("00", "00")] = 0.5
    mu[("01", "11")] = 0.5
    rep = check_purity_bounds(proto, mu=mu)
    assert rep.coverage == "supplied:16"
    assert rep.passed
    with pytest.raises(ValueError):
        check_purity_bounds(proto, mu={("00", "00"): 0.7})
    with pytest.raises(ValueError):
        check_purity_bounds(
            dj_protocol(2), mu={("00", "11"): 1.0}
        )  # promise violation


@pytest.mark.parametrize(
    "factory",
    [
        lambda: sum2_protocol(2),
        lambda: sum2_protocol(3),
        lambda: geq_protocol(2, 1),
    ],
)
def test_collision_bound_cross_terms_literal(factory):
    proto = factory()
    rep = check_collision_bound(proto)
    assert rep.passed and not rep.skipped
    inputs = list(proto.input_domain())
    w = 1.0 / len(inputs)
    rhos = [proto.averaged_message(x).matrix for x in inputs]
    literal = 0.0
    for i, a in enumerate(rhos):
        for j, b in enumerate(rhos):
            if i != j:
                literal += w * w * float(np.trace(a @ b).real)
    assert abs(rep.cross_terms - literal) < 1e-9
    assert abs(rep.rhs - literal / rep.beta) < 1e-9
    assert rep.lhs <= rep.rhs + 1e-9


def test_collision_bound_sum2_k2_is_tight():
    rep = check_collision_bound(sum2_protocol(2))
    assert abs(rep.lhs - 0.25) < 1e-12
    assert abs(rep.rhs - 0.25) < 1e-9
    assert abs(rep.beta - 0.75) < 1e-12


def test_collision_bound_beta_matches_class_masses():
    proto = sum2_protocol(3)
    rep = check_collision_bound(proto)
    inputs = list(proto.input_domain())
    sizes: dict = {}
    for x in inputs:
        sizes[proto.reference(x)] = sizes.get(proto.reference(x), 0) + 1
    want = min(1.0 - 1.0 / s for s in sizes.values())
    assert abs(rep.beta - want) < 1e-12


def test_collision_bound_skipped_for_dj():
    rep = check_collision_bound(dj_protocol(2))
    assert rep.skipped and rep.passed
    assert "partial" in rep.reason


# ------------------------------------------------------- sweeps and misc


def test_kary_nondegeneracy():
    assert _kary_nondegenerate(sum2_protocol(3)) is True
    assert _kary_nondegenerate(geq_protocol(2, 1)) is True
    assert _kary_nondegenerate(dj_protocol(2)) is False


def test_sampled_sweep_requires_seed_and_is_deterministic():
    proto = dj_protocol(8)
    with pytest.raises(ValueError):
        check_correctness(proto, budget=500)
    rep1 = check_correctness(proto, budget=500, seed=3)
    rep2 = check_correctness(proto, budget=500, seed=3)
    assert rep1.coverage == rep2.coverage
    assert rep1.coverage.startswith("sampled:")
    assert rep1.min_mass == rep2.min_mass
    assert rep1.passed
    count = int(rep1.coverage.split(":")[1].split(" ")[0])
    assert count >= 2 * 64  # both classes filled


def test_exhaustive_sweep_below_budget():
    rep = check_correctness(dj_protocol(4))
    assert rep.coverage.startswith("exhaustive:112")
    assert rep.passed


def test_communication_cost_passthrough():
    assert communication_cost(sum2_protocol(5)) == (6, "qubits")
    assert communication_cost(dj_protocol(4)) == (4, "bits")
    assert verify.DEFAULT_TOL == 1e-9
