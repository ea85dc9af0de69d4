"""Machine checks for correctness, privacy and information bounds.

Every check enumerates the protocol's randomness exhaustively.  Input
sweeps are exhaustive while the domain fits the budget (default 2^16);
larger domains fall back to a seeded stratified sample with at least 64
inputs per output class, and reports carry a coverage label so partial
sweeps are never silent.

Two checks mirror inequalities whose hypotheses (a total, non-degenerate
reference function) do not hold for every protocol: the per-party weight
sums and the collision bound on averaged purity.  When the hypothesis
fails (dj's promise reference is partial) the check is vacuous and is
reported as skipped, with informational witnesses still attached.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

import numpy as np

from . import bounds, qsim
from .protocols import PROMISE_VIOLATION, ProtocolInstance

DEFAULT_TOL = 1e-9
PURITY_TOL = 1e-10
DEFAULT_BUDGET = 1 << 16
_SAMPLES_PER_CLASS = 64
_NONDEGENERACY_ENUM_CAP = 1 << 20


def _sweep(protocol: ProtocolInstance, budget: int, seed):
    """Input tuples to examine plus a coverage label."""
    size = protocol.domain_size()
    if size <= budget:
        return list(protocol.input_domain()), f"exhaustive:{size}"
    if seed is None:
        raise ValueError("seed required once the input sweep is sampled")
    rng = random.Random(seed)
    chosen = []
    seen = set()
    per_class = {y: 0 for y in protocol.output_domain}
    attempts = 0
    cap = 200_000
    while attempts < cap and any(c < _SAMPLES_PER_CLASS for c in per_class.values()):
        attempts += 1
        x = protocol.sample_input(rng)
        if x in seen:
            continue
        y = protocol.reference(x)
        if y is PROMISE_VIOLATION:
            continue
        seen.add(x)
        chosen.append(x)
        per_class[y] += 1
    return chosen, f"sampled:{len(chosen)}"


def _distribution(protocol, mu, budget, seed):
    """(inputs, weights, coverage); uniform over the sweep when mu is None."""
    if mu is not None:
        inputs = list(mu.keys())
        weights = np.array([mu[x] for x in inputs], dtype=float)
        if weights.min() < 0 or abs(weights.sum() - 1.0) > 1e-12:
            raise ValueError("mu must be a probability distribution")
        for x in inputs:
            if protocol.reference(x) is PROMISE_VIOLATION:
                raise ValueError(f"mu puts weight on promise-violating input {x}")
        return inputs, weights, f"supplied:{len(inputs)}"
    inputs, coverage = _sweep(protocol, budget, seed)
    weights = np.full(len(inputs), 1.0 / len(inputs))
    return inputs, weights, coverage


def _kary_nondegenerate(protocol: ProtocolInstance):
    """Every pair of one party's inputs must be distinguished by some
    assignment of the other parties, with both outputs defined.  Returns
    True/False, or None when the enumeration would exceed the cap."""
    if not protocol.reference_total:
        return False
    k = protocol.party_count
    for party in range(k):
        own = protocol.party_inputs(party)
        other_domains = [
            protocol.party_inputs(j) for j in range(k) if j != party
        ]
        combos = 1
        for d in other_domains:
            combos *= len(d)
        if combos * len(own) ** 2 > _NONDEGENERACY_ENUM_CAP:
            return None
        others = list(itertools.product(*other_domains))
        for a, b in itertools.combinations(own, 2):
            hit = False
            for rest in others:
                full_a = rest[:party] + (a,) + rest[party:]
                full_b = rest[:party] + (b,) + rest[party:]
                ya, yb = protocol.reference(full_a), protocol.reference(full_b)
                if ya is PROMISE_VIOLATION or yb is PROMISE_VIOLATION:
                    continue
                if ya != yb:
                    hit = True
                    break
            if not hit:
                return False
    return True


@dataclass
class CorrectnessReport:
    passed: bool
    min_mass: float
    worst_input: tuple | None
    worst_randomness: object
    cases: int
    coverage: str

    def witnesses(self, protocol=None):
        fmt_r = protocol.format_randomness if protocol else str
        return {
            "min_mass": self.min_mass,
            "worst_input": ",".join(self.worst_input) if self.worst_input else None,
            "worst_randomness": fmt_r(self.worst_randomness)
            if self.worst_randomness is not None
            else None,
            "cases": self.cases,
        }


def check_correctness(
    protocol: ProtocolInstance,
    reference=None,
    tol: float = DEFAULT_TOL,
    budget: int = DEFAULT_BUDGET,
    seed=None,
) -> CorrectnessReport:
    """Referee output mass on the reference value, worst case over the
    sweep and over every randomness value."""
    reference = reference or protocol.reference
    inputs, coverage = _sweep(protocol, budget, seed)
    domain = protocol.resource.randomness_domain
    min_mass, worst_x, worst_r = float("inf"), None, None
    cases = 0
    for x in inputs:
        target = reference(x)
        if target is PROMISE_VIOLATION:
            continue
        for r in domain:
            mass = protocol.output_distribution(x, r).get(target, 0.0)
            cases += 1
            if mass < min_mass:
                min_mass, worst_x, worst_r = mass, x, r
    if not cases:
        raise ValueError("nothing to check: empty sweep")
    return CorrectnessReport(
        passed=min_mass >= 1.0 - tol,
        min_mass=float(min_mass),
        worst_input=worst_x,
        worst_randomness=worst_r,
        cases=cases,
        coverage=f"{coverage} x randomness-exhaustive:{len(domain)}",
    )


@dataclass
class PrivacyClass:
    representative_input: tuple
    representative: qsim.DensityMatrix
    size: int
    max_distance: float
    purity: float


@dataclass
class PrivacyReport:
    passed: bool
    classes: dict
    max_distance: float
    cross_orthogonality: float
    coverage: str
    note: str | None = None

    def witnesses(self, protocol=None):
        fmt = protocol.format_output if protocol else str
        out = {
            "max_distance": self.max_distance,
            "cross_orthogonality": self.cross_orthogonality,
            "classes": {
                fmt(y): {
                    "size": c.size,
                    "max_distance": c.max_distance,
                    "purity": c.purity,
                    "representative_input": ",".join(c.representative_input),
                }
                for y, c in self.classes.items()
            },
        }
        if self.note:
            out["note"] = self.note
        return out


def check_privacy(
    protocol: ProtocolInstance,
    tol: float = DEFAULT_TOL,
    budget: int = DEFAULT_BUDGET,
    seed=None,
) -> PrivacyReport:
    """Randomness-averaged message states must agree, per output class.

    Each input's averaged message is compared to its class
    representative in Frobenius distance; representatives of different
    classes are additionally tested for orthogonal supports.
    """
    inputs, coverage = _sweep(protocol, budget, seed)
    classes: dict = {}
    max_distance = 0.0
    for x in inputs:
        y = protocol.reference(x)
        if y is PROMISE_VIOLATION:
            continue
        rho = protocol.averaged_message(x)
        if y not in classes:
            classes[y] = PrivacyClass(
                representative_input=tuple(x),
                representative=rho,
                size=1,
                max_distance=0.0,
                purity=qsim.purity(rho),
            )
            continue
        cls = classes[y]
        cls.size += 1
        dist = qsim.matrix_distance(cls.representative, rho)
        cls.max_distance = max(cls.max_distance, dist)
        max_distance = max(max_distance, dist)
    if not classes:
        raise ValueError("nothing to check: empty sweep")
    cross = 0.0
    for a, b in itertools.combinations(sorted(classes, key=repr), 2):
        prod = classes[a].representative.matrix @ classes[b].representative.matrix
        cross = max(cross, float(np.linalg.norm(prod)))
    note = None
    if protocol.name == "dj" and 0 in classes:
        diag = np.diag(classes[0].representative.matrix).real
        n = 1 << protocol.m
        zero_mass = float(diag.reshape(n, n)[0, :].sum())
        note = (
            "reject-class message pairs are uniform over ordered distinct "
            f"values; the all-zero message carries mass {zero_mass:.6g}"
        )
    return PrivacyReport(
        passed=max_distance <= tol,
        classes=classes,
        max_distance=max_distance,
        cross_orthogonality=cross,
        coverage=coverage,
        note=note,
    )


@dataclass
class WeightSumReport:
    passed: bool
    party: int
    max_excluding_self: float
    max_including_self: float
    pair_count: int
    skipped: bool = False
    reason: str | None = None

    def witnesses(self, protocol=None):
        out = {
            "party": self.party,
            "max_excluding_self": self.max_excluding_self,
            "max_including_self": self.max_including_self,
            "randomness_pairs": self.pair_count,
        }
        if self.skipped:
            out["skipped"] = self.reason
        return out


def check_weight_sums(
    protocol: ProtocolInstance, party: int, tol: float = DEFAULT_TOL
) -> WeightSumReport:
    """Summed squared overlaps of one party's message states.

    For every randomness pair (r, r') and every input x of the party,
    sums |<psi(x;r)|psi(z;r')>|^2 over z != x and over all z; both sums
    must stay at most 1.  The bound is an implication of a total,
    non-degenerate reference, so when that hypothesis fails the check is
    vacuous: it is reported as skipped with one informational pair.
    """
    if not 0 <= party < protocol.party_count:
        raise ValueError(f"no party {party}")
    hypothesis = _kary_nondegenerate(protocol)
    domain = protocol.resource.randomness_domain
    own = protocol.party_inputs(party)

    def gram_maxima(r, rp, states):
        g = states[r].conj() @ states[rp].T
        w = np.abs(g) ** 2
        incl = w.sum(axis=1)
        excl = incl - np.diag(w)
        return float(excl.max()), float(incl.max())

    if hypothesis is not True:
        reason = (
            "reference is partial or degenerate; bound is vacuous"
            if hypothesis is False
            else "non-degeneracy enumeration exceeds the cap"
        )
        r0 = domain[0]
        states = {
            r0: np.array(
                [protocol.party_message_state(party, x, r0).amplitudes for x in own]
            )
        }
        excl, incl = gram_maxima(r0, r0, states)
        return WeightSumReport(
            passed=True,
            party=party,
            max_excluding_self=excl,
            max_including_self=incl,
            pair_count=1,
            skipped=True,
            reason=reason,
        )

    states = {
        r: np.array(
            [protocol.party_message_state(party, x, r).amplitudes for x in own]
        )
        for r in domain
    }
    max_excl = max_incl = 0.0
    pairs = 0
    for r in domain:
        for rp in domain:
            excl, incl = gram_maxima(r, rp, states)
            max_excl = max(max_excl, excl)
            max_incl = max(max_incl, incl)
            pairs += 1
    return WeightSumReport(
        passed=max_excl <= 1.0 + tol and max_incl <= 1.0 + tol,
        party=party,
        max_excluding_self=max_excl,
        max_including_self=max_incl,
        pair_count=pairs,
    )


@dataclass
class PurityBoundsReport:
    passed: bool
    purity: float
    dim: int
    coverage: str

    def witnesses(self, protocol=None):
        return {"purity": self.purity, "dim": self.dim, "floor": 1.0 / self.dim}


def check_purity_bounds(
    protocol: ProtocolInstance,
    mu=None,
    tol: float = PURITY_TOL,
    budget: int = DEFAULT_BUDGET,
    seed=None,
) -> PurityBoundsReport:
    """1/dim <= tr(rho^2) <= 1 for the mu-averaged message state."""
    inputs, weights, coverage = _distribution(protocol, mu, budget, seed)
    rho_bar = None
    for x, w in zip(inputs, weights):
        mat = protocol.averaged_message(x).matrix
        rho_bar = w * mat if rho_bar is None else rho_bar + w * mat
    avg = qsim.DensityMatrix(rho_bar)
    p = qsim.purity(avg)
    return PurityBoundsReport(
        passed=(1.0 / avg.dim - tol) <= p <= 1.0 + tol,
        purity=p,
        dim=avg.dim,
        coverage=coverage,
    )


@dataclass
class CollisionBoundReport:
    passed: bool
    lhs: float
    rhs: float
    beta: float
    cross_terms: float
    coverage: str
    skipped: bool = False
    reason: str | None = None

    def witnesses(self, protocol=None):
        out = {
            "lhs": self.lhs,
            "rhs": self.rhs,
            "beta": self.beta,
            "cross_terms": self.cross_terms,
        }
        if self.skipped:
            out["skipped"] = self.reason
        return out


def check_collision_bound(
    protocol: ProtocolInstance,
    mu=None,
    tol: float = DEFAULT_TOL,
    budget: int = DEFAULT_BUDGET,
    seed=None,
) -> CollisionBoundReport:
    """Averaged purity against distinct-input cross terms.

    Checks tr(rho_bar^2) <= beta^-1 * sum over distinct input pairs of
    mu mu' tr(rho rho'), with beta the worst-class probability that two
    independent mu-draws in an output class differ.  The cross-term sum
    is evaluated through the exact identity
    tr(rho_bar^2) - sum_x mu(x)^2 tr(rho_x^2).  Requires a total,
    non-degenerate reference and beta > 0; otherwise skipped as vacuous.
    """
    hypothesis = _kary_nondegenerate(protocol)
    if hypothesis is not True:
        reason = (
            "reference is partial or degenerate; bound is vacuous"
            if hypothesis is False
            else "non-degeneracy enumeration exceeds the cap"
        )
        return CollisionBoundReport(
            passed=True, lhs=0.0, rhs=0.0, beta=0.0, cross_terms=0.0,
            coverage="none", skipped=True, reason=reason,
        )
    inputs, weights, coverage = _distribution(protocol, mu, budget, seed)
    masses_by_class: dict = {}
    rho_bar = None
    self_terms = 0.0
    for x, w in zip(inputs, weights):
        y = protocol.reference(x)
        masses_by_class.setdefault(y, []).append(float(w))
        rho = protocol.averaged_message(x)
        rho_bar = w * rho.matrix if rho_bar is None else rho_bar + w * rho.matrix
        self_terms += float(w) ** 2 * qsim.purity(rho)
    beta = bounds.collision_beta(masses_by_class)
    lhs = float(np.vdot(rho_bar, rho_bar).real)
    cross = lhs - self_terms
    if beta <= 0.0:
        return CollisionBoundReport(
            passed=True, lhs=lhs, rhs=0.0, beta=beta, cross_terms=cross,
            coverage=coverage, skipped=True,
            reason="beta is zero; inequality is vacuous",
        )
    rhs = cross / beta
    return CollisionBoundReport(
        passed=lhs <= rhs + tol,
        lhs=lhs,
        rhs=rhs,
        beta=beta,
        cross_terms=cross,
        coverage=coverage,
    )


def communication_cost(protocol: ProtocolInstance) -> tuple[int, str]:
    """Total message size with its unit (qubits or classical bits)."""
    return protocol.cost()
