"""Concrete private simultaneous-message protocols.

Three referee-style protocols are provided, each with exhaustive
randomness domains and deterministic input enumeration:

* ``sum2_protocol(k)``: k parties, 2-bit inputs, one shared GHZ state
  masked by a parity-constrained random string; the referee measures in
  the GHZ-type basis and reads off the two coordinate-wise input sums.
* ``geq_protocol(k, l)``: 2l-bit inputs; l GHZ blocks plus a nonzero
  field mask decide whether all 2l coordinate sums vanish.
* ``dj_protocol(n)``: two parties with n-bit inputs promised equal
  or at Hamming distance n/2; EPR-correlated measurements are masked
  into classical messages and executed in distribution (no sampling).

Party inputs, randomness components and classical messages are bit
strings.  Odd party counts for sum2/geq are handled by an internal
virtual party with the all-zero input whose qubits are sent by the last
real party.  Outputs: sum2 yields the pair (sum of first bits, sum of
second bits); geq and dj yield 1 for "all sums zero" / "equal" and 0
otherwise.  Inputs off the dj promise map to PROMISE_VIOLATION, a
distinguished non-output.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import gf2m, qsim


class _PromiseViolation:
    def __repr__(self):
        return "promise-violation"


PROMISE_VIOLATION = _PromiseViolation()

_MAX_PROTOCOL_QUBITS = 10  # density matrices over the full message space stay desk-scale
_MAX_DJ_QUBITS = 8


def _bitstrings(length: int):
    return [format(v, f"0{length}b") for v in range(1 << length)]


def _parity(bits: str) -> int:
    return bits.count("1") & 1


def _xor_strings(strings) -> str:
    out = 0
    length = None
    for s in strings:
        length = len(s)
        out ^= int(s, 2)
    return format(out, f"0{length}b")


@dataclass(frozen=True)
class SharedResource:
    """Pre-shared randomness domain plus an optional entangled state."""

    randomness_domain: tuple
    entangled_state: qsim.StateVector | None = None
    qubit_owner: tuple[int, ...] = ()

    def __post_init__(self):
        if not self.randomness_domain:
            raise ValueError("randomness domain is empty")
        if self.entangled_state is not None:
            if len(self.qubit_owner) != self.entangled_state.qubit_count:
                raise ValueError("every qubit needs exactly one owning party")


@dataclass
class TranscriptRecord:
    """One protocol execution under a fixed randomness value."""

    inputs: tuple[str, ...]
    randomness: object
    outcome_distribution: dict
    output_distribution: dict
    cost: tuple[int, str]
    message_state: qsim.StateVector | None = None
    message_distribution: dict | None = None


class ProtocolInstance:
    """Common interface: enumeration, execution, averaged messages."""

    name: str
    party_count: int
    input_lengths: tuple[int, ...]
    output_domain: tuple
    resource: SharedResource
    message_kind: str  # "qubits" or "bits"
    reference_total: bool

    def cost(self) -> tuple[int, str]:
        raise NotImplementedError

    def reference(self, inputs):
        raise NotImplementedError

    def input_domain(self):
        """Deterministic enumeration of the full input domain."""
        for combo in itertools.product(*(_bitstrings(n) for n in self.input_lengths)):
            yield combo

    def domain_size(self) -> int:
        size = 1
        for n in self.input_lengths:
            size *= 1 << n
        return size

    def sample_input(self, rng):
        return tuple(
            "".join(str(rng.getrandbits(1)) for _ in range(n)) for n in self.input_lengths
        )

    def party_inputs(self, party: int):
        return _bitstrings(self.input_lengths[party])

    def local_operations(self, party: int, own_input: str, randomness) -> tuple:
        raise NotImplementedError

    def run(self, inputs, randomness) -> TranscriptRecord:
        raise NotImplementedError

    def output_distribution(self, inputs, randomness) -> dict:
        return self.run(inputs, randomness).output_distribution

    def averaged_message(self, inputs) -> qsim.DensityMatrix:
        raise NotImplementedError

    def party_message_state(self, party: int, own_input: str, randomness) -> qsim.StateVector:
        raise NotImplementedError

    def format_randomness(self, randomness) -> str:
        return str(randomness)

    def format_output(self, output) -> str:
        return str(output)

    def _check_inputs(self, inputs):
        if len(inputs) != self.party_count:
            raise ValueError(f"expected {self.party_count} inputs, got {len(inputs)}")
        for x, n in zip(inputs, self.input_lengths):
            if len(x) != n or set(x) - {"0", "1"}:
                raise ValueError(f"bad {n}-bit input {x!r}")


class _GhzMaskProtocol(ProtocolInstance):
    """Shared skeleton for the GHZ-based protocols (sum2 and geq).

    Internally there are ``_parties`` players on ``blocks`` GHZ states of
    ``_parties`` qubits each, laid out block-major: qubit b*_parties + j
    is block b's share of internal party j.  A virtual internal party
    (all-zero input) absorbs odd real party counts; its qubits belong to
    the last real party.
    """

    blocks: int
    _parties: int  # internal party count, always even

    message_kind = "qubits"

    def _setup(self, k: int, blocks: int):
        if k < 2:
            raise ValueError("need at least two parties")
        self.party_count = k
        self._parties = k if k % 2 == 0 else k + 1
        self.blocks = blocks
        qubits = self._parties * blocks
        if qubits > _MAX_PROTOCOL_QUBITS:
            raise ValueError(f"{qubits} message qubits exceeds the {_MAX_PROTOCOL_QUBITS} cap")
        block_state = qsim.ghz(self._parties)
        amps = block_state.amplitudes
        for _ in range(blocks - 1):
            amps = np.kron(amps, block_state.amplitudes)
        entangled = qsim.StateVector(amps)
        owner = tuple(
            min(j, k - 1) for _ in range(blocks) for j in range(self._parties)
        )
        self._block_basis = qsim.phi_basis(self._parties)
        self._basis = self._joint_basis()
        return entangled, owner

    def _joint_basis(self) -> qsim.MeasurementBasis:
        if self.blocks == 1:
            return self._block_basis
        vectors = []
        per_block = [v.amplitudes for v in self._block_basis.vectors]
        for combo in itertools.product(per_block, repeat=self.blocks):
            amps = combo[0]
            for nxt in combo[1:]:
                amps = np.kron(amps, nxt)
            vectors.append(qsim.StateVector(amps))
        return qsim.MeasurementBasis(vectors)

    def _internal_inputs(self, inputs) -> tuple[str, ...]:
        if self._parties == self.party_count:
            return tuple(inputs)
        return tuple(inputs) + ("0" * self.input_lengths[0],)

    def _internal_ops(self, internal_party: int, own_input: str, randomness) -> tuple:
        """(gate, qubit) list for one internal party, Z's before X's."""
        raise NotImplementedError

    def _decode(self, outcome_index: int):
        """Referee outcome index -> protocol output."""
        raise NotImplementedError

    def _owned_internal(self, party: int) -> tuple[int, ...]:
        last = self._parties != self.party_count and party == self.party_count - 1
        return (party, self._parties - 1) if last else (party,)

    def local_operations(self, party, own_input, randomness):
        ops = []
        for internal in self._owned_internal(party):
            x = own_input if internal < self.party_count else "0" * self.input_lengths[0]
            ops.extend(self._internal_ops(internal, x, randomness))
        return tuple(ops)

    def message_state(self, inputs, randomness) -> qsim.StateVector:
        self._check_inputs(inputs)
        state = self.resource.entangled_state
        for internal, x in enumerate(self._internal_inputs(inputs)):
            for gate, qubit in self._internal_ops(internal, x, randomness):
                state = qsim.apply_gate(state, gate, qubit)
        return state

    def run(self, inputs, randomness) -> TranscriptRecord:
        state = self.message_state(inputs, randomness)
        probs = qsim.measure(state, self._basis)
        qubits = self._parties * self.blocks
        outcome_dist = {}
        output_dist = {}
        for idx, prob in enumerate(probs):
            if prob < 1e-15:
                continue
            outcome_dist[format(idx, f"0{qubits}b")] = float(prob)
            out = self._decode(idx)
            output_dist[out] = output_dist.get(out, 0.0) + float(prob)
        return TranscriptRecord(
            inputs=tuple(inputs),
            randomness=randomness,
            outcome_distribution=outcome_dist,
            output_distribution=output_dist,
            cost=self.cost(),
            message_state=state,
        )

    def averaged_message(self, inputs) -> qsim.DensityMatrix:
        domain = self.resource.randomness_domain
        states = np.array(
            [self.message_state(inputs, r).amplitudes for r in domain]
        )
        w = np.full(len(domain), 1.0 / len(domain))
        return qsim.DensityMatrix((states.T * w) @ states.conj())

    def party_message_state(self, party, own_input, randomness) -> qsim.StateVector:
        """Local message with one reference qubit per block holding the
        GHZ branch: per block, (|0>v0 + |1>v1)/sqrt(2) with v0/v1 the
        party's operations applied to the all-zero / all-one share."""
        internals = self._owned_internal(party)
        ops = self.local_operations(party, own_input, randomness)
        amps = None
        for b in range(self.blocks):
            qubits = [b * self._parties + j for j in internals]
            offset = {q: i for i, q in enumerate(qubits)}
            block_ops = [(g, offset[q]) for g, q in ops if q in qubits]
            nq = len(qubits)
            branches = []
            for fill in (0, (1 << nq) - 1):
                vec = np.zeros(1 << nq, dtype=complex)
                vec[fill] = 1.0
                state = qsim.StateVector(vec)
                for gate, q in block_ops:
                    state = qsim.apply_gate(state, gate, q)
                branches.append(state.amplitudes)
            block = np.concatenate(branches) / np.sqrt(2)
            amps = block if amps is None else np.kron(amps, block)
        return qsim.StateVector(amps)


class Sum2Protocol(_GhzMaskProtocol):
    """Coordinate-wise mod-2 sums of k two-bit inputs."""

    name = "sum2"
    reference_total = True

    def __init__(self, k: int):
        self.input_lengths = tuple([2] * k)
        entangled, owner = self._setup(k, blocks=1)
        domain = tuple(s for s in _bitstrings(self._parties) if _parity(s) == 0)
        self.resource = SharedResource(domain, entangled, owner)
        self.output_domain = ((0, 0), (0, 1), (1, 0), (1, 1))

    def cost(self):
        return (self._parties, "qubits")

    def reference(self, inputs):
        self._check_inputs(inputs)
        return sum2_reference(inputs)

    def _internal_ops(self, internal_party, own_input, randomness):
        ops = []
        if own_input[1] == "1":
            ops.append(("Z", internal_party))
        if int(own_input[0]) ^ int(randomness[internal_party]):
            ops.append(("X", internal_party))
        return tuple(ops)

    def _decode(self, outcome_index):
        bits = format(outcome_index, f"0{self._parties}b")
        return (_parity(bits[:-1]), int(bits[-1]))

    def format_output(self, output):
        return f"{output[0]}{output[1]}"


class GeqProtocol(_GhzMaskProtocol):
    """Whether all 2l coordinate-wise sums of k inputs vanish."""

    name = "geq"
    reference_total = True

    def __init__(self, k: int, l: int):
        if l < 1:
            raise ValueError("need at least one block")
        self.l = l
        self.input_lengths = tuple([2 * l] * k)
        entangled, owner = self._setup(k, blocks=l)
        self.field = gf2m.find_irreducible(2 * l)
        block_domain = [s for s in _bitstrings(self._parties) if _parity(s) == 0]
        masks = [s for s in _bitstrings(2 * l) if s != "0" * 2 * l]
        domain = tuple(
            (blocks, mask)
            for blocks in itertools.product(block_domain, repeat=l)
            for mask in masks
        )
        self.resource = SharedResource(domain, entangled, owner)
        self.output_domain = (0, 1)

    def cost(self):
        return (self._parties * self.l, "qubits")

    def reference(self, inputs):
        self._check_inputs(inputs)
        return geq_reference(inputs)

    def masked_input(self, own_input: str, mask: str) -> str:
        """Field product of the nonzero mask with one party's input."""
        prod = gf2m.mul(
            gf2m.from_bits(mask, self.field), gf2m.from_bits(own_input, self.field)
        )
        return gf2m.to_bits(prod)

    def _internal_ops(self, internal_party, own_input, randomness):
        block_strings, mask = randomness
        a = self.masked_input(own_input, mask)
        ops = []
        for b in range(self.l):
            if a[2 * b + 1] == "1":
                ops.append(("Z", b * self._parties + internal_party))
        for b in range(self.l):
            if int(a[2 * b]) ^ int(block_strings[b][internal_party]):
                ops.append(("X", b * self._parties + internal_party))
        return tuple(ops)

    def _decode(self, outcome_index):
        p = self._parties
        bits = format(outcome_index, f"0{p * self.blocks}b")
        for b in range(self.blocks):
            chunk = bits[b * p : (b + 1) * p]
            if _parity(chunk[:-1]) != 0 or chunk[-1] != "0":
                return 0
        return 1

    def format_randomness(self, randomness):
        block_strings, mask = randomness
        return f"{'|'.join(block_strings)};{mask}"


class DJProtocol(ProtocolInstance):
    """Equality-versus-half-distance on n-bit inputs, n a power of two.

    The shared state (1/sqrt(n)) sum_i |i>|i> is phased by both inputs,
    Hadamard-transformed and measured; the two m-bit outcomes are masked
    into classical messages p(r)p(outcome) + p(r') which agree exactly
    when the outcomes agree.  Execution is in distribution: every
    transcript carries the exact joint law of the message pair.
    """

    name = "dj"
    message_kind = "bits"
    reference_total = False

    def __init__(self, n: int):
        if n < 2 or n & (n - 1):
            raise ValueError("input length must be a power of two, at least 2")
        m = n.bit_length() - 1
        if 2 * m > _MAX_DJ_QUBITS:
            raise ValueError(f"{2 * m} qubits exceeds the {_MAX_DJ_QUBITS} cap")
        self.n = n
        self.m = m
        self.party_count = 2
        self.input_lengths = (n, n)
        self.output_domain = (0, 1)
        self.field = gf2m.find_irreducible(m)
        amps = np.zeros(1 << (2 * m), dtype=complex)
        for i in range(n):
            amps[(i << m) | i] = 1 / np.sqrt(n)
        entangled = qsim.StateVector(amps)
        owner = tuple([0] * m + [1] * m)
        domain = tuple(
            (r, rp)
            for r in _bitstrings(m)
            if r != "0" * m
            for rp in _bitstrings(m)
        )
        self.resource = SharedResource(domain, entangled, owner)
        self._pkl_cache: dict[str, np.ndarray] = {}
        self._perm_cache: dict[tuple, np.ndarray] = {}
        self._avg_cache: dict[str, np.ndarray] = {}

    def cost(self):
        return (2 * self.m, "bits")

    def reference(self, inputs):
        self._check_inputs(inputs)
        return dj_reference(inputs[0], inputs[1])

    def input_domain(self):
        """Promise inputs only: equal pairs, then half-distance pairs."""
        n = self.n
        half_masks = [
            s for s in _bitstrings(n) if s.count("1") == n // 2
        ]
        for x in _bitstrings(n):
            yield (x, x)
        for x in _bitstrings(n):
            xv = int(x, 2)
            for mask in half_masks:
                yield (x, format(xv ^ int(mask, 2), f"0{n}b"))

    def domain_size(self):
        from math import comb

        return (1 << self.n) * (1 + comb(self.n, self.n // 2))

    def sample_input(self, rng):
        n = self.n
        x = "".join(str(rng.getrandbits(1)) for _ in range(n))
        if rng.getrandbits(1):
            return (x, x)
        flips = rng.sample(range(n), n // 2)
        y = "".join(
            str(int(ch) ^ 1) if i in flips else ch for i, ch in enumerate(x)
        )
        return (x, y)

    def _phase_signs(self, x: str, y: str) -> np.ndarray:
        m = self.m
        signs = np.ones(1 << (2 * m), dtype=int)
        for idx in range(1 << (2 * m)):
            i_a, i_b = idx >> m, idx & ((1 << m) - 1)
            if (int(x[i_a]) + int(y[i_b])) & 1:
                signs[idx] = -1
        return signs

    def joint_outcome_distribution(self, inputs) -> np.ndarray:
        """Exact law of the two measured m-bit outcomes, an n-by-n matrix."""
        self._check_inputs(inputs)
        x, y = inputs
        w = _xor_strings([x, y])
        if w not in self._pkl_cache:
            state = qsim.apply_phase_oracle(
                self.resource.entangled_state, self._phase_signs(x, y)
            )
            for q in range(2 * self.m):
                state = qsim.apply_gate(state, "H", q)
            probs = np.abs(state.amplitudes) ** 2
            self._pkl_cache[w] = probs.reshape(self.n, self.n)
        return self._pkl_cache[w]

    def mask_message(self, outcome: str, randomness) -> str:
        """Classical message p(r)p(outcome) + p(r') for one party."""
        r, rp = randomness
        f = self.field
        masked = gf2m.add(
            gf2m.mul(gf2m.from_bits(r, f), gf2m.from_bits(outcome, f)),
            gf2m.from_bits(rp, f),
        )
        return gf2m.to_bits(masked)

    def _mask_perm(self, randomness) -> np.ndarray:
        if randomness not in self._perm_cache:
            m = self.m
            perm = np.array(
                [
                    gf2m.from_bits(
                        self.mask_message(format(v, f"0{m}b"), randomness), self.field
                    ).value
                    for v in range(self.n)
                ]
            )
            self._perm_cache[randomness] = perm
        return self._perm_cache[randomness]

    def local_operations(self, party, own_input, randomness):
        signs = tuple(
            -1 if own_input[i] == "1" else 1 for i in range(self.n)
        )
        m = self.m
        mask_table = tuple(
            self.mask_message(format(v, f"0{m}b"), randomness) for v in range(self.n)
        )
        return (("phase", signs), ("hadamard", m), ("mask", mask_table))

    def _message_matrix(self, inputs, randomness) -> np.ndarray:
        pkl = self.joint_outcome_distribution(inputs)
        perm = self._mask_perm(randomness)
        out = np.zeros_like(pkl)
        out[np.ix_(perm, perm)] = pkl
        return out

    def run(self, inputs, randomness) -> TranscriptRecord:
        mat = self._message_matrix(inputs, randomness)
        msg_dist = {}
        for a in range(self.n):
            for b in range(self.n):
                if mat[a, b] > 1e-15:
                    key = (
                        gf2m.to_bits(gf2m.FieldElement(a, self.field)),
                        gf2m.to_bits(gf2m.FieldElement(b, self.field)),
                    )
                    msg_dist[key] = float(mat[a, b])
        accept = float(np.trace(mat))
        outcome_dist = {"equal": accept, "different": 1.0 - accept}
        return TranscriptRecord(
            inputs=tuple(inputs),
            randomness=randomness,
            outcome_distribution=outcome_dist,
            output_distribution={1: accept, 0: 1.0 - accept},
            cost=self.cost(),
            message_distribution=msg_dist,
        )

    def output_distribution(self, inputs, randomness):
        pkl = self.joint_outcome_distribution(inputs)
        perm = self._mask_perm(randomness)
        accept = float(pkl[np.equal.outer(perm, perm)].sum())
        return {1: accept, 0: 1.0 - accept}

    def averaged_message(self, inputs) -> qsim.DensityMatrix:
        """Randomness-averaged law of the message pair, as a diagonal
        density matrix indexed by a*n + b (field-encoded messages)."""
        x, y = inputs
        self._check_inputs(inputs)
        w = _xor_strings([x, y])
        if w not in self._avg_cache:
            domain = self.resource.randomness_domain
            acc = np.zeros((self.n, self.n))
            for randomness in domain:
                acc += self._message_matrix(inputs, randomness)
            self._avg_cache[w] = acc / len(domain)
        return qsim.DensityMatrix(np.diag(self._avg_cache[w].reshape(-1)))

    def party_message_state(self, party, own_input, randomness) -> qsim.StateVector:
        """Purified pre-measurement register: the party's phased and
        Hadamard-transformed share, referenced by an outcome copy."""
        m = self.m
        state = self.resource.entangled_state
        signs = np.ones(1 << (2 * m), dtype=int)
        low = (1 << m) - 1
        for idx in range(1 << (2 * m)):
            content = (idx >> m) if party == 0 else (idx & low)
            if own_input[content] == "1":
                signs[idx] = -1
        state = qsim.apply_phase_oracle(state, signs)
        first = 0 if party == 0 else m
        for q in range(first, first + m):
            state = qsim.apply_gate(state, "H", q)
        return state

    def format_randomness(self, randomness):
        return f"{randomness[0]};{randomness[1]}"


def sum2_protocol(k: int) -> Sum2Protocol:
    return Sum2Protocol(k)


def geq_protocol(k: int, l: int) -> GeqProtocol:
    return GeqProtocol(k, l)


def dj_protocol(n: int) -> DJProtocol:
    return DJProtocol(n)


def sum2_reference(inputs) -> tuple[int, int]:
    """(sum of first bits, sum of second bits), both mod 2."""
    return (
        sum(int(x[0]) for x in inputs) & 1,
        sum(int(x[1]) for x in inputs) & 1,
    )


def geq_reference(inputs) -> int:
    """1 iff the coordinate-wise XOR of all inputs is the zero string."""
    return int(_xor_strings(inputs) == "0" * len(inputs[0]))


def dj_reference(x: str, y: str):
    """1 if equal, 0 at Hamming distance n/2, PROMISE_VIOLATION otherwise."""
    if len(x) != len(y):
        raise ValueError("inputs must have equal length")
    dist = sum(a != b for a, b in zip(x, y))
    if dist == 0:
        return 1
    if dist * 2 == len(x):
        return 0
    return PROMISE_VIOLATION


def geq_mask_identity_check(inputs, mask: str) -> bool:
    """Whether masking each input then summing equals masking the sum.

    Both sides live in GF(2^len(mask)); the mask must be nonzero.
    """
    if set(mask) == {"0"}:
        raise ValueError("mask must be nonzero")
    modulus = gf2m.find_irreducible(len(mask))
    mask_el = gf2m.from_bits(mask, modulus)
    total = gf2m.FieldElement(0, modulus)
    for x in inputs:
        total = gf2m.add(total, gf2m.mul(mask_el, gf2m.from_bits(x, modulus)))
    direct = gf2m.mul(mask_el, gf2m.from_bits(_xor_strings(inputs), modulus))
    return total == direct
