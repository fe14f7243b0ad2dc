"""Random block linear network coding.

A source emits data in generations of G packets; only packets from the
same generation are ever mixed.  Each packet carries its encoding vector
(the coefficients expressing it as a combination of the generation's
source packets), payload symbols, and optional hash symbols that ride
along under the same linear combinations.

The module provides generation construction, random recoding,
Gauss-Jordan decoding over any supported field, and sub-generation views
for local checking at intermediate nodes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import FieldSpec

VALID = "valid"
CORRUPTED = "corrupted"


class NotDecodable(Exception):
    """Received packets do not span the generation (erasure, not corruption)."""

    def __init__(self, rank: int, needed: int):
        super().__init__(f"coefficient rank {rank} < generation size {needed}")
        self.rank = rank
        self.needed = needed


@dataclass(frozen=True)
class GenerationParams:
    """Wire-level shape of one generation's packets.

    The accounting identity n = (G + k_data + hash_symbols) * symbol_bits
    ties the bit size used by the overhead formulas to the symbol layout;
    it is checked at construction.
    """

    G: int
    n: int  # packet length in bits, including encoding vector and hashes
    k_data: int
    symbol_bits: int
    hash_symbols: int = 0

    def __post_init__(self):
        if self.G < 1 or self.k_data < 1 or self.symbol_bits < 1:
            raise ValueError("G, k_data and symbol_bits must be positive")
        if self.hash_symbols < 0:
            raise ValueError("hash_symbols must be >= 0")
        expected = (self.G + self.k_data + self.hash_symbols) * self.symbol_bits
        if self.n != expected:
            raise ValueError(
                f"packet size accounting mismatch: n={self.n} but symbols "
                f"add up to {expected} bits"
            )

    @classmethod
    def from_symbols(
        cls, G: int, k_data: int, symbol_bits: int, hash_symbols: int = 0
    ) -> "GenerationParams":
        n = (G + k_data + hash_symbols) * symbol_bits
        return cls(G=G, n=n, k_data=k_data, symbol_bits=symbol_bits,
                   hash_symbols=hash_symbols)

    @classmethod
    def fit(cls, n: int, G: int, symbol_bits: int,
            hash_k: int | None = None) -> "GenerationParams":
        """Split a target packet size of n bits into a feasible symbol layout.

        With hash_k set, each packet carries one hash symbol per hash_k
        payload symbols (rounded up).
        """
        if n % symbol_bits:
            raise ValueError(f"n={n} is not a multiple of symbol_bits={symbol_bits}")
        total = n // symbol_bits
        for k_data in range(total - G, 0, -1):
            n_h = 0 if hash_k is None else -(-k_data // hash_k)
            if G + k_data + n_h == total:
                return cls(G=G, n=n, k_data=k_data, symbol_bits=symbol_bits,
                           hash_symbols=n_h)
        raise ValueError(f"no feasible symbol layout for n={n}, G={G}")


@dataclass(frozen=True, eq=False)
class Packet:
    """One coded packet: encoding vector, payload, optional hash symbols.

    origin_tag is ground truth for simulation accounting only; detection
    logic never reads it (use :meth:`wire` for the detector-visible part).
    """

    coeffs: np.ndarray
    payload: np.ndarray
    hash_syms: np.ndarray
    field: FieldSpec
    generation_id: int = 0
    origin_tag: str = VALID

    def wire(self) -> np.ndarray:
        """The transmitted symbol vector: coeffs | payload | hash."""
        return np.concatenate([self.coeffs, self.payload, self.hash_syms])

    @property
    def data(self) -> np.ndarray:
        """Payload and hash symbols (everything after the encoding vector)."""
        return np.concatenate([self.payload, self.hash_syms])

    def replaced(self, **kw) -> "Packet":
        fields = dict(
            coeffs=self.coeffs, payload=self.payload, hash_syms=self.hash_syms,
            field=self.field, generation_id=self.generation_id,
            origin_tag=self.origin_tag,
        )
        fields.update(kw)
        return Packet(**fields)


@dataclass(frozen=True, eq=False)
class Generation:
    """A block of G source packets mixed only among themselves."""

    id: int
    source_payloads: np.ndarray  # G x k_data
    source_hashes: np.ndarray  # G x hash_symbols
    params: GenerationParams
    field: FieldSpec

    def augmented_rows(self) -> np.ndarray:
        """Source rows as (identity | payload | hash), the valid row space."""
        eye = np.zeros((self.params.G, self.params.G), dtype=np.int64)
        np.fill_diagonal(eye, 1)
        return np.hstack([
            self.field._arr(eye),
            self.field._arr(self.source_payloads),
            self.field._arr(self.source_hashes),
        ])

    def source_packets(self) -> list[Packet]:
        out = []
        g = self.params.G
        for i in range(g):
            coeffs = np.zeros(g, dtype=np.int64)
            coeffs[i] = 1
            out.append(Packet(
                coeffs=self.field._arr(coeffs),
                payload=self.source_payloads[i].copy(),
                hash_syms=self.source_hashes[i].copy(),
                field=self.field,
                generation_id=self.id,
            ))
        return out


def make_generation(
    payloads,
    params: GenerationParams,
    field: FieldSpec,
    hash_scheme=None,
    generation_id: int = 0,
) -> tuple[Generation, list[Packet]]:
    """Build a generation and its G source packets.

    Source packet i carries the unit encoding vector e_i.  When a hash
    scheme (detect.HashParams) is given, hash symbols are computed from
    each packet's payload and appended; they are then carried through
    recoding by the same linear combinations as the payload.
    """
    payloads = field._arr(payloads)
    if payloads.shape != (params.G, params.k_data):
        raise ValueError(
            f"payload matrix is {payloads.shape}, expected "
            f"({params.G}, {params.k_data})"
        )
    if hash_scheme is not None:
        from .detect import gen_hash_append  # runtime import: detect builds on rlnc

        hashes = gen_hash_append(payloads, hash_scheme)
    else:
        hashes = field._arr(np.zeros((params.G, 0), dtype=np.int64))
    if hashes.shape[1] != params.hash_symbols:
        raise ValueError(
            f"hash scheme produces {hashes.shape[1]} symbols per packet, "
            f"params expect {params.hash_symbols}"
        )
    gen = Generation(
        id=generation_id, source_payloads=payloads, source_hashes=hashes,
        params=params, field=field,
    )
    return gen, gen.source_packets()


def random_payloads(field: FieldSpec, G: int, k_data: int,
                    rng: np.random.Generator) -> np.ndarray:
    return field.random_elements(rng, (G, k_data))


def _check_stream(packets: list[Packet]) -> Packet:
    if not packets:
        raise ValueError("empty packet list")
    first = packets[0]
    for p in packets[1:]:
        if p.generation_id != first.generation_id:
            raise ValueError("packets from different generations cannot mix")
        if p.field != first.field:
            raise ValueError("packets from different fields cannot mix")
        if (len(p.coeffs) != len(first.coeffs)
                or len(p.payload) != len(first.payload)
                or len(p.hash_syms) != len(first.hash_syms)):
            raise ValueError("packet symbol layouts differ")
    return first


def combine_with_coefficients(packets: list[Packet], coeffs) -> Packet:
    """Deterministic linear combination of packets with given coefficients."""
    first = _check_stream(packets)
    f = first.field
    c = f._arr(coeffs)
    if c.shape != (len(packets),):
        raise ValueError("one coefficient per packet required")
    wires = np.vstack([p.wire() for p in packets])
    out = f.matmul(c[None, :], wires)[0]
    g = len(first.coeffs)
    k = len(first.payload)
    corrupted = any(
        p.origin_tag == CORRUPTED and int(ci) != 0
        for p, ci in zip(packets, c)
    )
    return Packet(
        coeffs=out[:g], payload=out[g : g + k], hash_syms=out[g + k :],
        field=f, generation_id=first.generation_id,
        origin_tag=CORRUPTED if corrupted else VALID,
    )


def random_combinations(packets: list[Packet], count: int,
                        rng: np.random.Generator) -> list[Packet]:
    """count fresh random combinations of the given packets.

    Coefficients are uniform over the whole field including zero; singular
    draws are not resampled, so rank-deficient outcomes surface downstream
    as NotDecodable and erasure accounting stays faithful.
    """
    first = _check_stream(packets)
    f = first.field
    c = f.random_elements(rng, (count, len(packets)))
    wires = np.vstack([p.wire() for p in packets])
    out = f.matmul(c, wires)
    g = len(first.coeffs)
    k = len(first.payload)
    tainted = np.array([p.origin_tag == CORRUPTED for p in packets])
    if tainted.any():
        hit = (np.not_equal(c[:, tainted], 0)).any(axis=1)
    else:
        hit = np.zeros(count, dtype=bool)
    return [
        Packet(
            coeffs=out[i, :g], payload=out[i, g : g + k],
            hash_syms=out[i, g + k :], field=f,
            generation_id=first.generation_id,
            origin_tag=CORRUPTED if hit[i] else VALID,
        )
        for i in range(count)
    ]


def random_combine(packets: list[Packet], rng: np.random.Generator) -> Packet:
    """One fresh random combination (uniform coefficients, zero included)."""
    return random_combinations(packets, 1, rng)[0]


# -- linear algebra over a FieldSpec ----------------------------------------


def reduced_row_echelon(field: FieldSpec, matrix,
                        pivot_width: int | None = None):
    """Gauss-Jordan elimination; pivots are searched in the first
    pivot_width columns but row operations span the full width.

    Returns (R, pivot_cols).
    """
    m = field._arr(matrix).copy()
    if m.ndim != 2:
        raise ValueError("matrix must be 2-D")
    rows, cols = m.shape
    if pivot_width is None:
        pivot_width = cols
    pivots: list[int] = []
    r = 0
    for col in range(pivot_width):
        if r >= rows:
            break
        nz = np.nonzero(m[r:, col])[0]
        if len(nz) == 0:
            continue
        pr = r + int(nz[0])
        if pr != r:
            m[[r, pr]] = m[[pr, r]]
        m[r] = field.mul_arr(field.inv(int(m[r, col])), m[r])
        others = np.nonzero(m[:, col])[0]
        others = others[others != r]
        if len(others):
            factors = m[others, col]
            m[others] = field.sub_arr(
                m[others], field.mul_arr(factors[:, None], m[r][None, :])
            )
        pivots.append(col)
        r += 1
    return m, pivots


def matrix_rank(field: FieldSpec, matrix) -> int:
    _, pivots = reduced_row_echelon(field, matrix)
    return len(pivots)


def decode(packets: list[Packet], G: int) -> np.ndarray:
    """Recover the source (payload | hash) matrix by Gaussian elimination.

    Succeeds exactly when the received encoding vectors have rank G;
    raises NotDecodable otherwise, which distinguishes "need more packets"
    from corruption.  The returned matrix has one row per source packet;
    columns are the payload symbols followed by any hash symbols.
    """
    first = _check_stream(packets)
    f = first.field
    if len(first.coeffs) != G:
        raise ValueError("encoding vector length differs from G")
    m = np.vstack([p.wire() for p in packets])
    r, pivots = reduced_row_echelon(f, m, pivot_width=G)
    if len(pivots) < G:
        raise NotDecodable(rank=len(pivots), needed=G)
    return r[:G, G:]


@dataclass(frozen=True)
class SubGeneration:
    """Received combinations from one generation, checkable as a unit."""

    packets: tuple[Packet, ...]
    expected_count: int

    def __post_init__(self):
        if self.expected_count < 0:
            raise ValueError("expected_count must be >= 0")
        if self.packets:
            _check_stream(list(self.packets))


def subgeneration_view(packets: list[Packet], expected_count: int) -> SubGeneration:
    """View a batch of received combinations as one checkable sub-generation."""
    return SubGeneration(packets=tuple(packets), expected_count=expected_count)


def recover_subspan(packets: list[Packet]):
    """Solve for the source rows a set of received combinations pins down.

    Returns (status, support, rows):

    * status "solved": every source index touched by the encoding vectors
      is uniquely determined; support lists those indices and rows holds
      the corresponding (payload | hash) source rows.
    * status "inconsistent": no source matrix can explain the received
      data (linearly dependent encoding vectors carry conflicting data).
    * status "underdetermined": a consistent preimage exists but is not
      unique, so nothing can be checked yet.
    """
    if not packets:
        return "solved", np.zeros(0, dtype=np.int64), None
    first = _check_stream(packets)
    f = first.field
    g = len(first.coeffs)
    m = np.vstack([p.wire() for p in packets])
    support = np.nonzero([np.any(m[:, j] != 0) for j in range(g)])[0]
    r, pivots = reduced_row_echelon(f, m, pivot_width=g)
    # Rows whose encoding part eliminated to zero must carry zero data,
    # else rank([C|D]) > rank(C) and no linear preimage exists.
    tail = r[len(pivots) :]
    if tail.size and np.any(tail[:, g:] != 0):
        return "inconsistent", support, None
    if len(pivots) < len(support):
        return "underdetermined", support, None
    rows = r[: len(pivots), g:]
    return "solved", np.asarray(pivots, dtype=np.int64), rows
