"""Monte Carlo validation of the overhead model and detection bounds.

simulate_node reproduces the single-relay accounting: packets arrive,
each independently corrupted with probability p, and the node applies the
scheme's forwarding rule (forward-all, verify-and-drop-packet, or
verify-and-drop-generation).  Overhead is scored from ground-truth
corruption tags exactly as the closed forms define it -- the empirical
estimator assembles the per-time-unit expectation from the simulated
corruption and drop frequencies, with the clamp at zero applied to that
estimate, so it converges to the analytic ratio without clamping bias.

The packet-level experiments exercise the actual machinery: the blind
forgery miss-rate run (estimate_hash_miss_rate), the signature
accept/reject run (signature_error_counts), the optional real-hash
detector inside simulate_node, and the six-node relay scenario in which
intermediate nodes check sub-generations and drop polluted ones before
they reach the sink.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

import numpy as np

from . import analytic
from .adversary import (
    AttackModel,
    blind_forge_with_rng,
    corrupt_stream_with_rng,
)
from .algebra import FieldSpec, binary_field, make_group, prime_field
from .analytic import OverheadPoint, SchemeParams, overhead_point
from .detect import (
    HashParams,
    Verdict,
    gen_hash_verify,
    oracle_verify,
    sig_keygen,
    subspan_consistency,
)
from .rlnc import (
    CORRUPTED,
    VALID,
    Generation,
    GenerationParams,
    NotDecodable,
    Packet,
    decode,
    make_generation,
    random_combinations,
    random_payloads,
)

_STDERR_BLOCKS = 50


def _child_rng(*keys: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(list(keys)))


def _child_seed(*keys: int) -> int:
    return int(np.random.SeedSequence(list(keys)).generate_state(1)[0])


@dataclass(frozen=True)
class TrialConfig:
    """One simulate_node run; identical configs replay bit-identically.

    trials counts packets for the error-correction and packet schemes and
    generations for the generation scheme.  use_hash_detector switches the
    generation scheme to a packet-level run where the node really decodes
    and hash-checks each generation (detector misses are then reported as
    false_accepts; overhead is still scored from ground truth).
    """

    scheme: str
    params: SchemeParams
    attack: AttackModel
    trials: int
    seed: int
    use_hash_detector: bool = False
    detector_hash_k: int = 50
    detector_field: FieldSpec | None = None

    def __post_init__(self):
        if self.scheme not in analytic.SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.attack.p != self.params.p:
            raise ValueError("attack.p and params.p must agree")
        if self.use_hash_detector and self.scheme != "generation":
            raise ValueError("the hash detector applies to the generation scheme")


@dataclass(frozen=True)
class EmpiricalReport:
    """Measured counterpart of one OverheadPoint."""

    scheme: str
    overhead_ratio: float
    stderr: float
    goodput_fraction: float
    generations_dropped: int
    packets_dropped: int
    false_accepts: int
    false_rejects: int
    bits_transmitted: int
    trials: int
    undecodable: int = 0


def _block_stderr(values: np.ndarray) -> float:
    if len(values) < 2:
        return 0.0
    return float(np.std(values, ddof=1) / math.sqrt(len(values)))


def _generation_report(params: SchemeParams, x_counts: np.ndarray,
                       scored_drops: np.ndarray, *, bits_transmitted: int,
                       false_accepts: int = 0, false_rejects: int = 0,
                       packets_dropped: int | None = None,
                       undecodable: int = 0) -> EmpiricalReport:
    trials = len(x_counts)
    n, g = params.n, params.G
    hfrac = params.h_g / (n * g)
    p_hat = float(x_counts.sum()) / (trials * g)
    pg_hat = float(scored_drops.sum()) / trials
    unclamped = min(1.0, hfrac + pg_hat * (1.0 - p_hat) - p_hat)
    blocks = min(_STDERR_BLOCKS, trials)
    u_blocks = []
    for xs, ds in zip(np.array_split(x_counts, blocks),
                      np.array_split(scored_drops, blocks)):
        pb = float(xs.sum()) / (len(xs) * g)
        gb = float(ds.sum()) / len(xs)
        u_blocks.append(hfrac + gb * (1.0 - pb) - pb)
    if packets_dropped is None:
        packets_dropped = int(scored_drops.sum()) * g
    return EmpiricalReport(
        scheme="generation",
        overhead_ratio=max(0.0, unclamped),
        stderr=_block_stderr(np.asarray(u_blocks)),
        goodput_fraction=analytic.goodput_fraction_generation(n, g, params.h_g),
        generations_dropped=int(scored_drops.sum()),
        packets_dropped=packets_dropped,
        false_accepts=false_accepts,
        false_rejects=false_rejects,
        bits_transmitted=bits_transmitted,
        trials=trials,
        undecodable=undecodable,
    )


def simulate_node(config: TrialConfig) -> EmpiricalReport:
    """Simulate the relay node for one (scheme, p) operating point.

    The corruption process is per-packet Bernoulli(p); for the bit
    accounting only the corruption indicators matter, so the default run
    draws them directly (exact same distribution as materializing
    packets) and aggregates wasted bits per the scheme's rule.
    """
    params = config.params
    p = params.p
    n = params.n
    rng = _child_rng(config.seed)

    if config.scheme == "error-correction":
        bad = int(rng.binomial(config.trials, p))
        p_hat = bad / config.trials
        return EmpiricalReport(
            scheme=config.scheme,
            overhead_ratio=p_hat,
            stderr=math.sqrt(p_hat * (1.0 - p_hat) / config.trials),
            goodput_fraction=1.0 - p_hat,
            generations_dropped=0,
            packets_dropped=0,
            false_accepts=0,
            false_rejects=0,
            bits_transmitted=round(config.trials * n),
            trials=config.trials,
        )

    if config.scheme == "packet":
        bad = int(rng.binomial(config.trials, p))
        p_hat = bad / config.trials
        unclamped = (params.h_p - n * p_hat) / n
        return EmpiricalReport(
            scheme=config.scheme,
            overhead_ratio=max(0.0, unclamped),
            stderr=math.sqrt(p_hat * (1.0 - p_hat) / config.trials),
            goodput_fraction=analytic.goodput_fraction_packet(n, params.h_p),
            generations_dropped=0,
            packets_dropped=bad,
            false_accepts=0,
            false_rejects=0,
            bits_transmitted=round((config.trials - bad) * n),
            trials=config.trials,
        )

    if config.use_hash_detector:
        return _simulate_generation_with_hash(config, rng)

    x_counts = rng.binomial(params.G, p, size=config.trials)
    drops = (x_counts > 0).astype(np.int64)
    bits = round((config.trials - int(drops.sum())) * n * params.G)
    return _generation_report(params, x_counts, drops, bits_transmitted=bits)


def _simulate_generation_with_hash(config: TrialConfig,
                                   rng: np.random.Generator) -> EmpiricalReport:
    """Generation scheme with the node really decoding and hash-checking.

    Each generation is materialized, mixed, corrupted in flight, then the
    node decodes and verifies.  Forwarding follows the detector's verdict
    (undecodable generations pass through unverified); overhead is still
    scored from ground truth per the model's definition.
    """
    params = config.params
    f = config.detector_field or binary_field(8)
    gp = GenerationParams.fit(int(params.n), params.G, f.w,
                              hash_k=config.detector_hash_k)
    hp = HashParams(k=config.detector_hash_k, s=1, field=f)
    g = params.G
    x_counts = np.zeros(config.trials, dtype=np.int64)
    truth_drops = np.zeros(config.trials, dtype=np.int64)
    false_accepts = false_rejects = undecodable = 0
    bits = 0
    for t in range(config.trials):
        payloads = random_payloads(f, g, gp.k_data, rng)
        _, src = make_generation(payloads, gp, f, hp, generation_id=t)
        received = random_combinations(src, g, rng)
        received = corrupt_stream_with_rng(received, config.attack, rng)
        bad = sum(pk.origin_tag == CORRUPTED for pk in received)
        x_counts[t] = bad
        truth_drops[t] = bad > 0
        verdict = None
        try:
            verdict = gen_hash_verify(decode(received, g), hp)
        except NotDecodable:
            undecodable += 1
        if verdict is Verdict.VALID and bad:
            false_accepts += 1
        if verdict is Verdict.CORRUPTED and not bad:
            false_rejects += 1
        if verdict is not Verdict.CORRUPTED:
            bits += round(params.n * g)
    return _generation_report(
        params, x_counts, truth_drops, bits_transmitted=bits,
        false_accepts=false_accepts, false_rejects=false_rejects,
        undecodable=undecodable,
    )


@dataclass(frozen=True)
class GridPoint:
    """Analytic value and (optionally) its empirical measurement."""

    point: OverheadPoint
    report: EmpiricalReport | None


def compare_grid(p_grid, schemes, params: SchemeParams,
                 trials, seed: int) -> list[GridPoint]:
    """One analytic and one empirical point per (p, scheme).

    trials may be an int or a per-scheme mapping; 0 skips simulation.
    Each point gets an independent seed stream derived from (seed, scheme
    index, p index), so results do not depend on evaluation order.
    """
    out = []
    for si, scheme in enumerate(schemes):
        if scheme not in analytic.SCHEMES:
            raise ValueError(f"unknown scheme {scheme!r}")
        t = trials.get(scheme, 0) if isinstance(trials, dict) else trials
        for pi, p in enumerate(p_grid):
            pp = params.at(float(p))
            point = overhead_point(scheme, pp)
            report = None
            if t:
                cfg = TrialConfig(
                    scheme=scheme, params=pp,
                    attack=AttackModel(p=float(p)),
                    trials=t, seed=_child_seed(seed, si, pi),
                )
                report = simulate_node(cfg)
            out.append(GridPoint(point=point, report=report))
    return out


# -- blind forgery vs the generation hash ------------------------------------


@dataclass(frozen=True)
class HashMissReport:
    """Outcome of the blind s-packet forgery experiment."""

    trials: int
    misses: int
    bound: float
    s: int
    redraws: int

    @property
    def miss_rate(self) -> float:
        return self.misses / self.trials

    @property
    def detection_rate(self) -> float:
        return 1.0 - self.miss_rate


def estimate_hash_miss_rate(field: FieldSpec, G: int, k_data: int,
                            hash_k: int, s: int, trials: int,
                            seed: int) -> HashMissReport:
    """Empirical miss rate of the generation hash against blind forgery.

    Per trial: a fresh generation is mixed into G random combinations (the
    honest randomness the forger never sees), s of them are hijacked in
    flight with junk data under unchanged claimed coefficients, and the
    receiver decodes and checks.  A miss is a Valid verdict on a polluted
    generation; the bound is ((k+1)/q)^s.  Singular mixing draws are
    redrawn (the receiver cannot check what it cannot decode).
    """
    hp = HashParams(k=hash_k, s=s, field=field)
    gp = GenerationParams.from_symbols(
        G, k_data, _symbol_bits(field), hp.hash_symbol_count(k_data)
    )
    rng = _child_rng(seed)
    misses = redraws = 0
    for t in range(trials):
        payloads = random_payloads(field, G, k_data, rng)
        _, src = make_generation(payloads, gp, field, hp, generation_id=t)
        while True:
            received = blind_forge_with_rng(
                random_combinations(src, G, rng), s, rng
            )
            try:
                decoded = decode(received, G)
                break
            except NotDecodable:
                redraws += 1
        if gen_hash_verify(decoded, hp) is Verdict.VALID:
            misses += 1
    return HashMissReport(trials=trials, misses=misses,
                          bound=hp.miss_bound(), s=s, redraws=redraws)


def _symbol_bits(field: FieldSpec) -> int:
    return field.w if field.kind == "binary-extension" else (
        (field.q - 1).bit_length()
    )


# -- signature scheme error rates --------------------------------------------


@dataclass(frozen=True)
class SignatureReport:
    """Acceptance/rejection counts for the subspace signature."""

    accept_trials: int
    false_rejects: int
    reject_trials: int
    false_accepts: int
    group_order: int
    key_size_bits: int


def signature_error_counts(accept_trials: int, reject_trials: int,
                           seed: int, bits_p: int = 32, bits_q: int = 33,
                           G: int = 4, k_data: int = 4) -> SignatureReport:
    """Verify random valid combinations and single-symbol corruptions.

    Valid combinations must all accept (completeness); corrupted vectors
    accept only with probability 1/P, so at desk scale every one of them
    must reject.
    """
    group = make_group(bits_p, bits_q, random.Random(seed))
    f = prime_field(group.order)
    gp = GenerationParams.from_symbols(G, k_data, _symbol_bits(f))
    rng = _child_rng(seed)
    gen, _ = make_generation(random_payloads(f, G, k_data, rng), gp, f)
    key = sig_keygen(gen, group, rng)
    q_mod = group.modulus
    h_vec = key.h_vec

    def verify_vec(w) -> bool:
        acc = 1
        for h, wi in zip(h_vec, w):
            acc = acc * pow(h, int(wi), q_mod) % q_mod
        return acc == 1

    false_rejects = 0
    coeffs = f.random_elements(rng, (accept_trials, G))
    data = f.matmul(coeffs, gen.source_payloads)
    for i in range(accept_trials):
        if not verify_vec(np.concatenate([coeffs[i], data[i]])):
            false_rejects += 1

    false_accepts = 0
    coeffs = f.random_elements(rng, (reject_trials, G))
    data = f.matmul(coeffs, gen.source_payloads)
    width = G + k_data
    for i in range(reject_trials):
        w = np.concatenate([coeffs[i], data[i]])
        j = int(rng.integers(G, width))  # corrupt a payload symbol
        delta = int(rng.integers(1, f.q))
        w[j] = f.add(int(w[j]), delta)
        if verify_vec(w):
            false_accepts += 1

    return SignatureReport(
        accept_trials=accept_trials, false_rejects=false_rejects,
        reject_trials=reject_trials, false_accepts=false_accepts,
        group_order=group.order, key_size_bits=key.key_size_bits,
    )


# -- six-node relay with sub-generation checking ------------------------------

RELAY_NODES = ("A", "B", "C", "D", "E", "F")
RELAY_EDGES = ("A-B", "A-C", "B-D", "B-E", "C-D", "C-E", "D-F", "E-F")


@dataclass(frozen=True)
class RelayTrial:
    """Per-trial record of the two-path relay scenario."""

    verdicts: dict
    first_flag: str | None
    edge_corrupted: dict
    forwarded: dict
    f_received: int
    f_decodable: bool
    f_matches_source: bool | None
    f_clean: bool
    upstream_dropped: bool


@dataclass(frozen=True)
class RelayReport:
    """Aggregate of simulate_relay trials."""

    G: int
    p_per_edge: dict
    trials: tuple

    def trials_with_corruption(self, edge: str) -> list[RelayTrial]:
        return [t for t in self.trials if t.edge_corrupted.get(edge, 0) > 0]

    def flag_rate(self, node: str, subset=None) -> float:
        pool = list(self.trials) if subset is None else list(subset)
        if not pool:
            return 0.0
        hits = sum(
            any(v == Verdict.CORRUPTED.value for v in t.verdicts.get(node, ()))
            for t in pool
        )
        return hits / len(pool)

    def summary(self) -> dict:
        out = {"trials": len(self.trials), "G": self.G}
        for node in ("B", "C", "D", "E", "F"):
            out[f"flag_rate_{node}"] = self.flag_rate(node)
        out["f_clean_rate"] = (
            sum(t.f_clean for t in self.trials) / len(self.trials)
        )
        out["f_decodable_rate"] = (
            sum(t.f_decodable for t in self.trials) / len(self.trials)
        )
        return out


def _normalize_edges(p_per_edge) -> dict:
    out = {e: 0.0 for e in RELAY_EDGES}
    for key, val in (p_per_edge or {}).items():
        name = "-".join(key) if isinstance(key, tuple) else str(key)
        name = name.upper()
        if name not in out:
            raise ValueError(f"unknown edge {key!r}; edges are {RELAY_EDGES}")
        if not 0.0 <= val <= 1.0:
            raise ValueError("edge probabilities must lie in [0, 1]")
        out[name] = float(val)
    return out


def _corrupt_edge(packets, edge: str, probs: dict, mode: str,
                  rng: np.random.Generator):
    p = probs[edge]
    if not packets or p == 0.0:
        return packets, 0
    model = AttackModel(p=p, mode=mode)
    before = sum(pk.origin_tag == CORRUPTED for pk in packets)
    out = corrupt_stream_with_rng(packets, model, rng)
    after = sum(pk.origin_tag == CORRUPTED for pk in out)
    return out, after - before


def _row_packets(gen: Generation, support, rows) -> dict:
    """Pseudo-source packets for recovered rows, ground-truth tagged."""
    truth = np.hstack([gen.source_payloads, gen.source_hashes])
    f = gen.field
    g = gen.params.G
    k = gen.params.k_data
    out = {}
    for i, src_idx in enumerate(np.asarray(support).tolist()):
        row = rows[i]
        coeffs = np.zeros(g, dtype=np.int64)
        coeffs[src_idx] = 1
        tag = VALID if np.array_equal(row, truth[src_idx]) else CORRUPTED
        out[src_idx] = Packet(
            coeffs=f._arr(coeffs), payload=row[:k], hash_syms=row[k:],
            field=f, generation_id=gen.id, origin_tag=tag,
        )
    return out


def _forward_blocks(received, blocks, hash_params, gen,
                    rng: np.random.Generator):
    """Check a sub-generation, then re-encode one batch per block.

    Returns (verdict, batches).  A Corrupted verdict drops everything; an
    Inconclusive one forwards the raw packets split across the blocks
    (the node cannot prove pollution, so it keeps relaying).
    """
    if not received:
        return Verdict.VALID, [[] for _ in blocks]
    verdict, support, rows = subspan_consistency(received, hash_params)
    if verdict is Verdict.CORRUPTED:
        return verdict, [[] for _ in blocks]
    if verdict is Verdict.INCONCLUSIVE:
        chunks = np.array_split(np.arange(len(received)), len(blocks))
        return verdict, [[received[i] for i in ch] for ch in chunks]
    row_pkts = _row_packets(gen, support, rows)
    batches = []
    for block in blocks:
        members = [row_pkts[i] for i in block if i in row_pkts]
        count = len(block)
        batches.append(
            random_combinations(members, count, rng) if members else []
        )
    return verdict, batches


def simulate_relay(G: int, p_per_edge, seed: int, trials: int = 1,
                   field: FieldSpec | None = None, k_data: int = 16,
                   hash_k: int = 16,
                   attack_mode: str = "random-symbol") -> RelayReport:
    """Six-node two-path relay with sub-generation checking at each hop.

    A splits each generation's source packets in half and sends G/2
    random combinations of one half to B and of the other to C.  B and C
    check their halves, then re-encode quarter blocks towards D and E,
    which check each incoming quarter and forward to F.  F checks and
    decodes the whole generation.  Corruption is injected in flight on
    each edge with the given per-edge probability, and every node drops a
    sub-generation its check flags as corrupted.
    """
    if G % 4:
        raise ValueError("G must be divisible by 4")
    probs = _normalize_edges(p_per_edge)
    f = field or binary_field(8)
    hp = HashParams(k=hash_k, s=1, field=f)
    gp = GenerationParams.from_symbols(
        G, k_data, _symbol_bits(f), hp.hash_symbol_count(k_data)
    )
    g2, g4 = G // 2, G // 4
    quarters = [list(range(i * g4, (i + 1) * g4)) for i in range(4)]
    records = []
    for t in range(trials):
        rng = _child_rng(seed, t)
        gen, src = make_generation(
            random_payloads(f, G, k_data, rng), gp, f, hp, generation_id=t
        )
        verdicts: dict = {}
        edge_hits: dict = {}

        to_b = random_combinations(src[:g2], g2, rng)
        to_c = random_combinations(src[g2:], g2, rng)
        to_b, edge_hits["A-B"] = _corrupt_edge(to_b, "A-B", probs, attack_mode, rng)
        to_c, edge_hits["A-C"] = _corrupt_edge(to_c, "A-C", probs, attack_mode, rng)

        vb, (b_to_d, b_to_e) = _forward_blocks(
            to_b, [quarters[0], quarters[1]], hp, gen, rng
        )
        vc, (c_to_d, c_to_e) = _forward_blocks(
            to_c, [quarters[2], quarters[3]], hp, gen, rng
        )
        verdicts["B"] = (vb.value,)
        verdicts["C"] = (vc.value,)

        b_to_d, edge_hits["B-D"] = _corrupt_edge(b_to_d, "B-D", probs, attack_mode, rng)
        b_to_e, edge_hits["B-E"] = _corrupt_edge(b_to_e, "B-E", probs, attack_mode, rng)
        c_to_d, edge_hits["C-D"] = _corrupt_edge(c_to_d, "C-D", probs, attack_mode, rng)
        c_to_e, edge_hits["C-E"] = _corrupt_edge(c_to_e, "C-E", probs, attack_mode, rng)

        to_f = []
        for node, streams in (("D", [(b_to_d, quarters[0]), (c_to_d, quarters[2])]),
                              ("E", [(b_to_e, quarters[1]), (c_to_e, quarters[3])])):
            node_verdicts = []
            out = []
            for stream, block in streams:
                v, (batch,) = _forward_blocks(stream, [block], hp, gen, rng)
                if stream:
                    node_verdicts.append(v.value)
                out.extend(batch)
            verdicts[node] = tuple(node_verdicts)
            edge = f"{node}-F"
            out, edge_hits[edge] = _corrupt_edge(out, edge, probs, attack_mode, rng)
            if node == "D":
                d_forwarded = out
            else:
                e_forwarded = out
            to_f.extend(out)

        vf, _, _ = subspan_consistency(to_f, hp) if to_f else (Verdict.VALID, None, None)
        verdicts["F"] = (vf.value,)
        f_decodable = False
        f_matches: bool | None = None
        if len(to_f) >= G:
            try:
                decoded = decode(to_f, G)
                f_decodable = True
                truth = np.hstack([gen.source_payloads, gen.source_hashes])
                f_matches = bool(np.array_equal(decoded, truth))
            except NotDecodable:
                pass
        f_clean = all(oracle_verify(pk, gen) for pk in to_f)
        first_flag = next(
            (
                node
                for node in ("B", "C", "D", "E", "F")
                if any(v == Verdict.CORRUPTED.value for v in verdicts.get(node, ()))
            ),
            None,
        )
        upstream_dropped = any(
            v == Verdict.CORRUPTED.value
            for node in ("B", "C", "D", "E")
            for v in verdicts.get(node, ())
        )
        records.append(RelayTrial(
            verdicts=verdicts,
            first_flag=first_flag,
            edge_corrupted=edge_hits,
            forwarded={"D": len(d_forwarded), "E": len(e_forwarded)},
            f_received=len(to_f),
            f_decodable=f_decodable,
            f_matches_source=f_matches,
            f_clean=f_clean,
            upstream_dropped=upstream_dropped,
        ))
    return RelayReport(G=G, p_per_edge=probs, trials=tuple(records))
