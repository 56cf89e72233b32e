"""Seeded Monte-Carlo BER engine.

Block ``b`` of a run draws its channel, data symbols and unit-variance noise
from generators keyed by ``(seed, b)``, so every scheme and every Eb/N0 point
sees the same realizations, and results do not depend on how blocks are
distributed over workers.
"""

from __future__ import annotations

import hashlib
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import modem
from .channel import ChannelRealization, CorrelationSet, sample_channel, standard_complex_normal
from .config import SystemConfig
from .errors import DegenerateRunError, ParameterError, SingularFactorError
from .precoding import SCHEMES, InnerPrecoder, build_inner, build_scheme

log = logging.getLogger(__name__)

MAX_DEGENERATE_FRACTION = 0.01

_CHANNEL, _DATA, _NOISE = 0, 1, 2


@dataclass(frozen=True)
class BerRecord:
    scheme: str
    ebn0_db: float
    bits: int
    errors: int
    blocks_used: int
    degenerate_blocks: int
    channel_digest: str = ""

    @property
    def ber(self) -> float:
        return self.errors / self.bits if self.bits else float("nan")


@dataclass(frozen=True)
class BlockOutcome:
    index: int
    errors: int
    bits: int
    degenerate: bool
    digest: str


def noise_variance(ebn0_db: float, M: int, K: int, p_tx: float) -> float:
    """Per-user noise variance from ``Eb/N0 = P_TX / (K sigma^2 log2 M)``."""
    if math.isinf(ebn0_db) and ebn0_db > 0:
        return 0.0
    return p_tx / (K * math.log2(M) * 10.0 ** (ebn0_db / 10.0))


def block_streams(seed: int, block: int) -> list[np.random.Generator]:
    """Independent channel/data/noise generators for one block."""
    ss = np.random.SeedSequence(seed, spawn_key=(block,))
    return [np.random.Generator(np.random.Philox(s)) for s in ss.spawn(3)]


@lru_cache(maxsize=8)
def correlation_for(cfg: SystemConfig) -> CorrelationSet:
    return CorrelationSet.one_ring(
        cfg.N, cfg.G, cfg.delta, cfg.omega, cfg.quad_points, literal_eq2=cfg.literal_eq2
    )


@lru_cache(maxsize=8)
def inner_for(cfg: SystemConfig) -> InnerPrecoder:
    return build_inner(correlation_for(cfg), cfg.users_per_group, cfg.lg_policy)


def block_channel(cfg: SystemConfig, block: int) -> ChannelRealization:
    rng = block_streams(cfg.seed, block)[_CHANNEL]
    return sample_channel(correlation_for(cfg), cfg.users_per_group, rng)


def simulate_block(cfg: SystemConfig, scheme: str, ebn0_db: float, block: int) -> BlockOutcome:
    """Build ``scheme`` for one channel block and count bit errors over ``T``
    symbol vectors."""
    streams = block_streams(cfg.seed, block)
    channel = sample_channel(correlation_for(cfg), cfg.users_per_group, streams[_CHANNEL])
    H = channel.H
    d = modem.random_symbols(streams[_DATA], (cfg.K, cfg.T), cfg.M)
    z = standard_complex_normal(streams[_NOISE], (cfg.K, cfg.T))
    sigma2 = noise_variance(ebn0_db, cfg.M, cfg.K, cfg.p_tx)
    inner = inner_for(cfg) if scheme in ("pgp-rzf", "hl-thp") else None
    try:
        state = build_scheme(scheme, H, inner=inner, sigma_z2=sigma2, p_tx=cfg.p_tx, M=cfg.M)
    except SingularFactorError:
        return BlockOutcome(block, 0, 0, True, channel.digest())
    if getattr(state, "degenerate", False):
        return BlockOutcome(block, 0, 0, True, channel.digest())
    s = state.encode(d)
    r = H.conj().T @ s + math.sqrt(sigma2) * z
    d_hat = state.receive(r)
    errors = int(np.count_nonzero(modem.demap(d_hat.T, cfg.M) != modem.demap(d.T, cfg.M)))
    bits = cfg.K * cfg.T * cfg.qam.bits_per_symbol
    return BlockOutcome(block, errors, bits, False, channel.digest())


def _simulate_batch(args):
    cfg, scheme, ebn0_db, blocks = args
    return [simulate_block(cfg, scheme, ebn0_db, b) for b in blocks]


def _batches(start: int, stop: int, size: int):
    for lo in range(start, stop, size):
        yield list(range(lo, min(lo + size, stop)))


def run_ber_point(
    cfg: SystemConfig, scheme: str, ebn0_db: float, workers: int = 1, pool=None
) -> BerRecord:
    """Accumulate bit errors block by block until ``min_bit_errors`` is reached
    or ``max_blocks`` blocks have been tried.

    The stopping decision is made in block-index order, so the result is the
    same for any ``workers``; blocks computed past the stopping point are
    discarded.

    Raises
    ------
    DegenerateRunError
        If more than 1% of the attempted blocks gave degenerate builds.
    FeasibilityError
        If the inner precoder cannot be built for this configuration.
    """
    if cfg.max_blocks == 0:
        raise ParameterError("max_blocks = 0 leaves nothing to simulate")
    if scheme not in SCHEMES:
        raise ParameterError(f"unknown scheme {scheme!r}")
    if scheme in ("pgp-rzf", "hl-thp"):
        inner_for(cfg)  # surface feasibility errors before any work

    workers = max(1, int(workers))
    batch = 4 if workers == 1 else 2
    errors = bits = used = degenerate = attempted = 0
    digest = hashlib.sha256()
    done = False

    own_pool = None
    if workers > 1 and pool is None:
        pool = own_pool = ProcessPoolExecutor(max_workers=workers)
    try:
        start = 0
        while not done and start < cfg.max_blocks:
            span = batch * workers
            chunks = list(_batches(start, min(start + span, cfg.max_blocks), batch))
            jobs = [(cfg, scheme, ebn0_db, c) for c in chunks]
            results = pool.map(_simulate_batch, jobs) if pool else map(_simulate_batch, jobs)
            for outcome in (o for group in results for o in group):
                attempted += 1
                if outcome.degenerate:
                    degenerate += 1
                    if degenerate > MAX_DEGENERATE_FRACTION * cfg.max_blocks:
                        # the final fraction can no longer drop below the limit
                        done = True
                        break
                else:
                    used += 1
                    errors += outcome.errors
                    bits += outcome.bits
                    digest.update(outcome.digest.encode())
                if (cfg.min_bit_errors and errors >= cfg.min_bit_errors) or attempted >= cfg.max_blocks:
                    done = True
                    break
            start += span
    finally:
        if own_pool is not None:
            own_pool.shutdown()

    if degenerate > MAX_DEGENERATE_FRACTION * attempted:
        raise DegenerateRunError(
            f"{scheme} at {ebn0_db} dB: {degenerate} of {attempted} blocks degenerate"
        )
    log.debug("%s %.1f dB: %d errors / %d bits in %d blocks", scheme, ebn0_db, errors, bits, used)
    return BerRecord(
        scheme=scheme,
        ebn0_db=float(ebn0_db),
        bits=bits,
        errors=errors,
        blocks_used=used,
        degenerate_blocks=degenerate,
        channel_digest=digest.hexdigest(),
    )


def sweep(cfg: SystemConfig, workers: int = 1) -> list[BerRecord]:
    """All ``(scheme, Eb/N0)`` combinations, schemes outermost."""
    records = []
    pool = ProcessPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        for scheme in cfg.schemes:
            for ebn0 in cfg.ebn0_grid_db:
                records.append(run_ber_point(cfg, scheme, ebn0, workers, pool=pool))
    finally:
        if pool is not None:
            pool.shutdown()
    return records
