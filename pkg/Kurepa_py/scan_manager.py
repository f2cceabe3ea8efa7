import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, replace
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from .arithmetic_manager import ArithmeticManager, FactoredInteger, Residue
from .config_manager import ConfigManager
from .data_handler import DataHandler
from .determinant_manager import DeterminantManager
from .exceptions import DomainError, ResourceError
from .sequence_manager import SequenceManager

KINDS = ("kurepa", "strong", "table1", "table2", "prime-powers", "bell-one")
CLASS_FILTERS = ("all", "primes", "odd", "odd-composites", "prime-powers", "even")
# Kinds that only ever scan one class of n.
FIXED_CLASS = {"kurepa": "primes", "strong": "odd-composites", "prime-powers": "prime-powers"}
# Scans whose hits disprove a hypothesis.
FINDING_KINDS = ("kurepa", "strong")
LONG_RUNNING_HI = 2 ** 23
REPORT_COLUMNS = ["n", "factorization", "r_signed", "s_signed", "near_miss", "ratio"]

Block = Tuple[int, int]


@dataclass(frozen=True)
class ScanConfig:
    """
    Range and thresholds of one scan over ``lo <= n < hi``.

    Args:
        lo (int): Inclusive lower bound, at least 2.
        hi (int): Exclusive upper bound.
        residue_bound (int): Largest accepted near-miss distance or |residue|.
        ratio_bound (float, optional): Also accept ``0 < |r|/n <= ratio_bound`` (residue tables only).
        class_filter (str): Restricts table1, table2 and bell-one scans to a class of n.
        checkpoint_interval (int): Block length; one checkpoint per block.
    """
    lo: int
    hi: int
    residue_bound: int = 2
    ratio_bound: Optional[float] = None
    class_filter: str = "all"
    checkpoint_interval: int = 5000

    def __post_init__(self):
        if self.lo < 2:
            raise DomainError(f"Scan range must start at 2 or above, got lo = {self.lo}.")
        if self.hi <= self.lo:
            raise DomainError(f"Empty scan range [{self.lo}, {self.hi}).")
        if self.residue_bound < 0:
            raise DomainError(f"Residue bound must be nonnegative, got {self.residue_bound}.")
        if self.class_filter not in CLASS_FILTERS:
            raise DomainError(f"Unknown class filter {self.class_filter!r}; expected one of {CLASS_FILTERS}.")
        if self.checkpoint_interval < 1:
            raise DomainError(f"Checkpoint interval must be positive, got {self.checkpoint_interval}.")

    def to_dict(self) -> Dict:
        return asdict(self)


@dataclass(frozen=True)
class ScanRecord:
    """One reported n with its balanced residues ``r = S_(n-1) mod n`` and ``s = -8 K_n mod n``."""
    n: int
    factorization: FactoredInteger
    r_signed: int
    s_signed: Optional[int] = None

    @classmethod
    def of(cls, residue: Residue, nf: FactoredInteger, s_signed: Optional[int] = None) -> "ScanRecord":
        return cls(residue.modulus, nf, residue.signed, s_signed)

    @property
    def near_miss(self) -> int:
        return min(abs(self.r_signed), self.n - abs(self.r_signed))

    @property
    def ratio(self) -> float:
        return abs(self.r_signed) / self.n

    def to_dict(self) -> Dict:
        return {"n": self.n, "factors": [list(f) for f in self.factorization.factors],
                "r_signed": self.r_signed, "s_signed": self.s_signed}

    @classmethod
    def from_dict(cls, data: Dict) -> "ScanRecord":
        nf = FactoredInteger(data["n"], tuple((p, e) for p, e in data["factors"]))
        return cls(data["n"], nf, data["r_signed"], data["s_signed"])

    def to_row(self) -> Dict:
        return {"n": self.n, "factorization": self.factorization.format(), "r_signed": self.r_signed,
                "s_signed": self.s_signed, "near_miss": self.near_miss, "ratio": self.ratio}


def _matches_class(nf: FactoredInteger, class_filter: str) -> bool:
    n = nf.n
    if class_filter == "primes":
        return nf.is_prime
    if class_filter == "odd":
        return n % 2 == 1
    if class_filter == "odd-composites":
        return n % 2 == 1 and n > 1 and not nf.is_prime
    if class_filter == "prime-powers":
        return nf.is_prime_power and not nf.is_prime
    if class_filter == "even":
        return n % 2 == 0
    return True


def _block_kurepa(cfg: ScanConfig, lo: int, hi: int, cache: Dict[int, int]) -> List[ScanRecord]:
    records = []
    for p in range(lo, hi):
        if p in cache:
            residue = Residue(cache[p], p)
            if residue.near_miss <= cfg.residue_bound:
                records.append(ScanRecord.of(residue, FactoredInteger(p, ((p, 1),))))
    return records


def _block_prime_powers(cfg: ScanConfig, lo: int, hi: int, cache: Dict[int, int]) -> List[ScanRecord]:
    records = []
    for d in range(lo, hi):
        if d in cache:
            residue = Residue(cache[d], d)
            if residue.near_miss <= cfg.residue_bound:
                records.append(ScanRecord.of(residue, ArithmeticManager.factorize(d)))
    return records


def _block_strong(cfg: ScanConfig, lo: int, hi: int, cache: Dict[int, int]) -> List[ScanRecord]:
    records = []
    start = max(lo, 9)
    if start >= hi:
        return records
    for n, nf in ArithmeticManager.factorize_range(start, hi).items():
        if n % 2 == 0 or nf.is_prime:
            continue
        # S_(n-1) = 2 (mod n) forces S_(d-1) = 2 (mod d) at every prime power d of n.
        if any(cache[d] != 2 for d in nf.prime_powers()):
            continue
        residue = SequenceManager.subfactorial_mod_fast(n, nf, cache)
        if residue.value == 2:
            k = DeterminantManager.kurepa_residue_from_subfactorial(residue)
            records.append(ScanRecord.of(residue, nf, Residue.of(-8 * k.value, n).signed))
    return records


def _block_table1(cfg: ScanConfig, lo: int, hi: int, cache: Dict[int, int]) -> List[ScanRecord]:
    records = []
    for n, nf in ArithmeticManager.factorize_range(lo, hi).items():
        if not _matches_class(nf, cfg.class_filter):
            continue
        residue = SequenceManager.subfactorial_mod_fast(n, nf, cache)
        r = abs(residue.signed)
        by_ratio = cfg.ratio_bound is not None and 0 < r / n <= cfg.ratio_bound
        if r <= cfg.residue_bound or by_ratio:
            records.append(ScanRecord.of(residue, nf))
    return records


def _block_table2(cfg: ScanConfig, lo: int, hi: int, cache: Dict[int, int]) -> List[ScanRecord]:
    records = []
    start = max(lo, 7)
    if start >= hi:
        return records
    for n, nf in ArithmeticManager.factorize_range(start, hi).items():
        if n % 2 == 0 or not _matches_class(nf, cfg.class_filter):
            continue
        residue = SequenceManager.subfactorial_mod_fast(n, nf, cache)
        if nf.is_prime:
            # 8 K_p = -S_(p-1) (mod p)
            s = residue.signed
        else:
            k = DeterminantManager.kurepa_residue_from_subfactorial(residue)
            s = Residue.of(-8 * k.value, n).signed
        if abs(s) <= cfg.residue_bound:
            records.append(ScanRecord.of(residue, nf, s))
    return records


def _block_bell_one(cfg: ScanConfig, lo: int, hi: int, cache: Dict[int, int]) -> List[ScanRecord]:
    moduli = np.arange(lo, hi, dtype=np.int64)
    bells = SequenceManager.bell_residues(moduli)
    records = []
    for n, b in zip(moduli.tolist(), bells.tolist()):
        if b == 1 % n:
            nf = ArithmeticManager.factorize(n)
            if not _matches_class(nf, cfg.class_filter):
                continue
            records.append(ScanRecord.of(SequenceManager.subfactorial_mod_fast(n, nf), nf))
    return records


BLOCK_SCANNERS = {
    "kurepa": _block_kurepa,
    "strong": _block_strong,
    "table1": _block_table1,
    "table2": _block_table2,
    "prime-powers": _block_prime_powers,
    "bell-one": _block_bell_one,
}

_WORKER_CACHE: Dict[int, int] = {}


def _init_worker(cache: Dict[int, int]):
    global _WORKER_CACHE
    _WORKER_CACHE = cache


def _scan_block(kind: str, cfg: ScanConfig, block: Block) -> List[ScanRecord]:
    return BLOCK_SCANNERS[kind](cfg, block[0], block[1], _WORKER_CACHE)


class ScanManager:
    """
    Range scans over ``S_(n-1) mod n``, ``-8 K_n mod n`` and ``B_(n-1) mod n``.

    A sequential pre-pass fills a cache of ``S_(d-1) mod d`` for the prime powers d
    the scan needs; the range is then cut into blocks that only do factorization
    and CRT lookups. Blocks run in worker processes when ``jobs > 1`` and are
    merged in ascending n, so the output does not depend on the job count.
    """

    def __init__(self, config: Optional[ConfigManager] = None):
        self.config = config or ConfigManager()
        self.logger = logging.getLogger(__name__)

    @staticmethod
    def needed_moduli(kind: str, cfg: ScanConfig) -> List[int]:
        """The prime powers whose residues the given scan looks up."""
        if kind == "bell-one":
            return []
        top = cfg.hi - 1
        powers = ArithmeticManager.prime_powers_upto(top)
        if kind == "kurepa":
            return [d for d, q, e in powers if e == 1 and q > 2 and d >= cfg.lo]
        if kind == "prime-powers":
            return [d for d, q, e in powers if e >= 2 and d >= cfg.lo]
        if kind == "strong":
            return [d for d, q, e in powers if q > 2 and (e >= 2 or 3 * d <= top)]
        if kind == "table2":
            return [d for d, q, e in powers if q > 2]
        if kind == "table1":
            return [d for d, _, _ in powers]
        raise DomainError(f"Unknown scan kind {kind!r}; expected one of {KINDS}.")

    def build_residue_cache(self, moduli: Sequence[int], jobs: int = 1) -> Dict[int, int]:
        """
        Computes ``S_(d-1) mod d`` for every d in moduli.

        With ``jobs > 1`` the sorted moduli are dealt round-robin to worker processes
        so each worker gets a similar share of the work.
        """
        moduli = sorted(moduli)
        if not moduli:
            return {}
        if jobs <= 1 or len(moduli) < 2 * jobs:
            residues = SequenceManager.subfactorial_residues(moduli).tolist()
            cache = dict(zip(moduli, residues))
        else:
            groups = [moduli[i::jobs] for i in range(jobs)]
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                results = list(pool.map(SequenceManager.subfactorial_residues, groups))
            cache = {}
            for group, residues in zip(groups, results):
                cache.update(zip(group, residues.tolist()))
        self.logger.debug("residue cache holds %d prime powers up to %d", len(cache), moduli[-1])
        return cache

    def _check_kind(self, kind: str, cfg: ScanConfig):
        if kind not in KINDS:
            raise DomainError(f"Unknown scan kind {kind!r}; expected one of {KINDS}.")
        if cfg.class_filter not in ("all", FIXED_CLASS.get(kind, cfg.class_filter)):
            raise DomainError(f"The {kind} scan covers {FIXED_CLASS[kind]} only; class filter {cfg.class_filter!r} "
                              "applies to table1, table2 and bell-one.")
        if kind == "bell-one" and cfg.hi > self.config.bell_scan_ceiling:
            raise ResourceError(f"Bell scan bound {cfg.hi} exceeds the ceiling {self.config.bell_scan_ceiling}.",
                                "a larger KUREPA_BELL_SCAN_CEILING")
        if cfg.hi > self.config.sieve_ceiling:
            raise ResourceError(f"Scan bound {cfg.hi} exceeds the sieve ceiling {self.config.sieve_ceiling}.")
        if cfg.hi > LONG_RUNNING_HI:
            self.logger.warning("scans above 2**23 are long-running: [%d, %d)", cfg.lo, cfg.hi)

    def _run_blocks(self, kind: str, cfg: ScanConfig, blocks: List[Block],
                    cache: Dict[int, int], jobs: int) -> Iterator[List[ScanRecord]]:
        if jobs <= 1 or len(blocks) < 2:
            for lo, hi in blocks:
                yield BLOCK_SCANNERS[kind](cfg, lo, hi, cache)
            return
        with ProcessPoolExecutor(max_workers=jobs, initializer=_init_worker, initargs=(cache,)) as pool:
            yield from pool.map(_scan_block, [kind] * len(blocks), [cfg] * len(blocks), blocks)

    def iter_scan(self, kind: str, cfg: ScanConfig, checkpoint: Optional[DataHandler] = None,
                  resume: bool = False, jobs: Optional[int] = None) -> Iterator[Tuple[int, int, List[ScanRecord]]]:
        """
        Runs a scan block by block.

        Args:
            kind (str): One of ``KINDS``.
            cfg (ScanConfig): Range and thresholds.
            checkpoint (DataHandler, optional): Where to record finished blocks.
            resume (bool): Continue from the checkpoint instead of overwriting it.
            jobs (int, optional): Worker processes, defaults to the configured value.

        Yields:
            Tuple[int, int, List[ScanRecord]]: ``(block_lo, block_hi, records)`` in ascending order,
            completed blocks of a resumed checkpoint included.

        Raises:
            CheckpointError: If resuming from a corrupt or mismatched checkpoint.
        """
        self._check_kind(kind, cfg)
        jobs = self.config.jobs if jobs is None else jobs

        done: Dict[Block, List[Dict]] = {}
        cache = None
        if checkpoint is not None:
            if resume:
                state = checkpoint.resume(kind, cfg.to_dict())
                done, cache = state.blocks, state.cache
            else:
                checkpoint.begin(kind, cfg.to_dict())
        if cache is None:
            cache = self.build_residue_cache(self.needed_moduli(kind, cfg), jobs)
            if checkpoint is not None:
                checkpoint.record_cache(cache)

        step = cfg.checkpoint_interval
        blocks = [(lo, min(lo + step, cfg.hi)) for lo in range(cfg.lo, cfg.hi, step)]
        results = self._run_blocks(kind, cfg, [b for b in blocks if b not in done], cache, jobs)
        for block in blocks:
            if block in done:
                yield block[0], block[1], [ScanRecord.from_dict(r) for r in done[block]]
                continue
            records = next(results)
            if checkpoint is not None:
                checkpoint.record_block(block[0], block[1], [r.to_dict() for r in records])
            self.logger.info("%s scan: block [%d, %d) gave %d records", kind, block[0], block[1], len(records))
            yield block[0], block[1], records

    def scan(self, kind: str, cfg: ScanConfig, **kwargs) -> List[ScanRecord]:
        records = []
        for _, _, block_records in self.iter_scan(kind, cfg, **kwargs):
            records.extend(block_records)
        return records

    def kurepa_prime_scan(self, cfg: ScanConfig, **kwargs) -> List[ScanRecord]:
        """
        Odd primes p in range with ``min(r_p, p - r_p) <= residue_bound``.

        A residue of 0, a counterexample to Kurepa's hypothesis, is always reported.
        """
        return self.scan("kurepa", replace(cfg, class_filter="primes"), **kwargs)

    def strong_kurepa_scan(self, cfg: ScanConfig, **kwargs) -> List[ScanRecord]:
        """Odd composite n with ``S_(n-1) = 2 (mod n)``, equivalently ``n | K_n``."""
        return self.scan("strong", replace(cfg, class_filter="odd-composites"), **kwargs)

    def residue_table_scan(self, cfg: ScanConfig, **kwargs) -> List[ScanRecord]:
        """
        Every n in range with ``|r_n| <= residue_bound``, or with ``0 < |r_n|/n <= ratio_bound``
        when a ratio bound is set. ``cfg.class_filter`` restricts the n considered.
        """
        return self.scan("table1", cfg, **kwargs)

    def kurepa_det_table_scan(self, cfg: ScanConfig, **kwargs) -> List[ScanRecord]:
        """
        Odd n >= 7 in range with ``|s_n| <= residue_bound`` where ``s_n = -8 K_n mod n``.
        ``cfg.class_filter`` further restricts the odd n considered.
        """
        return self.scan("table2", cfg, **kwargs)

    def prime_power_scan(self, cfg: ScanConfig, **kwargs) -> List[ScanRecord]:
        return self.scan("prime-powers", replace(cfg, class_filter="prime-powers"), **kwargs)

    def bell_one_scan(self, cfg: ScanConfig, **kwargs) -> List[ScanRecord]:
        """
        n in range with ``B_(n-1) = 1 (mod n)``, each carrying its balanced ``S_(n-1) mod n``.
        ``cfg.class_filter`` restricts the n reported.
        """
        return self.scan("bell-one", cfg, **kwargs)

    @staticmethod
    def even_crt_residue(n: int, nf: Optional[FactoredInteger] = None,
                         cache: Optional[Dict[int, int]] = None) -> Residue:
        """
        ``S_(n-1) mod n`` for even ``n = 2**e * m`` with m odd, from
        ``S_(2**e - 1) mod 2**e`` and ``-S_(m-1) mod m``.
        """
        if n < 2 or n % 2:
            raise DomainError(f"even_crt_residue needs an even n, got {n}.")
        nf = ArithmeticManager.factorize(n) if nf is None else nf
        two_power = nf.prime_powers()[0]
        odd_part = n // two_power
        cache = {} if cache is None else cache
        if two_power in cache:
            even = cache[two_power]
        else:
            even = SequenceManager.subfactorial_mod(two_power - 1, two_power).value
        parts = [Residue(even, two_power)]
        if odd_part > 1:
            odd = SequenceManager.subfactorial_mod_fast(odd_part, cache=cache).value
            parts.append(Residue.of(-odd, odd_part))
        return ArithmeticManager.crt_combine(parts)

    @staticmethod
    def records_to_frame(records: Sequence[ScanRecord]) -> pd.DataFrame:
        """Report table with the fixed column order and a nullable ``s_signed``."""
        frame = pd.DataFrame([r.to_row() for r in records], columns=REPORT_COLUMNS)
        frame["s_signed"] = frame["s_signed"].astype("Int64")
        return frame.astype({"n": "int64", "r_signed": "int64", "near_miss": "int64", "ratio": "float64"})
