"""Monte Carlo estimates of trace moments and cumulants under Haar orthogonal measure.

Samples are drawn in fixed-size blocks.  Block ``b`` uses its own generator
seeded with ``(seed, b)``, so results do not depend on how many worker
threads process the blocks.
"""

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .combinatorics import SetPartition, joint_cumulant

__all__ = [
    "SamplerConfig",
    "Estimate",
    "sample_haar_orthogonal",
    "sample_haar_batch",
    "trace_samples",
    "estimate_moment",
    "estimate_cumulant",
    "worker_count",
]

JACKKNIFE_GROUPS = 50


@dataclass(frozen=True)
class SamplerConfig:
    d: int
    samples: int
    seed: int = 0
    haar_count: int = 1
    block_size: int = 1000

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("d must be at least 1")
        if self.samples < 1:
            raise ValueError("samples must be at least 1")
        if self.haar_count < 1 or self.block_size < 1:
            raise ValueError("haar_count and block_size must be positive")


@dataclass(frozen=True)
class Estimate:
    value: float
    stderr: float
    samples: int

    def __post_init__(self):
        if not self.stderr >= 0:
            raise ValueError("stderr must be nonnegative")

    def within(self, exact, k=4.0):
        """``|value - exact| <= k * stderr`` (exact agreement when the stderr is zero)."""
        return abs(self.value - float(exact)) <= k * self.stderr + 1e-9 * max(1.0, abs(float(exact)))

    def to_json(self):
        return {"value": self.value, "stderr": self.stderr, "samples": self.samples}


def worker_count():
    env = os.environ.get("ORTHOWG_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ValueError(f"ORTHOWG_THREADS must be an integer, got {env!r}") from None
    return os.cpu_count() or 1


def sample_haar_batch(d, count, rng):
    """``count`` independent Haar orthogonal ``d x d`` matrices, shape ``(count, d, d)``."""
    z = rng.standard_normal((count, d, d))
    q, r = np.linalg.qr(z)
    signs = np.sign(np.diagonal(r, axis1=1, axis2=2))
    signs[signs == 0] = 1.0
    return q * signs[:, None, :]


def sample_haar_orthogonal(d, rng):
    """One Haar orthogonal matrix via Gaussian QR with the signs of ``diag(R)`` absorbed."""
    return sample_haar_batch(d, 1, rng)[0]


def _float_matrices(mats):
    if mats is None:
        return {}
    if isinstance(mats, dict):
        return {k: np.asarray(v, dtype=float) for k, v in mats.items()}
    return mats.as_float()


def _word_product(word, fmats, d):
    out = np.identity(d)
    for s in word:
        if s.id == "I":
            continue
        try:
            m = fmats[s.id]
        except KeyError:
            raise KeyError(f"unknown symbol {s.id!r}") from None
        out = out @ (m.T if s.t else m)
    return out


def _spec_values(spec, haar, fmats, d):
    """Values of one WordSpec (product of its traces) for every sample in the block."""
    count = haar[0].shape[0]
    labels = spec.labels()
    slot_mats = [_word_product(w, fmats, d) for w in spec.slots]
    out = np.ones(count)
    for cyc in spec.gamma.cycles():
        acc = None
        for k in cyc:
            o = haar[labels[k - 1] - 1]
            if spec.eps[k - 1] < 0:
                o = np.swapaxes(o, 1, 2)
            step = o @ slot_mats[k - 1]
            acc = step if acc is None else acc @ step
        out = out * np.trace(acc, axis1=1, axis2=2)
    for w in spec.tail:
        out = out * np.trace(_word_product(w, fmats, d))
    return out


def _required_haar(words):
    return max((max(w.labels()) for w in words if w.n), default=1)


def trace_samples(words, mats, cfg, threads=None):
    """Matrix of shape ``(samples, len(words))`` with each word's value per sample."""
    words = list(words)
    need = _required_haar(words)
    if need > cfg.haar_count:
        raise ValueError(f"words use {need} Haar matrices but haar_count = {cfg.haar_count}")
    fmats = _float_matrices(mats)
    for w in words:
        missing = {s for s in w.symbols() if s != "I"} - set(fmats)
        if missing:
            raise KeyError(f"unknown symbol(s): {', '.join(sorted(missing))}")
    d = cfg.d
    blocks = [(b, min(cfg.block_size, cfg.samples - b * cfg.block_size))
              for b in range(-(-cfg.samples // cfg.block_size))]

    def run(block):
        index, size = block
        rng = np.random.default_rng([cfg.seed, index])
        haar = [sample_haar_batch(d, size, rng) for _ in range(cfg.haar_count)]
        return np.stack([_spec_values(w, haar, fmats, d) for w in words], axis=1)

    threads = threads or worker_count()
    if threads == 1 or len(blocks) == 1:
        parts = [run(b) for b in blocks]
    else:
        with ThreadPoolExecutor(max_workers=min(threads, len(blocks))) as pool:
            parts = list(pool.map(run, blocks))
    return np.concatenate(parts, axis=0)


def estimate_moment(words, mats, cfg, threads=None):
    """Sample mean and standard error of the product of the words' trace values."""
    x = np.prod(trace_samples(words, mats, cfg, threads), axis=1)
    n = x.shape[0]
    stderr = float(np.std(x, ddof=1) / np.sqrt(n)) if n > 1 else 0.0
    return Estimate(float(np.mean(x)), stderr, n)


def _plugin_cumulant(x):
    r = x.shape[1]

    def moment(block):
        return float(np.mean(np.prod(x[:, [i - 1 for i in block]], axis=1)))

    return joint_cumulant(moment, SetPartition.one_block(r))


def estimate_cumulant(words, mats, r, cfg, threads=None):
    """Plug-in joint cumulant ``k_r`` with a jackknife standard error over 50 groups."""
    words = list(words)
    if r > 4:
        raise ValueError("cumulants are estimated only up to order 4")
    if r != len(words):
        raise ValueError("r must equal the number of words")
    x = trace_samples(words, mats, cfg, threads)
    value = _plugin_cumulant(x)
    n = x.shape[0]
    groups = min(JACKKNIFE_GROUPS, n)
    if groups < 2:
        return Estimate(value, 0.0, n)
    bounds = np.linspace(0, n, groups + 1).astype(int)
    leave_out = []
    for g in range(groups):
        keep = np.concatenate([x[: bounds[g]], x[bounds[g + 1]:]], axis=0)
        leave_out.append(_plugin_cumulant(keep))
    leave_out = np.array(leave_out)
    stderr = float(np.sqrt((groups - 1) / groups * np.sum((leave_out - leave_out.mean()) ** 2)))
    return Estimate(value, stderr, n)
