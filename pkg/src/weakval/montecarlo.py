"""Seedable simulation of the qubit and coin protocols.

Trials are cut into fixed blocks of ``BLOCK_SIZE``. Block ``b`` always draws
from substream ``(seed, b)``, whatever the number of workers, and the running
statistics are integer sums of the reported sign. A run is therefore
bit-identical under any partition of the blocks among workers.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import kernels
from .analytic import WeakSetup, joint_prob, require_admissible, weak_value
from .coin import (
    HEADS, TAILS, ClassicalModel, TrialRecord, exact_weak_value, flip_prob, joint_and_marginal_tables,
)
from .errors import ConfigMismatch, DomainError, InsufficientPostselection
from .meter import GaussianMeter
from .qubit import Z, inner, make_state_pair

BLOCK_SIZE = 1 << 16
DEFAULT_SEED = 20140613
DEFAULT_HEADS_PROB = 1.0
MODES = ("classical", "quantum", "meter")
_U64 = 1 << 64


@dataclass(frozen=True)
class RngStream:
    master_seed: int
    stream_index: int

    def __post_init__(self):
        if not (0 <= self.master_seed < _U64):
            raise DomainError(f"seed must be a 64-bit unsigned integer, got {self.master_seed!r}")
        if self.stream_index < 0:
            raise DomainError("stream_index must be nonnegative")

    def generator(self):
        """Counter-based Philox generator for this substream."""
        seq = np.random.SeedSequence(entropy=self.master_seed, spawn_key=(self.stream_index,))
        return np.random.Generator(np.random.Philox(seq))


# -- single trials ------------------------------------------------------------


def sample_classical_trial(model, rng, heads_prob=DEFAULT_HEADS_PROB):
    """Run the four protocol steps once.

    Consumes exactly three uniforms (toss, report, flip) so that a sequence of
    calls reproduces the block sampler draw for draw.
    """
    u_toss, u_report, u_flip = rng.random(3)
    psi = HEADS if u_toss < heads_prob else TAILS
    p_plus = 0.5 * (1.0 + model.lam * psi)
    s = +1 if u_report < p_plus else -1
    if psi != HEADS:
        return TrialRecord(psi, s, False, psi)
    flipped = bool(u_flip < flip_prob(model, s))
    return TrialRecord(psi, s, flipped, -psi if flipped else psi)


def quantum_joint_table(setup, psi, phi_basis):
    """``Pr(s, phi_k | psi)`` as a (2, 2) array indexed ``[s_index, k]``."""
    if len(phi_basis) != 2 or abs(inner(phi_basis[0], phi_basis[1])) > 1e-12:
        raise DomainError("phi_basis must hold two orthonormal states")
    for phi in phi_basis:
        if abs(inner(phi, psi)) > 1e-14:
            require_admissible(setup, psi, phi)
    return np.array([[joint_prob(setup, psi, phi, s) for phi in phi_basis] for s in (+1, -1)])


def _cdf(table):
    return np.cumsum(np.asarray(table, dtype=np.float64).ravel())


def sample_quantum_trial(setup, psi, phi_basis, rng):
    """Draw ``(s, phi_index)`` by inverse CDF over the four joint cells."""
    cdf = _cdf(quantum_joint_table(setup, psi, phi_basis))
    u = rng.random()
    k = 0
    while k < 3 and u >= cdf[k]:
        k += 1
    return (+1 if k < 2 else -1), k % 2


# -- statistics ----------------------------------------------------------------


@dataclass(frozen=True)
class PostselectedEstimate:
    n_total: int
    n_postselected: int
    mean: float
    stderr: float
    postselection_rate: float


@dataclass(frozen=True)
class Accumulator:
    """Running ``(count, sum, sum of squares)`` of the reported sign ``s``.

    Values are summed unscaled; ``1/lam`` is applied only in :func:`finalize`.
    """

    key: tuple = ()
    n_total: int = 0
    count: int = 0
    total: float = 0.0
    total_sq: float = 0.0

    @classmethod
    def empty(cls, key=()):
        return cls(key)

    def add(self, s, postselected=True):
        if not postselected:
            return replace(self, n_total=self.n_total + 1)
        return replace(
            self,
            n_total=self.n_total + 1,
            count=self.count + 1,
            total=self.total + s,
            total_sq=self.total_sq + s * s,
        )


def merge(a, b):
    if a.key != b.key:
        raise ConfigMismatch(f"cannot merge accumulators from different configs: {a.key} vs {b.key}")
    return Accumulator(
        a.key, a.n_total + b.n_total, a.count + b.count, a.total + b.total, a.total_sq + b.total_sq
    )


def finalize(acc, lam):
    n = acc.count
    rate = n / acc.n_total if acc.n_total else 0.0
    if n < 2:
        raise InsufficientPostselection(
            f"only {n} of {acc.n_total} trials survived post-selection (rate {rate:.3g})", n, rate
        )
    var = max(acc.total_sq - acc.total * acc.total / n, 0.0) / (n - 1)
    return PostselectedEstimate(
        n_total=acc.n_total,
        n_postselected=n,
        mean=acc.total / (n * lam),
        stderr=math.sqrt(var / n) / lam,
        postselection_rate=rate,
    )


def estimate_weak_value(trials, lam, postselect_target, key=()):
    """Estimate ``E[s/lam | phi = target]`` from an iterable of trials.

    Each trial is a :class:`TrialRecord` (pre-selection failures are counted
    but not used) or an ``(s, phi)`` pair with ``phi`` in ``{+1, -1}``.
    """
    acc = Accumulator.empty(key)
    for t in trials:
        if isinstance(t, TrialRecord):
            keep = t.preselected and t.phi == postselect_target
            acc = acc.add(t.s, keep)
        else:
            s, phi = t
            acc = acc.add(s, phi == postselect_target)
    return finalize(acc, lam)


@dataclass
class Tally:
    """Raw cell counts: ``cells[s_index, phi_index]`` plus pre-selection failures."""

    n_total: int = 0
    n_failed: int = 0
    cells: np.ndarray = field(default_factory=lambda: np.zeros((2, 2), dtype=np.int64))

    @classmethod
    def from_counts(cls, counts):
        counts = np.asarray(counts, dtype=np.int64)
        return cls(int(counts.sum()), int(counts[0]), counts[1:].reshape(2, 2).copy())

    def __add__(self, other):
        return Tally(self.n_total + other.n_total, self.n_failed + other.n_failed, self.cells + other.cells)

    def accumulator(self, postselect_target, key=()):
        k = 0 if postselect_target == +1 else 1
        plus, minus = int(self.cells[0, k]), int(self.cells[1, k])
        return Accumulator(key, self.n_total, plus + minus, float(plus - minus), float(plus + minus))


# -- run configuration ---------------------------------------------------------


@dataclass(frozen=True)
class RunConfig:
    """One simulated experiment.

    ``postselect`` is the Z label of the kept outcome: for the coin +1 is
    Heads and -1 Tails; for qubit modes +1 keeps ``phi(theta)`` and -1 its
    orthogonal complement. ``heads_prob`` is the chance that Alice's initial
    toss lands Heads; Tails trials count toward ``n_total`` only.
    """

    mode: str
    lam: float = None
    delta: float = None
    theta: float = None
    sigma: float = None
    x: float = None
    trials: int = 1_000_000
    seed: int = DEFAULT_SEED
    postselect: int = None
    workers: int = 1
    heads_prob: float = DEFAULT_HEADS_PROB

    def __post_init__(self):
        if self.mode not in MODES:
            raise DomainError(f"mode must be one of {MODES}, got {self.mode!r}")
        if int(self.trials) < 1:
            raise DomainError("trials must be >= 1")
        if int(self.workers) < 1:
            raise DomainError("workers must be >= 1")
        if not (0.0 < self.heads_prob <= 1.0):
            raise DomainError("heads_prob must lie in (0, 1]")
        if self.postselect is None:
            object.__setattr__(self, "postselect", TAILS if self.mode == "classical" else +1)
        if self.postselect not in (+1, -1):
            raise DomainError("postselect must be +1 or -1")
        RngStream(self.seed, 0)
        self.experiment()

    @property
    def key(self):
        return tuple(v for k, v in self.__dict__.items() if k != "workers")

    def experiment(self):
        if self.mode == "classical":
            if self.lam is None or self.delta is None:
                raise DomainError("classical mode needs lambda and delta")
            return ClassicalExperiment(ClassicalModel(self.lam, self.delta), self.heads_prob)
        if self.mode == "meter":
            lam = GaussianMeter(self.sigma, self.x).lam
        else:
            lam = self.lam
        if self.theta is None or lam is None:
            raise DomainError(f"{self.mode} mode needs theta and a strength")
        return QuantumExperiment(WeakSetup(Z, lam), make_state_pair(self.theta))


@dataclass(frozen=True)
class ClassicalExperiment:
    model: ClassicalModel
    heads_prob: float

    @property
    def lam(self):
        return self.model.lam

    def counts(self, rng, n):
        m = self.model
        flip = np.array([flip_prob(m, s) for s in (+1, -1)])
        return kernels.classical_counts(rng.random((n, 3)), self.heads_prob, 0.5 * (1.0 + m.lam), flip)

    def exact(self, target):
        if target == TAILS:
            return exact_weak_value(self.model)
        t = joint_and_marginal_tables(self.model)
        return sum(s / self.lam * t.joint[(s, target)] for s in (+1, -1)) / t.marginal[target]

    @property
    def label(self):
        return self.model.delta


@dataclass(frozen=True)
class QuantumExperiment:
    setup: WeakSetup
    pair: object

    def __post_init__(self):
        quantum_joint_table(self.setup, self.pair.psi, self.basis)

    @property
    def lam(self):
        return self.setup.lam

    @property
    def basis(self):
        return (self.pair.phi, self.pair.phi.orthogonal())

    def counts(self, rng, n):
        cdf = _cdf(quantum_joint_table(self.setup, self.pair.psi, self.basis))
        cells = kernels.categorical_counts(rng.random(n), cdf)
        return np.concatenate([[0], cells])

    def exact(self, target):
        phi = self.basis[0 if target == +1 else 1]
        return weak_value(self.setup.A, self.pair.psi, phi).real

    @property
    def label(self):
        return self.pair.theta


@dataclass(frozen=True)
class SimulationResult:
    config: RunConfig
    tally: Tally
    estimate: PostselectedEstimate
    a_w_exact: float
    lam: float


def block_plan(trials):
    """Sizes of the fixed trial blocks, one substream each."""
    full, rest = divmod(int(trials), BLOCK_SIZE)
    return [BLOCK_SIZE] * full + ([rest] if rest else [])


def _run_blocks(experiment, seed, sizes, indices):
    counts = np.zeros(5, dtype=np.int64)
    for b in indices:
        counts += experiment.counts(RngStream(seed, int(b)).generator(), sizes[b])
    return counts


def simulate_tally(config):
    """Sample every block of ``config`` and return the merged :class:`Tally`."""
    experiment = config.experiment()
    sizes = block_plan(config.trials)
    parts = [p for p in np.array_split(np.arange(len(sizes)), config.workers) if len(p)]
    if len(parts) == 1:
        results = [_run_blocks(experiment, config.seed, sizes, parts[0])]
    else:
        with ThreadPoolExecutor(max_workers=len(parts)) as pool:
            results = list(pool.map(lambda p: _run_blocks(experiment, config.seed, sizes, p), parts))
    tally = Tally()
    for r in results:
        tally = tally + Tally.from_counts(r)
    return tally


def run_simulation(config):
    experiment = config.experiment()
    tally = simulate_tally(config)
    acc = tally.accumulator(config.postselect, config.key)
    return SimulationResult(
        config=config,
        tally=tally,
        estimate=finalize(acc, experiment.lam),
        a_w_exact=experiment.exact(config.postselect),
        lam=experiment.lam,
    )
