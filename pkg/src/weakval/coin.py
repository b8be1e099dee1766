"""The disturbed classical coin.

Bob reads a coin with misreport probability ``alpha = (1 - lam)/2`` and then
flips it with a probability that depends on what he reported. Pre-selection is
on Heads (+1); the anomalous weak value appears when post-selecting on Tails.
"""

from dataclasses import dataclass

from .errors import DomainError

HEADS, TAILS = +1, -1
SIGNS = (+1, -1)


def _coin(value, name="coin value"):
    if value not in (HEADS, TAILS):
        raise DomainError(f"{name} must be +1 (Heads) or -1 (Tails), got {value!r}")
    return int(value)


@dataclass(frozen=True)
class ClassicalModel:
    lam: float
    delta: float

    def __post_init__(self):
        if not (0.0 < self.lam < 1.0):
            raise DomainError(f"violates 0<λ<1: λ={self.lam!r}")
        if not (0.0 < self.delta < 1.0 - self.lam):
            raise DomainError(f"violates 0<δ<1−λ: δ={self.delta!r}, 1−λ={1.0 - self.lam!r}")

    @property
    def alpha(self):
        """Probability that Bob misreports the coin."""
        return (1.0 - self.lam) / 2.0


@dataclass(frozen=True)
class TrialRecord:
    """One run of the protocol.

    ``flipped`` is always False for trials that failed pre-selection
    (``psi = -1``); the disturbance is only defined after Heads.
    """

    psi: int
    s: int
    flipped: bool
    phi: int

    def __post_init__(self):
        if self.phi != self.psi * (-1 if self.flipped else 1):
            raise ValueError("phi must equal psi, negated when flipped")

    @property
    def preselected(self):
        return self.psi == HEADS


def report_prob(model, psi, s):
    """``Pr(s | psi) = (1 + lam s psi) / 2``."""
    return 0.5 * (1.0 + model.lam * _coin(s, "report") * _coin(psi))


def flip_prob(model, s, psi=HEADS):
    """Probability that Bob flips the coin after reporting ``s``."""
    if _coin(psi) != HEADS:
        raise DomainError("the flip probability is defined only for pre-selection on Heads")
    s = _coin(s, "report")
    return ((1.0 - model.delta) + s * model.lam) / (1.0 + s * model.lam)


def no_flip_prob(model, s, psi=HEADS):
    if _coin(psi) != HEADS:
        raise DomainError("the flip probability is defined only for pre-selection on Heads")
    return model.delta / (1.0 + _coin(s, "report") * model.lam)


@dataclass(frozen=True)
class CoinTables:
    joint: dict  # (s, phi) -> Pr(s, phi | psi=+1)
    marginal: dict  # phi -> Pr(phi | psi=+1)


def joint_and_marginal_tables(model):
    """Closed-form joint ``Pr(s, phi | Heads)`` and its ``phi`` marginal."""
    lam, d = model.lam, model.delta
    joint = {}
    for s in SIGNS:
        joint[(s, HEADS)] = d / 2.0
        joint[(s, TAILS)] = 0.5 * ((1.0 - d) + s * lam)
    return CoinTables(joint, {HEADS: d, TAILS: 1.0 - d})


def exact_weak_value(model):
    """``E[s/lam | phi=Tails, psi=Heads]``; equals ``1 / (1 - delta)``."""
    t = joint_and_marginal_tables(model)
    return sum(s / model.lam * t.joint[(s, TAILS)] for s in SIGNS) / t.marginal[TAILS]


@dataclass(frozen=True)
class OracleResult:
    distribution: dict  # (s, flipped, phi) -> probability
    joint: dict  # (s, phi) -> probability
    marginal: dict  # phi -> probability
    conditional_mean: float  # E[s/lam | phi=Tails]


def enumerate_oracle(model):
    """Brute-force the four outcomes after Heads straight from the protocol.

    Uses only ``alpha`` and the flip rule; none of the Bayes-rule closed forms.
    """
    alpha = model.alpha
    distribution = {}
    for s in SIGNS:
        p_report = 1.0 - alpha if s == HEADS else alpha
        p_flip = ((1.0 - model.delta) + s * model.lam) / (1.0 + s * model.lam)
        for flipped in (False, True):
            phi = -HEADS if flipped else HEADS
            branch = p_flip if flipped else 1.0 - p_flip
            distribution[(s, flipped, phi)] = p_report * branch
    joint = {}
    for (s, _, phi), p in distribution.items():
        joint[(s, phi)] = joint.get((s, phi), 0.0) + p
    marginal = {phi: joint[(HEADS, phi)] + joint[(TAILS, phi)] for phi in (HEADS, TAILS)}
    num = sum(s / model.lam * joint[(s, TAILS)] for s in SIGNS)
    return OracleResult(distribution, joint, marginal, num / marginal[TAILS])
