"""Exact arithmetic over finite probability distributions.

Distributions carry exact rational masses (``fractions.Fraction``) by
default, so statistical distance and divergence comparisons can be made
with true equality; 64-bit float masses are accepted for large sweeps and
are validated to a 1e-9 tolerance instead.

All logarithms are base 2; entropies are in bits.  The conventions
``0*log(0) = 0`` and ``D(p||q) = +inf`` whenever ``supp(p)`` is not
contained in ``supp(q)`` are applied throughout.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Hashable, Iterable, Mapping

Outcome = Hashable
Number = Fraction | float

LN2 = math.log(2.0)
FLOAT_TOL = 1e-9


class DomainMismatch(ValueError):
    """Two distributions were combined over different outcome domains."""


class SupportError(ValueError):
    """An outcome outside the support was used where mass is required."""


def log2_number(x: Number) -> float:
    """log2 of a positive rational or float, exact for powers of two."""
    if isinstance(x, Fraction):
        n, d = x.numerator, x.denominator
        if n == 1 and d & (d - 1) == 0:
            return -float(d.bit_length() - 1)
        if d == 1 and n & (n - 1) == 0:
            return float(n.bit_length() - 1)
        return math.log2(n) - math.log2(d)
    if x <= 0:
        raise ValueError("log2 of non-positive value")
    return math.log2(x)


def _is_exact(values: Iterable[Number]) -> bool:
    return all(isinstance(v, (Fraction, int)) for v in values)


class Dist:
    """An immutable probability distribution over an enumerable domain.

    ``mass`` maps outcomes to probabilities; outcomes missing from the
    mapping have probability zero.  ``domain`` may widen the outcome set
    beyond the support (it defaults to the support).
    """

    __slots__ = ("_mass", "_domain", "_exact", "_domain_set")

    def __init__(self, mass: Mapping[Outcome, Number], domain: Iterable[Outcome] | None = None):
        exact = _is_exact(mass.values())
        clean: dict[Outcome, Number] = {}
        for x, p in mass.items():
            p = Fraction(p) if exact else float(p)
            if p < 0:
                if exact or p < -FLOAT_TOL:
                    raise ValueError(f"negative mass {p} at {x!r}")
                p = 0.0
            if p > 0:
                clean[x] = p
        total = sum(clean.values())
        if exact:
            if total != 1:
                raise ValueError(f"masses sum to {total}, not 1")
        elif abs(total - 1.0) > FLOAT_TOL:
            raise ValueError(f"masses sum to {total}, not 1 within {FLOAT_TOL}")
        self._mass = clean
        self._exact = exact
        self._domain_set = None
        if domain is None:
            self._domain = tuple(clean)
        else:
            dom = tuple(domain)
            if len(set(dom)) != len(dom):
                raise ValueError("domain labels not unique")
            missing = set(clean) - set(dom)
            if missing:
                raise ValueError(f"support outside declared domain: {missing}")
            self._domain = dom

    def domain_set(self) -> frozenset:
        if self._domain_set is None:
            self._domain_set = frozenset(self._domain)
        return self._domain_set

    @classmethod
    def uniform(cls, outcomes: Iterable[Outcome]) -> "Dist":
        items = tuple(outcomes)
        p = Fraction(1, len(items))
        return cls({x: p for x in items})

    @classmethod
    def point(cls, x: Outcome, domain: Iterable[Outcome] | None = None) -> "Dist":
        return cls({x: Fraction(1)}, domain=domain)

    @classmethod
    def from_counts(cls, counts: Mapping[Outcome, int], domain=None) -> "Dist":
        total = sum(counts.values())
        return cls({x: Fraction(c, total) for x, c in counts.items() if c}, domain=domain)

    @property
    def domain(self) -> tuple:
        return self._domain

    @property
    def exact(self) -> bool:
        return self._exact

    def prob(self, x: Outcome) -> Number:
        return self._mass.get(x, Fraction(0) if self._exact else 0.0)

    def support(self) -> tuple:
        return tuple(self._mass)

    def items(self):
        return self._mass.items()

    def __len__(self) -> int:
        return len(self._domain)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Dist):
            return NotImplemented
        return self._mass == other._mass

    def __hash__(self):
        return hash(frozenset(self._mass.items()))

    def __repr__(self):
        kind = "exact" if self._exact else "float"
        return f"Dist({len(self._mass)} outcomes of {len(self._domain)}, {kind})"

    def map(self, f: Callable[[Outcome], Outcome]) -> "Dist":
        """Pushforward of the distribution along f."""
        out: dict[Outcome, Number] = {}
        for x, p in self._mass.items():
            y = f(x)
            out[y] = out.get(y, 0) + p
        return Dist(out)

    def condition(self, pred: Callable[[Outcome], bool]) -> "Dist":
        kept = {x: p for x, p in self._mass.items() if pred(x)}
        total = sum(kept.values())
        if total == 0:
            raise SupportError("conditioning event has probability zero")
        return Dist({x: p / total for x, p in kept.items()})


class JointDist(Dist):
    """A Dist over ordered pairs, with marginal and conditional accessors."""

    def __init__(self, mass: Mapping[tuple, Number], domain=None):
        for xy in mass:
            if not (isinstance(xy, tuple) and len(xy) == 2):
                raise ValueError("JointDist outcomes must be pairs")
        super().__init__(mass, domain=domain)

    @classmethod
    def product(cls, p: Dist, q: Dist) -> "JointDist":
        return cls({(x, y): px * qy for x, px in p.items() for y, qy in q.items()})

    @classmethod
    def from_kernel(cls, p1: Dist, kernel: Callable[[Outcome], Dist]) -> "JointDist":
        """Joint law of (X, Y) with X ~ p1 and Y | X=x ~ kernel(x)."""
        mass: dict[tuple, Number] = {}
        for x, px in p1.items():
            for y, py in kernel(x).items():
                mass[(x, y)] = mass.get((x, y), 0) + px * py
        return cls(mass)

    def marginal(self, coord: int) -> Dist:
        out: dict[Outcome, Number] = {}
        for xy, p in self.items():
            out[xy[coord]] = out.get(xy[coord], 0) + p
        return Dist(out)

    def conditional(self, coord: int, value: Outcome) -> Dist:
        """Law of the other coordinate given coordinate ``coord`` == value."""
        other = 1 - coord
        kept = {xy[other]: p for xy, p in self.items() if xy[coord] == value}
        total = sum(kept.values())
        if total == 0:
            raise SupportError(f"conditioning value {value!r} has zero mass")
        return Dist({x: p / total for x, p in kept.items()})

    def swap(self) -> "JointDist":
        return JointDist({(y, x): p for (x, y), p in self.items()})


def _check_same_domain(p: Dist, q: Dist) -> None:
    # The two laws must live on one domain: each support has to fall inside
    # the other's declared domain (declared domains default to the support).
    if p._domain is q._domain:
        return
    if not p.domain_set() >= set(q.support()) or not q.domain_set() >= set(p.support()):
        raise DomainMismatch("distributions are over different domains")


def stat_distance(p: Dist, q: Dist) -> Number:
    """Total variation distance (1/2) * sum_x |p(x) - q(x)|."""
    _check_same_domain(p, q)
    total = sum(abs(p.prob(x) - q.prob(x)) for x in set(p.support()) | set(q.support()))
    return total / 2


def shannon_entropy(p: Dist) -> float:
    """H(p) = -sum p(x) log2 p(x) in bits, with 0*log(0) = 0."""
    return sum(float(px) * -log2_number(px) for _, px in p.items())


def sample_entropy(p: Dist, x: Outcome) -> float:
    """log2(1 / p(x)); raises SupportError off the support."""
    px = p.prob(x)
    if px <= 0:
        raise SupportError(f"outcome {x!r} not in support; sample-entropy undefined")
    return -log2_number(px)


def cond_entropy(j: JointDist) -> float:
    """H(X | Y) = H(X, Y) - H(Y) for a joint law over (x, y) pairs."""
    return shannon_entropy(j) - shannon_entropy(j.marginal(1))


def kl_divergence(p: Dist, q: Dist) -> float:
    """D(p || q) in bits; +inf when supp(p) is not inside supp(q)."""
    _check_same_domain(p, q)
    total = 0.0
    for x, px in p.items():
        qx = q.prob(x)
        if qx <= 0:
            return math.inf
        total += float(px) * log2_number(px / qx if p.exact and q.exact else float(px) / float(qx))
    return total


def kl_chain_rule_check(pj: JointDist, qj: JointDist) -> tuple[float, float]:
    """Both sides of D(pj||qj) = D(p1||q1) + E_{x<-p1} D(p2|x || q2|x).

    The left side sums over pairs directly; the right side decomposes into
    marginal and conditional divergences, so the two are independent
    computations of the same quantity.
    """
    lhs = kl_divergence(pj, qj)
    if math.isinf(lhs):
        return math.inf, math.inf
    p1, q1 = pj.marginal(0), qj.marginal(0)
    rhs = kl_divergence(p1, q1)
    for x, px in p1.items():
        rhs += float(px) * kl_divergence(pj.conditional(0, x), qj.conditional(0, x))
    return lhs, rhs


def pinsker_check(p: Dist, q: Dist) -> tuple[float, float]:
    """(tv, bound) with bound = sqrt((ln 2 / 2) * D(p||q)), D in bits.

    The ln 2 factor converts the divergence to nats so the classical
    inequality tv <= sqrt(D_nats / 2) is reproduced verbatim.
    """
    tv = float(stat_distance(p, q))
    kl = kl_divergence(p, q)
    bound = math.inf if math.isinf(kl) else math.sqrt(LN2 / 2 * kl)
    return tv, bound


def jensen_log2_check(values: Iterable[float], weights: Iterable[Number] | None = None) -> tuple[float, float]:
    """(E[log2 X], log2 E[X]) for positive samples; concavity gives <=."""
    vals = [float(v) for v in values]
    if any(v <= 0 for v in vals):
        raise ValueError("samples must be positive")
    if weights is None:
        w = [1.0 / len(vals)] * len(vals)
    else:
        w = [float(x) for x in weights]
        s = sum(w)
        w = [x / s for x in w]
    e_log = sum(wi * math.log2(v) for wi, v in zip(w, vals))
    log_e = math.log2(sum(wi * v for wi, v in zip(w, vals)))
    return e_log, log_e


@dataclass(frozen=True)
class EntropyReport:
    """Summary of the four basic quantities for a (p, q, joint) triple."""

    shannon: float
    conditional: float
    kl: float
    tv: float

    def __post_init__(self):
        if not 0 <= self.tv <= 1 + FLOAT_TOL:
            raise ValueError(f"tv {self.tv} outside [0, 1]")
        if self.kl < -FLOAT_TOL:
            raise ValueError(f"kl {self.kl} negative")
        if self.shannon < -FLOAT_TOL:
            raise ValueError(f"shannon {self.shannon} negative")


def entropy_report(p: Dist, q: Dist, joint: JointDist) -> EntropyReport:
    report = EntropyReport(
        shannon=shannon_entropy(p),
        conditional=cond_entropy(joint),
        kl=kl_divergence(p, q),
        tv=float(stat_distance(p, q)),
    )
    if report.shannon > math.log2(len(p)) + FLOAT_TOL:
        raise ValueError(f"shannon {report.shannon} above log2 of the domain size")
    return report


def mixture(components: Iterable[tuple[Number, Dist]]) -> Dist:
    """Convex combination of distributions; weights must sum to 1."""
    mass: dict[Outcome, Number] = {}
    for w, d in components:
        for x, p in d.items():
            mass[x] = mass.get(x, 0) + w * p
    return Dist(mass)
