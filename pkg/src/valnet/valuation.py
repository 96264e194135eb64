"""Valuations as sets of extended focal elements.

A valuation attaches to each focal element (a configuration set) a real value
per configuration.  Belief functions carry one constant mass per focal,
utility valuations consist of a single focal covering the whole frame, and
anything else produced by the calculus is labelled "general".
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

from .errors import DomainMismatchError, KindError, MassError, NetworkError
from .model import ConfigSet, Variable, all_configs, concat_configs, make_config

BELIEF = "belief"
UTILITY = "utility"
GENERAL = "general"

# Absolute tolerance on bpa mass sums; relative tolerance for value comparisons.
MASS_TOL = 1e-9
VALUE_RTOL = 1e-6


def support_key(support):
    """Deterministic sort key for a focal's configuration set."""
    return tuple(sorted(support.members))


@dataclass(frozen=True)
class Focal:
    """An extended focal element: a support set and one value per member."""

    support: ConfigSet
    values: dict

    def __post_init__(self):
        if set(self.values) != set(self.support.members):
            raise DomainMismatchError("focal values must cover exactly the support")

    @property
    def mass(self):
        """The constant value of a belief-function focal."""
        return next(iter(self.values.values()))


@dataclass(frozen=True)
class Valuation:
    domain: frozenset
    frames: dict
    kind: str
    focals: tuple
    label: str = field(default="", compare=False)

    def full_frame_size(self):
        return math.prod(len(self.frames[n]) for n in self.domain)

    def value_at(self, x):
        """Total value of configuration x summed over the focals containing it."""
        return sum(f.values[x] for f in self.focals if x in f.support)


def frames_of(variables):
    return {v.name: tuple(v.frame) for v in variables}


def canonical_focals(items, kind):
    """Merge focals with equal supports by pointwise summation and sort them.

    Belief-kind zero-mass focals are dropped.
    """
    merged = {}
    for support, values in items:
        key = support_key(support)
        if key in merged:
            old = merged[key][1]
            for x, v in values.items():
                old[x] = old.get(x, 0.0) + v
        else:
            merged[key] = (support, dict(values))
    focals = []
    for key in sorted(merged):
        support, values = merged[key]
        if kind == BELIEF and all(v == 0 for v in values.values()):
            continue
        focals.append(Focal(support, values))
    return tuple(focals)


def _check_bpa_masses(assignments, where=""):
    total = 0.0
    for support, mass in assignments:
        if mass < 0:
            raise MassError("negative mass %r%s" % (mass, where))
        total += mass
    if abs(total - 1.0) > MASS_TOL:
        raise MassError("masses sum to %r, expected 1%s" % (total, where))


def make_bpa(variables, assignments, label=""):
    """Build a belief valuation from (configuration set, mass) pairs.

    Duplicate supports are merged by summing their masses; zero-mass entries
    are dropped.  Masses must be nonnegative and sum to one.
    """
    variables = list(variables)
    domain = frozenset(v.name for v in variables)
    if not domain:
        raise NetworkError("a bpa needs at least one variable")
    frames = frames_of(variables)
    assignments = list(assignments)
    for support, _ in assignments:
        if support.domain != domain:
            raise DomainMismatchError(
                "focal over %r does not match bpa domain %r"
                % (sorted(support.domain), sorted(domain))
            )
    _check_bpa_masses(assignments)
    items = [
        (support, {x: float(mass) for x in support})
        for support, mass in assignments
        if mass > 0
    ]
    focals = canonical_focals(items, BELIEF)
    return Valuation(domain, frames, BELIEF, focals, label)


def make_utility(variables, table, label=""):
    """Build a utility valuation from a {configuration: value} table.

    The table must cover the full frame of the variables, nothing more.
    """
    variables = list(variables)
    domain = frozenset(v.name for v in variables)
    if not domain:
        raise NetworkError("a utility valuation needs at least one variable")
    frames = frames_of(variables)
    expected = set(all_configs(domain, frames))
    given = set(table)
    if given != expected:
        missing = sorted(expected - given)
        extra = sorted(given - expected)
        raise DomainMismatchError(
            "utility table mismatch (missing %r, extra %r)" % (missing, extra)
        )
    support = ConfigSet(domain, frozenset(expected))
    values = {x: float(v) for x, v in table.items()}
    return Valuation(domain, frames, UTILITY, (Focal(support, values),), label)


def vacuous(variables, label=""):
    """The belief function putting all mass on the full frame."""
    variables = list(variables)
    if not variables:
        raise NetworkError("the vacuous belief function needs a nonempty domain")
    domain = frozenset(v.name for v in variables)
    frames = frames_of(variables)
    support = ConfigSet(domain, frozenset(all_configs(domain, frames)))
    return Valuation(domain, frames, BELIEF, (Focal(support, {x: 1.0 for x in support}),), label)


def belief_of(v, a):
    """Bel(a): total mass of the focals contained in the configuration set a."""
    if v.kind != BELIEF:
        raise KindError("belief_of needs a belief valuation, got %r" % v.kind)
    if a.domain != v.domain:
        raise DomainMismatchError("query set is over the wrong domain")
    return sum(f.mass for f in v.focals if f.support.members <= a.members)


def is_vacuous(v, tol=MASS_TOL):
    if v.kind != BELIEF or len(v.focals) != 1:
        return False
    focal = v.focals[0]
    return (
        len(focal.support) == v.full_frame_size()
        and abs(focal.mass - 1.0) <= tol
    )


def balloon(head, parents, tables, label=""):
    """Lift per-parent-configuration bpas over the head to one joint bpa.

    ``tables`` maps each parent configuration to a sequence of
    (head-value subset, mass) pairs.  Each joint focal picks one focal per
    parent configuration; its support is the union of the picked slices and
    its mass the product of the picked masses.
    """
    parents = list(parents)
    parent_names = frozenset(p.name for p in parents)
    if head.name in parent_names:
        raise NetworkError("head %r cannot be its own parent" % head.name)
    frames = frames_of(parents)
    frames[head.name] = tuple(head.frame)
    parent_configs = all_configs(parent_names, frames)
    normalized = {}
    for key, entries in tables.items():
        cfg = key if isinstance(key, tuple) and (not key or isinstance(key[0], tuple)) else None
        if cfg is None or set(n for n, _ in cfg) != parent_names:
            raise DomainMismatchError("bad parent configuration key %r" % (key,))
        normalized[cfg] = list(entries)
    missing = [c for c in parent_configs if c not in normalized]
    if missing or len(normalized) != len(parent_configs):
        raise DomainMismatchError(
            "conditional tables must cover every parent configuration (missing %r)"
            % (missing,)
        )
    head_frame = set(head.frame)
    for cfg, entries in normalized.items():
        for subset, _ in entries:
            subset = set(subset)
            if not subset or not subset <= head_frame:
                raise MassError(
                    "focal %r is not a nonempty subset of the frame of %r"
                    % (sorted(subset), head.name)
                )
        _check_bpa_masses(entries, " in table for parent %r" % (cfg,))

    domain = parent_names | {head.name}
    items = []
    per_parent = [normalized[c] for c in parent_configs]
    for choice in itertools.product(*per_parent):
        mass = math.prod(m for _, m in choice)
        if mass <= 0:
            continue
        members = set()
        for cfg, (subset, _) in zip(parent_configs, choice):
            for r in subset:
                members.add(concat_configs(cfg, make_config({head.name: r})))
        support = ConfigSet(domain, frozenset(members))
        items.append((support, {x: mass for x in support}))
    focals = canonical_focals(items, BELIEF)
    return Valuation(domain, frames, BELIEF, focals, label)


def is_conditional(v, head_name, tol=MASS_TOL):
    """True iff marginalizing the head out of v leaves the vacuous belief function."""
    if v.kind != BELIEF:
        raise KindError("is_conditional needs a belief valuation, got %r" % v.kind)
    if head_name not in v.domain:
        raise DomainMismatchError("%r is not in the valuation's domain" % head_name)
    from .calculus import marginalize_belief

    marginal = marginalize_belief(v, head_name)
    if not marginal.domain:
        # Degenerate parents: the marginal is the unit mass on the diamond.
        return abs(sum(f.mass for f in marginal.focals) - 1.0) <= tol
    return is_vacuous(marginal, tol)


@dataclass(frozen=True)
class ConditionalPotential:
    """A per-parent family of bpas over one random variable, ballooned eagerly."""

    head: Variable
    parents: tuple
    tables: dict
    ballooned: Valuation
    label: str = field(default="", compare=False)

    @property
    def domain(self):
        return self.ballooned.domain


def conditional(head, parents, tables, label=""):
    """Build a conditional potential, normalizing table keys to configurations.

    ``tables`` may be keyed either by canonical parent configurations or by
    tuples of parent values in the order the parents are listed.
    """
    parents = tuple(parents)
    if head.kind != "random":
        raise NetworkError("conditional potential head %r must be random" % head.name)
    normalized = {}
    for key, entries in tables.items():
        if isinstance(key, tuple) and key and isinstance(key[0], tuple):
            cfg = key
        else:
            values = key if isinstance(key, tuple) else (key,)
            if len(values) != len(parents):
                raise DomainMismatchError(
                    "parent key %r does not match parents %r"
                    % (key, [p.name for p in parents])
                )
            cfg = make_config({p.name: v for p, v in zip(parents, values)})
        if cfg in normalized:
            raise DomainMismatchError("duplicate table for parent %r" % (cfg,))
        normalized[cfg] = tuple((frozenset(s), float(m)) for s, m in entries)
    ballooned = balloon(head, parents, normalized, label=label)
    return ConditionalPotential(head, parents, normalized, ballooned, label)


def values_close(a, b, rtol=VALUE_RTOL, atol=1e-9):
    return abs(a - b) <= max(atol, rtol * max(abs(a), abs(b)))


def valuations_close(u, v, rtol=VALUE_RTOL, atol=1e-9):
    """Structural near-equality: same domains and supports, close values."""
    if u.domain != v.domain or len(u.focals) != len(v.focals):
        return False
    for fu, fv in zip(u.focals, v.focals):
        if fu.support != fv.support:
            return False
        if not all(values_close(fu.values[x], fv.values[x], rtol, atol) for x in fu.values):
            return False
    return True
