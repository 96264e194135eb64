"""Combination and marginalization of valuations.

Combination intersects cylinder-extended focals pairwise: belief with belief
follows Dempster's rule (product, normalized by one minus the conflict),
non-belief with non-belief adds values, and a mixed pair multiplies without
normalization.  Marginalization removes one variable at a time: a maximum for
decision variables and a lambda-weighted blend of maximum and minimum for
random variables; belief valuations reduce to plain mass summation over
projected supports.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

from .errors import DomainMismatchError, KindError, TotalConflictError, ValnetError
from .model import ConfigSet, concat_configs, make_config, project_config
from .valuation import BELIEF, GENERAL, UTILITY, Valuation, canonical_focals

CONFLICT_TOL = 1e-12


def check_lambda(lam):
    if lam is None:
        raise ValnetError("a weighting factor in [0, 1] is required")
    lam = float(lam)
    if not 0.0 <= lam <= 1.0:
        raise ValnetError("weighting factor %r is outside [0, 1]" % lam)
    return lam


@dataclass(frozen=True)
class SolutionTable:
    """Recorded optimal acts for one decision variable.

    ``choices`` maps each configuration of the remaining variables to the act
    maximizing the summed per-focal contribution.  ``conflicts`` lists the
    contexts where individual focals preferred different acts.
    """

    decision: str
    context: tuple
    choices: dict
    conflicts: frozenset = field(default_factory=frozenset)


def _merge_frames(valuations):
    frames = {}
    for v in valuations:
        for name, frame in v.frames.items():
            if frames.setdefault(name, frame) != frame:
                raise DomainMismatchError("inconsistent frames for %r" % name)
    return frames


def _nonbelief_kind(domain, frames, focals):
    """A non-belief result is a utility valuation iff one focal spans the frame."""
    if len(focals) != 1:
        return GENERAL
    full = 1
    for name in domain:
        full *= len(frames[name])
    return UTILITY if len(focals[0].support) == full else GENERAL


def _joint_support(supports, domains, union, frames):
    """Intersection of the cylinder extensions of several supports, or None."""
    members = supports[0].extend(union, frames).members
    for support, domain in zip(supports[1:], domains[1:]):
        members = frozenset(
            z for z in members if project_config(z, domain) in support.members
        )
        if not members:
            return None
    return ConfigSet(union, members)


def combine(vi, vj):
    """Binary combination of two valuations."""
    if vi.kind == BELIEF and vj.kind == BELIEF:
        result, _ = _combine_many([], [vi, vj])
    elif vi.kind != BELIEF and vj.kind != BELIEF:
        result, _ = _combine_many([vi, vj], [])
    else:
        nonbelief = vi if vi.kind != BELIEF else vj
        belief = vj if vi.kind != BELIEF else vi
        result, _ = _combine_many([nonbelief], [belief])
    return result


def combine_all(valuations):
    """Fold a pool of valuations, combining non-beliefs before beliefs."""
    result, _ = combine_all_traced(valuations)
    return result


def combine_all_traced(valuations):
    """As combine_all, but also reports which input focals built each output focal.

    Returns (valuation, provenance) where provenance is a list parallel to the
    result focals; each entry lists tuples of focal indices, one per input
    valuation in the given order.
    """
    valuations = list(valuations)
    if not valuations:
        raise ValnetError("cannot combine an empty collection of valuations")
    others = [v for v in valuations if v.kind != BELIEF]
    beliefs = [v for v in valuations if v.kind == BELIEF]
    return _combine_many(others, beliefs, order=valuations)


def _combine_many(others, beliefs, order=None):
    """N-ary combination: values of non-beliefs add, belief masses multiply.

    Joint supports come from intersecting all cylinder extensions; the belief
    part is renormalized by one minus the total conflict among the beliefs.
    """
    inputs = others + beliefs
    if order is None:
        order = inputs
    position = {id(v): i for i, v in enumerate(order)}
    union = frozenset().union(*(v.domain for v in inputs))
    frames = _merge_frames(inputs)

    # fsum keeps the conflict independent of the iteration order, so swapping
    # the arguments yields bit-identical results.
    clashes = []
    if len(beliefs) >= 2:
        belief_union = frozenset().union(*(v.domain for v in beliefs))
        for combo in itertools.product(*(v.focals for v in beliefs)):
            joint = _joint_support(
                [f.support for f in combo], [v.domain for v in beliefs],
                belief_union, frames,
            )
            if joint is None:
                mass = 1.0
                for f in combo:
                    mass *= f.mass
                clashes.append(mass)
    norm = 1.0 - math.fsum(sorted(clashes))
    if beliefs and norm <= CONFLICT_TOL:
        raise TotalConflictError("belief functions are in total conflict")

    accum = {}
    provenance = {}
    domains = [v.domain for v in inputs]
    for combo in itertools.product(*(range(len(v.focals)) for v in inputs)):
        focals = [v.focals[i] for v, i in zip(inputs, combo)]
        joint = _joint_support([f.support for f in focals], domains, union, frames)
        if joint is None:
            continue
        values = {}
        for z in joint:
            total = 0.0
            for v, f in zip(others, focals[: len(others)]):
                total += f.values[project_config(z, v.domain)]
            mass = 1.0
            for v, f in zip(beliefs, focals[len(others):]):
                mass *= f.values[project_config(z, v.domain)]
            if beliefs:
                mass /= norm
            values[z] = total * mass if others and beliefs else (mass if beliefs else total)
        key = tuple(sorted(joint.members))
        if key in accum:
            old = accum[key][1]
            for z, val in values.items():
                old[z].append(val)
        else:
            accum[key] = (joint, {z: [val] for z, val in values.items()})
        source = [0] * len(order)
        for v, i in zip(inputs, combo):
            source[position[id(v)]] = i
        provenance.setdefault(key, []).append(tuple(source))

    if not accum:
        # Only possible for mixed pairs whose supports never meet; with valid
        # belief inputs a full-frame choice always intersects, so treat this
        # as conflict.
        raise TotalConflictError("no joint focal has a nonempty support")

    kind = BELIEF if not others else None
    items = [
        (joint, {z: math.fsum(sorted(vals)) for z, vals in values.items()})
        for joint, values in accum.values()
    ]
    focals = canonical_focals(items, BELIEF if kind == BELIEF else GENERAL)
    if kind != BELIEF:
        kind = _nonbelief_kind(union, frames, focals)
    prov = [provenance[tuple(sorted(f.support.members))] for f in focals]
    return Valuation(union, frames, kind, focals), prov


def marginalize_belief(v, name):
    """Project a belief valuation: masses of focals with equal projections add."""
    if v.kind != BELIEF:
        raise KindError("marginalize_belief needs a belief valuation, got %r" % v.kind)
    if name not in v.domain:
        raise DomainMismatchError("%r is not in the valuation's domain" % name)
    rest = v.domain - {name}
    items = []
    for f in v.focals:
        if rest:
            proj = f.support.project(rest)
        else:
            proj = ConfigSet(frozenset(), frozenset([()]))
        items.append((proj, {x: f.mass for x in proj}))
    focals = canonical_focals(items, BELIEF)
    frames = {n: f for n, f in v.frames.items() if n in rest}
    return Valuation(rest, frames, BELIEF, focals)


def marginalize(v, variable, lam=None, policy=None, want_detail=False):
    """Remove one variable from a valuation.

    Belief valuations route to mass summation.  Otherwise a decision variable
    is eliminated by maximization (recording a solution table, unless a
    ``policy`` table dictates the act) and a random variable by the
    lambda-weighted blend of maximum and minimum.

    Returns (valuation, solution table or None); with ``want_detail`` a third
    element gives, per result focal, the per-source-focal contributions used
    to build each value.
    """
    name = variable.name
    if name not in v.domain:
        raise DomainMismatchError("%r is not in the valuation's domain" % name)
    if v.kind == BELIEF:
        result = marginalize_belief(v, name)
        if want_detail:
            detail = _belief_detail(v, result, name)
            return result, None, detail
        return result, None

    is_dec = variable.is_decision
    if not is_dec:
        lam = check_lambda(lam)
    rest = v.domain - {name}
    frames = {n: f for n, f in v.frames.items() if n in rest}

    # Group source focals by their projected support.
    groups = {}
    for idx, f in enumerate(v.focals):
        if rest:
            proj = f.support.project(rest)
        else:
            proj = ConfigSet(frozenset(), frozenset([()]))
        groups.setdefault(tuple(sorted(proj.members)), (proj, []))[1].append((idx, f))

    scores = {}
    focal_prefs = {}
    items = []
    detail = []
    for key in sorted(groups):
        proj, members = groups[key]
        values = {}
        contribs = {}
        for x in proj:
            total = 0.0
            for idx, f in members:
                ext = {
                    y: f.values[y]
                    for y in f.support
                    if (project_config(y, rest) if rest else ()) == x
                }
                if is_dec:
                    if policy is not None:
                        contrib = _policy_value(ext, x, name, policy)
                    else:
                        contrib = max(ext.values())
                        best = _argmax_act(ext, name, variable.frame)
                        focal_prefs.setdefault(x, set()).add(best)
                        acts = scores.setdefault(x, {})
                        for y, val in ext.items():
                            act = dict(y)[name]
                            acts[act] = acts.get(act, 0.0) + val
                else:
                    contrib = lam * max(ext.values()) + (1.0 - lam) * min(ext.values())
                contribs[(idx, x)] = contrib
                total += contrib
            values[x] = total
        items.append((proj, values))
        detail.append(contribs)

    focals = canonical_focals(items, GENERAL)
    kind = _nonbelief_kind(rest, frames, focals)
    result = Valuation(rest, frames, kind, focals)

    table = None
    if is_dec and policy is None:
        choices = {}
        conflicts = set()
        for x, acts in scores.items():
            choices[x] = _best_act(acts, variable.frame)
            if len(focal_prefs[x]) > 1:
                conflicts.add(x)
        table = SolutionTable(name, tuple(sorted(rest)), choices, frozenset(conflicts))
    if want_detail:
        return result, table, detail
    return result, table


def _argmax_act(ext, name, frame):
    best_val = max(ext.values())
    for act in frame:
        for y, val in ext.items():
            if dict(y)[name] == act and val == best_val:
                return act
    raise AssertionError("unreachable")


def _best_act(acts, frame):
    best = max(acts.values())
    for act in frame:
        if act in acts and acts[act] == best:
            return act
    raise AssertionError("unreachable")


def _policy_value(ext, x, name, policy):
    """Value of the extension picked by a stored solution table, 0 if absent."""
    ctx = frozenset(policy.context)
    key = project_config(x, ctx & frozenset(n for n, _ in x))
    act = policy.choices.get(key)
    if act is None:
        return max(ext.values())
    y = concat_configs(x, make_config({name: act}))
    return ext.get(y, 0.0)


def _belief_detail(v, result, name):
    rest = v.domain - {name}
    detail = []
    for rf in result.focals:
        contribs = {}
        for idx, f in enumerate(v.focals):
            proj = (
                f.support.project(rest)
                if rest
                else ConfigSet(frozenset(), frozenset([()]))
            )
            if proj.members == rf.support.members:
                for x in proj:
                    contribs[(idx, x)] = f.mass
        detail.append(contribs)
    return detail
