"""Solving decision networks by successive variable elimination.

Each fusion step removes one variable: the valuations whose domain contains
it are combined (non-beliefs before beliefs) and marginalized; everything
else passes through untouched.  Eliminating a decision variable records a
solution table, and the tables compose into a strategy over the preceding
random variables.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .calculus import (
    check_lambda,
    combine_all,
    combine_all_traced,
    marginalize,
    marginalize_belief,
)
from .errors import NetworkError, NotWellDefinedError, SolverError, ValnetError
from .model import DIAMOND, DECISION, RANDOM, all_configs, make_config
from .network import elimination_order, validate

ORACLE_GUARD = 10 ** 6


@dataclass(frozen=True)
class FusionStep:
    """One elimination step, kept for tracing."""

    index: int
    variable: str
    kind: str
    inputs: tuple
    combined: object
    provenance: tuple
    result: object
    contributions: tuple
    solution: object = None


@dataclass(frozen=True)
class Strategy:
    """An act for every decision variable as a function of earlier randoms."""

    tables: dict  # decision name -> (tuple of random names, {Config: act})

    def decide(self, decision, assignment):
        """Act for a decision given a {random variable: value} assignment."""
        names, mapping = self.tables[decision]
        key = make_config({n: assignment[n] for n in names})
        return mapping[key]


@dataclass(frozen=True)
class SolveResult:
    lam: float
    expected_value: float
    solutions: dict
    strategy: Strategy
    trace: tuple = None


@dataclass(frozen=True)
class UtilityInterval:
    """Per-act lower and upper expected utilities of a canonical problem."""

    decision: str
    bounds: dict  # act -> (lower, upper)


def fuse(pool, variable, lam=None, trace=False, policy=None):
    """One fusion step over a pool of valuations.

    Returns (new pool, solution table or None[, FusionStep when tracing]).
    """
    touched = [v for v in pool if variable.name in v.domain]
    untouched = [v for v in pool if variable.name not in v.domain]
    if not touched:
        raise ValnetError("no valuation in the pool mentions %r" % variable.name)
    combined, provenance = combine_all_traced(touched)
    result, table, detail = marginalize(
        combined, variable, lam=lam, policy=policy, want_detail=True
    )
    result = replace(result, label="elim_%s" % variable.name)
    new_pool = untouched + [result]
    if trace:
        step = FusionStep(
            index=0,
            variable=variable.name,
            kind=variable.kind,
            inputs=tuple(touched),
            combined=combined,
            provenance=tuple(provenance),
            result=result,
            contributions=tuple(detail),
            solution=table,
        )
        return new_pool, table, step
    return new_pool, table


def _initial_pool(network):
    return list(network.utilities) + [p.ballooned for p in network.potentials]


def _finish(pool):
    final = combine_all(pool)
    if final.domain:
        raise SolverError("variables left over after elimination: %r" % sorted(final.domain))
    return final.value_at(DIAMOND)


def solve(network, lam, trace=False, policy_tables=None, checked=True):
    """Run the fusion algorithm; returns expected value, tables and strategy."""
    lam = check_lambda(lam)
    if checked:
        report = validate(network)
        if not report.ok:
            raise NotWellDefinedError(report)
    order = elimination_order(network)
    pool = _initial_pool(network)
    solutions = {}
    steps = []
    for i, name in enumerate(order):
        variable = network.by_name[name]
        policy = (policy_tables or {}).get(name)
        out = fuse(pool, variable, lam=lam, trace=trace, policy=policy)
        if trace:
            pool, table, step = out
            steps.append(
                FusionStep(
                    index=i + 1,
                    variable=step.variable,
                    kind=step.kind,
                    inputs=step.inputs,
                    combined=step.combined,
                    provenance=step.provenance,
                    result=step.result,
                    contributions=step.contributions,
                    solution=step.solution,
                )
            )
        else:
            pool, table = out
        if table is not None:
            solutions[name] = table
    expected = _finish(pool)
    strategy = build_strategy(network, solutions)
    return SolveResult(lam, expected, solutions, strategy, tuple(steps) if trace else None)


def build_strategy(network, solutions):
    """Compose solution tables into per-decision maps over preceding randoms.

    A decision variable appearing in another's context is resolved through its
    own table, so the final maps range over random variables only.
    """
    kind_of = {v.name: v.kind for v in network.variables}

    needed = {}

    def randoms_needed(d):
        if d in needed:
            return needed[d]
        out = set()
        table = solutions.get(d)
        if table is not None:
            for n in table.context:
                if kind_of[n] == RANDOM:
                    out.add(n)
                else:
                    out |= randoms_needed(n)
        needed[d] = out
        return out

    def resolve(d, assignment):
        table = solutions[d]
        values = {}
        for n in table.context:
            if kind_of[n] == RANDOM:
                values[n] = assignment[n]
            else:
                values[n] = resolve(n, assignment)
        key = make_config(values)
        act = table.choices.get(key)
        if act is None:
            act = network.by_name[d].frame[0]
        return act

    tables = {}
    for v in network.variables:
        if v.kind != DECISION or v.name not in solutions:
            continue
        names = tuple(sorted(randoms_needed(v.name), key=lambda n: network.decl_index[n]))
        mapping = {}
        for cfg in all_configs(names, network.frames):
            assignment = dict(cfg)
            mapping[cfg] = resolve(v.name, assignment)
        tables[v.name] = (names, mapping)
    return Strategy(tables)


def evaluate_strategy(network, lam, result):
    """Re-solve with the recorded solution tables forced; equals the optimum."""
    replay = solve(network, lam, policy_tables=result.solutions, checked=False)
    return replay.expected_value


def oracle_solve(network, lam, checked=True):
    """Combine everything into one joint valuation, then eliminate in order.

    Desk-scale verification path for the fusion algorithm; refuses joint
    frames above a million configurations.
    """
    lam = check_lambda(lam)
    if checked:
        report = validate(network)
        if not report.ok:
            raise NotWellDefinedError(report)
    size = math.prod(len(v.frame) for v in network.variables)
    if size > ORACLE_GUARD:
        raise SolverError("joint frame has %d configurations, over the guard" % size)
    order = elimination_order(network)
    joint = combine_all(_initial_pool(network))
    solutions = {}
    for name in order:
        if name not in joint.domain:
            continue
        joint, table = marginalize(joint, network.by_name[name], lam=lam)
        if table is not None:
            solutions[name] = table
    expected = joint.value_at(DIAMOND)
    strategy = build_strategy(network, solutions)
    return SolveResult(lam, expected, solutions, strategy, None)


def canonical_parts(network):
    """The (decision, random, utility, potential) of a canonical problem."""
    if len(network.decisions) != 1 or len(network.randoms) != 1:
        raise NetworkError("canonical problems have exactly one decision and one random variable")
    d, r = network.decisions[0], network.randoms[0]
    if len(network.utilities) != 1 or len(network.potentials) != 1:
        raise NetworkError("canonical problems have exactly one utility and one potential")
    pi = network.utilities[0]
    rho = network.potentials[0]
    if pi.domain != {d.name, r.name}:
        raise NetworkError("the utility valuation must bear on both variables")
    if rho.head.name != r.name or {p.name for p in rho.parents} != {d.name}:
        raise NetworkError("the potential must be conditional on the decision variable")
    return d, r, pi, rho


def expected_interval(network):
    """Per-act expected-utility interval of a canonical problem.

    Lower and upper bounds add, focal by focal, the minimum and maximum value
    over the random variable within each focal of the combined valuation.
    """
    d, r, pi, rho = canonical_parts(network)
    combined = combine_all([pi, rho.ballooned])
    bounds = {}
    for act in d.frame:
        lo = hi = 0.0
        for f in combined.focals:
            ext = [
                f.values[y]
                for y in f.support
                if dict(y)[d.name] == act
            ]
            if not ext:
                continue
            lo += min(ext)
            hi += max(ext)
        bounds[act] = (lo, hi)
    return UtilityInterval(d.name, bounds)


def lambda_sweep(network, grid, checked=True):
    """Solve once per weighting factor, ascending; values must be monotone."""
    values = sorted({check_lambda(l) for l in grid})
    if not values:
        raise ValnetError("empty grid of weighting factors")
    if checked:
        report = validate(network)
        if not report.ok:
            raise NotWellDefinedError(report)
    results = [solve(network, lam, checked=False) for lam in values]
    for a, b in zip(results, results[1:]):
        if b.expected_value < a.expected_value - 1e-9 * max(1.0, abs(a.expected_value)):
            raise SolverError(
                "expected value decreased from %r to %r along the sweep"
                % (a.expected_value, b.expected_value)
            )
    return results


def bayesian_check(network, lam, tol=1e-9):
    """Solve an all-singleton (probabilistic) network; result is lambda-free.

    Raises unless every conditional table is made of singleton focals; solves
    at the endpoints as well and verifies both agree.
    """
    for p in network.potentials:
        for entries in p.tables.values():
            for subset, _ in entries:
                if len(subset) != 1:
                    raise ValnetError(
                        "potential for %r has a non-singleton focal; not a probability"
                        % p.head.name
                    )
    low = solve(network, 0.0)
    high = solve(network, 1.0)
    if abs(low.expected_value - high.expected_value) > tol:
        raise SolverError(
            "singleton-potential network is lambda-dependent: %r vs %r"
            % (low.expected_value, high.expected_value)
        )
    return solve(network, lam)


def propagate_marginal(network, target):
    """Marginal bpa of one variable in a pure-propagation network."""
    if network.decisions or network.utilities:
        raise ValnetError("marginal propagation needs a network without decisions or utilities")
    if target not in network.by_name:
        raise NetworkError("unknown variable %r" % target)
    pool = [p.ballooned for p in network.potentials]
    if not any(target in v.domain for v in pool):
        raise NetworkError("no potential mentions %r" % target)
    for v in network.variables:
        if v.name == target:
            continue
        if not any(v.name in val.domain for val in pool):
            continue
        pool, _ = fuse(pool, v)
    marginal = combine_all(pool)
    for name in sorted(marginal.domain - {target}):
        marginal = marginalize_belief(marginal, name)
    return marginal
