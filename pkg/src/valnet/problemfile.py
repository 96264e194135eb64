"""Line-oriented problem files: variables, arcs, utility and bpa tables.

Grammar (one statement per logical line, ``#`` starts a comment, braces may
span lines):

    decision NAME { v1, v2, ... }
    random NAME { v1, v2, ... }
    prec X -> Y
    utility LABEL on {X, Y} { x y = VALUE; ... }
    bpa LABEL on {R | P1, P2} { p1 p2 : {r1, r2} = MASS; ... }
    bpa LABEL on {R} { {r1, r2} = MASS; ... }
    lambda = VALUE
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import MassError, ProblemFormatError
from .model import Variable, all_configs, make_config
from .network import Network
from .valuation import MASS_TOL, conditional, make_utility

_NAME = r"[A-Za-z_]\w*"
_TOKEN = r"[^\s{},;:=|#]+"


@dataclass
class ParsedProblem:
    network: Network
    lam: float = None


def _statements(text):
    """Split comment-stripped text into brace-balanced statements."""
    out = []
    buf = []
    start = None
    depth = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip() and depth == 0:
            continue
        if start is None:
            start = lineno
        buf.append(line)
        depth += line.count("{") - line.count("}")
        if depth < 0:
            raise ProblemFormatError("unbalanced '}'", lineno)
        if depth == 0:
            stmt = " ".join(buf).strip()
            if stmt:
                out.append((start, stmt))
            buf = []
            start = None
    if depth != 0:
        raise ProblemFormatError("unterminated '{'", start or 1)
    return out


def _split_list(body):
    return [t.strip() for t in body.split(",") if t.strip()]


def _parse_number(token, lineno, what="number"):
    try:
        return float(token)
    except ValueError:
        raise ProblemFormatError("bad %s %r" % (what, token), lineno)


class _Builder:
    def __init__(self):
        self.variables = []
        self.by_name = {}
        self.arcs = []
        self.utilities = []
        self.bpas = []  # (lineno, label, head, parents, entries)
        self.labels = set()
        self.lam = None
        self.lam_seen = False

    def add_variable(self, kind, name, frame, lineno):
        if name in self.by_name:
            raise ProblemFormatError("duplicate declaration of variable %r" % name, lineno)
        if not frame:
            raise ProblemFormatError("variable %r has an empty frame" % name, lineno)
        if len(set(frame)) != len(frame):
            raise ProblemFormatError("variable %r repeats a frame value" % name, lineno)
        var = Variable(name, kind, tuple(frame))
        self.variables.append(var)
        self.by_name[name] = var

    def need_var(self, name, lineno):
        var = self.by_name.get(name)
        if var is None:
            raise ProblemFormatError("unknown variable %r" % name, lineno)
        return var

    def need_value(self, var, value, lineno):
        if value not in var.frame:
            raise ProblemFormatError(
                "%r is not a value of variable %r" % (value, var.name), lineno
            )
        return value

    def claim_label(self, label, lineno):
        if label in self.labels:
            raise ProblemFormatError("duplicate declaration of %r" % label, lineno)
        self.labels.add(label)


def parse_problem(text):
    """Parse problem text into a network plus an optional weighting factor."""
    b = _Builder()
    for lineno, stmt in _statements(text):
        head = stmt.split(None, 1)[0]
        if head in ("decision", "random"):
            _parse_variable(b, head, stmt, lineno)
        elif head == "prec":
            _parse_prec(b, stmt, lineno)
        elif head == "utility":
            _parse_utility(b, stmt, lineno)
        elif head == "bpa":
            _parse_bpa(b, stmt, lineno)
        elif head == "lambda":
            _parse_lambda(b, stmt, lineno)
        else:
            raise ProblemFormatError("unknown statement %r" % head, lineno)
    if not b.variables:
        raise ProblemFormatError("no variables declared", 1)

    network = Network(b.variables, (), (), b.arcs)  # closure for the bpa check
    potentials = []
    for lineno, label, head_var, parents, tables in b.bpas:
        if not parents:
            preceding = [
                d for d in network.decisions if network.before(d.name, head_var.name)
            ]
            if preceding:
                raise ProblemFormatError(
                    "unconditional bpa for %r is not allowed: decision %r precedes it"
                    % (head_var.name, preceding[0].name),
                    lineno,
                )
        try:
            potentials.append(conditional(head_var, parents, tables, label=label))
        except MassError as exc:
            raise ProblemFormatError(str(exc), lineno)
    network = Network(b.variables, b.utilities, potentials, b.arcs)
    return ParsedProblem(network, b.lam)


def _parse_variable(b, kind, stmt, lineno):
    m = re.fullmatch(r"%s\s+(%s)\s*\{(.*)\}\s*" % (kind, _NAME), stmt)
    if not m:
        raise ProblemFormatError("malformed %s declaration" % kind, lineno)
    name, body = m.group(1), m.group(2)
    b.add_variable(kind, name, _split_list(body), lineno)


def _parse_prec(b, stmt, lineno):
    m = re.fullmatch(r"prec\s+(%s)\s*->\s*(%s)\s*" % (_NAME, _NAME), stmt)
    if not m:
        raise ProblemFormatError("malformed prec statement (expected 'prec X -> Y')", lineno)
    x = b.need_var(m.group(1), lineno)
    y = b.need_var(m.group(2), lineno)
    b.arcs.append((x.name, y.name))


def _parse_utility(b, stmt, lineno):
    m = re.fullmatch(
        r"utility\s+(%s)\s+on\s*\{([^}|]*)\}\s*\{(.*)\}\s*" % _NAME, stmt, re.S
    )
    if not m:
        raise ProblemFormatError("malformed utility statement", lineno)
    label, var_body, body = m.groups()
    b.claim_label(label, lineno)
    names = _split_list(var_body)
    if not names:
        raise ProblemFormatError("utility %r names no variables" % label, lineno)
    variables = [b.need_var(n, lineno) for n in names]
    if len(set(names)) != len(names):
        raise ProblemFormatError("utility %r repeats a variable" % label, lineno)
    table = {}
    for entry in _entries(body):
        m2 = re.fullmatch(r"((?:%s\s+)*%s)\s*=\s*(%s)" % (_TOKEN, _TOKEN, _TOKEN), entry)
        if not m2:
            raise ProblemFormatError("malformed utility entry %r" % entry, lineno)
        tokens = m2.group(1).split()
        if len(tokens) != len(variables):
            raise ProblemFormatError(
                "utility entry %r needs one value per variable of %r" % (entry, names),
                lineno,
            )
        cfg = make_config(
            {v.name: b.need_value(v, t, lineno) for v, t in zip(variables, tokens)}
        )
        if cfg in table:
            raise ProblemFormatError("duplicate utility entry %r" % entry, lineno)
        table[cfg] = _parse_number(m2.group(2), lineno, "utility value")
    expected = set(all_configs([v.name for v in variables], {v.name: v.frame for v in variables}))
    missing = expected - set(table)
    if missing:
        raise ProblemFormatError(
            "utility %r is missing %d configuration(s), e.g. %r"
            % (label, len(missing), sorted(missing)[0]),
            lineno,
        )
    b.utilities.append(make_utility(variables, table, label=label))


def _parse_bpa(b, stmt, lineno):
    m = re.fullmatch(
        r"bpa\s+(%s)\s+on\s*\{\s*(%s)\s*(?:\|([^}]*))?\}\s*\{(.*)\}\s*" % (_NAME, _NAME),
        stmt,
        re.S,
    )
    if not m:
        raise ProblemFormatError("malformed bpa statement", lineno)
    label, head_name, parent_body, body = m.groups()
    b.claim_label(label, lineno)
    head = b.need_var(head_name, lineno)
    if head.kind != "random":
        raise ProblemFormatError("bpa head %r must be a random variable" % head_name, lineno)
    parent_names = _split_list(parent_body or "")
    parents = [b.need_var(n, lineno) for n in parent_names]
    if head_name in parent_names or len(set(parent_names)) != len(parent_names):
        raise ProblemFormatError("bad parent list for bpa %r" % label, lineno)

    tables = {}
    for entry in _entries(body):
        m2 = re.fullmatch(
            r"(?:((?:%s\s+)*%s)\s*:)?\s*\{([^}]*)\}\s*=\s*(%s)" % (_TOKEN, _TOKEN, _TOKEN),
            entry,
        )
        if not m2:
            raise ProblemFormatError("malformed bpa entry %r" % entry, lineno)
        ptokens = (m2.group(1) or "").split()
        if len(ptokens) != len(parents):
            raise ProblemFormatError(
                "bpa entry %r needs one value per parent of %r" % (entry, parent_names),
                lineno,
            )
        cfg = make_config(
            {p.name: b.need_value(p, t, lineno) for p, t in zip(parents, ptokens)}
        )
        subset = frozenset(
            b.need_value(head, t, lineno) for t in _split_list(m2.group(2))
        )
        if not subset:
            raise ProblemFormatError("empty focal element in bpa entry %r" % entry, lineno)
        mass = _parse_number(m2.group(3), lineno, "mass")
        if mass < 0:
            raise ProblemFormatError("negative mass in bpa entry %r" % entry, lineno)
        tables.setdefault(cfg, []).append((subset, mass))

    expected = all_configs(
        [p.name for p in parents], {p.name: p.frame for p in parents}
    )
    for cfg in expected:
        entries = tables.get(cfg)
        if entries is None:
            raise ProblemFormatError(
                "bpa %r has no entries for parent configuration %r" % (label, cfg), lineno
            )
        total = sum(mass for _, mass in entries)
        if abs(total - 1.0) > MASS_TOL:
            raise ProblemFormatError(
                "bpa %r: masses for parent %r sum to %g, expected 1"
                % (label, dict(cfg) or "{}", total),
                lineno,
            )
    b.bpas.append((lineno, label, head, parents, tables))


def _parse_lambda(b, stmt, lineno):
    m = re.fullmatch(r"lambda\s*=\s*(%s)\s*" % _TOKEN, stmt)
    if not m:
        raise ProblemFormatError("malformed lambda statement", lineno)
    if b.lam_seen:
        raise ProblemFormatError("duplicate lambda declaration", lineno)
    value = _parse_number(m.group(1), lineno, "lambda")
    if not 0.0 <= value <= 1.0:
        raise ProblemFormatError("lambda %g is outside [0, 1]" % value, lineno)
    b.lam = value
    b.lam_seen = True


def _entries(body):
    return [e.strip() for e in body.split(";") if e.strip()]


def serialize(network, lam=None):
    """Render a network back into the problem-file format."""
    lines = []
    for v in network.variables:
        lines.append("%s %s { %s }" % (v.kind, v.name, ", ".join(v.frame)))
    if network.arcs:
        lines.append("")
    order = {n: i for i, n in enumerate(network.by_name)}
    for x, y in sorted(network.arcs, key=lambda a: (order[a[0]], order[a[1]])):
        lines.append("prec %s -> %s" % (x, y))
    decl = [v.name for v in network.variables]
    for i, u in enumerate(network.utilities):
        names = sorted(u.domain, key=decl.index)
        rows = []
        focal = u.focals[0]
        for cfg in sorted(focal.values, key=lambda c: [decl.index(n) for n, _ in c]):
            values = dict(cfg)
            rows.append(
                "  %s = %r" % (" ".join(values[n] for n in names), focal.values[cfg])
            )
        lines.append("")
        lines.append("utility %s on {%s} {" % (u.label or "u%d" % i, ", ".join(names)))
        lines.append(";\n".join(rows))
        lines.append("}")
    for i, p in enumerate(network.potentials):
        pnames = [q.name for q in p.parents]
        scope = p.head.name if not pnames else "%s | %s" % (p.head.name, ", ".join(pnames))
        rows = []
        for cfg in sorted(p.tables, key=lambda c: [decl.index(n) for n, _ in c]):
            values = dict(cfg)
            prefix = " ".join(values[n] for n in pnames)
            for subset, mass in p.tables[cfg]:
                members = ", ".join(sorted(subset, key=list(p.head.frame).index))
                entry = "{%s} = %r" % (members, mass)
                rows.append("  %s : %s" % (prefix, entry) if pnames else "  " + entry)
        lines.append("")
        lines.append("bpa %s on {%s} {" % (p.label or "b%d" % i, scope))
        lines.append(";\n".join(rows))
        lines.append("}")
    if lam is not None:
        lines.append("")
        lines.append("lambda = %r" % lam)
    return "\n".join(lines) + "\n"
