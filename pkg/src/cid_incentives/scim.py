"""Structural causal influence models over finite domains, evaluated exactly.

Structural functions and policies are total lookup tables.  Every table is
keyed by a flat tuple ``(*parent_values, exogenous_value)`` with parents in
the diagram's canonical order.  All probabilities and expectations are
:class:`fractions.Fraction` values, so optimality and incentive checks are
exact comparisons.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Mapping, Sequence, Union

from .graph import Cid, GraphError, NodeKind, validate

Value = Union[int, Fraction, str]

DEFAULT_MAX_ENUMERATION = 10**7


class ModelError(ValueError):
    """A model, policy or intervention violates its invariants."""


class EnumerationLimitError(RuntimeError):
    """An exhaustive computation would exceed the configured enumeration cap."""


def is_rational(v) -> bool:
    return isinstance(v, (int, Fraction)) and not isinstance(v, bool)


def canonical_value(v) -> Value:
    if isinstance(v, bool):
        raise ModelError(f"booleans are not model values: {v!r}")
    if isinstance(v, Fraction) and v.denominator == 1:
        return int(v)
    if isinstance(v, (int, Fraction, str)):
        return v
    raise ModelError(f"unsupported value {v!r}; use int, Fraction or str")


def format_value(v: Value) -> str:
    return str(v)


class FunctionTable:
    """A total function ``dom(inputs) × dom(ε) → dom(target)`` given by its rows."""

    __slots__ = ("target", "inputs", "rows")

    def __init__(self, target: str, inputs: Sequence[str], rows: Mapping[tuple, Value]):
        self.target = target
        self.inputs = tuple(inputs)
        self.rows = {tuple(canonical_value(x) for x in k): canonical_value(v) for k, v in rows.items()}

    @classmethod
    def tabulate(
        cls,
        target: str,
        inputs: Sequence[str],
        input_domains: Sequence[Sequence[Value]],
        eps_domain: Sequence[Value],
        fn: Callable[[dict, Value], Value],
    ) -> FunctionTable:
        """Build a table by calling ``fn(parent_assignment, eps)`` on every input."""
        rows = {}
        for combo in itertools.product(*input_domains, eps_domain):
            rows[combo] = fn(dict(zip(inputs, combo[:-1])), combo[-1])
        return cls(target, inputs, rows)

    def __call__(self, parent_values: Sequence[Value], eps: Value) -> Value:
        return self.rows[(*parent_values, eps)]

    def __eq__(self, other):
        if not isinstance(other, FunctionTable):
            return NotImplemented
        return (self.target, self.inputs, self.rows) == (other.target, other.inputs, other.rows)

    def __hash__(self):
        return hash((self.target, self.inputs, frozenset(self.rows.items())))

    def __repr__(self):
        return f"FunctionTable({self.target!r}, inputs={self.inputs}, rows={len(self.rows)})"


class Policy:
    """A decision rule: total table from ``(*pa_D, ε_D)`` to a decision value."""

    __slots__ = ("decision", "inputs", "cells", "choices", "_lookup")

    def __init__(self, decision: str, inputs: Sequence[str], table: Mapping[tuple, Value]):
        self.decision = decision
        self.inputs = tuple(inputs)
        self.cells = tuple(table)
        self.choices = tuple(canonical_value(v) for v in table.values())
        self._lookup = dict(zip(self.cells, self.choices))

    @classmethod
    def from_cells(cls, decision, inputs, cells, choices) -> Policy:
        return cls(decision, inputs, dict(zip(cells, choices)))

    @classmethod
    def from_callable(cls, scim: Scim, fn: Callable[[dict, Value], Value]) -> Policy:
        d = scim.decision
        return cls.from_cells(
            d, scim.cid.parents[d], scim.policy_cells(),
            [fn(dict(zip(scim.cid.parents[d], c[:-1])), c[-1]) for c in scim.policy_cells()],
        )

    @classmethod
    def constant(cls, scim: Scim, value: Value) -> Policy:
        return cls.from_callable(scim, lambda pa, e: value)

    @property
    def table(self) -> dict[tuple, Value]:
        return dict(self._lookup)

    def __call__(self, parent_values: Sequence[Value], eps: Value) -> Value:
        return self._lookup[(*parent_values, eps)]

    def __getitem__(self, cell: tuple) -> Value:
        return self._lookup[cell]

    def __eq__(self, other):
        if not isinstance(other, Policy):
            return NotImplemented
        return (self.decision, self.inputs, self._lookup) == (other.decision, other.inputs, other._lookup)

    def __hash__(self):
        return hash((self.decision, self.inputs, self.cells, self.choices))

    def __repr__(self):
        body = ", ".join(f"{c}->{v}" for c, v in zip(self.cells, self.choices))
        return f"Policy({self.decision}: {body})"


@dataclass(frozen=True)
class InterventionSet:
    """Hard assignments and soft (replacement table) interventions."""

    hard: Mapping[str, Value] = field(default_factory=dict)
    soft: Mapping[str, FunctionTable] = field(default_factory=dict)

    @classmethod
    def do(cls, assignment: Mapping[str, Value] | None = None, **kw) -> InterventionSet:
        return cls(hard={**(assignment or {}), **kw})

    def __bool__(self):
        return bool(self.hard or self.soft)

    def key(self):
        return (
            tuple(sorted((k, canonical_value(v)) for k, v in self.hard.items())),
            tuple(sorted((k, id(t)) for k, t in self.soft.items())),
        )

    def combine(self, other: InterventionSet) -> InterventionSet:
        return InterventionSet({**self.hard, **other.hard}, {**self.soft, **other.soft})


NO_INTERVENTION = InterventionSet()


@dataclass(frozen=True)
class OptimalPolicies:
    """The exact argmax set of a model, kept in product form.

    Because the decision's parents are not descendants of the decision, the
    expected utility splits into one term per policy cell.  A policy is
    optimal iff every positive-probability cell picks an argmax of its term;
    zero-probability cells are unconstrained.
    """

    decision: str
    inputs: tuple[str, ...]
    cells: tuple[tuple, ...]
    allowed: tuple[tuple[Value, ...], ...]
    cell_probability: tuple[Fraction, ...]
    cell_values: tuple[dict, ...]
    value: Fraction

    def __len__(self) -> int:
        return math.prod(len(a) for a in self.allowed)

    def __iter__(self) -> Iterator[Policy]:
        for choice in itertools.product(*self.allowed):
            yield Policy.from_cells(self.decision, self.inputs, self.cells, choice)

    def __contains__(self, policy: Policy) -> bool:
        return all(policy[c] in a for c, a in zip(self.cells, self.allowed))

    def allowed_for(self, cell: tuple) -> tuple[Value, ...]:
        return self.allowed[self.cells.index(cell)]

    def first(self) -> Policy:
        return Policy.from_cells(self.decision, self.inputs, self.cells, [a[0] for a in self.allowed])


class Scim:
    """A structural causal influence model with a single decision.

    ``exogenous`` maps each endogenous node to the distribution of its
    exogenous variable, as an ordered mapping ``value -> probability``; the
    key order is the exogenous domain order.
    """

    def __init__(
        self,
        cid: Cid,
        domains: Mapping[str, Sequence[Value]],
        exogenous: Mapping[str, Mapping[Value, Fraction | int | str]],
        functions: Mapping[str, FunctionTable],
    ):
        self.cid = cid
        self.domains = {v: tuple(canonical_value(x) for x in dom) for v, dom in domains.items()}
        self.exogenous = {
            v: {canonical_value(k): Fraction(p) for k, p in dist.items()} for v, dist in exogenous.items()
        }
        self.functions = dict(functions)
        self._cache: dict = {}

    @classmethod
    def build(
        cls,
        cid: Cid,
        domains: Mapping[str, Sequence[Value]],
        exogenous: Mapping[str, Mapping[Value, Fraction | int | str]] | None = None,
        functions: Mapping[str, FunctionTable | Callable[[dict, Value], Value]] | None = None,
    ) -> Scim:
        """Convenience constructor.

        Missing exogenous specs default to a point mass on ``0``.  Functions
        may be given as callables ``fn(parent_assignment, eps)`` and are
        tabulated over the full input space.
        """
        exogenous = dict(exogenous or {})
        for v in cid.order:
            exogenous.setdefault(v, {0: Fraction(1)})
        tables = {}
        for v, fn in (functions or {}).items():
            if isinstance(fn, FunctionTable):
                tables[v] = fn
            else:
                ps = cid.parents[v]
                tables[v] = FunctionTable.tabulate(
                    v, ps, [domains[p] for p in ps], list(exogenous[v]), fn
                )
        return cls(cid, domains, exogenous, tables)

    # -- structure ------------------------------------------------------------
    @property
    def decision(self) -> str:
        return self.cid.decision

    @property
    def order(self) -> tuple[str, ...]:
        return self.cid.order

    def eps_domain(self, v: str) -> tuple[Value, ...]:
        return tuple(self.exogenous[v])

    def with_cid(self, cid: Cid) -> Scim:
        """Same functions and distributions over a diagram that differs only in
        the decision's information links."""
        return Scim(cid, self.domains, self.exogenous, self.functions)

    def with_function(self, node: str, table: FunctionTable) -> Scim:
        return Scim(self.cid, self.domains, self.exogenous, {**self.functions, node: table})

    def policy_cells(self) -> tuple[tuple, ...]:
        d = self.decision
        doms = [self.domains[p] for p in self.cid.parents[d]]
        return tuple(itertools.product(*doms, self.eps_domain(d)))

    def policy_space_size(self) -> int:
        return len(self.domains[self.decision]) ** len(self.policy_cells())

    def __repr__(self):
        return f"Scim({self.cid!r})"

    def __eq__(self, other):
        if not isinstance(other, Scim):
            return NotImplemented
        return (
            self.cid == other.cid
            and self.domains == other.domains
            and {v: list(d.items()) for v, d in self.exogenous.items()}
            == {v: list(d.items()) for v, d in other.exogenous.items()}
            and self.functions == other.functions
        )

    __hash__ = None  # mutable cache inside; compare by value only

    # -- compiled form ----------------------------------------------------------
    def _compiled(self):
        c = self._cache.get("compiled")
        if c is None:
            order = self.order
            idx = {v: i for i, v in enumerate(order)}
            parents = tuple(tuple(idx[p] for p in self.cid.parents[v]) for v in order)
            tables = tuple(self.functions[v].rows if v in self.functions else None for v in order)
            c = (order, idx, parents, tables)
            self._cache["compiled"] = c
        return c

    def exo_settings(self) -> list[tuple[tuple, Fraction]]:
        """Every joint exogenous setting with its probability, in canonical order."""
        s = self._cache.get("exo")
        if s is None:
            dists = [self.exogenous[v] for v in self.order]
            s = []
            for combo in itertools.product(*[tuple(d.items()) for d in dists]):
                p = Fraction(1)
                for _, q in combo:
                    p *= q
                s.append((tuple(k for k, _ in combo), p))
            self._cache["exo"] = s
        return s

    def _eps_tuple(self, eps: Mapping[str, Value]) -> tuple:
        try:
            return tuple(canonical_value(eps[v]) for v in self.order)
        except KeyError as e:
            raise ModelError(f"exogenous setting missing a value for {e.args[0]!r}") from None

    def _run(self, eps: tuple, policy: Policy | None, hard: Mapping[int, Value], soft: Mapping[int, dict]) -> list:
        order, idx, parents, tables = self._compiled()
        vals: list = [None] * len(order)
        for i in range(len(order)):
            if i in hard:
                vals[i] = hard[i]
                continue
            key = tuple(vals[p] for p in parents[i]) + (eps[i],)
            table = soft.get(i, tables[i])
            if table is None:
                if policy is None:
                    raise ModelError("a policy is required unless the decision is intervened on")
                vals[i] = policy._lookup[key]
            else:
                vals[i] = table[key]
        return vals

    def _compile_iv(self, iv: InterventionSet):
        _, idx, _, _ = self._compiled()
        for v in list(iv.hard) + list(iv.soft):
            if v not in idx:
                raise ModelError(f"intervention on unknown node {v!r}")
        overlap = set(iv.hard) & set(iv.soft)
        if overlap:
            raise ModelError(f"nodes both hard- and soft-intervened: {sorted(overlap)}")
        for v, x in iv.hard.items():
            if canonical_value(x) not in self.domains[v]:
                raise ModelError(f"intervention value {x!r} outside dom({v})")
        if self.decision in iv.soft:
            raise ModelError("the decision can only be hard-intervened; supply a policy instead")
        hard = {idx[v]: canonical_value(x) for v, x in iv.hard.items()}
        soft = {idx[v]: t.rows for v, t in iv.soft.items()}
        return hard, soft

    def outcomes(self, iv: InterventionSet = NO_INTERVENTION) -> list[tuple[tuple, Fraction, dict]]:
        """For every exogenous setting: ``(eps, P(eps), {d: values under do(D=d)})``.

        Values are tuples in canonical node order.  The table lets every
        policy be evaluated by lookup, since a policy's value at ``eps`` equals
        the model under ``do(D = π(pa_D(eps), ε_D))``.
        """
        key = ("outcomes", iv.key())
        cached = self._cache.get(key)
        if cached is not None:
            return cached
        max_runs = len(self.exo_settings()) * len(self.domains[self.decision])
        if max_runs > self._cache.get("cap", DEFAULT_MAX_ENUMERATION):
            raise EnumerationLimitError(f"{max_runs} model evaluations exceed the cap")
        hard, soft = self._compile_iv(iv)
        _, idx, _, _ = self._compiled()
        di = idx[self.decision]
        rows = []
        for eps, p in self.exo_settings():
            if di in hard:
                vals = tuple(self._run(eps, None, hard, soft))
                per_d = {d: vals for d in self.domains[self.decision]}
            else:
                per_d = {d: tuple(self._run(eps, None, {**hard, di: d}, soft)) for d in self.domains[self.decision]}
            rows.append((eps, p, per_d))
        if len(self._cache) > 256:
            self._cache = {k: v for k, v in self._cache.items() if not (isinstance(k, tuple) and k[0] == "outcomes")}
        self._cache[key] = rows
        return rows

    def set_cap(self, cap: int) -> Scim:
        self._cache["cap"] = cap
        return self

    def cell_of(self, eps: tuple, values: tuple) -> tuple:
        """Policy cell ``(*pa_D, ε_D)`` reached at ``eps``."""
        _, idx, parents, _ = self._compiled()
        di = idx[self.decision]
        return tuple(values[p] for p in parents[di]) + (eps[di],)

    def index(self, v: str) -> int:
        return self._compiled()[1][v]

    def utility_sum(self, values: tuple) -> Fraction:
        idx = self._compiled()[1]
        return sum((Fraction(values[idx[u]]) for u in self.cid.utilities), Fraction(0))


# -- validation -------------------------------------------------------------------

def validate_scim(scim: Scim) -> list[str]:
    """Return every violated model invariant; an empty list means valid."""
    cid = scim.cid
    problems = [f"graph: {p}" for p in validate(cid)]
    if problems:
        return problems
    if len(cid.decisions) != 1:
        problems.append(f"expected exactly one decision node, found {len(cid.decisions)}")
    for v in cid.order:
        dom = scim.domains.get(v)
        if dom is None:
            problems.append(f"missing domain for {v!r}")
            continue
        if not dom:
            problems.append(f"empty domain for {v!r}")
        if len(set(dom)) != len(dom):
            problems.append(f"duplicate values in domain of {v!r}")
        if cid.kinds[v] is NodeKind.UTILITY and not all(is_rational(x) for x in dom):
            problems.append(f"utility node {v!r} has a non-rational domain value")
    for v in scim.domains:
        if v not in cid:
            problems.append(f"domain given for unknown node {v!r}")
    for v in cid.order:
        dist = scim.exogenous.get(v)
        if dist is None:
            problems.append(f"missing exogenous distribution for {v!r}")
            continue
        if not dist:
            problems.append(f"empty exogenous domain for {v!r}")
        if any(p < 0 for p in dist.values()):
            problems.append(f"negative probability in exogenous distribution of {v!r}")
        if sum(dist.values(), Fraction(0)) != 1:
            problems.append(f"distribution not normalized for {v!r} (sums to {sum(dist.values(), Fraction(0))})")
    for v in scim.exogenous:
        if v not in cid:
            problems.append(f"exogenous variable given for unknown node {v!r}")
    if problems:
        return problems
    for v in cid.order:
        table = scim.functions.get(v)
        if cid.kinds[v] is NodeKind.DECISION:
            if table is not None:
                problems.append(f"decision node {v!r} must not have a structural function")
            continue
        if table is None:
            problems.append(f"missing structural function for {v!r}")
            continue
        problems += _check_table(scim, v, table, "structural function")
    for v in scim.functions:
        if v not in cid:
            problems.append(f"structural function given for unknown node {v!r}")
    return problems


def _check_table(scim: Scim, v: str, table: FunctionTable, what: str) -> list[str]:
    problems = []
    ps = scim.cid.parents[v]
    if table.target != v:
        problems.append(f"{what} for {v!r} targets {table.target!r}")
    if tuple(table.inputs) != tuple(ps):
        problems.append(f"{what} for {v!r} reads {list(table.inputs)}, graph parents are {list(ps)}")
        return problems
    expected = set(itertools.product(*[scim.domains[p] for p in ps], scim.eps_domain(v)))
    got = set(table.rows)
    if expected - got:
        problems.append(f"non-total function for {v!r}: {len(expected - got)} input combinations missing")
    if got - expected:
        problems.append(f"{what} for {v!r} has {len(got - expected)} rows outside its input domain")
    bad = {out for out in table.rows.values() if out not in scim.domains[v]}
    if bad:
        problems.append(f"{what} for {v!r} outputs values outside dom({v}): {sorted(map(str, bad))}")
    return problems


def check_scim(scim: Scim) -> Scim:
    problems = validate_scim(scim)
    if problems:
        raise ModelError("invalid model: " + "; ".join(problems))
    return scim


def validate_policy(scim: Scim, policy: Policy) -> list[str]:
    d = scim.decision
    problems = []
    if policy.decision != d or policy.inputs != scim.cid.parents[d]:
        problems.append(f"policy reads {list(policy.inputs)}, decision parents are {list(scim.cid.parents[d])}")
        return problems
    missing = set(scim.policy_cells()) - set(policy.cells)
    if missing:
        problems.append(f"policy is not total: {len(missing)} cells missing")
    bad = {v for v in policy.choices if v not in scim.domains[d]}
    if bad:
        problems.append(f"policy outputs values outside dom({d}): {sorted(map(str, bad))}")
    return problems


def validate_intervention(scim: Scim, iv: InterventionSet) -> list[str]:
    problems = []
    overlap = set(iv.hard) & set(iv.soft)
    if overlap:
        problems.append(f"hard and soft interventions overlap on {sorted(overlap)}")
    for v, x in iv.hard.items():
        if v not in scim.cid:
            problems.append(f"intervention on unknown node {v!r}")
        elif canonical_value(x) not in scim.domains[v]:
            problems.append(f"hard value {x!r} outside dom({v})")
    for v, t in iv.soft.items():
        if v not in scim.cid:
            problems.append(f"intervention on unknown node {v!r}")
        elif v == scim.decision:
            problems.append("the decision can only be hard-intervened")
        else:
            problems += _check_table(scim, v, t, "soft intervention")
    return problems


# -- evaluation -----------------------------------------------------------------------

def evaluate(
    scim: Scim,
    policy: Policy | None,
    eps: Mapping[str, Value],
    iv: InterventionSet = NO_INTERVENTION,
) -> dict[str, Value]:
    """Values of all endogenous nodes at exogenous setting ``eps``."""
    problems = validate_intervention(scim, iv)
    if problems:
        raise ModelError("; ".join(problems))
    e = scim._eps_tuple(eps)
    for v, x in zip(scim.order, e):
        if x not in scim.exogenous[v]:
            raise ModelError(f"exogenous value {x!r} outside the domain of ε_{v}")
    hard, soft = scim._compile_iv(iv)
    vals = scim._run(e, policy, hard, soft)
    return dict(zip(scim.order, vals))


def potential_response(
    scim: Scim,
    policy: Policy | None,
    eps: Mapping[str, Value],
    targets: Iterable[str],
    iv: InterventionSet = NO_INTERVENTION,
) -> dict[str, Value]:
    """``W_iv(eps)``: the targets' values in the intervened submodel."""
    vals = evaluate(scim, policy, eps, iv)
    return {t: vals[t] for t in scim.cid.sort(targets)}


def nested_potential_response(
    scim: Scim,
    policy: Policy,
    eps: Mapping[str, Value],
    utilities: Iterable[str],
    x: str,
    d: Value,
) -> Fraction:
    """Σ over ``utilities`` of ``U_{X_d}(eps)``.

    First ``x* = X_{D=d}(eps)``; then the utilities are evaluated under
    ``do(X = x*)`` with the original policy, so ``d`` reaches them only
    through ``x``.
    """
    dec = scim.decision
    d = canonical_value(d)
    if d not in scim.domains[dec]:
        raise ModelError(f"decision value {d!r} outside dom({dec})")
    x_star = d if x == dec else evaluate(scim, policy, eps, InterventionSet.do({dec: d}))[x]
    vals = evaluate(scim, policy, eps, InterventionSet.do({x: x_star}))
    return sum((Fraction(vals[u]) for u in utilities), Fraction(0))


def exo_probability(scim: Scim, eps: Mapping[str, Value]) -> Fraction:
    p = Fraction(1)
    for v, x in zip(scim.order, scim._eps_tuple(eps)):
        p *= scim.exogenous[v].get(x, Fraction(0))
    return p


def _policy_values(scim: Scim, policy: Policy | None, iv: InterventionSet):
    """Yield ``(eps, P(eps), values)`` for the model completed by ``policy``."""
    rows = scim.outcomes(iv)
    dec = scim.decision
    for eps, p, per_d in rows:
        if dec in iv.hard:
            yield eps, p, per_d[canonical_value(iv.hard[dec])]
            continue
        if policy is None:
            raise ModelError("a policy is required unless the decision is intervened on")
        any_vals = next(iter(per_d.values()))
        yield eps, p, per_d[policy._lookup[scim.cell_of(eps, any_vals)]]


def prob(
    scim: Scim,
    policy: Policy | None,
    event: Mapping[str, Value],
    iv: InterventionSet = NO_INTERVENTION,
) -> Fraction:
    """Exact ``P(W = w)`` under ``policy`` in the submodel ``iv``."""
    checks = [(scim.index(v), canonical_value(x)) for v, x in event.items()]
    total = Fraction(0)
    for _, p, vals in _policy_values(scim, policy, iv):
        if p and all(vals[i] == x for i, x in checks):
            total += p
    return total


def expected_utility(
    scim: Scim,
    policy: Policy | None,
    iv: InterventionSet = NO_INTERVENTION,
    given: Mapping[str, Value] | None = None,
) -> Fraction:
    """Exact ``E[Σ U | given]`` under ``policy`` in the submodel ``iv``."""
    checks = [(scim.index(v), canonical_value(x)) for v, x in (given or {}).items()]
    mass = Fraction(0)
    total = Fraction(0)
    for _, p, vals in _policy_values(scim, policy, iv):
        if p and all(vals[i] == x for i, x in checks):
            mass += p
            total += p * scim.utility_sum(vals)
    if mass == 0:
        raise ModelError("conditioning event has probability zero")
    return total / mass


def enumerate_policies(scim: Scim, max_enumeration: int = DEFAULT_MAX_ENUMERATION) -> Iterator[Policy]:
    """Every total policy table exactly once, in canonical order."""
    count = scim.policy_space_size()
    if count > max_enumeration:
        raise EnumerationLimitError(f"{count} policies exceed the enumeration cap of {max_enumeration}")
    d = scim.decision
    cells = scim.policy_cells()
    inputs = scim.cid.parents[d]
    for choice in itertools.product(scim.domains[d], repeat=len(cells)):
        yield Policy.from_cells(d, inputs, cells, choice)


def cell_values(scim: Scim, iv: InterventionSet = NO_INTERVENTION):
    """Per policy cell: probability mass and ``Σ_eps P(eps)·U`` for each decision value."""
    cells = scim.policy_cells()
    where = {c: i for i, c in enumerate(cells)}
    mass = [Fraction(0)] * len(cells)
    decisions = scim.domains[scim.decision]
    q = [{d: Fraction(0) for d in decisions} for _ in cells]
    for eps, p, per_d in scim.outcomes(iv):
        if not p:
            continue
        i = where[scim.cell_of(eps, next(iter(per_d.values())))]
        mass[i] += p
        for d, vals in per_d.items():
            q[i][d] += p * scim.utility_sum(vals)
    return cells, mass, q


def optimal_policies(
    scim: Scim,
    iv: InterventionSet = NO_INTERVENTION,
    max_enumeration: int | None = None,
) -> OptimalPolicies:
    """The exact set of optimal policies and the attainable utility ``ℓ``.

    Ties are kept: every optimal policy is a member of the returned set.
    """
    if max_enumeration is not None:
        scim.set_cap(max_enumeration)
    d = scim.decision
    if d in iv.hard:
        raise ModelError("cannot optimise a policy for an intervened decision")
    cells, mass, q = cell_values(scim, iv)
    decisions = scim.domains[d]
    allowed = []
    best_total = Fraction(0)
    for m, qs in zip(mass, q):
        if m == 0:
            allowed.append(decisions)
            continue
        best = max(qs.values())
        best_total += best
        allowed.append(tuple(x for x in decisions if qs[x] == best))
    return OptimalPolicies(
        decision=d,
        inputs=scim.cid.parents[d],
        cells=cells,
        allowed=tuple(allowed),
        cell_probability=tuple(mass),
        cell_values=tuple(q),
        value=best_total,
    )


def attainable_utility(scim: Scim, iv: InterventionSet = NO_INTERVENTION) -> Fraction:
    return optimal_policies(scim, iv).value


def require_node(scim: Scim, v: str):
    if v not in scim.cid:
        raise GraphError(f"unknown node {v!r}")


def utility_bounds(scim: Scim, iv: InterventionSet = NO_INTERVENTION) -> tuple[Fraction, Fraction]:
    """Least and greatest expected utility over all policies, exactly.

    The expectation is a sum of independent per-cell terms, so both extremes
    are attained cell by cell.
    """
    if scim.decision in iv.hard:
        rows = scim.outcomes(iv)
        v = sum((p * scim.utility_sum(next(iter(per_d.values()))) for _, p, per_d in rows), Fraction(0))
        return v, v
    _, mass, q = cell_values(scim, iv)
    lo = sum((min(qs.values()) for m, qs in zip(mass, q) if m), Fraction(0))
    hi = sum((max(qs.values()) for m, qs in zip(mass, q) if m), Fraction(0))
    return lo, hi
