import pytest

from cid_incentives.graph import Cid


def make_cid(decision="D", utilities=("U",), **parents):
    """Build a diagram from keyword parent lists; unnamed kinds are chance nodes."""
    names = set(parents) | {p for ps in parents.values() for p in ps} | {decision, *utilities}
    kinds = []
    for v in sorted(names):
        if v == decision:
            kinds.append((v, "decision"))
        elif v in utilities:
            kinds.append((v, "utility"))
        else:
            kinds.append((v, "chance"))
    return Cid(kinds, {v: list(ps) for v, ps in parents.items()})


@pytest.fixture
def cid_of():
    return make_cid


def random_model(cid, rng, dom=(0, 1), eps_d=1, utility_values=(0, 1, 2)):
    """A random model on ``cid``; ``eps_d`` > 1 gives the policy a noise channel."""
    import itertools
    from fractions import Fraction

    from cid_incentives.scim import FunctionTable, Scim

    d = cid.decision
    domains = {}
    for v in cid.order:
        domains[v] = tuple(utility_values) if v in cid.utilities else tuple(dom)
    exogenous = {}
    for v in cid.order:
        k = eps_d if v == d else rng.choice((1, 2, 3))
        weights = [rng.randint(1, 4) for _ in range(k)]
        exogenous[v] = {i: Fraction(w, sum(weights)) for i, w in enumerate(weights)}
    functions = {}
    for v in cid.order:
        if v == d:
            continue
        ps = cid.parents[v]
        rows = {}
        for combo in itertools.product(*[domains[p] for p in ps], exogenous[v]):
            rows[combo] = rng.choice(domains[v])
        functions[v] = FunctionTable(v, ps, rows)
    return Scim(cid, domains, exogenous, functions)


ACCEPTANCE_LINES: list[str] = []


def record_acceptance(number, ok, detail):
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
