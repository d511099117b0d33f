"""Slow, independent reference implementations used by the tests.

Nothing here calls the package's algorithms: graphs are read through their
parent lists only, and models through their raw tables.
"""

import itertools
from fractions import Fraction


# -- graphs ---------------------------------------------------------------------

def closure_by_squaring(nodes, edges):
    """Reflexive-transitive closure via repeated boolean matrix squaring."""
    idx = {v: i for i, v in enumerate(nodes)}
    n = len(nodes)
    m = [[i == j for j in range(n)] for i in range(n)]
    for a, b in edges:
        m[idx[a]][idx[b]] = True
    steps = 1
    while steps < n:
        m = [[any(m[i][k] and m[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
        steps *= 2
    return {(a, b) for a in nodes for b in nodes if m[idx[a]][idx[b]]}


def _descendants(children, v):
    out, stack = {v}, [v]
    while stack:
        for c in children[stack.pop()]:
            if c not in out:
                out.add(c)
                stack.append(c)
    return out


def skeleton_paths(parents, a, b):
    """All simple paths between a and b in the undirected skeleton."""
    nbrs = {v: set(ps) for v, ps in parents.items()}
    for v, ps in parents.items():
        for p in ps:
            nbrs[p].add(v)
    out = []

    def walk(path):
        v = path[-1]
        if v == b:
            out.append(list(path))
            return
        for w in sorted(nbrs[v]):
            if w not in path:
                path.append(w)
                walk(path)
                path.pop()

    walk([a])
    return out


def path_is_active(parents, path, zs):
    children = {v: [] for v in parents}
    for v, ps in parents.items():
        for p in ps:
            children[p].append(v)
    if path[0] in zs or path[-1] in zs:
        return False
    for prev, mid, nxt in zip(path, path[1:], path[2:]):
        collider = prev in parents[mid] and nxt in parents[mid]
        if collider:
            if not (_descendants(children, mid) & zs):
                return False
        elif mid in zs:
            return False
    return True


def dsep_by_paths(parents, xs, ys, zs):
    """d-separation of disjoint sets by enumerating every simple path."""
    zs = set(zs)
    for a in xs:
        for b in ys:
            for path in skeleton_paths(parents, a, b):
                if path_is_active(parents, path, zs):
                    return False
    return True


# -- models -----------------------------------------------------------------------

def exo_settings(scim):
    names = sorted(scim.exogenous)
    for combo in itertools.product(*[list(scim.exogenous[v].items()) for v in names]):
        p = Fraction(1)
        for _, q in combo:
            p *= q
        yield {v: k for v, (k, _) in zip(names, combo)}, p


def world(scim, policy_table, eps, hard=None, soft=None):
    """Evaluate every node by memoised recursion on its parents."""
    hard, soft = hard or {}, soft or {}
    cid = scim.cid
    dec = cid.decision
    memo = {}

    def val(v):
        if v in memo:
            return memo[v]
        if v in hard:
            out = hard[v]
        else:
            key = tuple(val(p) for p in cid.parents[v]) + (eps[v],)
            if v in soft:
                out = soft[v][key]
            elif v == dec:
                out = policy_table[key]
            else:
                out = scim.functions[v].rows[key]
        memo[v] = out
        return out

    return {v: val(v) for v in cid.kinds}


def utility(scim, w):
    return sum((Fraction(w[u]) for u in scim.cid.kinds if scim.cid.kinds[u].value == "utility"), Fraction(0))


def policy_cells(scim):
    dec = scim.cid.decision
    ps = scim.cid.parents[dec]
    return list(itertools.product(*[scim.domains[p] for p in ps], list(scim.exogenous[dec])))


def all_policy_tables(scim):
    cells = policy_cells(scim)
    for choice in itertools.product(scim.domains[scim.cid.decision], repeat=len(cells)):
        yield dict(zip(cells, choice))


def expected(scim, table, hard=None, soft=None, given=None):
    num, den = Fraction(0), Fraction(0)
    for eps, p in exo_settings(scim):
        w = world(scim, table, eps, hard, soft)
        if given and any(w[k] != v for k, v in given.items()):
            continue
        num += p * utility(scim, w)
        den += p
    return num / den


def prob_event(scim, table, event, hard=None):
    total = Fraction(0)
    for eps, p in exo_settings(scim):
        w = world(scim, table, eps, hard)
        if all(w[k] == v for k, v in event.items()):
            total += p
    return total


def optimal(scim, soft=None):
    best, arg = None, []
    for t in all_policy_tables(scim):
        v = expected(scim, t, soft=soft)
        if best is None or v > best:
            best, arg = v, [t]
        elif v == best:
            arg.append(t)
    return best, arg


def responds(scim, table, x, support=False):
    dec = scim.cid.decision
    for eps, p in exo_settings(scim):
        if support and not p:
            continue
        base = world(scim, table, eps)[dec]
        for v in scim.domains[x]:
            if world(scim, table, eps, {x: v})[dec] != base:
                return True
    return False


def has_ri(scim, x, support=False):
    _, arg = optimal(scim)
    return all(responds(scim, t, x, support) for t in arg)


def has_voc(scim, x):
    base, _ = optimal(scim)
    rows = list(itertools.product(*[scim.domains[p] for p in scim.cid.parents[x]], list(scim.exogenous[x])))
    for outs in itertools.product(scim.domains[x], repeat=len(rows)):
        g = dict(zip(rows, outs))
        if optimal(scim, soft={x: g})[0] > base:
            return True
    return False


def contexts(scim):
    dec = scim.cid.decision
    ps = scim.cid.parents[dec]
    any_table = next(all_policy_tables(scim))
    seen = set()
    for eps, p in exo_settings(scim):
        if p:
            w = world(scim, any_table, eps)
            seen.add(tuple(w[q] for q in ps))
    return [dict(zip(ps, c)) for c in sorted(seen, key=str)]


def nested_expected(scim, table, x, d, ctx):
    dec = scim.cid.decision
    num, den = Fraction(0), Fraction(0)
    for eps, p in exo_settings(scim):
        w = world(scim, table, eps)
        if any(w[k] != v for k, v in ctx.items()) or not p:
            continue
        x_star = world(scim, table, eps, {dec: d})[x]
        num += p * utility(scim, world(scim, table, eps, {x: x_star}))
        den += p
    return num / den


def has_ici_any(scim, x):
    _, arg = optimal(scim)
    for ctx in contexts(scim):
        for d in scim.domains[scim.cid.decision]:
            if all(expected(scim, t, given=ctx) != nested_expected(scim, t, x, d, ctx) for t in arg):
                return True
    return False


def cf_fair(scim, table, a):
    dec = scim.cid.decision
    ps = scim.cid.parents[dec]
    groups = {}
    for eps, p in exo_settings(scim):
        if not p:
            continue
        w = world(scim, table, eps)
        key = (tuple(w[q] for q in ps), w[a])
        groups.setdefault(key, []).append((eps, p, w[dec]))
    for members in groups.values():
        mass = sum(p for _, p, _ in members)
        for a_cf in scim.domains[a]:
            for d in scim.domains[dec]:
                f = sum(p for _, p, dv in members if dv == d) / mass
                c = sum(p for eps, p, _ in members if world(scim, table, eps, {a: a_cf})[dec] == d) / mass
                if f != c:
                    return False
    return True
