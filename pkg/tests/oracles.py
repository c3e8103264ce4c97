"""Independent reference implementations used to cross-check the package.

Nothing here imports the engine internals: closure comes from a
Floyd-Warshall pass over the raw edge list, and the reference evaluator
works on plain tuples, selecting rules by brute-force enumeration.
"""

from __future__ import annotations

import re

INF = float("inf")


def floyd_warshall(nodes, edges):
    """All-pairs reachability and hop distance over sub -> super edges.

    Returns (index map, reach matrix, dist matrix).
    """
    order = sorted(nodes)
    idx = {n: i for i, n in enumerate(order)}
    n = len(order)
    dist = [[INF] * n for _ in range(n)]
    for a in order:
        dist[idx[a]][idx[a]] = 0
    for a, supers in edges.items():
        for b in supers:
            dist[idx[a]][idx[b]] = min(dist[idx[a]][idx[b]], 1)
    for k in range(n):
        for i in range(n):
            dik = dist[i][k]
            if dik == INF:
                continue
            row_k = dist[k]
            row_i = dist[i]
            for j in range(n):
                if dik + row_k[j] < row_i[j]:
                    row_i[j] = dik + row_k[j]
    reach = [[d != INF for d in row] for row in dist]
    return idx, reach, dist


# -- toy taxonomy for engine equivalence tests -------------------------------

def _t(name):
    return "urn:toy:" + name


TOY_EDGES = {
    _t("A"): {_t("P")},
    _t("B"): {_t("P")},
    _t("C"): {_t("P")},
    _t("A1"): {_t("A")},
    _t("A2"): {_t("A")},
    _t("A12"): {_t("A1"), _t("A2")},
    _t("B1"): {_t("B")},
    _t("B1a"): {_t("B1")},
    _t("D"): {_t("A"), _t("C")},
}
TOY_NODES = sorted({_t("P")} | set(TOY_EDGES) | {s for v in TOY_EDGES.values() for s in v})

_TOY_IDX, _TOY_REACH, _TOY_DIST = floyd_warshall(TOY_NODES, TOY_EDGES)


def toy_reaches(sub, super_):
    if sub == super_:
        return True
    if sub not in _TOY_IDX or super_ not in _TOY_IDX:
        return False
    return _TOY_REACH[_TOY_IDX[sub]][_TOY_IDX[super_]]


def toy_distance(sub, super_):
    if sub == super_:
        return 0
    if sub not in _TOY_IDX or super_ not in _TOY_IDX:
        return None
    d = _TOY_DIST[_TOY_IDX[sub]][_TOY_IDX[super_]]
    return None if d == INF else int(d)


# -- reference evaluator ------------------------------------------------------

_SEVERITY = {"deny": 0, "ask": 1, "allow": 2}

_DAYS = re.compile(r"^P(\d+)D$")


def parse_days(lexical):
    m = _DAYS.match(lexical)
    if not m:
        raise ValueError(f"reference evaluator only reads PnD, got {lexical}")
    return int(m.group(1)) * 86400


def naive_select(rules, purpose):
    """rules: list of (purpose, actions|None, max_retention|None, decision).
    Enumerates every rule, keeps the applicable ones, sorts by the full
    (distance, severity, index) key and takes the head."""
    candidates = []
    for i, (rpurpose, actions, retention, decision) in enumerate(rules):
        if not toy_reaches(purpose, rpurpose):
            continue
        candidates.append(
            (toy_distance(purpose, rpurpose), _SEVERITY[decision], i,
             (rpurpose, actions, retention, decision)))
    if not candidates:
        return None
    return sorted(candidates)[0][3]


def naive_evaluate(rules, default, permissions):
    """permissions: list of (purposes, actions, retention_seconds|None).

    Returns (outcome, granted, pending_indexes) where granted is a list
    of (index, actions tuple, retention_seconds|None).
    """
    granted = []
    pending = []
    trivially = True
    for index, (purposes, actions, retention) in enumerate(permissions):
        verdicts = []
        for purpose in purposes:
            rule = naive_select(rules, purpose)
            verdicts.append((purpose, rule,
                             rule[3] if rule is not None else default))
        if not verdicts:
            verdicts = [("", None, default)]
        if any(v[2] == "deny" for v in verdicts):
            trivially = False
            continue
        if any(v[2] == "ask" for v in verdicts):
            pending.extend(index for v in verdicts if v[2] == "ask")
            continue

        kept = list(actions)
        for _, rule, _ in verdicts:
            if rule is not None and rule[1] is not None:
                kept = [a for a in kept if a in rule[1]]
        if not kept:
            trivially = False
            continue

        caps = [rule[2] for _, rule, _ in verdicts
                if rule is not None and rule[2] is not None]
        cap = min(caps) if caps else None
        if cap is None:
            out_retention = retention
        elif retention is None:
            out_retention = cap
        else:
            out_retention = min(retention, cap)
        if kept != list(actions) or out_retention != retention:
            trivially = False
        granted.append((index, tuple(kept), out_retention))

    if pending:
        outcome = "pending"
    elif not granted:
        outcome = "denied"
    elif len(granted) == len(permissions) and trivially:
        outcome = "granted"
    else:
        outcome = "partial"
    return outcome, granted, sorted(set(pending))
