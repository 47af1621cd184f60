"""Random and synthetic instances for tests, benchmarks and demos."""

from __future__ import annotations

import numpy as np

from .core import Hyperarc, OrientedHypergraph, build_hypergraph
from .ingest import ArcList
from .operators import OperatorParams


def _random_arc(rng, n, max_side):
    k_out = int(rng.integers(1, max_side + 1))
    k_in = int(rng.integers(1, max_side + 1))
    k_out, k_in = min(k_out, n - 1), min(k_in, n - 1)
    while k_out + k_in > n:
        k_in -= 1
    verts = rng.choice(n, size=k_out + k_in, replace=False)
    return Hyperarc.make(verts[:k_out].tolist(), verts[k_out:].tolist())


def random_hypergraph_arcs(rng, n, n_arcs, max_side=3, connected=True, reversals=0):
    """Distinct random hyperarcs on ``n`` vertices.

    With ``connected=True`` the first ``n-1`` hyperarcs are singleton arcs of
    a random spanning tree. ``reversals`` extra hyperarcs are reversed copies
    of earlier ones.
    """
    arcs: dict[Hyperarc, None] = {}
    if connected and n > 1:
        perm = rng.permutation(n)
        for i in range(1, n):
            u, v = int(perm[i]), int(perm[rng.integers(0, i)])
            if rng.random() < 0.5:
                u, v = v, u
            arcs[Hyperarc((u,), (v,))] = None
    attempts = 0
    while len(arcs) < n_arcs and attempts < 50 * n_arcs + 100:
        attempts += 1
        arcs.setdefault(_random_arc(rng, n, max_side), None)
    arcs_list = list(arcs)
    for arc in list(arcs_list)[: max(0, reversals)]:
        rev = arc.reversed()
        if rev not in arcs:
            arcs[rev] = None
            arcs_list.append(rev)
    return arcs_list


def random_instance(
    rng,
    n: int,
    n_arcs: int,
    *,
    max_side: int = 3,
    mode: str = "unit",
    connected: bool = True,
    reversals: int = 0,
) -> tuple[OrientedHypergraph, OperatorParams]:
    """A random hypergraph and matching operator parameters.

    ``mode``:

    * ``"unit"`` - unit weights, zero exponents;
    * ``"random"`` - weights in [0.5, 2], exponents in [-2, 2];
    * ``"condition"`` - non-trivial weights and exponents chosen so that the
      weight condition holds (``w_G = w_I^(-alpha/epsilon)``, ``eta =
      epsilon``), hence constants are in the gradient's nullspace.

    Reversed hyperarcs share their ``W_G`` (and ``W_I``) value with the
    original so the hyperarc weights are symmetric.
    """
    arcs = random_hypergraph_arcs(rng, n, n_arcs, max_side, connected, reversals)
    m = len(arcs)
    if mode == "unit":
        return build_hypergraph(n, arcs), OperatorParams()

    W_I = rng.uniform(0.5, 2.0, m)
    W_G = rng.uniform(0.5, 2.0, m)
    pos = {a: q for q, a in enumerate(arcs)}
    for q, a in enumerate(arcs):
        r = pos.get(a.reversed())
        if r is not None and r < q:
            W_I[q], W_G[q] = W_I[r], W_G[r]
    w_I = rng.uniform(0.5, 2.0, n)
    if mode == "random":
        w_G = rng.uniform(0.5, 2.0, n)
        params = OperatorParams(*rng.uniform(-2.0, 2.0, 5))
    elif mode == "condition":
        alpha = float(rng.uniform(-1.0, 1.0))
        eps = float(rng.choice([-1.0, 1.0]) * rng.uniform(0.5, 1.5))
        w_G = w_I ** (-alpha / eps)
        beta, gamma = rng.uniform(-1.0, 1.0, 2)
        params = OperatorParams(alpha, beta, gamma, eps, eps)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    h = build_hypergraph(n, arcs, w_I=w_I, w_G=w_G, W_I=W_I, W_G=W_G)
    return h, params


def two_leader_network(
    n_followers: int = 50,
    n_bridges: int = 20,
    peer_follows: int = 2,
    seed: int = 0,
) -> ArcList:
    """Two opinion leaders with separate follower communities.

    * leaders ``L0`` and ``L1``; followers ``c0_i`` follow ``L0`` and ``c1_i``
      follow ``L1``;
    * inside each community, follower ``i`` follows follower ``i+1`` (a
      directed ring) plus ``peer_follows`` random fellow followers;
    * bridge users ``x_j`` are followed by both leaders, so they are the only
      connection between the communities.
    """
    rng = np.random.default_rng(seed)
    pairs: list[tuple[str, str]] = []
    for c in range(2):
        leader = f"L{c}"
        names = [f"c{c}_{i}" for i in range(n_followers)]
        for i, name in enumerate(names):
            pairs.append((name, leader))
        for i, name in enumerate(names):
            targets = {(i + 1) % n_followers}
            if n_followers > 2 and peer_follows > 0:
                others = [j for j in range(n_followers) if j != i]
                targets.update(rng.choice(others, size=min(peer_follows, len(others)), replace=False).tolist())
            targets.discard(i)
            for j in sorted(targets):
                pairs.append((name, names[j]))
    for j in range(n_bridges):
        pairs.append(("L0", f"x{j}"))
        pairs.append(("L1", f"x{j}"))
    return ArcList.from_pairs(pairs)
