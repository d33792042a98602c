"""Pure-Python versions of the hot kernels.

Every function here has a twin in ``_core.pyx`` with the same signature and
the same floating-point operation order, so both backends return
bit-identical results.  Array arguments may be numpy arrays or lists.
"""

from __future__ import annotations

import math

NEG_INF = float("-inf")


def _aslist(xs):
    return xs.tolist() if hasattr(xs, "tolist") else list(xs)


def levenshtein(a, b):
    """Unit-cost insert/delete/substitute distance over code points."""
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return len(a)
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        cur = [i]
        for j, cb in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


def _logaddexp(x, y):
    if x == NEG_INF:
        return y
    if y == NEG_INF:
        return x
    if x > y:
        return x + math.log1p(math.exp(y - x))
    return y + math.log1p(math.exp(x - y))


def forward_backward(n_nodes, src, dst, gid, logp, counts, weight=1.0):
    """Accumulate expected graphone counts for one alignment lattice.

    Edges must be sorted by source node and every edge must point to a
    higher-numbered node; node 0 is the start, ``n_nodes - 1`` the end.
    Adds ``weight`` times the posterior edge mass into ``counts`` and
    returns the (unweighted) log-likelihood.
    """
    src = _aslist(src)
    dst = _aslist(dst)
    gid = _aslist(gid)
    logp = _aslist(logp)
    n_edges = len(src)
    alpha = [NEG_INF] * n_nodes
    beta = [NEG_INF] * n_nodes
    alpha[0] = 0.0
    for e in range(n_edges):
        w = logp[gid[e]]
        if w == NEG_INF or alpha[src[e]] == NEG_INF:
            continue
        alpha[dst[e]] = _logaddexp(alpha[dst[e]], alpha[src[e]] + w)
    beta[n_nodes - 1] = 0.0
    for e in range(n_edges - 1, -1, -1):
        w = logp[gid[e]]
        if w == NEG_INF or beta[dst[e]] == NEG_INF:
            continue
        beta[src[e]] = _logaddexp(beta[src[e]], w + beta[dst[e]])
    z = alpha[n_nodes - 1]
    if z == NEG_INF:
        return z
    for e in range(n_edges):
        w = logp[gid[e]]
        if w == NEG_INF or alpha[src[e]] == NEG_INF or beta[dst[e]] == NEG_INF:
            continue
        counts[gid[e]] += weight * math.exp(alpha[src[e]] + w + beta[dst[e]] - z)
    return z


def viterbi(n_nodes, src, dst, gid, logp):
    """Edge indices of the best start-to-end path; earliest edge wins ties."""
    src = _aslist(src)
    dst = _aslist(dst)
    gid = _aslist(gid)
    logp = _aslist(logp)
    best = [NEG_INF] * n_nodes
    back = [-1] * n_nodes
    best[0] = 0.0
    for e in range(len(src)):
        w = logp[gid[e]]
        if w == NEG_INF or best[src[e]] == NEG_INF:
            continue
        s = best[src[e]] + w
        if s > best[dst[e]]:
            best[dst[e]] = s
            back[dst[e]] = e
    node = n_nodes - 1
    if best[node] == NEG_INF:
        return []
    path = []
    while node != 0:
        e = back[node]
        path.append(e)
        node = src[e]
    path.reverse()
    return path


class PackedLM:
    """Integer-keyed view of an n-gram model for the decoder.

    Tokens are ints in ``[0, base)``.  A context of the last ``order - 1``
    tokens is packed base-``base`` into one int; a full n-gram key is
    ``ctx_key * base + token``.
    """

    def __init__(self, order, base, delta, norm, counts, totals, bos, eos):
        self.order = order
        self.base = base
        self.delta = delta
        self.norm = norm
        self.counts = counts
        self.totals = totals
        self.bos = bos
        self.eos = eos
        k = order - 1
        self.modulus = base ** (k - 1) if k > 0 else 0
        key = 0
        for _ in range(k):
            key = key * base + bos
        self.start_key = key

    def advance(self, ctx_key, tok):
        if self.order == 1:
            return 0
        if self.order == 2:
            return tok
        return (ctx_key % self.modulus) * self.base + tok

    def cost(self, ctx_key, tok):
        total = self.totals.get(ctx_key, 0)
        count = self.counts.get(ctx_key * self.base + tok, 0) if total else 0
        return -math.log((count + self.delta) / (total + self.norm))


def beam_search(lm, n_pos, opt_start, opt_len, opt_gid, opt_tok, ins_gid, ins_tok, beam):
    """Left-to-right beam decoding over source segmentations.

    Options for source position ``i`` live at ``opt_start[i]:opt_start[i+1]``
    in the parallel ``opt_*`` arrays: segment length, output id, LM token.
    One insertion (``ins_*``) may precede each consuming step and the end.
    Returns ``(cost, [output ids])`` for every finished hypothesis, cheapest
    first.
    """
    opt_start = _aslist(opt_start)
    opt_len = _aslist(opt_len)
    opt_gid = _aslist(opt_gid)
    opt_tok = _aslist(opt_tok)
    ins_gid = _aslist(ins_gid)
    ins_tok = _aslist(ins_tok)
    arena_parent = []
    arena_gid = []
    # hypothesis: (cost, ctx_key, arena node)
    pools = [[] for _ in range(n_pos + 1)]
    pools[0].append((0.0, lm.start_key, -1))
    finals = []
    for i in range(n_pos + 1):
        pool = pools[i]
        if not pool:
            continue
        arrived = len(pool)
        for h in range(arrived):
            cost, key, node = pool[h]
            for g, t in zip(ins_gid, ins_tok):
                arena_parent.append(node)
                arena_gid.append(g)
                pool.append((cost + lm.cost(key, t), lm.advance(key, t), len(arena_gid) - 1))
        order = sorted(range(len(pool)), key=lambda j: (pool[j][0], j))[:beam]
        kept = [pool[j] for j in order]
        pools[i] = []
        if i == n_pos:
            for cost, key, node in kept:
                finals.append((cost + lm.cost(key, lm.eos), node))
            break
        for cost, key, node in kept:
            for o in range(opt_start[i], opt_start[i + 1]):
                t = opt_tok[o]
                arena_parent.append(node)
                arena_gid.append(opt_gid[o])
                pools[i + opt_len[o]].append(
                    (cost + lm.cost(key, t), lm.advance(key, t), len(arena_gid) - 1)
                )
    order = sorted(range(len(finals)), key=lambda j: (finals[j][0], j))
    out = []
    for j in order:
        cost, node = finals[j]
        path = []
        while node != -1:
            path.append(arena_gid[node])
            node = arena_parent[node]
        path.reverse()
        out.append((cost, path))
    return out
