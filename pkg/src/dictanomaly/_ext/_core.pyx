# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
# distutils: language = c++
"""Compiled kernels; see ``_fallback.py`` for the reference semantics."""

from libc.math cimport log, log1p, exp, INFINITY
from libcpp.vector cimport vector
from libcpp.unordered_map cimport unordered_map
from libcpp.pair cimport pair
from libcpp.algorithm cimport sort
from libc.stdint cimport int64_t
from cython.operator cimport dereference as deref

import numpy as np
cimport numpy as cnp

cnp.import_array()

cdef double NEG_INF = -INFINITY


def levenshtein(str a, str b):
    cdef Py_ssize_t n, m, i, j
    cdef Py_UCS4 ca
    cdef int sub, best, ins, dele
    if len(a) < len(b):
        a, b = b, a
    n = len(a)
    m = len(b)
    if m == 0:
        return n
    cdef vector[Py_UCS4] bb = vector[Py_UCS4](m)
    for j in range(m):
        bb[j] = b[j]
    cdef vector[int] prev = vector[int](m + 1)
    cdef vector[int] cur = vector[int](m + 1)
    for j in range(m + 1):
        prev[j] = j
    for i in range(1, n + 1):
        ca = a[i - 1]
        cur[0] = i
        for j in range(1, m + 1):
            dele = prev[j] + 1
            ins = cur[j - 1] + 1
            sub = prev[j - 1] + (ca != bb[j - 1])
            best = dele if dele < ins else ins
            cur[j] = best if best < sub else sub
        prev.swap(cur)
    return prev[m]


cdef inline double _logaddexp(double x, double y) nogil:
    if x == NEG_INF:
        return y
    if y == NEG_INF:
        return x
    if x > y:
        return x + log1p(exp(y - x))
    return y + log1p(exp(x - y))


def forward_backward(Py_ssize_t n_nodes, src_, dst_, gid_, logp_, counts_, double weight=1.0):
    cdef const int64_t[::1] src = np.ascontiguousarray(src_, dtype=np.int64)
    cdef const int64_t[::1] dst = np.ascontiguousarray(dst_, dtype=np.int64)
    cdef const int64_t[::1] gid = np.ascontiguousarray(gid_, dtype=np.int64)
    cdef const double[::1] logp = np.ascontiguousarray(logp_, dtype=np.float64)
    cdef double[::1] counts = counts_
    cdef Py_ssize_t e, n_edges = src.shape[0]
    cdef vector[double] alpha = vector[double](n_nodes, NEG_INF)
    cdef vector[double] beta = vector[double](n_nodes, NEG_INF)
    cdef double w, z
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
        counts[gid[e]] += weight * exp(alpha[src[e]] + w + beta[dst[e]] - z)
    return z


def viterbi(Py_ssize_t n_nodes, src_, dst_, gid_, logp_):
    cdef const int64_t[::1] src = np.ascontiguousarray(src_, dtype=np.int64)
    cdef const int64_t[::1] dst = np.ascontiguousarray(dst_, dtype=np.int64)
    cdef const int64_t[::1] gid = np.ascontiguousarray(gid_, dtype=np.int64)
    cdef const double[::1] logp = np.ascontiguousarray(logp_, dtype=np.float64)
    cdef Py_ssize_t e, node
    cdef vector[double] best = vector[double](n_nodes, NEG_INF)
    cdef vector[Py_ssize_t] back = vector[Py_ssize_t](n_nodes, -1)
    cdef double w, s
    best[0] = 0.0
    for e in range(src.shape[0]):
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


cdef class PackedLM:
    cdef public int order
    cdef public int64_t base, bos, eos, start_key, modulus
    cdef public double delta, norm
    cdef unordered_map[int64_t, int64_t] _counts
    cdef unordered_map[int64_t, int64_t] _totals

    def __init__(self, order, base, delta, norm, counts, totals, bos, eos):
        self.order = order
        self.base = base
        self.delta = delta
        self.norm = norm
        self.bos = bos
        self.eos = eos
        for k, v in counts.items():
            self._counts[k] = v
        for k, v in totals.items():
            self._totals[k] = v
        cdef int i, kk = order - 1
        self.modulus = base ** (kk - 1) if kk > 0 else 0
        cdef int64_t key = 0
        for i in range(kk):
            key = key * base + bos
        self.start_key = key

    cdef inline int64_t _advance(self, int64_t ctx_key, int64_t tok) nogil:
        if self.order == 1:
            return 0
        if self.order == 2:
            return tok
        return (ctx_key % self.modulus) * self.base + tok

    cdef inline double _cost(self, int64_t ctx_key, int64_t tok) nogil:
        cdef int64_t total = 0, count = 0
        cdef unordered_map[int64_t, int64_t].iterator it = self._totals.find(ctx_key)
        if it != self._totals.end():
            total = deref(it).second
        if total:
            it = self._counts.find(ctx_key * self.base + tok)
            if it != self._counts.end():
                count = deref(it).second
        return -log((count + self.delta) / (total + self.norm))

    def advance(self, ctx_key, tok):
        return self._advance(ctx_key, tok)

    def cost(self, ctx_key, tok):
        return self._cost(ctx_key, tok)


cdef struct Hyp:
    double cost
    int64_t key
    Py_ssize_t node


def beam_search(PackedLM lm, Py_ssize_t n_pos, opt_start_, opt_len_, opt_gid_, opt_tok_,
                ins_gid_, ins_tok_, Py_ssize_t beam):
    cdef const int64_t[::1] opt_start = np.ascontiguousarray(opt_start_, dtype=np.int64)
    cdef const int64_t[::1] opt_len = np.ascontiguousarray(opt_len_, dtype=np.int64)
    cdef const int64_t[::1] opt_gid = np.ascontiguousarray(opt_gid_, dtype=np.int64)
    cdef const int64_t[::1] opt_tok = np.ascontiguousarray(opt_tok_, dtype=np.int64)
    cdef const int64_t[::1] ins_gid = np.ascontiguousarray(ins_gid_, dtype=np.int64)
    cdef const int64_t[::1] ins_tok = np.ascontiguousarray(ins_tok_, dtype=np.int64)
    cdef vector[Py_ssize_t] arena_parent
    cdef vector[int64_t] arena_gid
    cdef vector[vector[Hyp]] pools = vector[vector[Hyp]](n_pos + 1)
    cdef vector[Hyp] kept
    cdef vector[pair[double, Py_ssize_t]] ranked
    cdef vector[pair[double, Py_ssize_t]] finals
    cdef Hyp h, nh
    cdef Py_ssize_t i, j, o, q, arrived, keep
    cdef int64_t t

    h.cost = 0.0
    h.key = lm.start_key
    h.node = -1
    pools[0].push_back(h)
    for i in range(n_pos + 1):
        if pools[i].size() == 0:
            continue
        arrived = pools[i].size()
        for j in range(arrived):
            h = pools[i][j]
            for q in range(ins_gid.shape[0]):
                t = ins_tok[q]
                arena_parent.push_back(h.node)
                arena_gid.push_back(ins_gid[q])
                nh.cost = h.cost + lm._cost(h.key, t)
                nh.key = lm._advance(h.key, t)
                nh.node = arena_gid.size() - 1
                pools[i].push_back(nh)
        ranked.clear()
        for j in range(<Py_ssize_t>pools[i].size()):
            ranked.push_back(pair[double, Py_ssize_t](pools[i][j].cost, j))
        sort(ranked.begin(), ranked.end())
        keep = ranked.size() if <Py_ssize_t>ranked.size() < beam else beam
        kept.clear()
        for j in range(keep):
            kept.push_back(pools[i][ranked[j].second])
        pools[i].clear()
        if i == n_pos:
            for j in range(keep):
                h = kept[j]
                finals.push_back(pair[double, Py_ssize_t](h.cost + lm._cost(h.key, lm.eos), h.node))
            break
        for j in range(keep):
            h = kept[j]
            for o in range(opt_start[i], opt_start[i + 1]):
                t = opt_tok[o]
                arena_parent.push_back(h.node)
                arena_gid.push_back(opt_gid[o])
                nh.cost = h.cost + lm._cost(h.key, t)
                nh.key = lm._advance(h.key, t)
                nh.node = arena_gid.size() - 1
                pools[i + opt_len[o]].push_back(nh)

    # Stable order: cost, then arrival index, matching the fallback.
    ranked.clear()
    for j in range(<Py_ssize_t>finals.size()):
        ranked.push_back(pair[double, Py_ssize_t](finals[j].first, j))
    sort(ranked.begin(), ranked.end())
    out = []
    cdef Py_ssize_t node
    for j in range(<Py_ssize_t>ranked.size()):
        node = finals[ranked[j].second].second
        path = []
        while node != -1:
            path.append(arena_gid[node])
            node = arena_parent[node]
        path.reverse()
        out.append((finals[ranked[j].second].first, path))
    return out
