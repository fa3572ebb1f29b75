"""Compiled kernels for the second-level local search.

Mirrors the pure-Python scans in local_search.py operation for operation
(same scan order, same first-improvement restart, same epsilon), operating
on array-encoded routes.  The Python implementation remains the reference;
an equivalence test keeps the two in lockstep.  Everything here is a
module-internal detail behind local_search().
"""

from __future__ import annotations

import numpy as np

try:
    from numba import njit
    HAVE_NUMBA = True
except ImportError:      # pragma: no cover - numba is expected in production
    HAVE_NUMBA = False

    def njit(*a, **k):
        def wrap(f):
            return f
        return wrap if not (len(a) == 1 and callable(a[0])) else a[0]

EPS = 1e-9


@njit(cache=True)
def _two_opt_route(routes, rlen, rhome, ri, d):
    v = routes[ri]
    home = rhome[ri]
    improved = False
    restart = True
    while restart:
        restart = False
        m = rlen[ri]
        for i in range(m - 1):
            prev = home if i == 0 else v[i - 1]
            vi = v[i]
            for j in range(i + 1, m):
                nxt = home if j == m - 1 else v[j + 1]
                delta = d[prev, v[j]] + d[vi, nxt] - d[prev, vi] - d[v[j], nxt]
                if delta < -EPS:
                    lo, hi = i, j
                    while lo < hi:
                        v[lo], v[hi] = v[hi], v[lo]
                        lo += 1
                        hi -= 1
                    improved = True
                    restart = True
                    break
            if restart:
                break
    return improved


@njit(cache=True)
def _two_opt_star_sat(routes, rlen, rhome, rload, sat, d, dem, q2, f2,
                      buf1, buf2, pre1, pre2):
    improved = False
    restart = True
    nr = routes.shape[0]
    while restart:
        restart = False
        for ra in range(nr - 1):
            if rlen[ra] == 0 or rhome[ra] != sat:
                continue
            for rb in range(ra + 1, nr):
                if rlen[rb] == 0 or rhome[rb] != sat:
                    continue
                if _star_pair(routes, rlen, rhome, rload, ra, rb, d, dem,
                              q2, f2, buf1, buf2, pre1, pre2):
                    improved = True
                    restart = True
                    break
            if restart:
                break
    return improved


@njit(cache=True)
def _star_pair(routes, rlen, rhome, rload, ra, rb, d, dem, q2, f2,
               buf1, buf2, pre1, pre2):
    home = rhome[ra]
    v1 = routes[ra]
    v2 = routes[rb]
    m1 = rlen[ra]
    m2 = rlen[rb]
    pre1[0] = 0.0
    for i in range(m1):
        pre1[i + 1] = pre1[i] + dem[v1[i]]
    pre2[0] = 0.0
    for j in range(m2):
        pre2[j + 1] = pre2[j] + dem[v2[j]]
    l1 = rload[ra]
    l2 = rload[rb]
    for i in range(m1 + 1):
        a = home if i == 0 else v1[i - 1]
        b = home if i == m1 else v1[i]
        for j in range(m2 + 1):
            c = home if j == 0 else v2[j - 1]
            e = home if j == m2 else v2[j]
            base = d[a, b] + d[c, e]
            # tails exchanged
            edge = d[a, e] + d[c, b] - base
            bonus = f2 if (i == 0 and j == m2) or (j == 0 and i == m1) else 0.0
            if edge - bonus < -EPS:
                l1n = pre1[i] + l2 - pre2[j]
                l2n = pre2[j] + l1 - pre1[i]
                if l1n <= q2 + EPS and l2n <= q2 + EPS:
                    n1 = 0
                    for k in range(i):
                        buf1[n1] = v1[k]
                        n1 += 1
                    for k in range(j, m2):
                        buf1[n1] = v2[k]
                        n1 += 1
                    n2 = 0
                    for k in range(j):
                        buf2[n2] = v2[k]
                        n2 += 1
                    for k in range(i, m1):
                        buf2[n2] = v1[k]
                        n2 += 1
                    for k in range(n1):
                        v1[k] = buf1[k]
                    for k in range(n2):
                        v2[k] = buf2[k]
                    rlen[ra] = n1
                    rlen[rb] = n2
                    rload[ra] = l1n
                    rload[rb] = l2n
                    return True
            # heads joined / tails joined
            edge = d[a, c] + d[b, e] - base
            bonus = f2 if (i == 0 and j == 0) or (i == m1 and j == m2) else 0.0
            if edge - bonus < -EPS:
                l1n = pre1[i] + pre2[j]
                l2n = (l1 - pre1[i]) + (l2 - pre2[j])
                if l1n <= q2 + EPS and l2n <= q2 + EPS:
                    n1 = 0
                    for k in range(i):
                        buf1[n1] = v1[k]
                        n1 += 1
                    for k in range(j - 1, -1, -1):
                        buf1[n1] = v2[k]
                        n1 += 1
                    n2 = 0
                    for k in range(m1 - 1, i - 1, -1):
                        buf2[n2] = v1[k]
                        n2 += 1
                    for k in range(j, m2):
                        buf2[n2] = v2[k]
                        n2 += 1
                    for k in range(n1):
                        v1[k] = buf1[k]
                    for k in range(n2):
                        v2[k] = buf2[k]
                    rlen[ra] = n1
                    rlen[rb] = n2
                    rload[ra] = l1n
                    rload[rb] = l2n
                    return True
    return False


@njit(cache=True)
def _fill_positions(routes, rlen, pos_route, pos_idx):
    nr = routes.shape[0]
    for ri in range(nr):
        for i in range(rlen[ri]):
            c = routes[ri, i]
            pos_route[c] = ri
            pos_idx[c] = i


@njit(cache=True)
def _count_at(rlen, rhome, sat):
    n = 0
    for ri in range(rlen.shape[0]):
        if rlen[ri] > 0 and rhome[ri] == sat:
            n += 1
    return n


@njit(cache=True)
def _remove_at(routes, rlen, rload, dem, ri, pos):
    c = routes[ri, pos]
    for k in range(pos, rlen[ri] - 1):
        routes[ri, k] = routes[ri, k + 1]
    rlen[ri] -= 1
    rload[ri] -= dem[c]
    return c


@njit(cache=True)
def _insert_at(routes, rlen, rload, dem, ri, pos, c):
    for k in range(rlen[ri], pos, -1):
        routes[ri, k] = routes[ri, k - 1]
    routes[ri, pos] = c
    rlen[ri] += 1
    rload[ri] += dem[c]


@njit(cache=True)
def _relocate_scan(routes, rlen, rhome, rload, d, dem, thr,
                   cust_part, cust_plen, sat_part, sat_plen,
                   handling, opening, caps, q2, f2, lrpsd, hh,
                   cust_lo, n_nodes, pos_route, pos_idx):
    _fill_positions(routes, rlen, pos_route, pos_idx)
    for c in range(cust_lo, n_nodes):
        r1 = pos_route[c]
        pos = pos_idx[c]
        m1 = rlen[r1]
        home1 = rhome[r1]
        prev = home1 if pos == 0 else routes[r1, pos - 1]
        nxt = home1 if pos == m1 - 1 else routes[r1, pos + 1]
        gain = d[prev, nxt] - d[prev, c] - d[c, nxt]
        if m1 == 1:
            gain -= f2
            if _count_at(rlen, rhome, home1) == 1:
                gain -= opening[home1]
        if gain > -2.0 * EPS and not hh:
            continue
        dc = dem[c]
        h1 = handling[home1]
        for pi in range(cust_plen[c]):
            a = cust_part[c, pi]
            r2 = pos_route[a]
            apos = pos_idx[a]
            if r2 == r1:
                hd = 0.0
            else:
                if rload[r2] + dc > q2 + EPS:
                    continue
                home2 = rhome[r2]
                if lrpsd and home2 != home1 and thr[home2] + dc > caps[home2] + EPS:
                    continue
                hd = dc * (handling[home2] - h1) if hh else 0.0
            m2 = rlen[r2]
            h2v = rhome[r2]
            p_a = h2v if apos == 0 else routes[r2, apos - 1]
            n_a = h2v if apos == m2 - 1 else routes[r2, apos + 1]
            if p_a != c and gain + d[p_a, c] + d[c, a] - d[p_a, a] + hd < -EPS:
                _apply_reloc(routes, rlen, rhome, rload, dem, thr,
                             c, r1, pos, r2, apos, True)
                return True
            if n_a != c and gain + d[c, a] + d[c, n_a] - d[a, n_a] + hd < -EPS:
                _apply_reloc(routes, rlen, rhome, rload, dem, thr,
                             c, r1, pos, r2, apos + 1, False)
                return True
        for pi in range(sat_plen[c]):
            s = sat_part[c, pi]
            samesat = s == home1
            if not samesat:
                if lrpsd and thr[s] + dc > caps[s] + EPS:
                    continue
            hd = 0.0 if (samesat or not hh) else dc * (handling[s] - h1)
            for r2 in range(rlen.shape[0]):
                if rlen[r2] == 0 or rhome[r2] != s:
                    continue
                if r2 != r1 and rload[r2] + dc > q2 + EPS:
                    continue
                m2 = rlen[r2]
                first = routes[r2, 0]
                last = routes[r2, m2 - 1]
                if first != c and gain + d[s, c] + d[c, first] - d[s, first] + hd < -EPS:
                    _apply_reloc(routes, rlen, rhome, rload, dem, thr,
                                 c, r1, pos, r2, 0, False)
                    return True
                if last != c and gain + d[last, c] + d[c, s] - d[last, s] + hd < -EPS:
                    _apply_reloc(routes, rlen, rhome, rload, dem, thr,
                                 c, r1, pos, r2, m2, False)
                    return True
    return False


@njit(cache=True)
def _apply_reloc(routes, rlen, rhome, rload, dem, thr, c, r1, pos, r2, ipos,
                 before_anchor):
    _remove_at(routes, rlen, rload, dem, r1, pos)
    if r1 == r2 and pos < ipos:
        ipos -= 1
    _insert_at(routes, rlen, rload, dem, r2, ipos, c)
    if r1 != r2:
        dc = dem[c]
        thr[rhome[r1]] -= dc
        thr[rhome[r2]] += dc


@njit(cache=True)
def _swap11_scan(routes, rlen, rhome, rload, d, dem, thr,
                 cust_part, cust_plen, handling, caps, q2, lrpsd, hh,
                 cust_lo, n_nodes, pos_route, pos_idx):
    _fill_positions(routes, rlen, pos_route, pos_idx)
    for c1 in range(cust_lo, n_nodes):
        r1 = pos_route[c1]
        p1 = pos_idx[c1]
        m1 = rlen[r1]
        home1 = rhome[r1]
        prev1 = home1 if p1 == 0 else routes[r1, p1 - 1]
        next1 = home1 if p1 == m1 - 1 else routes[r1, p1 + 1]
        d1v = dem[c1]
        h1 = handling[home1]
        for pi in range(cust_plen[c1]):
            c2 = cust_part[c1, pi]
            if c2 <= c1:
                continue
            r2 = pos_route[c2]
            p2 = pos_idx[c2]
            d2v = dem[c2]
            home2 = rhome[r2]
            if r2 != r1:
                if rload[r1] - d1v + d2v > q2 + EPS:
                    continue
                if rload[r2] - d2v + d1v > q2 + EPS:
                    continue
                if lrpsd and home1 != home2:
                    if thr[home1] - d1v + d2v > caps[home1] + EPS:
                        continue
                    if thr[home2] - d2v + d1v > caps[home2] + EPS:
                        continue
            m2 = rlen[r2]
            prev2 = home2 if p2 == 0 else routes[r2, p2 - 1]
            next2 = home2 if p2 == m2 - 1 else routes[r2, p2 + 1]
            if next1 == c2:
                delta = d[prev1, c2] + d[c1, next2] - d[prev1, c1] - d[c2, next2]
            elif next2 == c1:
                delta = d[prev2, c1] + d[c2, next1] - d[prev2, c2] - d[c1, next1]
            else:
                delta = (d[prev1, c2] + d[c2, next1] - d[prev1, c1] - d[c1, next1]
                         + d[prev2, c1] + d[c1, next2] - d[prev2, c2] - d[c2, next2])
            if hh:
                delta += (d2v - d1v) * (h1 - handling[home2])
            if delta < -EPS:
                routes[r1, p1] = c2
                routes[r2, p2] = c1
                if r2 != r1:
                    rload[r1] += d2v - d1v
                    rload[r2] += d1v - d2v
                    thr[home1] += d2v - d1v
                    thr[home2] += d1v - d2v
                return True
    return False


@njit(cache=True)
def _swap21_scan(routes, rlen, rhome, rload, d, dem, thr,
                 cust_part, cust_plen, handling, caps, q2, lrpsd, hh,
                 cust_lo, n_nodes, pos_route, pos_idx, mark):
    _fill_positions(routes, rlen, pos_route, pos_idx)
    for u in range(cust_lo, n_nodes):
        r1 = pos_route[u]
        upos = pos_idx[u]
        m1 = rlen[r1]
        if upos == m1 - 1:
            continue
        w = routes[r1, upos + 1]
        home1 = rhome[r1]
        prev1 = home1 if upos == 0 else routes[r1, upos - 1]
        next1 = home1 if upos == m1 - 2 else routes[r1, upos + 2]
        duw = dem[u] + dem[w]
        h1 = handling[home1]
        nu = cust_plen[u]
        for pi in range(nu):
            mark[cust_part[u, pi]] = True
        total = nu + cust_plen[w]
        for pi in range(total):
            if pi < nu:
                c2 = cust_part[u, pi]
            else:
                c2 = cust_part[w, pi - nu]
                if mark[c2]:
                    continue
            if c2 == u or c2 == w:
                continue
            r2 = pos_route[c2]
            if r2 == r1:
                continue
            p2 = pos_idx[c2]
            d2v = dem[c2]
            if rload[r1] - duw + d2v > q2 + EPS:
                continue
            if rload[r2] - d2v + duw > q2 + EPS:
                continue
            home2 = rhome[r2]
            if lrpsd and home1 != home2:
                if thr[home1] - duw + d2v > caps[home1] + EPS:
                    continue
                if thr[home2] - d2v + duw > caps[home2] + EPS:
                    continue
            m2 = rlen[r2]
            prev2 = home2 if p2 == 0 else routes[r2, p2 - 1]
            next2 = home2 if p2 == m2 - 1 else routes[r2, p2 + 1]
            out1 = d[prev1, c2] + d[c2, next1] - d[prev1, u] - d[u, w] - d[w, next1]
            base2 = d[prev2, c2] + d[c2, next2]
            in_uw = d[prev2, u] + d[u, w] + d[w, next2] - base2
            in_wu = d[prev2, w] + d[w, u] + d[u, next2] - base2
            delta = out1 + (in_uw if in_uw <= in_wu else in_wu)
            if hh:
                delta += (duw - d2v) * (handling[home2] - h1)
            if delta < -EPS:
                routes[r1, upos] = c2
                for k in range(upos + 1, m1 - 1):
                    routes[r1, k] = routes[r1, k + 1]
                rlen[r1] -= 1
                if in_uw <= in_wu:
                    a, b = u, w
                else:
                    a, b = w, u
                for k in range(m2, p2 + 1, -1):
                    routes[r2, k] = routes[r2, k - 1]
                routes[r2, p2] = a
                routes[r2, p2 + 1] = b
                rlen[r2] += 1
                rload[r1] += d2v - duw
                rload[r2] += duw - d2v
                thr[home1] += d2v - duw
                thr[home2] += duw - d2v
                for pi in range(nu):
                    mark[cust_part[u, pi]] = False
                return True
        for pi in range(nu):
            mark[cust_part[u, pi]] = False
    return False


@njit(cache=True)
def run_local_search(routes, rlen, rhome, rload, d, dem, thr,
                     cust_part, cust_plen, sat_part, sat_plen,
                     handling, opening, caps, q2, f2, lrpsd, hh,
                     do2opt, do2optstar, dorel, doswap, doswap2,
                     n_sat, cust_lo, n_nodes):
    L = routes.shape[1]
    buf1 = np.empty(L, dtype=np.int64)
    buf2 = np.empty(L, dtype=np.int64)
    pre1 = np.empty(L + 1, dtype=np.float64)
    pre2 = np.empty(L + 1, dtype=np.float64)
    pos_route = np.empty(n_nodes, dtype=np.int64)
    pos_idx = np.empty(n_nodes, dtype=np.int64)
    mark = np.zeros(n_nodes, dtype=np.bool_)
    while True:
        improved = False
        if do2opt:
            for ri in range(rlen.shape[0]):
                if rlen[ri] > 1:
                    if _two_opt_route(routes, rlen, rhome, ri, d):
                        improved = True
        if do2optstar:
            for s in range(1, n_sat + 1):
                if _count_at(rlen, rhome, s) > 1:
                    if _two_opt_star_sat(routes, rlen, rhome, rload, s, d, dem,
                                         q2, f2, buf1, buf2, pre1, pre2):
                        improved = True
        while True:
            if dorel and _relocate_scan(routes, rlen, rhome, rload, d, dem, thr,
                                        cust_part, cust_plen, sat_part, sat_plen,
                                        handling, opening, caps, q2, f2, lrpsd,
                                        hh, cust_lo, n_nodes, pos_route, pos_idx):
                improved = True
                continue
            if doswap and _swap11_scan(routes, rlen, rhome, rload, d, dem, thr,
                                       cust_part, cust_plen, handling, caps, q2,
                                       lrpsd, hh, cust_lo, n_nodes,
                                       pos_route, pos_idx):
                improved = True
                continue
            if doswap2 and _swap21_scan(routes, rlen, rhome, rload, d, dem, thr,
                                        cust_part, cust_plen, handling, caps, q2,
                                        lrpsd, hh, cust_lo, n_nodes,
                                        pos_route, pos_idx, mark):
                improved = True
                continue
            break
        if not improved:
            return
