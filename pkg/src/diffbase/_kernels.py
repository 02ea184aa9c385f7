"""Search kernels, written in a numba-compilable subset of Python.

Both kernels run unchanged on the pure-python backend (DIFFBASE_BACKEND);
the numba path compiles them with nogil so worker threads overlap.

Group search
------------
Exhaustive test for a difference basis of a fixed size s.  Elements of the
group are 0..n-1 (0 = identity); inverse pairs {g, g^-1} are merged into
classes because an unordered pair of basis elements {a, b} covers both
a*b^-1 and its inverse at once, and an involution class consumes a whole
pair by itself.  That yields the counting prune: a node with t chosen
elements has C(s,2) - C(t,2) unordered pairs left, so more uncovered
classes than that is a dead end.

Branching covers one uncovered class (the one with the fewest ways to
cover it): either add one element that completes a pair with a chosen
element, or add both elements of a fresh pair.  After a branch is
explored, its covering pairs are excluded from the sibling branches
(solutions containing them were already visited), which makes the
enumeration complete and duplicate-free.

Root reductions: the search is seeded with {0, g*} for a fixed target
element g* (any solution translates onto that pair); with negation enabled
the involution B -> g* - B maps the seeded family to itself and root
branches are explored only for orbit minima.  Dropped branches still
contribute their exclusions, which keeps the first-covering-pair argument
intact.  Multi-worker runs split the root branch list round-robin.

Class bitmasks use 62 bits per int64 word so the same shifts are valid for
python ints and for numba's int64.
"""

import numpy as np

WBITS = 62


def _ruler_dfs(n, s, marks):
    """Difference basis of [1, n] with exactly s integer marks.

    Marks start at 0, consecutive gaps stay <= n (any basis normalizes to
    that form), and a pair of marks covers at most one value, so a size-s
    attempt may waste at most C(s,2) - n pairs.  Candidates at each level
    are ordered by coverage gain so covers are found early; the very last
    mark must complete a pair over the largest missing value, which pins
    it to one of t positions.  Returns the number of marks placed on
    success, else 0.
    """
    slack = s * (s - 1) // 2 - n
    if slack < 0:
        return 0
    full = (1 << (n + 1)) - 2
    covered = np.zeros(s + 2, dtype=np.int64)
    wasted = np.zeros(s + 2, dtype=np.int64)
    cnd_b = np.zeros((s + 2, n + 2), dtype=np.int64)
    cnd_cnt = np.zeros(s + 2, dtype=np.int64)
    cnd_i = np.zeros(s + 2, dtype=np.int64)
    tmp_b = np.zeros(n + 2, dtype=np.int64)
    tmp_g = np.zeros(n + 2, dtype=np.int64)

    marks[0] = 0
    covered[1] = 0
    wasted[1] = 0
    t = 1
    build = True
    while t >= 1:
        if build:
            build = False
            last = marks[t - 1]
            cnt = 0
            if s - t == 1:
                missing = full & ~covered[t]
                d_max = 0
                v = missing
                while v > 1:
                    v >>= 1
                    d_max += 1
                for i in range(t):
                    b = marks[i] + d_max
                    if b > last:
                        cnd_b[t, cnt] = b
                        cnt += 1
            else:
                for b in range(last + 1, last + n + 1):
                    new_bits = 0
                    for i in range(t):
                        d = b - marks[i]
                        if d <= n:
                            new_bits |= 1 << d
                    fresh = new_bits & ~covered[t]
                    gained = 0
                    while fresh:
                        fresh &= fresh - 1
                        gained += 1
                    if wasted[t] + t - gained > slack:
                        continue
                    tmp_b[cnt] = b
                    tmp_g[cnt] = gained
                    cnt += 1
                # order by gain descending, position ascending
                for i in range(1, cnt):
                    kb = tmp_b[i]
                    kg = tmp_g[i]
                    j = i - 1
                    while j >= 0 and (tmp_g[j] < kg or (tmp_g[j] == kg and tmp_b[j] > kb)):
                        tmp_b[j + 1] = tmp_b[j]
                        tmp_g[j + 1] = tmp_g[j]
                        j -= 1
                    tmp_b[j + 1] = kb
                    tmp_g[j + 1] = kg
                for i in range(cnt):
                    cnd_b[t, i] = tmp_b[i]
            cnd_cnt[t] = cnt
            cnd_i[t] = 0
            continue
        if cnd_i[t] >= cnd_cnt[t]:
            t -= 1
            continue
        b = cnd_b[t, cnd_i[t]]
        cnd_i[t] += 1
        new_bits = 0
        for i in range(t):
            d = b - marks[i]
            if d <= n:
                new_bits |= 1 << d
        fresh = new_bits & ~covered[t]
        gained = 0
        while fresh:
            fresh &= fresh - 1
            gained += 1
        w = wasted[t] + t - gained
        if w > slack:
            continue
        merged = covered[t] | new_bits
        marks[t] = b
        if merged == full:
            return t + 1
        if t + 1 >= s:
            continue
        covered[t + 1] = merged
        wasted[t + 1] = w
        t += 1
        build = True
    return 0


def _group_dfs(
    n,
    s,
    mul,
    inv,
    pcls,
    rep,
    cp_start,
    cp_a,
    cp_b,
    target,
    n_words,
    seed,
    root_filt,
    nu,
    worker_idx,
    worker_cnt,
    abort_flag,
    out,
    counters,
):
    """Search for a difference basis of exactly size s covering the target
    classes.  Returns the number of elements in the witness written to
    ``out`` when found, 0 when the size is exhaustively refuted, and -1
    when ``abort_flag`` was raised."""
    maxbr = n + 2 * s + 8
    depth_cap = s + 2

    in_p = np.zeros(n, dtype=np.uint8)
    p_elems = np.zeros(s + 4, dtype=np.int64)
    covered = np.zeros((depth_cap + 2, n_words), dtype=np.int64)
    excl = np.zeros((n, n), dtype=np.uint8)
    excl_cap = 2 * maxbr * (depth_cap + 2) + 64
    excl_log_a = np.zeros(excl_cap, dtype=np.int64)
    excl_log_b = np.zeros(excl_cap, dtype=np.int64)
    excl_len = 0
    excl_mark = np.zeros(depth_cap + 2, dtype=np.int64)
    bx = np.zeros((depth_cap + 2, maxbr), dtype=np.int64)
    by = np.zeros((depth_cap + 2, maxbr), dtype=np.int64)
    bp1 = np.zeros((depth_cap + 2, maxbr), dtype=np.int64)
    bp2 = np.zeros((depth_cap + 2, maxbr), dtype=np.int64)
    bcnt = np.zeros(depth_cap + 2, dtype=np.int64)
    bi = np.zeros(depth_cap + 2, dtype=np.int64)
    applied = np.zeros(depth_cap + 2, dtype=np.int64)
    stamp = np.full(n, -1, dtype=np.int64)
    stamp_pos = np.zeros(n, dtype=np.int64)
    stamp_gen = 0
    tmp_x = np.zeros(2 * s + 8, dtype=np.int64)
    tmp_p1 = np.zeros(2 * s + 8, dtype=np.int64)
    tmp_p2 = np.zeros(2 * s + 8, dtype=np.int64)

    t = 0
    for i in range(len(seed)):
        z = seed[i]
        for j in range(t):
            c = pcls[z, p_elems[j]]
            covered[0, c // WBITS] |= 1 << (c % WBITS)
        p_elems[t] = z
        in_p[z] = 1
        t += 1

    nd = 0
    entering = True
    nodes = 0
    rseq = 0
    while True:
        if entering:
            entering = False
            nodes += 1
            if nodes % 2048 == 0:
                if abort_flag[0] != 0:
                    counters[0] += nodes
                    return -1
            unc = 0
            for w in range(n_words):
                v = target[w] & ~covered[nd, w]
                while v:
                    v &= v - 1
                    unc += 1
            if unc == 0:
                for i in range(t):
                    out[i] = p_elems[i]
                counters[0] += nodes
                return t
            m = s - t
            dead = m <= 0 or unc > (s * (s - 1) - t * (t - 1)) // 2
            sel = -1
            best_cnt = 0
            if not dead:
                for w in range(n_words):
                    v = target[w] & ~covered[nd, w]
                    base = w * WBITS
                    while v:
                        low = v & (-v)
                        v ^= low
                        cbit = 0
                        while low > 1:
                            low >>= 1
                            cbit += 1
                        c = base + cbit
                        g = rep[c]
                        gi = inv[g]
                        stamp_gen += 1
                        cnt_s = 0
                        tp = 0
                        for j in range(t):
                            p = p_elems[j]
                            x1 = mul[g, p]
                            if in_p[x1] == 0:
                                tp += 1
                                if stamp[x1] != stamp_gen:
                                    stamp[x1] = stamp_gen
                                    cnt_s += 1
                            x2 = mul[gi, p]
                            if x2 != x1 and in_p[x2] == 0:
                                tp += 1
                                if stamp[x2] != stamp_gen:
                                    stamp[x2] = stamp_gen
                                    cnt_s += 1
                        cnt = cnt_s
                        if m >= 2:
                            cnt += (cp_start[c + 1] - cp_start[c]) - tp
                        if cnt == 0:
                            dead = True
                            break
                        if sel < 0 or cnt < best_cnt:
                            sel = c
                            best_cnt = cnt
                    if dead:
                        break
            nb = 0
            if not dead:
                # singles: elements completing a pair with a chosen element
                g = rep[sel]
                gi = inv[g]
                stamp_gen += 1
                ns = 0
                for j in range(t):
                    p = p_elems[j]
                    x1 = mul[g, p]
                    if in_p[x1] == 0:
                        if stamp[x1] == stamp_gen:
                            tmp_p2[stamp_pos[x1]] = p
                        else:
                            stamp[x1] = stamp_gen
                            stamp_pos[x1] = ns
                            tmp_x[ns] = x1
                            tmp_p1[ns] = p
                            tmp_p2[ns] = -1
                            ns += 1
                    x2 = mul[gi, p]
                    if x2 != x1 and in_p[x2] == 0:
                        if stamp[x2] == stamp_gen:
                            if tmp_p1[stamp_pos[x2]] != p:
                                tmp_p2[stamp_pos[x2]] = p
                        else:
                            stamp[x2] = stamp_gen
                            stamp_pos[x2] = ns
                            tmp_x[ns] = x2
                            tmp_p1[ns] = p
                            tmp_p2[ns] = -1
                            ns += 1
                # insertion sort by element key for deterministic order
                for i in range(1, ns):
                    kx = tmp_x[i]
                    k1 = tmp_p1[i]
                    k2 = tmp_p2[i]
                    j = i - 1
                    while j >= 0 and tmp_x[j] > kx:
                        tmp_x[j + 1] = tmp_x[j]
                        tmp_p1[j + 1] = tmp_p1[j]
                        tmp_p2[j + 1] = tmp_p2[j]
                        j -= 1
                    tmp_x[j + 1] = kx
                    tmp_p1[j + 1] = k1
                    tmp_p2[j + 1] = k2
                for i in range(ns):
                    bx[nd, nb] = tmp_x[i]
                    by[nd, nb] = -1
                    bp1[nd, nb] = tmp_p1[i]
                    bp2[nd, nb] = tmp_p2[i]
                    nb += 1
                if m >= 2:
                    for pi in range(cp_start[sel], cp_start[sel + 1]):
                        a = cp_a[pi]
                        b = cp_b[pi]
                        if in_p[a] == 0 and in_p[b] == 0:
                            bx[nd, nb] = a
                            by[nd, nb] = b
                            bp1[nd, nb] = b
                            bp2[nd, nb] = -1
                            nb += 1
            bcnt[nd] = nb
            bi[nd] = 0
            excl_mark[nd] = excl_len
            if nd == 0:
                rseq = 0
            continue

        # iterate branches at node nd
        i = bi[nd]
        if i >= bcnt[nd]:
            while excl_len > excl_mark[nd]:
                excl_len -= 1
                a = excl_log_a[excl_len]
                b = excl_log_b[excl_len]
                excl[a, b] = 0
                excl[b, a] = 0
            nd -= 1
            if nd < 0:
                counters[0] += nodes
                return 0
            k = applied[nd]
            while k > 0:
                t -= 1
                z = p_elems[t]
                in_p[z] = 0
                k -= 1
            applied[nd] = 0
            ii = bi[nd]
            xx = bx[nd, ii]
            q1 = bp1[nd, ii]
            q2 = bp2[nd, ii]
            if excl[xx, q1] == 0:
                excl[xx, q1] = 1
                excl[q1, xx] = 1
                excl_log_a[excl_len] = xx
                excl_log_b[excl_len] = q1
                excl_len += 1
            if q2 >= 0 and excl[xx, q2] == 0:
                excl[xx, q2] = 1
                excl[q2, xx] = 1
                excl_log_a[excl_len] = xx
                excl_log_b[excl_len] = q2
                excl_len += 1
            bi[nd] += 1
            continue

        x = bx[nd, i]
        y = by[nd, i]
        skip = False
        if nd == 0:
            if root_filt == 1:
                if y < 0:
                    if nu[x] < x:
                        skip = True
                else:
                    ua = nu[x]
                    ub = nu[y]
                    lo = ua if ua < ub else ub
                    hi = ub if ua < ub else ua
                    if lo < x or (lo == x and hi < y):
                        skip = True
            if not skip:
                if rseq % worker_cnt != worker_idx:
                    skip = True
                rseq += 1
        if not skip:
            for j in range(t):
                if excl[x, p_elems[j]] != 0:
                    skip = True
                    break
            if not skip and y >= 0:
                if excl[x, y] != 0:
                    skip = True
                else:
                    for j in range(t):
                        if excl[y, p_elems[j]] != 0:
                            skip = True
                            break
        if skip:
            q1 = bp1[nd, i]
            q2 = bp2[nd, i]
            if excl[x, q1] == 0:
                excl[x, q1] = 1
                excl[q1, x] = 1
                excl_log_a[excl_len] = x
                excl_log_b[excl_len] = q1
                excl_len += 1
            if q2 >= 0 and excl[x, q2] == 0:
                excl[x, q2] = 1
                excl[q2, x] = 1
                excl_log_a[excl_len] = x
                excl_log_b[excl_len] = q2
                excl_len += 1
            bi[nd] += 1
            continue

        # apply branch: copy coverage, add element(s)
        for w in range(n_words):
            covered[nd + 1, w] = covered[nd, w]
        for j in range(t):
            c = pcls[x, p_elems[j]]
            covered[nd + 1, c // WBITS] |= 1 << (c % WBITS)
        p_elems[t] = x
        in_p[x] = 1
        t += 1
        if y >= 0:
            for j in range(t):
                c = pcls[y, p_elems[j]]
                covered[nd + 1, c // WBITS] |= 1 << (c % WBITS)
            p_elems[t] = y
            in_p[y] = 1
            t += 1
            applied[nd] = 2
        else:
            applied[nd] = 1
        nd += 1
        entering = True
