# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; same contract as ``_pykernel``."""

from libc.stdint cimport uint64_t

cdef enum:
    OP_BOT = 0
    OP_ATOM = 1
    OP_IMP = 2
    OP_BOX = 3
    OP_TRI = 4
    MAX_OPS = 1024
    MAX_W = 16
    MAX_ATOMS = 8
    MAX_L = 64
    MAX_LF = 1024
    MAX_REL = 1024


cdef inline int _lowbit(uint64_t m) nogil:
    cdef int i = 0
    while not (m & 1):
        m >>= 1
        i += 1
    return i


cdef void _eval(int nops, const int* ops, const int* a1, const int* a2,
                const uint64_t* s0, const uint64_t* s1, const uint64_t* val,
                int n, uint64_t full, uint64_t* masks) noexcept nogil:
    cdef int i, w, op
    cdef uint64_t m, inner
    cdef const uint64_t* succ
    for i in range(nops):
        op = ops[i]
        if op == OP_BOT:
            masks[i] = 0
        elif op == OP_ATOM:
            masks[i] = val[a1[i]]
        elif op == OP_IMP:
            masks[i] = ((~masks[a1[i]]) | masks[a2[i]]) & full
        else:
            inner = masks[a1[i]]
            succ = s0 if op == OP_BOX else s1
            m = 0
            for w in range(n):
                if (succ[w] & ~inner) == 0:
                    m |= (<uint64_t>1) << w
            masks[i] = m


cdef int _load_program(ops, a1, a2, int* c_ops, int* c_a1, int* c_a2) except -1:
    cdef int nops = len(ops)
    cdef int i
    if nops > MAX_OPS:
        raise ValueError("program too large for the compiled kernel")
    for i in range(nops):
        c_ops[i] = ops[i]
        c_a1[i] = a1[i]
        c_a2[i] = a2[i]
    return nops


def eval_masks(ops, a1, a2, s0, s1, val, int n):
    cdef int c_ops[MAX_OPS]
    cdef int c_a1[MAX_OPS]
    cdef int c_a2[MAX_OPS]
    cdef uint64_t cs0[MAX_W]
    cdef uint64_t cs1[MAX_W]
    cdef uint64_t cval[MAX_ATOMS]
    cdef uint64_t masks[MAX_OPS]
    cdef int i
    if n > MAX_W or len(val) > MAX_ATOMS:
        raise ValueError("model too large for the compiled kernel")
    cdef int nops = _load_program(ops, a1, a2, c_ops, c_a1, c_a2)
    for i in range(n):
        cs0[i] = s0[i]
        cs1[i] = s1[i]
    for i in range(len(val)):
        cval[i] = val[i]
    _eval(nops, c_ops, c_a1, c_a2, cs0, cs1, cval, n, ((<uint64_t>1) << n) - 1, masks)
    return [masks[i] for i in range(nops)]


def first_refutation(ops, a1, a2, int root, int n, orders, int n_orders, int n_atoms):
    cdef int c_ops[MAX_OPS]
    cdef int c_a1[MAX_OPS]
    cdef int c_a2[MAX_OPS]
    cdef uint64_t succ[MAX_W]
    cdef uint64_t s0[MAX_W]
    cdef uint64_t s1[MAX_W]
    cdef uint64_t val[MAX_ATOMS]
    cdef uint64_t masks[MAX_OPS]
    cdef uint64_t full = ((<uint64_t>1) << n) - 1
    cdef uint64_t m0, m1, vc, nv, missing
    cdef int oi, w, k
    if n > MAX_W or n * n_atoms > 60 or n_atoms > MAX_ATOMS:
        raise ValueError("model space too large for the compiled kernel")
    cdef int nops = _load_program(ops, a1, a2, c_ops, c_a1, c_a2)
    nv = (<uint64_t>1) << (n * n_atoms)
    for oi in range(n_orders):
        for w in range(n):
            succ[w] = orders[oi * n + w]
        with nogil:
            for m0 in range((<uint64_t>1) << n):
                for w in range(n):
                    s0[w] = succ[w] & m0
                for m1 in range((<uint64_t>1) << n):
                    for w in range(n):
                        s1[w] = succ[w] & m1
                    for vc in range(nv):
                        for k in range(n_atoms):
                            val[k] = (vc >> (k * n)) & full
                        _eval(nops, c_ops, c_a1, c_a2, s0, s1, val, n, full, masks)
                        missing = full & ~masks[root]
                        if missing:
                            with gil:
                                return oi, m0, m1, vc, _lowbit(missing)
    return None


cdef bint _falsifiable(int n_labels, const uint64_t* allowed, int nrel,
                       const int* rs, const int* rd, const uint64_t* succ,
                       const uint64_t* pred, uint64_t refl) noexcept nogil:
    cdef uint64_t cand[MAX_L]
    cdef int assign[MAX_L]
    cdef int j, r, w
    cdef uint64_t c
    if n_labels == 0:
        return True
    j = 0
    cand[0] = _cands(0, allowed, nrel, rs, rd, succ, pred, refl, assign)
    while j >= 0:
        c = cand[j]
        if c == 0:
            j -= 1
            continue
        w = _lowbit(c)
        cand[j] = c & (c - 1)
        assign[j] = w
        if j == n_labels - 1:
            return True
        j += 1
        cand[j] = _cands(j, allowed, nrel, rs, rd, succ, pred, refl, assign)
    return False


cdef inline uint64_t _cands(int j, const uint64_t* allowed, int nrel, const int* rs,
                            const int* rd, const uint64_t* succ, const uint64_t* pred,
                            uint64_t refl, const int* assign) noexcept nogil:
    cdef uint64_t c = allowed[j]
    cdef int r
    for r in range(nrel):
        if rd[r] == j and rs[r] < j:
            c &= succ[assign[rs[r]]]
        elif rs[r] == j and rd[r] < j:
            c &= pred[assign[rd[r]]]
        elif rs[r] == j and rd[r] == j:
            c &= refl
    return c


def sequent_table(ops, a1, a2, int n_labels, lf_label, lf_node, lf_side,
                  rel_src, rel_kind, rel_dst, int n, orders, int n_orders, int n_atoms):
    cdef int c_ops[MAX_OPS]
    cdef int c_a1[MAX_OPS]
    cdef int c_a2[MAX_OPS]
    cdef int lab[MAX_LF]
    cdef int node[MAX_LF]
    cdef int side[MAX_LF]
    cdef int rs[MAX_REL]
    cdef int rk[MAX_REL]
    cdef int rd[MAX_REL]
    cdef uint64_t succ[MAX_W]
    cdef uint64_t pred[MAX_W]
    cdef uint64_t s0[MAX_W]
    cdef uint64_t s1[MAX_W]
    cdef uint64_t val[MAX_ATOMS]
    cdef uint64_t masks[MAX_OPS]
    cdef uint64_t allowed[MAX_L]
    cdef uint64_t full = ((<uint64_t>1) << n) - 1
    cdef uint64_t m0, m1, vc, nv, refl
    cdef int oi, w, v, k, i, nlf, nrel
    cdef long long pos = 0
    if n > MAX_W or n * n_atoms > 60 or n_atoms > MAX_ATOMS:
        raise ValueError("model space too large for the compiled kernel")
    if n_labels > MAX_L or len(lf_label) > MAX_LF or len(rel_src) > MAX_REL:
        raise ValueError("sequent too large for the compiled kernel")
    cdef int nops = _load_program(ops, a1, a2, c_ops, c_a1, c_a2)
    nlf = len(lf_label)
    nrel = len(rel_src)
    for i in range(nlf):
        lab[i] = lf_label[i]
        node[i] = lf_node[i]
        side[i] = lf_side[i]
    for i in range(nrel):
        rs[i] = rel_src[i]
        rk[i] = rel_kind[i]
        rd[i] = rel_dst[i]
    nv = (<uint64_t>1) << (n * n_atoms)
    total = n_orders * ((<uint64_t>1) << (2 * n)) * nv
    out = bytearray(total)
    cdef unsigned char[:] view = out
    for oi in range(n_orders):
        for w in range(n):
            succ[w] = orders[oi * n + w]
        with nogil:
            refl = 0
            for w in range(n):
                pred[w] = 0
                if (succ[w] >> w) & 1:
                    refl |= (<uint64_t>1) << w
            for v in range(n):
                for w in range(n):
                    if (succ[v] >> w) & 1:
                        pred[w] |= (<uint64_t>1) << v
            for m0 in range((<uint64_t>1) << n):
                for w in range(n):
                    s0[w] = succ[w] & m0
                for m1 in range((<uint64_t>1) << n):
                    for w in range(n):
                        s1[w] = succ[w] & m1
                    for vc in range(nv):
                        for k in range(n_atoms):
                            val[k] = (vc >> (k * n)) & full
                        _eval(nops, c_ops, c_a1, c_a2, s0, s1, val, n, full, masks)
                        for i in range(n_labels):
                            allowed[i] = full
                        for i in range(nlf):
                            if side[i] == 0:
                                allowed[lab[i]] &= masks[node[i]]
                            else:
                                allowed[lab[i]] &= ~masks[node[i]]
                        for i in range(nrel):
                            allowed[rd[i]] &= m0 if rk[i] == 0 else m1
                        view[pos] = 0 if _falsifiable(n_labels, allowed, nrel, rs, rd, succ, pred, refl) else 1
                        pos += 1
    return out
