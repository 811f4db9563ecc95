"""Pure-Python reference kernels.

Same contract as the compiled ``_ckernel`` module. Formulas arrive as a
flat program (see :mod:`csprove.kernels`); models are enumerated in a
fixed order: partial order, then M0, then M1, then valuation code.
"""

OP_BOT, OP_ATOM, OP_IMP, OP_BOX, OP_TRI = range(5)


def eval_masks(ops, a1, a2, s0, s1, val, n):
    full = (1 << n) - 1
    masks = [0] * len(ops)
    for i, op in enumerate(ops):
        if op == OP_BOT:
            m = 0
        elif op == OP_ATOM:
            m = val[a1[i]]
        elif op == OP_IMP:
            m = (~masks[a1[i]] | masks[a2[i]]) & full
        else:
            inner = masks[a1[i]]
            succ = s0 if op == OP_BOX else s1
            m = 0
            for w in range(n):
                if not succ[w] & ~inner:
                    m |= 1 << w
        masks[i] = m
    return masks


def _models(n, orders, n_orders, n_atoms):
    full = (1 << n) - 1
    for oi in range(n_orders):
        succ = orders[oi * n:(oi + 1) * n]
        for m0 in range(1 << n):
            s0 = [s & m0 for s in succ]
            for m1 in range(1 << n):
                s1 = [s & m1 for s in succ]
                for vc in range(1 << (n * n_atoms)):
                    val = [(vc >> (k * n)) & full for k in range(n_atoms)]
                    yield oi, succ, m0, m1, vc, s0, s1, val


def first_refutation(ops, a1, a2, root, n, orders, n_orders, n_atoms):
    """First model (in enumeration order) whose root mask is not full.

    Returns ``(order_index, m0, m1, valuation_code, world)`` or ``None``.
    """
    full = (1 << n) - 1
    for oi, _, m0, m1, vc, s0, s1, val in _models(n, orders, n_orders, n_atoms):
        masks = eval_masks(ops, a1, a2, s0, s1, val, n)
        missing = full & ~masks[root]
        if missing:
            return oi, m0, m1, vc, (missing & -missing).bit_length() - 1
    return None


def _falsifiable(n_labels, allowed, rels, succ, pred):
    if n_labels == 0:
        return True
    assign = [0] * n_labels

    def cands(j):
        c = allowed[j]
        for s, d in rels:
            if d == j and s < j:
                c &= succ[assign[s]]
            elif s == j and d < j:
                c &= pred[assign[d]]
            elif s == j and d == j:
                c &= sum(1 << w for w in range(len(succ)) if succ[w] >> w & 1)
        return c

    stack = [cands(0)]
    while stack:
        j = len(stack) - 1
        c = stack[j]
        if not c:
            stack.pop()
            continue
        w = (c & -c).bit_length() - 1
        stack[j] = c & (c - 1)
        assign[j] = w
        if j == n_labels - 1:
            return True
        stack.append(cands(j + 1))
    return False


def sequent_table(ops, a1, a2, n_labels, lf_label, lf_node, lf_side,
                  rel_src, rel_kind, rel_dst, n, orders, n_orders, n_atoms):
    """Truth of a sequent in every enumerated model, one byte per model.

    ``lf_side`` is 0 for left, 1 for right; ``rel_kind`` is 0 for R, 1 for S.
    """
    full = (1 << n) - 1
    rels = list(zip(rel_src, rel_dst))
    out = bytearray()
    for _, succ, m0, m1, vc, s0, s1, val in _models(n, orders, n_orders, n_atoms):
        masks = eval_masks(ops, a1, a2, s0, s1, val, n)
        allowed = [full] * n_labels
        for lab, node, side in zip(lf_label, lf_node, lf_side):
            allowed[lab] &= masks[node] if side == 0 else ~masks[node]
        for s, k, d in zip(rel_src, rel_kind, rel_dst):
            allowed[d] &= m0 if k == 0 else m1
        pred = [0] * n
        for v in range(n):
            for w in range(n):
                if succ[v] >> w & 1:
                    pred[w] |= 1 << v
        out.append(0 if _falsifiable(n_labels, allowed, rels, succ, pred) else 1)
    return out
