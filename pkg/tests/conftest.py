import copy
import random

from hypothesis import strategies as st

from csprove.formula import BOT, Atom, Box, Imp, Tri

ACCEPTANCE_LINES = []


def formulas(atoms=("p", "q"), max_leaves=12):
    leaves = st.sampled_from([BOT] + [Atom(a) for a in atoms])
    return st.recursive(
        leaves,
        lambda sub: st.one_of(
            st.builds(Imp, sub, sub),
            st.builds(Box, sub),
            st.builds(Tri, sub),
        ),
        max_leaves=max_leaves,
    )


def random_formula(rng: random.Random, depth: int, atoms=("p", "q")):
    if depth == 0 or rng.random() < 0.25:
        return rng.choice([BOT] + [Atom(a) for a in atoms])
    r = rng.random()
    if r < 0.4:
        return Imp(random_formula(rng, depth - 1, atoms), random_formula(rng, depth - 1, atoms))
    if r < 0.7:
        return Box(random_formula(rng, depth - 1, atoms))
    return Tri(random_formula(rng, depth - 1, atoms))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def graph_mutations(obj):
    """Single-point mutations of a proof graph in JSON object form.

    Each mutation edits one node sequent and keeps the parent's stored copy
    of that premise in step, so only rule logic can catch it.
    """
    parent = {}
    for node in obj["nodes"]:
        for k, c in enumerate(node["children"]):
            parent[c] = (node["id"], k)
    index = {node["id"]: pos for pos, node in enumerate(obj["nodes"])}

    def edit(nid, change):
        new = copy.deepcopy(obj)
        node = new["nodes"][index[nid]]
        change(node["sequent"])
        if nid in parent:
            pid, k = parent[nid]
            change(new["nodes"][index[pid]]["rule"]["premises"][k])
        return new

    for node in obj["nodes"]:
        nid = node["id"]
        for side in ("left", "right"):
            for j, (label, text) in enumerate(node["sequent"][side]):
                def wrap(seq, side=side, j=j, label=label, text=text):
                    seq[side][j] = [label, f"[d]({text})"]
                yield f"node {nid} {side} formula {label}:{text}", edit(nid, wrap)

                def move(seq, side=side, j=j, label=label, text=text):
                    other = "x0" if label != "x0" else "x99"
                    seq[side][j] = [other, text]
                yield f"node {nid} {side} formula {label}:{text} relabelled", edit(nid, move)
        for j, (a, kind, b) in enumerate(node["sequent"]["rels"]):
            def flip(seq, j=j, a=a, kind=kind, b=b):
                seq["rels"][j] = [a, "S" if kind == "R" else "R", b]

            def reverse(seq, j=j, a=a, kind=kind, b=b):
                seq["rels"][j] = [b, kind, a]

            def drop(seq, j=j):
                del seq["rels"][j]
            yield f"node {nid} atom {a}{kind}{b} flipped", edit(nid, flip)
            yield f"node {nid} atom {a}{kind}{b} reversed", edit(nid, reverse)
            yield f"node {nid} atom {a}{kind}{b} dropped", edit(nid, drop)
    for j, e in enumerate(obj["back_edges"]):
        a, x = e["pivot"]
        for pivot in ([a, a], [x, x], [x, a], [a, "x99"], ["x99", x]):
            new = copy.deepcopy(obj)
            new["back_edges"][j]["pivot"] = pivot
            yield f"back-edge {e['from']} pivot {pivot}", new
