#!/usr/bin/env python3
"""Regenerate the bundled DIMACS max-flow instances in data/dimacs.

Every instance has symmetric capacities between non-terminal nodes so that the
thresholded ROF solution solves exactly the original cut problem. Capacities carry
three decimals to avoid ties in the thresholded solution.
"""

import argparse
import pathlib
import random


def cap(rng, lo, hi):
    return round(rng.uniform(lo, hi), 3)


def write(path, n_nodes, arcs, comment):
    lines = [f"c {comment}", f"p max {n_nodes} {len(arcs)}", "n 1 s", f"n {n_nodes} t"]
    lines += [f"a {u} {v} {c:g}" for u, v, c in arcs]
    path.write_text("\n".join(lines) + "\n")


def with_terminals(rng, n_inner, pairs, p_terminal, lo, hi):
    """Nodes 2..n_inner+1 are inner, 1 is the source and n_inner+2 the sink."""
    s, t = 1, n_inner + 2
    arcs = []
    for i in range(2, n_inner + 2):
        r = rng.random()
        if r < p_terminal:
            arcs.append((s, i, cap(rng, lo, hi)))
        elif r < 2 * p_terminal:
            arcs.append((i, t, cap(rng, lo, hi)))
    for a, b in pairs:
        c = cap(rng, 0.2, 2.0)
        arcs.append((a + 2, b + 2, c))
        arcs.append((b + 2, a + 2, c))
    return n_inner + 2, arcs


def grid_pairs(dims):
    n = 1
    for d in dims:
        n *= d
    pairs, stride = [], 1
    for d in dims:
        for v in range(n):
            if (v // stride) % d + 1 < d:
                pairs.append((v, v + stride))
        stride *= d
    return n, pairs


def random_pairs(rng, n, m):
    seen = set()
    for v in range(1, n):  # random recursive tree keeps it connected
        seen.add((rng.randrange(v), v))
    while len(seen) < m:
        a, b = sorted(rng.sample(range(n), 2))
        seen.add((a, b))
    return sorted(seen)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=str(pathlib.Path(__file__).resolve().parent.parent / "data" / "dimacs"))
    args = ap.parse_args()
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    (out / "toy.max").write_text(
        "c two inner nodes, max flow 2\np max 4 5\nn 1 s\nn 4 t\na 1 2 3\na 2 4 1\na 3 4 2\na 2 3 1\na 3 2 1\n")

    rng = random.Random(101)
    n, pairs = grid_pairs([12, 12])
    write(out / "grid12.max", *with_terminals(rng, n, pairs, 0.3, 0.5, 3.0), "12x12 grid, random terminals")

    rng = random.Random(202)
    n, pairs = grid_pairs([24, 20])
    write(out / "grid24x20.max", *with_terminals(rng, n, pairs, 0.2, 0.5, 4.0), "24x20 grid")

    rng = random.Random(303)
    n, pairs = grid_pairs([7, 7, 7])
    write(out / "cube7.max", *with_terminals(rng, n, pairs, 0.25, 1.0, 5.0), "7x7x7 grid")

    rng = random.Random(404)
    pairs = random_pairs(rng, 300, 900)
    write(out / "random300.max", *with_terminals(rng, 300, pairs, 0.15, 0.5, 6.0), "random graph, 300 nodes")

    rng = random.Random(505)
    pairs = random_pairs(rng, 120, 700)
    write(out / "dense120.max", *with_terminals(rng, 120, pairs, 0.3, 2.0, 10.0), "denser random graph")


if __name__ == "__main__":
    main()
