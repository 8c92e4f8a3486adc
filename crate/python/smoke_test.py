"""Smoke test for the gtflow extension. Run with pytest or as a script."""

import json
from fractions import Fraction
from itertools import product

import gtflow


def brute_gt_points(lam):
    # count interlacing triangular arrays row by row
    rows = [tuple(lam)]
    total = 0

    def extend(row):
        nonlocal total
        if len(row) == 1:
            total += 1
            return
        ranges = [range(row[i + 1], row[i] + 1) for i in range(len(row) - 1)]
        for nxt in product(*ranges):
            extend(nxt)

    extend(rows[0])
    return total


def test_gt_methods_agree():
    for lam in ([1, 0], [2, 1, 0], [3, 1, 0], [3, 2, 0, 0], [4, 2, 1, 0]):
        want = brute_gt_points(lam)
        for m in ("enumerate", "weyl", "lidskii", "kostant"):
            assert gtflow.gt_points(lam, m) == want, (lam, m)
        vols = {gtflow.gt_volume(lam, m) for m in ("product", "tableaux", "lidskii")}
        assert len(vols) == 1
        assert isinstance(vols.pop(), Fraction)


def test_networks():
    nets, embs = gtflow.fixtures()
    assert len(nets) >= 20 and len(embs) >= 10
    for name, g in nets:
        vol, pts = gtflow.lidskii(g)
        assert pts == gtflow.kostant(g), name
        leaves, leaf_sum = gtflow.reduction_tree(g)
        assert leaf_sum == vol, name
        assert gtflow.to_dot(g).startswith("digraph")


def test_embeddings():
    _, embs = gtflow.fixtures()
    for name, e in embs:
        flow = gtflow.poset2flow(e)
        assert gtflow.kostant(flow) == len(gtflow.lattice_points(e)), name
    e = dict(embs)["gt-2-1-0"]
    for a, direct, kost, leaves in gtflow.extension_counts(e):
        assert direct == kost == leaves, a


def test_shifted_counts():
    # N(b) for n = 2 is 1 when b_1 >= 1
    assert gtflow.count_n(2, [1]) == 1
    assert gtflow.count_n(2, [0]) == 0


def test_verify_and_errors():
    ok, report = gtflow.verify("gt", "n=3,lmax=2")
    assert ok and json.loads(report)["checks"]
    for bad in (lambda: gtflow.gt_volume([1, 3]), lambda: gtflow.verify("nope")):
        try:
            bad()
        except ValueError:
            pass
        else:
            raise AssertionError("expected ValueError")


if __name__ == "__main__":
    for name, fn in sorted(globals().items()):
        if name.startswith("test_"):
            fn()
            print(f"{name}: ok")
