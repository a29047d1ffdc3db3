"""Smoke test for the pybatchcolor extension.

Build and install first, e.g.

    pip install maturin
    maturin develop -m crates/python/Cargo.toml --release
"""

import pybatchcolor as bc


def proper(dc):
    colors = dc.colors()
    return all(colors[u] is not None and colors[u] != colors[v] for u, v in dc.edges())


def main():
    dc = bc.DynamicColoring(50, 4, seed=7, sequential=True, audit=True)
    assert (dc.n, dc.delta, dc.top_level) == (50, 4, 6)
    assert proper(dc)

    text = bc.generate_workload(50, 4, batches=30, batch_size=10, mix=0.7, seed=3)
    workload = bc.parse_workload(text)
    assert workload["n"] == 50 and len(workload["batches"]) == 30
    for batch in workload["batches"]:
        ops = [("+" if e["op"] == "Insert" else "-", e["u"], e["v"]) for e in batch]
        metrics = dc.apply_batch(ops)
        assert metrics["applied"] == len(ops)
        assert metrics["injected_sixths"] <= 6 * dc.top_level * len(ops)
        assert dc.verify() == []
    dc.check_invariants()

    for alg in ("parallel", "relaxed-seq", "folklore-2delta"):
        report = bc.run_workload(text, algorithm=alg, seed=2, every_batch=True, ledger_check=5)
        assert report["violations"] == 0, report
        assert report["verify_scans"] == 30

    assert bc.greedy_static(3, 2, [(0, 1), (1, 2)]) == [0, 1, 0]

    try:
        dc.apply_batch([("+", 0, 999)])
    except ValueError:
        pass
    else:
        raise AssertionError("out-of-range vertex accepted")

    print("pybatchcolor smoke test passed")


if __name__ == "__main__":
    main()
