"""Smoke test for the qdistcomp_py extension module."""

import math

import qdistcomp_py as q


def close(a, b, tol=1e-9):
    return abs(a - b) <= tol


def main():
    s = q.State.from_spec("{family: ghz, labels: [A1, A2, R], dims: [2, 2, 2], reference: R}")
    assert s.labels == ["A1", "A2", "R"] and s.reference == "R"
    assert close(s.entropy(["A1"]), 1.0)
    assert close(s.multiparty_info([["A1"], ["A2"], ["R"]]), 3.0)

    r = q.Region(s)
    c = r.constants()
    assert close(c["A1"], 0.5) and close(c["A2"], 0.5) and close(c["A1+A2"], 1.5), c
    assert r.is_supermodular()
    corners = sorted(tuple(round(x, 9) for x in p) for p, _ in r.corner_set())
    assert corners == [(0.5, 1.0), (1.0, 0.5)], corners
    rates, value, order = r.greedy([1.0, 2.0])
    assert close(value, 2.0) and order == ["A1", "A2"]
    assert r.membership([0.4, 0.4]) == "outside"

    back = q.Region.from_h_representation(r.h_representation(), r.senders, "R")
    assert all(close(back.constants()[k], v, 1e-12) for k, v in c.items())

    assert q.classify(s, [0.4, 0.4]) == "not_achievable"

    bell = q.State.bell(["A", "B"], [2, 2], [("A", "B")])
    e = q.esq_upper_bound(bell, [["A"], ["B"]], d_e_max=2, restarts=2, iterations=50)
    assert close(e.value, 1.0, 1e-6) and e.extension == "trivial", e

    mixed = q.State.from_density(["A", "B"], [2, 2], [[0.25 if i == j else 0 for j in range(4)] for i in range(4)])
    assert close(bell.fidelity(mixed), 0.25, 1e-8)
    assert close(bell.trace_distance(mixed), 1.5)

    ar = q.State.bell(["A", "R"], [2, 2], [("A", "R")])
    curve = q.decoupling_curve(ar, "A", "R", [0.0, 1.0], trials=5, seed=1)
    assert close(curve[0].mean_dist, 0.75) and close(curve[1].mean_dist, 0.0)

    assert q.binary_entropy(0.5) == 1.0
    assert q.epsilon_prime(1 / 16, [2, 2]) == 14.0
    assert q.f1(0.0, 3, 2) == (0.0, False)
    assert q.f1(1.0 / (12 * math.e**2) * 1.5, 3, 2)[1]

    try:
        q.State.from_spec("{family: ghz, labels: [A, R], dims: [2, 0], reference: R}")
    except ValueError as err:
        assert "dimension must be ≥ 1" in str(err)
    else:
        raise AssertionError("zero dimension accepted")

    print("qdistcomp_py smoke test passed")


if __name__ == "__main__":
    main()
