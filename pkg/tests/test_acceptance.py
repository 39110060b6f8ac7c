"""Acceptance criteria, one test per criterion with its tolerance and time limit.

Each criterion prints a single PASS/FAIL line (collected into the pytest
terminal summary; also printed when this file is run as a script).
"""

import time

import pytest

from ergolab import verify as vf

SEED = 0

# criterion -> (title, properties, time limit in seconds)
CRITERIA = {
    1: ("U^2 Fourier identity, N in {8, 64, 256}, 1e-10", ["u2_fourier_identity"], 10),
    2: ("three-path Gowers agreement, N <= 32, k <= 3, 1e-9", ["gowers_three_path_agreement"], 60),
    3: ("monotonicity and subadditivity, 200 cases each", ["gowers_monotonicity", "gowers_subadditivity"], 60),
    4: ("Gowers and cube-measure Cauchy-Schwarz, k <= 3, N <= 16",
        ["gowers_cauchy_schwarz", "mu_k_cauchy_schwarz"], 120),
    5: ("generalized von Neumann, l in {3, 4}, N in {8, 16, 32}", ["generalized_von_neumann"], 60),
    6: ("cube seminorm equals Gowers norm, N <= 16, k <= 3", ["cube_seminorm_equals_gowers"], 120),
    7: ("mu^[2] triple agreement, N <= 32, 1e-10", ["mu2_triple_agreement"], 60),
    8: ("cube symmetry and side invariance, exact, k <= 3, N <= 8",
        ["cube_symmetry_invariance", "side_transformation_invariance"], 30),
    9: ("linear/cubic bounds, cubic recurrence, van der Corput",
        ["semiprog_bound", "cubic_bound", "cubic_recurrence", "van_der_corput_finite"], 120),
    10: ("Heisenberg algebra and coset reduction, 1e-12",
         ["heisenberg_group_axioms", "heisenberg_two_step", "coset_canonicity"], 5),
    11: ("skew equidistribution |avg e(y)| <= 0.02 at N = 1e6", ["skew_equidistribution"], 30),
    12: ("Cauchy-tail decrease 2^14..2^20 in >= 90% of 20 starts", ["cesaro_tail_decrease"], 300),
}

REPORT: list[str] = []


def evaluate(number: int):
    title, names, limit = CRITERIA[number]
    t0 = time.perf_counter()
    results = vf.run_battery(seed=SEED, names=names)
    elapsed = time.perf_counter() - t0
    ok = all(r.passed for r in results) and len(results) == len(names) and elapsed < limit
    worst = min(r.worst_gap for r in results)
    line = (f"{'PASS' if ok else 'FAIL'} criterion {number:>2}: {title} "
            f"(worst gap {worst:.3e}, {elapsed:.1f}s / {limit}s)")
    return ok, line, results, elapsed


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number):
    ok, line, results, elapsed = evaluate(number)
    REPORT.append(line)
    print(line)
    for r in results:
        assert r.passed, f"{r.name}: worst gap {r.worst_gap:.3e}; instance {vf.failure_json(r)}"
    assert elapsed < CRITERIA[number][2], f"took {elapsed:.1f}s"


def test_full_battery_under_15_minutes():
    t0 = time.perf_counter()
    results = vf.run_battery(seed=SEED)
    elapsed = time.perf_counter() - t0
    ok = all(r.passed for r in results) and elapsed < 900
    line = f"{'PASS' if ok else 'FAIL'} full verify battery: {sum(r.passed for r in results)}/{len(results)} " \
           f"properties, {elapsed:.1f}s / 900s"
    REPORT.append(line)
    print(line)
    assert ok


if __name__ == "__main__":
    failures = 0
    for n in sorted(CRITERIA):
        ok, line, _, _ = evaluate(n)
        failures += not ok
        print(line, flush=True)
    raise SystemExit(1 if failures else 0)
