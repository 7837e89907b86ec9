"""Time the acceptance cases of divaudit and check each one passes.

Every case is a callable returning True on success; the harness repeats it,
records wall time and the peak traced allocation, and compares the mean time
with the case's budget.
"""

import argparse
import csv
import logging
import os
import statistics
import sys
import tracemalloc
from dataclasses import dataclass, field
from time import perf_counter
from typing import Callable, Dict, List

import numpy as np

import divaudit as da

DEFAULT_NUM_ITERATIONS = 3

logger = logging.getLogger(__name__)


@dataclass
class CaseResult:
    """Store timings for a single acceptance case."""

    name: str
    budget: float
    execution_times: List[float] = field(default_factory=list)
    peak_memory: List[float] = field(default_factory=list)
    passed: List[bool] = field(default_factory=list)

    @property
    def mean_time(self) -> float:
        return statistics.mean(self.execution_times)

    @property
    def std_time(self) -> float:
        return statistics.stdev(self.execution_times) if len(self.execution_times) > 1 else 0.0

    @property
    def ok(self) -> bool:
        return bool(self.passed) and all(self.passed) and self.mean_time < self.budget


# ------------------------------------------------------------------------------------------------
# Cases
# ------------------------------------------------------------------------------------------------
def _jsd_certificates() -> bool:
    return all(
        da.find_jsd_violation(alpha, n=n).verify()
        for alpha in (0.51, 0.6, 0.75, 1.0)
        for n in (2, 3, 5)
    )


def _metric_regime() -> bool:
    ts = np.geomspace(1e-6, 0.49, 10_000)
    for alpha in (0.3, 0.5):
        if np.max(da.F_multinomial_grid(alpha, ts)) > 1e-12:
            return False
    report = da.random_audit(da.get_measure("jsd"), 0.5, 100_000, seed=0)
    return report.violations == 0


def _jsd_limits() -> bool:
    return all(e.passed for e in da.jsd_fg_sweep())


def _cauchy_equivalence() -> bool:
    a = da.CauchyParams(0.0, 1.0)
    pairs = [(a, da.CauchyParams(0.5 * k, s)) for k, s in enumerate(np.geomspace(1.01, 40.0, 20))]
    for gen_id in ("js", "kl", "tv"):
        gen = da.get_generator(gen_id)
        for p, q in pairs:
            if abs(da.f_div_cauchy(gen, p, q) - da.f_div_cauchy_oracle(gen, p, q)) >= 1e-8:
                return False
    return True


def _cauchy_limits() -> bool:
    for gen_id in ("js", "kl"):
        gen = da.get_generator(gen_id)
        if not all(e.passed for e in da.cauchy_h_ratio_sweep(gen)):
            return False
        if not da.cauchy_h2_limit(gen).passed:
            return False
    return True


def _cauchy_certificates() -> bool:
    return all(
        da.find_cauchy_violation(da.get_generator(gen_id), alpha).verify()
        for gen_id in ("js", "kl")
        for alpha in (0.6, 0.75)
    )


def _tv_contrast() -> bool:
    if not all(e.passed for e in da.cauchy_tv_ratio_sweep()):
        return False
    tv = da.generator_tv()
    return max(da.F_cauchy(tv, 0.5, t) for t in np.geomspace(1e-6, 5.0, 48)) <= 1e-12


def _amplification() -> bool:
    certs = [da.find_jsd_violation(alpha) for alpha in (0.51, 0.6, 0.75, 1.0)]
    return all(da.amplify_certificate(c, beta).verify() for c in certs for beta in (1.5, 2.0, 4.0))


def _invariants() -> bool:
    rng = np.random.default_rng(0)
    for n in (2, 3, 5, 8):
        p = da.random_simplex(rng, n, 2_500)
        q = da.random_simplex(rng, n, 2_500)
        for a, b in zip(p, q):
            P, Q = da.make_multinomial(a), da.make_multinomial(b)
            js = float(da.jsd(P, Q, method="entropy"))
            if js < 0 or abs(js - float(da.jsd(P, Q, method="kl"))) > 1e-12:
                return False
            if 2 * js > float(da.tvd(P, Q)) + 1e-15:
                return False
    return True


CASES: Dict[str, tuple[Callable[[], bool], float]] = {
    "jsd_certificates": (_jsd_certificates, 5.0 * 12),
    "metric_regime": (_metric_regime, 30.0),
    "jsd_limits": (_jsd_limits, 1.0),
    "cauchy_equivalence": (_cauchy_equivalence, 10.0),
    "cauchy_limits": (_cauchy_limits, 5.0 * 2),
    "cauchy_certificates": (_cauchy_certificates, 10.0 * 4),
    "tv_contrast": (_tv_contrast, 10.0),
    "amplification": (_amplification, 5.0 * 4),
    "invariants": (_invariants, 30.0),
}


class AcceptanceBenchmark:
    """Run every acceptance case a few times and summarize."""

    def __init__(self, cases: List[str], num_iterations: int = DEFAULT_NUM_ITERATIONS):
        unknown = [c for c in cases if c not in CASES]
        if unknown:
            raise ValueError(f"unknown cases {unknown!r}; expected a subset of {sorted(CASES)}")
        self.cases = cases
        self.num_iterations = num_iterations
        self.results: Dict[str, CaseResult] = {}

    def _run_case(self, name: str) -> CaseResult:
        func, budget = CASES[name]
        result = CaseResult(name, budget)
        for i in range(self.num_iterations):
            logger.info("%s - Iteration %d/%d", name, i + 1, self.num_iterations)
            tracemalloc.start()
            start_time = perf_counter()
            try:
                passed = func()
            except da.DivergenceError as e:
                logger.error("%s iteration %d failed: %s", name, i + 1, e)
                passed = False
            end_time = perf_counter()
            _, peak = tracemalloc.get_traced_memory()
            tracemalloc.stop()

            result.execution_times.append(end_time - start_time)
            result.peak_memory.append(peak / 1024 / 1024)
            result.passed.append(passed)
        return result

    def run_benchmark(self) -> Dict[str, CaseResult]:
        logger.info("Starting benchmark with %d iterations", self.num_iterations)
        for name in self.cases:
            self.results[name] = self._run_case(name)
        return self.results

    def print_statistics(self):
        print("\n" + "=" * 80)
        print("ACCEPTANCE TIMINGS")
        print("=" * 80)
        for result in self.results.values():
            status = "ok" if result.ok else "FAIL"
            print(
                f"{result.name:<22} {result.mean_time:8.3f} ± {result.std_time:.3f} s "
                f"(budget {result.budget:.0f} s, peak {max(result.peak_memory):.1f} MB) {status}"
            )

    def export_results(self, csv_path: str = "acceptance_results.csv"):
        with open(csv_path, "w", newline="") as csvfile:
            fieldnames = ["case", "iteration", "execution_time", "peak_memory_mb", "passed"]
            writer = csv.DictWriter(csvfile, fieldnames=fieldnames)
            writer.writeheader()
            for result in self.results.values():
                for i, (t, mem, ok) in enumerate(zip(result.execution_times, result.peak_memory, result.passed)):
                    writer.writerow(
                        {"case": result.name, "iteration": i + 1, "execution_time": t, "peak_memory_mb": mem, "passed": ok}
                    )
        logger.info("Results exported to %r", csv_path)


def main():
    parser = argparse.ArgumentParser(description="Time the divaudit acceptance cases")
    parser.add_argument("--cases", type=str, default=",".join(CASES), help="Comma-separated subset of cases")
    parser.add_argument("--iterations", type=int, default=DEFAULT_NUM_ITERATIONS)
    parser.add_argument("--output_dir", type=str, default=".")
    parser.add_argument("--export_csv", action="store_true", help="Export results to CSV file")
    args = parser.parse_args()

    logging.basicConfig(level=logging.INFO, format="%(asctime)s - %(levelname)s - %(message)s")
    try:
        benchmark = AcceptanceBenchmark([c for c in args.cases.split(",") if c], args.iterations)
        results = benchmark.run_benchmark()
        benchmark.print_statistics()
        if args.export_csv:
            benchmark.export_results(os.path.join(args.output_dir, "acceptance_results.csv"))
    except ValueError as e:
        logging.error("Benchmark failed: %s", e)
        sys.exit(1)
    sys.exit(0 if all(r.ok for r in results.values()) else 1)


if __name__ == "__main__":
    main()
