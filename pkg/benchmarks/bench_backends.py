"""Compare the numba kernels against the pure-numpy fallback.

    python benchmarks/bench_backends.py [--trials N] [--repeat R]

Both backends run the same counter-based streams, so the results printed
next to each timing should agree (exactly for the walk estimators).
"""
import argparse
import time

from busylt.analytic import QueueParams
from busylt.branching import OffspringDist, extinction_probability
from busylt.montecarlo import SimConfig, estimate_lt_mc, estimate_lt_time_domain, sample_busy_periods


def timed(fn, repeat):
    fn()  # warm-up (jit compile / cache load)
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - t0)
    return best, result


def cases(trials):
    stable, unstable = QueueParams(3, 4), QueueParams(4, 3)
    cfg = SimConfig(trials, seed=1)
    return [
        ("embedded walk (3,4) s=1",
         lambda b: estimate_lt_mc(stable, 1.0, cfg, backend=b).p_hat),
        ("time-domain race (4,3) s=1",
         lambda b: estimate_lt_time_domain(unstable, 1.0, cfg, backend=b).p_hat),
        ("busy periods (3,4)",
         lambda b: float(sample_busy_periods(stable, SimConfig(trials // 10, seed=1), backend=b)
                         .finished_durations.mean())),
        ("busy periods (4,3) cap 1e3",
         lambda b: float(sample_busy_periods(unstable, SimConfig(trials // 100, seed=1, max_events=1000),
                                             backend=b).finished.mean())),
        ("extinction fixed point, slope 0.999",
         lambda b: extinction_probability(OffspringDist((0.4995, 0.0, 0.5005)), 1e-15, backend=b).alpha),
    ]


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--trials", type=int, default=200_000)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    print(f"{'kernel':38s} {'numba [s]':>10s} {'numpy [s]':>10s} {'speedup':>8s}  result (numba / numpy)")
    for name, run in cases(args.trials):
        t_nb, r_nb = timed(lambda: run("numba"), args.repeat)
        t_np, r_np = timed(lambda: run("numpy"), args.repeat)
        print(f"{name:38s} {t_nb:10.4f} {t_np:10.4f} {t_np / t_nb:7.1f}x  {r_nb:.8g} / {r_np:.8g}")


if __name__ == "__main__":
    main()
