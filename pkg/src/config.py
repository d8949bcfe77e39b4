# SAT-competition exit codes
EXIT_SAT = 10
EXIT_UNSAT = 20
EXIT_ERROR = 1
EXIT_DISAGREEMENT = 2
EXIT_OK = 0

MODES = ("lp", "lp-decomposed", "lp-fixing", "apt", "brute")
LP_MODES = ("lp", "lp-decomposed", "lp-fixing")

QN_MAX_N = 3
BRUTE_FORCE_MAX_N = 24

BENCH_CSV_HEADER = ["n", "m", "seed", "mode", "verdict", "zstar", "pivots", "micros"]

BENCH_DEFAULTS = {
    "sizes": (4, 6, 8),
    "densities": (0.1, 0.3, 0.5),
    "trials": 10,
    "modes": ("lp", "apt"),
}
