"""Length-constrained metrics, separators, divisions, the guess DP and exact solvers."""
