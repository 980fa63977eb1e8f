"""Instance generation, invariant audits and experiment runs."""
