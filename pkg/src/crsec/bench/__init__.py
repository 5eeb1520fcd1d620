"""Monte-Carlo experiment and invariant suites."""
