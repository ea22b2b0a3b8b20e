"""
This file contains the constants shared by the command-line commands.

Modifying an exit code or a file name here changes the contract every caller relies on.
"""

# Exit statuses of the command line
EXIT_OK = 0
"""The command succeeded."""

EXIT_INPUT = 1
"""Malformed input: a bad flag, configuration file, sample table or auction file."""

EXIT_PRECONDITION = 2
"""A precondition failed: too few samples, or an instance too large to evaluate exactly."""

EXIT_PROPERTY = 3
"""A checked property failed in `repro` or `verify`."""

# Names of the files written by `learn` and `round`
AUCTION_FILE = 'auction.json'
"""The learned or rounded auction, serialized."""

AUCTION_TEXT_FILE = 'auction.txt'
"""The plain text form of auctions that have one (simple sequences, reserve auctions)."""

REPORT_FILE = 'report.json'
"""The learning report."""

# Learning environments given by name instead of a JSON file
NAMED_ENVIRONMENTS = ('single-item', 'iid')
"""
Values of `--env` that select a pipeline directly:

- **single-item** → one item, one sample column per bidder.
- **iid** → one item, all columns pooled as samples of the common distribution.
"""

ROUND_METHODS = ('greedy', 'randomized', 'round-down')
"""Rounding methods of the `round` command."""

FIXTURES = ('triangle', 'tight', 'round-down-loss', 'iid-perprofile')
"""Fixtures the `repro` command can run."""

SEEDED_FIXTURES = ('round-down-loss', 'iid-perprofile')
"""Fixtures that draw random numbers and therefore need `--seed`."""

# Fixture sizes
MC_TRIALS = 100000
"""Default Monte Carlo profiles for `eval`."""

ROUND_DOWN_SAMPLES = 10 ** 6
"""Profiles drawn by the round-down-loss fixture."""

PERPROFILE_CHECKS = 10 ** 5
"""Random (auction, ε, profile) triples checked by the iid-perprofile fixture."""

VERIFY_BUDGET = 10 ** 6
"""Largest number of (profile, bidder, deviation) checks `verify` performs."""

TOLERANCE = 1e-9
"""Slack allowed when comparing utilities and payments in `verify` and `repro`."""

# Fixture parameters
FIXTURE_EPS = 0.1
"""ε of the fixtures when `--eps` is not given."""

TIGHT_ETA = 0.05
"""The loss η every coarse auction suffers in the tight fixture."""
