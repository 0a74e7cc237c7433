"""moirank - social influence metrics (LCRT, ROA, MOI) and PageRank Influence Rank."""

__version__ = "1.0.0"
