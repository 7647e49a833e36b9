"""Shared test helpers."""

from chaosrates import StructureFunction


class LookupBracket(StructureFunction):
    """Structure function pinned to prescribed accumulated-variance values.

    Lets a test drive the pricers with exact bracket pairs (Q_t, Q_T, ...)
    without solving for a density that attains them.
    """

    family = "lookup"

    def __init__(self, table: dict):
        self.table = dict(table)

    def q_at(self, t: float) -> float:
        return self.table[t]

    def squared_density(self, t: float) -> float:
        return 0.0
