from dataclasses import dataclass
from functools import cached_property

import pytest

from closedorbits import build_nilpotent, descend, eta_signature, is_closed, quotient_map
from closedorbits.oracle import STANDARD_KINDS, grid_seeds

ACCEPTANCE_GRID = (-1, 1, 2)
ACCEPTANCE_MAX_RANK = 3

_criteria: dict = {}


def record(number: int, passed: bool, detail: str = "") -> str:
    line = f"{'PASS' if passed else 'FAIL'} criterion {number:2d}: {detail}".rstrip()
    _criteria[number] = line
    print(line)
    return line


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        terminalreporter.write_line(_criteria[n])


@dataclass
class SeedRow:
    seed: object
    point: object

    @cached_property
    def report(self):
        return is_closed(self.point)

    @cached_property
    def invariants(self):
        return quotient_map(self.point)

    @cached_property
    def signature(self):
        if self.seed.kind == "gl":
            return (self.seed.k, self.seed.coeffs)
        return eta_signature(self.point)

    @cached_property
    def descent(self):
        return descend(self.seed)


class SeedTable:
    """Every canonical nilpotent seed over the acceptance grid, computed once."""

    def __init__(self, max_rank=ACCEPTANCE_MAX_RANK, grid=ACCEPTANCE_GRID):
        self.rows = {}
        for kind in STANDARD_KINDS:
            for n in range(1, max_rank + 1):
                self.rows[kind, n] = [SeedRow(s, build_nilpotent(s)) for s in grid_seeds(kind, n, grid)]

    def __iter__(self):
        for rows in self.rows.values():
            yield from rows

    def __len__(self):
        return sum(len(r) for r in self.rows.values())


@pytest.fixture(scope="session")
def seed_table():
    return SeedTable()
