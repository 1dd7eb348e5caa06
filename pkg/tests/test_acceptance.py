"""Acceptance gate: every release criterion at its stated tolerance.

Each criterion prints one PASS/FAIL line (visible with ``pytest -s`` or
on failure); the same checks back the ``oscpair accept`` CLI verb.
"""

import pytest

from oscpair.acceptance import CRITERIA


@pytest.mark.parametrize("criterion", CRITERIA, ids=[f"criterion_{c.number}" for c in CRITERIA])
def test_acceptance_criterion(criterion):
    ok, detail = criterion.run()
    print(f"{'PASS' if ok else 'FAIL'} criterion {criterion.number}: {criterion.title} [{detail}]")
    assert ok, f"criterion {criterion.number} ({criterion.title}): {detail}"
