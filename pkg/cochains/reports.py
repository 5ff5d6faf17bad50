"""
Check results, CSV reports and atomic file output.

Every CSV written by the toolkit starts with a single ``# generated_at``
line; everything after it is a pure function of the run configuration.
"""
from contextlib import contextmanager
from dataclasses import dataclass, field
import logging
import os
from pathlib import Path
import tempfile

import pandas as pd
from django.utils import timezone

logger = logging.getLogger(__name__)

STATUS_PASS = 'pass'
STATUS_FAIL = 'fail'
STATUS_DIAGNOSTIC = 'diagnostic'


@contextmanager
def atomic_open(path, binary=False):
    """Write to a temporary sibling file and rename it into place."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    handle = tempfile.NamedTemporaryFile(
        mode='wb' if binary else 'w',
        dir=path.parent,
        prefix=f'.{path.name}.',
        delete=False,
    )
    try:
        with handle:
            yield handle
        os.replace(handle.name, path)
    except BaseException:
        os.unlink(handle.name)
        raise


def write_csv(frame, path):
    with atomic_open(path) as handle:
        handle.write(f'# generated_at: {timezone.now().isoformat()}\n')
        frame.to_csv(handle, index=False, lineterminator='\n')
    logger.info(f'Wrote {len(frame)} rows to {path}')
    return path


def read_csv(path):
    return pd.read_csv(path, comment='#')


@dataclass
class CheckResult:
    name: str
    deviation: float
    bound: float
    passed: bool
    norm_before: float = 0.0
    norm_after: float = 0.0
    exact: bool = False
    diagnostic: bool = False
    note: str = ''
    counterexample: object = field(default=None, repr=False, compare=False)

    @property
    def status(self):
        if self.diagnostic:
            return STATUS_DIAGNOSTIC
        return STATUS_PASS if self.passed else STATUS_FAIL


class Report:
    """Ordered collection of checks sharing one tolerance setting."""

    columns = ['suite', 'check', 'norm_before', 'norm_after', 'deviation', 'bound', 'exact', 'status', 'note']

    def __init__(self, title, tolerance=None):
        self.title = title
        self.tolerance = tolerance
        self.checks = []
        self.suites = []

    def add(self, check, suite=None):
        self.checks.append(check)
        self.suites.append(suite or self.title)
        level = logging.DEBUG if check.passed or check.diagnostic else logging.WARNING
        logger.log(level, f'[{self.title}] {check.name}: deviation={check.deviation:.3e} bound={check.bound:.3e} {check.status}')
        return check

    def extend(self, other):
        for check, suite in zip(other.checks, other.suites):
            self.checks.append(check)
            self.suites.append(suite)
        return self

    def record(self, name, deviation, bound, exact=False, counterexample=None, note='',
               norm_before=0.0, norm_after=0.0, diagnostic=False):
        deviation = float(deviation)
        passed = deviation == 0 if exact else deviation <= bound
        return self.add(CheckResult(
            name=name,
            deviation=deviation,
            bound=float(bound),
            passed=passed,
            norm_before=float(norm_before),
            norm_after=float(norm_after),
            exact=exact,
            diagnostic=diagnostic,
            note=note,
            counterexample=None if passed else counterexample,
        ))

    @property
    def passed(self):
        return all(check.passed for check in self.checks if not check.diagnostic)

    @property
    def failures(self):
        return [check for check in self.checks if not check.passed and not check.diagnostic]

    def first_counterexample(self):
        for check in self.failures:
            if check.counterexample is not None:
                return check
        return None

    def to_frame(self):
        rows = []
        for check, suite in zip(self.checks, self.suites):
            rows.append({
                'suite': suite,
                'check': check.name,
                'norm_before': check.norm_before,
                'norm_after': check.norm_after,
                'deviation': check.deviation,
                'bound': check.bound,
                'exact': check.exact,
                'status': check.status,
                'note': check.note,
            })
        return pd.DataFrame(rows, columns=self.columns)

    def write_csv(self, path):
        return write_csv(self.to_frame(), path)

    def summary_lines(self):
        yield f'{self.title}: {len(self.checks)} checks, {len(self.failures)} failed'
        if self.tolerance is not None:
            yield f'tolerance used: {self.tolerance:g}'
        for check, suite in zip(self.checks, self.suites):
            mode = 'exact' if check.exact else f'<= {check.bound:.3e}'
            yield f'  [{check.status}] {suite}/{check.name}: {check.deviation:.3e} ({mode})'
