"""
Check reports and their JSON / CSV emission.

All floats are written with 17 significant digits and nothing time-dependent
is ever written, so identical inputs give byte-identical output.
"""

from __future__ import annotations

import json
import logging
import math
import sys
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from utils import format_float

logger = logging.getLogger(__name__)

CHECK_HEADERS = ['check', 'defect', 'tolerance', 'pass']


@dataclass(frozen=True)
class CheckReport:
    check: str
    defect: float
    tolerance: float
    witness: dict = field(default_factory=dict)

    @property
    def passed(self):
        return bool(math.isfinite(self.defect) and self.defect <= self.tolerance)

    def to_dict(self):
        return {
            'check': self.check,
            'defect': float(self.defect),
            'tolerance': float(self.tolerance),
            'pass': self.passed,
            'witness': self.witness,
        }

    def to_row(self):
        return {'check': self.check, 'defect': float(self.defect),
                'tolerance': float(self.tolerance), 'pass': self.passed}


def dumps(obj, indent=2, _level=0):
    """JSON text with %.17g floats; numpy scalars and arrays are accepted.

    json.dumps writes floats with repr (shortest round-trip form) and emits NaN/Infinity
    tokens, so it cannot give the fixed 17-digit, strict-JSON output used here.
    """
    pad = ' ' * (indent * (_level + 1))
    close = ' ' * (indent * _level)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, (bool, np.bool_)):
        return 'true' if obj else 'false'
    if obj is None:
        return 'null'
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_float(obj) if math.isfinite(obj) else 'null'
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return '{}'
        items = [f"{pad}{json.dumps(str(key))}: {dumps(value, indent, _level + 1)}" for key, value in obj.items()]
        return '{\n' + ',\n'.join(items) + '\n' + close + '}'
    if isinstance(obj, (list, tuple)):
        if not obj:
            return '[]'
        if all(isinstance(item, (int, float, np.integer, np.floating)) and not isinstance(item, bool) for item in obj):
            return '[' + ', '.join(dumps(item, indent, _level + 1) for item in obj) + ']'
        items = [pad + dumps(item, indent, _level + 1) for item in obj]
        return '[\n' + ',\n'.join(items) + '\n' + close + ']'
    raise TypeError(f"Cannot serialise {type(obj).__name__}")


class ReportWriter:
    """Collects rows or documents and writes them as JSON or CSV"""

    def __init__(self, headers=None):
        self.headers = list(headers or CHECK_HEADERS)
        self.rows = []
        self.document = {}
        self.frame = None

    def append_row(self, row):
        self.rows.append(dict(row))

    def append_check(self, report):
        self.append_row(report.to_row())
        self.document.setdefault('checks', []).append(report.to_dict())

    def set_frame(self, frame):
        """Use a prepared DataFrame as the CSV body instead of appended rows"""
        self.frame = frame
        self.headers = list(frame.columns)

    def to_frame(self):
        if self.frame is not None:
            return self.frame
        return pd.DataFrame(self.rows, columns=self.headers)

    def render(self, fmt):
        if fmt == 'csv':
            return self.to_frame().to_csv(index=False, float_format='%.17g', lineterminator='\n')
        if fmt == 'json':
            return dumps(self.document) + '\n'
        raise ValueError(f"Unknown output format '{fmt}'")

    def write(self, out=None, fmt='json'):
        text = self.render(fmt)
        if out in (None, '-'):
            sys.stdout.write(text)
            sys.stdout.flush()
        else:
            with open(out, 'w', newline='') as f:
                f.write(text)
            logger.info("Wrote %s report to %s", fmt, out)
        return text
