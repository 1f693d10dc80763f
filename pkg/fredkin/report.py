import io
import json

import numpy as np
import pandas as pd

from . import __version__


def _plain(value):
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_plain(v) for v in value.tolist()]
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    return value


def _csv_cell(value):
    """Integers past int64 (Schmidt ranks of colored chains) are written as digits."""
    if isinstance(value, int) and not isinstance(value, bool) and abs(value) >= 1 << 63:
        return str(value)
    return value


class Report(object):
    """The result of one CLI command.

    Reports render as JSON with a provenance object, or as CSV with the
    provenance as leading '# ' comment lines. Neither carries a timestamp,
    so identical runs give identical bytes.
    """
    def __init__(self, command, config, data, table=None, columns=None):
        self.command = command
        self.config = config
        self._data = data
        self.table = table
        self.columns = columns
        self.deviations = list(data.get('deviations', []))

    @property
    def provenance(self):
        return {
            'version': __version__,
            'command': self.command,
            'config': self.config.as_dict(),
        }

    def to_json(self):
        document = dict(self._data)
        document['provenance'] = self.provenance
        return json.dumps(_plain(document), sort_keys=True, indent=2) + '\n'

    def to_csv(self):
        out = io.StringIO()
        provenance = self.provenance
        out.write('# version: %s\n' % provenance['version'])
        out.write('# command: %s\n' % json.dumps(_plain(provenance['command']), sort_keys=True))
        out.write('# config: %s\n' % json.dumps(_plain(provenance['config']), sort_keys=True))
        rows = self.table if self.table is not None else [self._flat()]
        rows = [{k: _csv_cell(v) for k, v in row.items()} for row in _plain(rows)]
        frame = pd.DataFrame(rows, columns=self.columns)
        frame.to_csv(out, index=False, float_format='%.12g', na_rep='', lineterminator='\n')
        return out.getvalue()

    def _flat(self):
        row = {}
        for key, value in sorted(self._data.items()):
            if key == 'deviations':
                continue
            if isinstance(value, (list, tuple, np.ndarray, dict)):
                value = json.dumps(_plain(value), sort_keys=True)
            row[key] = value
        return row

    def render(self, fmt):
        if fmt == 'json':
            return self.to_json()
        if fmt == 'csv':
            return self.to_csv()
        raise ValueError('unknown format %r' % fmt)
