"""Matrix Market export/import and the sidecar basis index."""
import json
import logging
from pathlib import Path

import scipy.io
import scipy.sparse as sp

from cochains.reports import atomic_open

logger = logging.getLogger(__name__)


def export_matrix_market(op, destination):
    """
    Write ``op`` in coordinate format, entries sorted by column then row.

    Returns the path of the written file.
    """
    destination = Path(destination)
    entries = op.entries()
    rows = [row for row, _, _ in entries]
    cols = [col for _, col, _ in entries]
    values = [value for _, _, value in entries]
    ordered = sp.coo_matrix((values, (rows, cols)), shape=op.shape, dtype=op.matrix.dtype)
    field = 'complex' if op.is_complex else 'real'
    try:
        with atomic_open(destination, binary=True) as handle:
            scipy.io.mmwrite(handle, ordered, field=field, symmetry='general')
    except OSError as e:
        logger.error(f'Cannot write {destination}: {e}')
        raise
    logger.info(f'Exported {op} to {destination}')
    return destination


def read_matrix_market(path):
    return sp.csr_matrix(scipy.io.mmread(str(path)))


def index_path_for(destination):
    destination = Path(destination)
    return destination.with_name(f'{destination.stem}.index.json')


def export_index(op, destination):
    """Sidecar JSON mapping matrix rows and columns to (degree, dirs, k)."""
    payload = {
        'tag': op.tag,
        'shape': list(op.shape),
        'extents': list(op.cols.domain.extents),
        'boundary_mode': op.cols.domain.boundary,
        'rows': op.rows.to_records(),
        'columns': op.cols.to_records(),
    }
    with atomic_open(destination) as handle:
        json.dump(payload, handle)
        handle.write('\n')
    return Path(destination)
