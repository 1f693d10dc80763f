"""Exact ground states, their MPS form and the single-peak magnon sector."""

import itertools
from collections import namedtuple
from math import comb, sqrt

import numpy as np
from scipy import sparse

from .combinatorics import (
    ClassId,
    ColoredSpinWord,
    EmptyClass,
    SpinWord,
    class_indices,
    class_size,
    classify_chunks,
    match_parens,
)
from .config import InvalidArgument, resolve
from .model import BoundarySpec, Operator, build_hamiltonian
from .solver import StateVector

# restricted Fredkin matrix = MAGNON_SCALE * xxx_one_magnon
MAGNON_SCALE = 0.5

MpsRep = namedtuple('MpsRep', ['bond_dim', 'a_up', 'a_down', 'boundary'])
MagnonSector = namedtuple('MagnonSector', ['n_sites', 'a', 'b', 'basis'])
TruncationReport = namedtuple(
    'TruncationReport',
    ['n_sites', 'bond_dim', 'max_amplitude_error', 'lost_weight', 'missed_words'])


def _uniform(indices, n_sites, n_colors=1, label=''):
    amplitudes = np.zeros((2 * n_colors) ** n_sites)
    amplitudes[indices] = 1.0 / sqrt(len(indices))
    return StateVector(amplitudes, n_sites, n_colors, label)


def dyck_state(n, config=None):
    """Uniform superposition of the Dyck words of length 2n."""
    config = resolve(config)
    config.check_basis(2 ** (2 * n), 'dyck state')
    return _uniform(class_indices(ClassId(0, 0), 2 * n, config), 2 * n, label='D_%d' % n)


def class_state(c, n_sites, config=None):
    config = resolve(config)
    if class_size(c, n_sites) == 0:
        raise EmptyClass('C_{%d,%d}(%d) is empty' % (c[0], c[1], n_sites))
    config.check_basis(2 ** n_sites, 'class state')
    return _uniform(class_indices(c, n_sites, config), n_sites,
                    label='C_{%d,%d}' % (c[0], c[1]))


def colored_dyck_state(n, n_colors, config=None):
    """Uniform superposition of Dyck words whose matched pairs share a color."""
    config = resolve(config)
    q = 2 * n_colors
    config.check_basis(q ** (2 * n), 'colored dyck state')
    indices = []
    for bits in class_indices(ClassId(0, 0), 2 * n, config):
        word = SpinWord(2 * n, int(bits))
        pairs = match_parens(word).pairs()
        directions = word.sites()
        for coloring in itertools.product(range(n_colors), repeat=n):
            colors = [0] * (2 * n)
            for (i, j), c in zip(pairs, coloring):
                colors[i - 1] = colors[j - 1] = c
            indices.append(ColoredSpinWord(directions, colors, n_colors).index)
    return _uniform(np.sort(np.array(indices, dtype=np.int64)), 2 * n, n_colors,
                    label='D^%d_%d' % (n_colors, n))


def anomalous_state(n, config=None):
    """Sum over Z = 0 words of (-1)^a(w), normalized by binom(2n, n).

    Equivalently the alternating sum of the unit-norm class states C_{m,m}
    weighted by sqrt(|C_{m,m}|).
    """
    config = resolve(config)
    n_sites = 2 * n
    config.check_enumeration(n_sites)
    config.check_basis(2 ** n_sites, 'anomalous state')
    amplitudes = np.zeros(2 ** n_sites)
    scale = 1.0 / sqrt(comb(n_sites, n))
    for indices, a, b in classify_chunks(n_sites):
        balanced = a == b
        amplitudes[indices[balanced]] = scale * (1 - 2 * (a[balanced] % 2))
    return StateVector(amplitudes, n_sites, label='D_an_%d' % n)


def mps_matrices(n_sites, bond_dim=None):
    """Truncated shift matrices; bond_dim defaults to the exact N/2 + 1."""
    if bond_dim is None:
        bond_dim = n_sites // 2 + 1
    if bond_dim < 1:
        raise InvalidArgument('bond dimension must be at least 1, got %d' % bond_dim)
    a_up = np.eye(bond_dim, k=1)
    boundary = np.zeros(bond_dim)
    boundary[0] = 1.0
    return MpsRep(bond_dim, a_up, a_up.T.copy(), boundary)


def mps_amplitude(rep, w):
    row = rep.boundary
    for d in w.sites():
        row = row.dot(rep.a_up if d else rep.a_down)
    return float(row.dot(rep.boundary))


def mps_state(rep, n_sites, config=None):
    """Contract the MPS on every basis word (unnormalized)."""
    config = resolve(config)
    config.check_basis(2 ** n_sites, 'mps state')
    indices = np.arange(2 ** n_sites, dtype=np.int64)
    rows = np.tile(rep.boundary, (len(indices), 1))
    for shift in range(n_sites - 1, -1, -1):
        up = ((indices >> shift) & 1).astype(bool)
        rows = np.where(up[:, None], rows.dot(rep.a_up), rows.dot(rep.a_down))
    return StateVector(rows.dot(rep.boundary), n_sites, label='mps(%d)' % rep.bond_dim)


def approximate_bond_dimension(n_sites, factor=2.0):
    """Bond dimension of order factor * sqrt(N), never above the exact N/2 + 1."""
    return min(n_sites // 2 + 1, int(np.ceil(factor * sqrt(n_sites))) + 1)


def mps_truncation_report(n_sites, bond_dim, config=None):
    """Errors of the truncated MPS against the exact Dyck state."""
    exact = dyck_state(n_sites // 2, config).amplitudes
    raw = mps_state(mps_matrices(n_sites, bond_dim), n_sites, config).amplitudes
    norm = np.linalg.norm(raw)
    approx = raw / norm if norm > 0 else raw
    missed = int(np.count_nonzero((exact != 0) & (raw == 0)))
    return TruncationReport(
        n_sites, bond_dim,
        float(np.abs(approx - exact).max()),
        float(1.0 - np.dot(approx, exact) ** 2),
        missed)


def magnon_sector(n_sites, a=None):
    """Single-peak states: "()" inserted at j = 1..N-1 into the dip )^a (^b."""
    if n_sites < 3:
        raise InvalidArgument('the magnon sector needs at least 3 sites, got %d' % n_sites)
    if a is None:
        a = (n_sites - 2) // 2
    b = n_sites - 2 - a
    if not 0 <= a <= n_sites - 2:
        raise InvalidArgument('dip depth %d outside 0..%d' % (a, n_sites - 2))
    dip = ')' * a + '(' * b
    basis = [SpinWord.parse(dip[:j] + '()' + dip[j:]) for j in range(n_sites - 1)]
    return MagnonSector(n_sites, a, b, basis)


def _bulk_columns(sector, config):
    h = build_hamiltonian(sector.n_sites, BoundarySpec.free(), config=config).tocsr()
    indices = np.array([w.bits for w in sector.basis])
    return h[:, indices], indices


def magnon_restricted_hamiltonian(n_sites, a=None, config=None):
    """Bulk Fredkin Hamiltonian projected onto the single-peak states."""
    sector = magnon_sector(n_sites, a)
    columns, indices = _bulk_columns(sector, resolve(config))
    return Operator(len(indices), columns[indices], label='magnon(%d)' % n_sites)


def magnon_closure_residual(n_sites, a=None, config=None):
    """Largest norm of H psi_j outside the span of the single-peak states."""
    sector = magnon_sector(n_sites, a)
    columns, indices = _bulk_columns(sector, resolve(config))
    outside = columns.toarray()
    outside[indices, :] = 0.0
    return float(np.linalg.norm(outside, axis=0).max())


def xxx_one_magnon(n_sites):
    """Open XXX chain, one magnon: coordination on the diagonal, -1 hopping."""
    if n_sites < 2:
        raise InvalidArgument('need at least 2 sites, got %d' % n_sites)
    diagonal = np.full(n_sites, 2.0)
    diagonal[0] = diagonal[-1] = 1.0
    hopping = -np.ones(n_sites - 1)
    matrix = sparse.diags([hopping, diagonal, hopping], [-1, 0, 1], format='csr')
    return Operator(n_sites, matrix, label='xxx1(%d)' % n_sites)


def basis_label(index, n_sites, n_colors=1):
    if n_colors == 1:
        return str(SpinWord(n_sites, int(index)))
    return str(ColoredSpinWord.from_index(int(index), n_sites, n_colors))


def dump_state(state, stream):
    """`word<TAB>amplitude` for nonzero amplitudes in encoding order."""
    for index in state.support():
        stream.write('%s\t%.17g\n' % (basis_label(index, state.n_sites, state.n_colors),
                                      state.amplitudes[index]))
