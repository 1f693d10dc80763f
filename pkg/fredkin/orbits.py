"""Orbits of the Fredkin-move group and the ground spaces they span.

The bulk Hamiltonian is a sum of (1 - g) / 2 over involutive basis
permutations g, so its kernel is spanned by the uniform superpositions of
the orbits of the group they generate.
"""

from collections import namedtuple

import numpy as np

from .combinatorics import ClassId, SpinWord, classify, fredkin_move_tables
from .config import InvalidArgument, resolve
from .model import (
    BoundarySpec,
    build_colored_hamiltonian,
    build_hamiltonian,
    magnetization,
)
from .solver import cluster_eigenvalues, estimate_norm, kernel_basis
from .states import basis_label, class_state, dyck_state


class MismatchDetected(Exception):
    pass


class UnionFind(object):
    def __init__(self, n):
        self.parent = list(range(n))
        self.rank = [0] * n

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x, y):
        x_root = self.find(x)
        y_root = self.find(y)
        if x_root == y_root:
            return
        if self.rank[x_root] < self.rank[y_root]:
            self.parent[x_root] = y_root
        elif self.rank[x_root] > self.rank[y_root]:
            self.parent[y_root] = x_root
        else:
            self.parent[y_root] = x_root
            self.rank[x_root] += 1

    def is_same(self, x, y):
        return self.find(x) == self.find(y)

    def roots(self):
        return [self.find(x) for x in range(len(self.parent))]


class OrbitPartition(namedtuple('OrbitPartition', [
        'n_sites', 'n_colors', 'periodic', 'orbit_id', 'representatives', 'sizes'])):
    """Orbit ids numbered by ascending representative (the minimal encoding)."""
    __slots__ = ()

    @property
    def n_states(self):
        return len(self.orbit_id)

    @property
    def orbit_count(self):
        return len(self.representatives)

    def members(self, orbit):
        return np.flatnonzero(self.orbit_id == orbit)


OrbitReport = namedtuple('OrbitReport', [
    'n_sites', 'n_colors', 'periodic', 'orbit_count', 'kernel_dim', 'max_residual',
    'deviations'])
PhaseRow = namedtuple('PhaseRow', [
    'signs', 'magnitude', 'degeneracy', 'ground_energy', 'expected_energy', 'states'])
PhaseDiagram = namedtuple('PhaseDiagram', ['n_sites', 'rows', 'deviations'])


def orbit_partition(n_sites, periodic=False, n_colors=1, config=None):
    """Connected components of the Fredkin-move graph on the full basis."""
    resolve(config).check_basis((2 * n_colors) ** n_sites, 'orbit basis')
    dim = (2 * n_colors) ** n_sites
    sets = UnionFind(dim)
    positions = np.arange(dim, dtype=np.int64)
    for table in fredkin_move_tables(n_sites, periodic, n_colors):
        for i in np.flatnonzero(table > positions):
            sets.union(int(i), int(table[i]))
    roots = np.array(sets.roots(), dtype=np.int64)
    _, first, inverse = np.unique(roots, return_index=True, return_inverse=True)
    # np.unique orders by root; renumber so orbit ids follow the smallest member
    order = np.argsort(first)
    renumber = np.empty_like(order)
    renumber[order] = np.arange(len(order))
    orbit_id = renumber[inverse]
    representatives = [int(i) for i in np.sort(first)]
    sizes = [int(s) for s in np.bincount(orbit_id)]
    return OrbitPartition(n_sites, n_colors, periodic, orbit_id, representatives, sizes)


def periodic_orbit_counts(n_sites, config=None):
    """{Z: number of periodic orbits with total magnetization Z}."""
    partition = orbit_partition(n_sites, periodic=True, config=config)
    z = magnetization(n_sites)
    counts = {}
    for rep in partition.representatives:
        counts[int(z[rep])] = counts.get(int(z[rep]), 0) + 1
    return counts


def claimed_periodic_degeneracy(n_sites):
    return n_sites + 1 if n_sites % 2 == 0 else n_sites


def _bulk_operator(n_sites, periodic, n_colors, config):
    boundary = BoundarySpec.periodic() if periodic else BoundarySpec.free()
    if n_colors == 1:
        return build_hamiltonian(n_sites, boundary, config=config)
    return build_colored_hamiltonian(n_sites, n_colors, boundary, include_exchange=False,
                                     config=config)


def verify_orbit_theorem(n_sites, periodic=False, n_colors=1, config=None):
    """Check dim ker H_bulk = number of orbits, and that orbit sums are zero modes."""
    config = resolve(config)
    partition = orbit_partition(n_sites, periodic, n_colors, config)
    h = _bulk_operator(n_sites, periodic, n_colors, config)
    kernel_dim = len(kernel_basis(h, config=config))
    residual = 0.0
    for orbit in range(partition.orbit_count):
        v = np.zeros(h.dim)
        members = partition.members(orbit)
        v[members] = 1.0 / np.sqrt(len(members))
        residual = max(residual, float(np.linalg.norm(h.dot(v))))
    if kernel_dim != partition.orbit_count:
        raise MismatchDetected('N=%d%s k=%d: %d orbits but kernel dimension %d' % (
            n_sites, ' periodic' if periodic else '', n_colors, partition.orbit_count,
            kernel_dim))
    if residual > 1e-10:
        raise MismatchDetected('orbit superposition has residual %.3g' % residual)
    deviations = []
    if periodic and n_colors == 1 and kernel_dim != claimed_periodic_degeneracy(n_sites):
        deviations.append('periodic ground degeneracy at N=%d is %d, not %d' % (
            n_sites, kernel_dim, claimed_periodic_degeneracy(n_sites)))
    return OrbitReport(n_sites, n_colors, periodic, partition.orbit_count, kernel_dim,
                       residual, deviations)


def class_label(c):
    return 'C_{%d,%d}' % (c[0], c[1])


def expected_ground_classes(n_sites, signs):
    """Classes whose states span the ground space in a boundary-sign quadrant."""
    if signs == (1, 1):
        return [ClassId(0, 0)]
    if signs == (1, -1):
        return [ClassId(0, n_sites)]
    if signs == (-1, 1):
        return [ClassId(n_sites, 0)]
    return [ClassId(a, n_sites - a) for a in range(1, n_sites)]


def _identified(ground, expected):
    if ground.shape[1] != expected.shape[1]:
        return False
    overlaps = np.linalg.svd(ground.T.dot(expected), compute_uv=False)
    return bool(np.all(np.abs(overlaps - 1.0) < 1e-8))


def phase_diagram(n_sites, config=None):
    """Ground degeneracy and ground states for each sign of (alpha, beta)."""
    config = resolve(config)
    if n_sites < 2 or n_sites % 2:
        raise InvalidArgument('the phase diagram needs an even number of sites, got %d' % n_sites)
    rows = []
    deviations = []
    for signs in ((1, 1), (1, -1), (-1, 1), (-1, -1)):
        classes = expected_ground_classes(n_sites, signs)
        if signs == (1, 1):
            states = [dyck_state(n_sites // 2, config)]
        else:
            states = [class_state(c, n_sites, config) for c in classes]
        expected = np.column_stack([s.amplitudes for s in states])
        degeneracies = set()
        for magnitude in config.phase_magnitudes:
            alpha, beta = signs[0] * magnitude, signs[1] * magnitude
            h = build_hamiltonian(n_sites, BoundarySpec.open(alpha, beta), config=config)
            values, vectors = np.linalg.eigh(h.toarray())
            tol = config.cluster_tol * max(estimate_norm(h, seed=config.seed), 1.0)
            ground_energy, degeneracy = cluster_eigenvalues(values, tol)[0]
            expected_energy = 0.5 * (1 - abs(alpha)) + 0.5 * (1 - abs(beta))
            if abs(ground_energy - expected_energy) > 1e-8:
                raise MismatchDetected('%s at |alpha|=%g: ground energy %.12g, expected %.12g'
                                       % (signs, magnitude, ground_energy, expected_energy))
            if not _identified(vectors[:, :degeneracy], expected):
                raise MismatchDetected('%s at |alpha|=%g: ground space is not spanned by %s'
                                       % (signs, magnitude, classes))
            degeneracies.add(degeneracy)
            rows.append(PhaseRow(signs, magnitude, degeneracy, ground_energy,
                                 expected_energy, [class_label(c) for c in classes]))
        if len(degeneracies) != 1:
            raise MismatchDetected('%s degeneracy depends on the magnitude: %s'
                                   % (signs, sorted(degeneracies)))
        if signs == (-1, -1) and degeneracies != {n_sites - 2}:
            deviations.append('(-,-) ground degeneracy at N=%d is %d, not N-2 = %d'
                              % (n_sites, degeneracies.pop(), n_sites - 2))
    return PhaseDiagram(n_sites, rows, deviations)


def dump_orbits(partition, stream):
    """`orbit_id<TAB>size<TAB>representative_word`, sorted by representative."""
    for orbit, (rep, size) in enumerate(zip(partition.representatives, partition.sizes)):
        stream.write('%d\t%d\t%s\n' % (
            orbit, size, basis_label(rep, partition.n_sites, partition.n_colors)))


def class_of_orbit(partition, orbit):
    """ClassId shared by an open uncolored orbit."""
    return classify(SpinWord(partition.n_sites, partition.representatives[orbit]))
