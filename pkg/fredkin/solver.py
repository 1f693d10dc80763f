"""Dense and Lanczos eigensolvers, kernels and gaps."""

from collections import namedtuple
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from scipy.sparse.linalg import ArpackNoConvergence, LinearOperator, eigsh

from .config import InvalidArgument, resolve
from .model import BoundarySpec, ModelForm, build_hamiltonian


class ConvergenceFailure(Exception):
    pass


class StateVector(object):
    """Real amplitudes on the product basis of an n-site, k-color chain."""
    def __init__(self, amplitudes, n_sites=None, n_colors=1, label=''):
        self.amplitudes = np.asarray(amplitudes, dtype=float)
        self.n_sites = n_sites
        self.n_colors = n_colors
        self.label = label

    @property
    def dim(self):
        return len(self.amplitudes)

    @property
    def norm(self):
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self):
        return self.with_amplitudes(self.amplitudes / self.norm)

    def with_amplitudes(self, amplitudes):
        return StateVector(amplitudes, self.n_sites, self.n_colors, self.label)

    def overlap(self, other):
        return float(np.dot(self.amplitudes, getattr(other, 'amplitudes', other)))

    def support(self):
        """Basis indices with nonzero amplitude, ascending."""
        return np.flatnonzero(self.amplitudes)

    def __repr__(self):
        return '<StateVector %s dim=%d norm=%.12g>' % (self.label or '?', self.dim, self.norm)


SpectralResult = namedtuple('SpectralResult', ['eigenvalues', 'eigenvectors', 'residual_norms'])


def estimate_norm(op, iterations=60, seed=None):
    """Power-iteration estimate of the largest |eigenvalue|."""
    if op.dim == 0:
        return 0.0
    rng = np.random.default_rng(resolve(None).seed if seed is None else seed)
    v = rng.standard_normal(op.dim)
    v /= np.linalg.norm(v)
    estimate = 0.0
    for _ in range(iterations):
        w = op.dot(v)
        estimate = np.linalg.norm(w)
        if estimate == 0.0:
            return 0.0
        v = w / estimate
    return float(estimate)


def _residuals(op, values, vectors):
    return [float(np.linalg.norm(op.dot(vectors[:, i]) - values[i] * vectors[:, i]))
            for i in range(len(values))]


def _dense_eigh(op):
    return np.linalg.eigh(op.toarray())


def lowest_eigenpairs(op, count=1, tol=None, config=None, dense=None):
    """The `count` smallest eigenpairs; dense below the dense cap, Lanczos above."""
    config = resolve(config)
    tol = config.eigen_tol if tol is None else tol
    if count < 1:
        raise InvalidArgument('count must be at least 1, got %d' % count)
    count = min(count, op.dim)
    if dense is None:
        dense = op.dim <= config.dense_cap or count >= op.dim - 1
    if dense:
        values, vectors = _dense_eigh(op)
        values, vectors = values[:count], vectors[:, :count]
    else:
        rng = np.random.default_rng(config.seed)
        try:
            values, vectors = eigsh(
                op.as_linear_operator(), k=count, which='SA', tol=0,
                v0=rng.standard_normal(op.dim),
                ncv=min(op.dim, max(2 * count + 1, 24)))
        except ArpackNoConvergence as e:
            raise ConvergenceFailure(
                'Lanczos did not converge for %r: %d of %d pairs'
                % (op, len(e.eigenvalues), count))
        order = np.argsort(values)
        values, vectors = values[order], vectors[:, order]
    residuals = _residuals(op, values, vectors)
    limit = max(tol, 1e-8) * max(1.0, abs(values).max() if len(values) else 1.0)
    if any(r > limit for r in residuals):
        raise ConvergenceFailure('residual %.3g above %.3g for %r'
                                 % (max(residuals), limit, op))
    states = [StateVector(vectors[:, i], op.n_sites,
                          n_colors=op.local_dim // 2 if op.local_dim else 1)
              for i in range(vectors.shape[1])]
    return SpectralResult([float(x) for x in values], states, residuals)


def cluster_eigenvalues(values, tol):
    """Group ascending eigenvalues into (mean, multiplicity) clusters."""
    clusters = []
    group = []
    for value in sorted(values):
        if group and value - group[-1] > tol:
            clusters.append((float(np.mean(group)), len(group)))
            group = []
        group.append(value)
    if group:
        clusters.append((float(np.mean(group)), len(group)))
    return clusters


class _Deflated(object):
    """op + shift * Q Q^T, lifting the columns of Q out of the low spectrum."""
    def __init__(self, op, basis, shift):
        self.op = op
        self.basis = basis
        self.shift = shift
        self.dim = op.dim
        self.n_sites = op.n_sites
        self.local_dim = op.local_dim

    def dot(self, x):
        x = np.asarray(x, dtype=float)
        out = self.op.dot(x)
        if self.basis.shape[1]:
            out = out + self.shift * self.basis.dot(self.basis.T.dot(x))
        return out

    def as_linear_operator(self):
        return LinearOperator((self.dim, self.dim), matvec=self.dot, dtype=float)

    def __repr__(self):
        return '<deflated %r rank=%d>' % (self.op, self.basis.shape[1])


def _lowest_with_margin(op, config, tol):
    """The whole lowest eigenvalue cluster, plus what lies above it in the last block.

    Lanczos from one start vector can return fewer copies of a degenerate
    eigenvalue than there are, so cluster vectors are locked and shifted
    away, and the search repeats until no cluster value is left.
    """
    if op.dim <= config.dense_cap:
        return _dense_eigh(op)
    count = min(8, op.dim - 2)
    shift = 2.0 * estimate_norm(op, seed=config.seed) + 1.0
    found = np.zeros((op.dim, 0))
    found_values = []
    lowest = None
    while True:
        if found.shape[1] + count >= op.dim - 1:
            return _dense_eigh(op)
        result = lowest_eigenpairs(_Deflated(op, found, shift), count, config=config,
                                   dense=False)
        values = np.array(result.eigenvalues)
        vectors = np.column_stack([s.amplitudes for s in result.eigenvectors])
        if lowest is None:
            lowest = values[0]
        inside = values <= lowest + tol
        if not inside.any():
            return (np.concatenate([found_values, values]),
                    np.column_stack([found, vectors]))
        block = vectors[:, inside]
        block = block - found.dot(found.T.dot(block))
        block, _ = np.linalg.qr(block)
        found = np.column_stack([found, block])
        found_values.extend(values[inside])


def kernel_basis(op, tol=None, config=None):
    """Orthonormal basis of {v : ||Hv|| <= tol * ||H||} for a PSD operator."""
    config = resolve(config)
    tol = config.kernel_tol if tol is None else tol
    threshold = tol * max(estimate_norm(op, seed=config.seed), 1.0)
    values, vectors = _lowest_with_margin(op, config, threshold)
    n_colors = op.local_dim // 2 if op.local_dim else 1
    return [StateVector(vectors[:, i], op.n_sites, n_colors, label='kernel')
            for i in range(len(values)) if abs(values[i]) <= threshold]


def ground_degeneracy(op, tol=None, config=None):
    """(lowest eigenvalue, size of its cluster)."""
    config = resolve(config)
    tol = config.cluster_tol if tol is None else tol
    threshold = tol * max(estimate_norm(op, seed=config.seed), 1.0)
    values, _ = _lowest_with_margin(op, config, threshold)
    return cluster_eigenvalues(values, threshold)[0]


def _sector_values(n_sites, boundary, form, config):
    values = []
    for z in range(-n_sites, n_sites + 1, 2):
        block = build_hamiltonian(n_sites, boundary, form, z_sector=z, config=config)
        if block.dim <= config.dense_cap:
            values.extend(np.linalg.eigvalsh(block.toarray()))
        else:
            found, _ = _lowest_with_margin(block, config, config.cluster_tol)
            values.extend(found)
    return values


def spectral_gap(n_sites, boundary=None, form=ModelForm.PROJECTOR, config=None):
    """Distance from the lowest eigenvalue cluster to the next one.

    H conserves Z, so each magnetization block is diagonalized on its own.
    """
    config = resolve(config)
    if boundary is None:
        boundary = BoundarySpec.open()
    values = _sector_values(n_sites, boundary, form, config)
    clusters = cluster_eigenvalues(values, config.cluster_tol)
    if len(clusters) < 2:
        raise ConvergenceFailure('no eigenvalue above the ground cluster for N=%d' % n_sites)
    return clusters[1][0] - clusters[0][0]


def gap_sweep(sizes, boundary=None, form=ModelForm.PROJECTOR, threads=1, config=None):
    """[(N, gap)] in input order."""
    config = resolve(config)

    def gap(n_sites):
        return n_sites, spectral_gap(n_sites, boundary, form, config)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(gap, sizes))
    return [gap(n) for n in sizes]


def gap_exponent(sizes, gaps):
    """Least-squares slope of log(gap) against log(N)."""
    slope, _ = np.polyfit(np.log(np.asarray(sizes, dtype=float)),
                          np.log(np.asarray(gaps, dtype=float)), 1)
    return float(slope)
