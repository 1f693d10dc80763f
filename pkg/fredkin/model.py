"""Fredkin chain Hamiltonians on the computational basis.

Every Hamiltonian is a sum of local terms: a small matrix acting on a tuple
of sites. Local matrices use the per-site basis (down, up) = (0, 1), or for
the colored chain the 2k local states direction * k + color, matching the
encoding in `combinatorics`. Terms are embedded into the full basis by digit
arithmetic on the encodings.
"""

import enum
from collections import namedtuple

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import LinearOperator

from .combinatorics import DOWN, UP, _window_images, site_digit, windows
from .config import InvalidArgument, resolve


class SiteOutOfRange(Exception):
    pass


class FormsInequivalent(Exception):
    pass


class DimensionMismatch(Exception):
    pass


class ModelForm(enum.Enum):
    PROJECTOR = 'projector'
    PAULI = 'pauli'
    FREDKIN_GATE = 'fredkin'


_SQRT2 = np.sqrt(2.0)
_EYE = np.eye(2)
_SIGMA_X = np.array([[0., 1.], [1., 0.]])
_SIGMA_Y = np.array([[0., -1j], [1j, 0.]])
_SIGMA_Z = np.diag([-1., 1.])
_P_UP = np.diag([0., 1.])
_P_DOWN = np.diag([1., 0.])
# (|up down> - |down up>) / sqrt(2); two-site index is 2 * d1 + d2
_SINGLET = np.array([0., -1., 1., 0.]) / _SQRT2
_P_SINGLET = np.outer(_SINGLET, _SINGLET)


class BoundarySpec(namedtuple('BoundarySpec', ['kind', 'alpha', 'beta'])):
    """open(alpha, beta), periodic, or free (open bulk with no edge terms)."""
    __slots__ = ()

    @classmethod
    def open(cls, alpha=1.0, beta=1.0):
        alpha, beta = float(alpha), float(beta)
        if not (np.isfinite(alpha) and np.isfinite(beta)):
            raise InvalidArgument('boundary couplings must be finite')
        return cls('open', alpha, beta)

    @classmethod
    def periodic(cls):
        return cls('periodic', 0.0, 0.0)

    @classmethod
    def free(cls):
        return cls('free', 0.0, 0.0)

    @classmethod
    def parse(cls, text):
        """'open', 'open:ALPHA,BETA', 'periodic' or 'free'."""
        kind, _, couplings = text.partition(':')
        if kind == 'open':
            if not couplings:
                return cls.open()
            try:
                alpha, beta = (float(x) for x in couplings.split(','))
            except ValueError:
                raise InvalidArgument('expected open:ALPHA,BETA, got %r' % text)
            return cls.open(alpha, beta)
        if couplings:
            raise InvalidArgument('%s boundary takes no couplings' % kind)
        if kind == 'periodic':
            return cls.periodic()
        if kind == 'free':
            return cls.free()
        raise InvalidArgument('unknown boundary %r' % text)

    @property
    def is_periodic(self):
        return self.kind == 'periodic'

    def __str__(self):
        if self.kind == 'open':
            return 'open:%g,%g' % (self.alpha, self.beta)
        return self.kind


Term = namedtuple('Term', ['sites', 'matrix'])


class Operator(object):
    """A real linear operator on the basis, stored sparse or matrix-free.

    A matrix-free operator keeps its local terms and applies them with digit
    arithmetic at every product; `tocsr` materializes it on request.
    """
    def __init__(self, dim, matrix=None, terms=None, n_sites=None, local_dim=2,
                 symmetric=True, label=''):
        if matrix is None and terms is None:
            raise ValueError('an operator needs a matrix or local terms')
        self.dim = dim
        self.symmetric = symmetric
        self.label = label
        self._matrix = matrix.tocsr() if matrix is not None else None
        self._terms = terms
        self.n_sites = n_sites
        self.local_dim = local_dim
        self._compiled = None

    @property
    def matrix_free(self):
        return self._matrix is None

    def tocsr(self):
        if self._matrix is None:
            return _embed_terms(self._terms, self.n_sites, self.local_dim)
        return self._matrix

    def toarray(self):
        return self.tocsr().toarray()

    def dot(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape[0] != self.dim:
            raise DimensionMismatch(
                'operator of dimension %d applied to vector of length %d'
                % (self.dim, x.shape[0]))
        if self._matrix is not None:
            return self._matrix.dot(x)
        if x.ndim == 2:
            return np.column_stack([self._matvec(x[:, i]) for i in range(x.shape[1])])
        return self._matvec(x)

    def _matvec(self, x):
        if self._compiled is None:
            self._compiled = _compile_terms(self._terms, self.n_sites, self.local_dim)
        out = np.zeros(self.dim)
        for local, entries in self._compiled:
            for col, rows in entries:
                mask = local == col
                source = x[mask]
                targets = np.flatnonzero(mask)
                for value, delta in rows:
                    out[targets + delta] += value * source
        return out

    def as_linear_operator(self):
        return LinearOperator((self.dim, self.dim), matvec=self.dot, dtype=float)

    def triplets(self):
        """(row, col, value) arrays, row-major sorted, explicit zeros dropped."""
        csr = self.tocsr().copy()
        csr.eliminate_zeros()
        csr.sort_indices()
        coo = csr.tocoo()
        return coo.row, coo.col, coo.data

    def __add__(self, other):
        return Operator(self.dim, self.tocsr() + other.tocsr(),
                        symmetric=self.symmetric and other.symmetric)

    def __mul__(self, scalar):
        return Operator(self.dim, self.tocsr() * scalar, symmetric=self.symmetric,
                        label=self.label)

    __rmul__ = __mul__

    def __repr__(self):
        return '<Operator %s dim=%d%s>' % (
            self.label or '?', self.dim, ' matrix-free' if self.matrix_free else '')


def _local_index(indices, sites, n_sites, q):
    local = np.zeros(len(indices), dtype=np.int64)
    for site in sites:
        local = local * q + site_digit(indices, site, n_sites, q)
    return local


def _entries(term, n_sites, q):
    """Nonzeros of a term grouped by local column: [(col, [(value, delta)])]."""
    r = len(term.sites)
    grouped = {}
    rows, cols = np.nonzero(term.matrix)
    for row, col in zip(rows, cols):
        delta = 0
        for t, site in enumerate(term.sites):
            weight = q ** (r - 1 - t)
            new = (row // weight) % q
            old = (col // weight) % q
            delta += (new - old) * q ** (n_sites - 1 - site)
        grouped.setdefault(int(col), []).append((float(term.matrix[row, col]), int(delta)))
    return sorted(grouped.items())


def _compile_terms(terms, n_sites, q, basis=None):
    if basis is None:
        basis = np.arange(q ** n_sites, dtype=np.int64)
    return [(_local_index(basis, term.sites, n_sites, q), _entries(term, n_sites, q))
            for term in terms]


def _embed_terms(terms, n_sites, q, basis=None):
    """Sparse matrix of a term sum, optionally on a sorted invariant subset of the basis."""
    if basis is None:
        basis = np.arange(q ** n_sites, dtype=np.int64)
    dim = len(basis)
    positions = np.arange(dim, dtype=np.int64)
    rows, cols, values = [], [], []
    for local, entries in _compile_terms(terms, n_sites, q, basis):
        for col, entry_rows in entries:
            mask = local == col
            source = positions[mask]
            for value, delta in entry_rows:
                rows.append(np.searchsorted(basis, basis[mask] + delta))
                cols.append(source)
                values.append(np.full(len(source), value))
    if not rows:
        return sparse.csr_matrix((dim, dim))
    matrix = sparse.coo_matrix(
        (np.concatenate(values), (np.concatenate(rows), np.concatenate(cols))),
        shape=(dim, dim))
    matrix = matrix.tocsr()
    matrix.sum_duplicates()
    return matrix


def _controlled_swap(control, first, second):
    """8x8 permutation: swap sites `first`, `second` when `control` is up."""
    gate = np.zeros((8, 8))
    for state in range(8):
        digits = [(state >> (2 - t)) & 1 for t in range(3)]
        if digits[control] == UP:
            digits[first], digits[second] = digits[second], digits[first]
        gate[digits[0] * 4 + digits[1] * 2 + digits[2], state] = 1.0
    return gate


def local_bulk_matrix(form):
    """The 8x8 three-site bulk interaction in the requested form."""
    if form is ModelForm.PROJECTOR:
        return np.kron(_P_UP, _P_SINGLET) + np.kron(_P_SINGLET, _P_DOWN)
    if form is ModelForm.PAULI:
        dots = np.real(np.kron(_SIGMA_X, _SIGMA_X) + np.kron(_SIGMA_Y, _SIGMA_Y)
                       + np.kron(_SIGMA_Z, _SIGMA_Z))
        exchange = np.eye(4) - dots
        return np.kron(_EYE + _SIGMA_Z, exchange) + np.kron(exchange, _EYE - _SIGMA_Z)
    if form is ModelForm.FREDKIN_GATE:
        flip = np.kron(np.eye(4), _SIGMA_X)
        forward = _controlled_swap(0, 1, 2)
        backward = flip.dot(_controlled_swap(2, 0, 1)).dot(flip)
        return (np.eye(8) - forward) + (np.eye(8) - backward)
    raise ValueError('unknown form %r' % (form,))


def _boundary_terms(n_sites, boundary, n_colors=1):
    sigma_z = np.kron(_SIGMA_Z, np.eye(n_colors))
    eye = np.eye(2 * n_colors)
    return [
        Term((0,), 0.5 * (eye - boundary.alpha * sigma_z)),
        Term((n_sites - 1,), 0.5 * (eye + boundary.beta * sigma_z)),
    ]


def _check_size(n_sites, boundary):
    if boundary.is_periodic and n_sites < 3:
        raise SiteOutOfRange('a periodic chain needs at least 3 sites, got %d' % n_sites)
    if boundary.kind == 'open' and n_sites < 2:
        raise SiteOutOfRange('an open chain needs at least 2 sites, got %d' % n_sites)
    if n_sites < 1:
        raise SiteOutOfRange('a chain needs at least 1 site, got %d' % n_sites)


def hamiltonian_terms(n_sites, boundary=None, form=ModelForm.PROJECTOR):
    """Local terms of H = H_bulk + H_boundary; periodic chains have no edge terms."""
    if boundary is None:
        boundary = BoundarySpec.open()
    _check_size(n_sites, boundary)
    bulk = local_bulk_matrix(form)
    terms = [Term(window, bulk) for window in windows(n_sites, boundary.is_periodic)]
    if boundary.kind == 'open':
        terms.extend(_boundary_terms(n_sites, boundary))
    return terms


def build_bulk_term(j, n_sites, form=ModelForm.PROJECTOR, periodic=False, config=None):
    """The bulk term on sites j, j+1, j+2 (1-based, wrapping when periodic)."""
    last = n_sites if periodic else n_sites - 2
    if not 1 <= j <= last or (periodic and n_sites < 3):
        raise SiteOutOfRange('window %d outside 1..%d for %d sites' % (j, last, n_sites))
    resolve(config).check_basis(2 ** n_sites, 'bulk term')
    sites = tuple((j - 1 + t) % n_sites for t in range(3))
    term = Term(sites, local_bulk_matrix(form))
    return Operator(2 ** n_sites, _embed_terms([term], n_sites, 2), n_sites=n_sites,
                    label='bulk[%d]' % j)


def build_hamiltonian(n_sites, boundary=None, form=ModelForm.PROJECTOR,
                      matrix_free=False, z_sector=None, config=None):
    if boundary is None:
        boundary = BoundarySpec.open()
    terms = hamiltonian_terms(n_sites, boundary, form)
    dim = 2 ** n_sites
    resolve(config).check_basis(dim, 'hamiltonian')
    label = 'H(%d,%s,%s)' % (n_sites, boundary, form.value)
    if z_sector is not None:
        basis = sector_indices(n_sites, z_sector)
        return Operator(len(basis), _embed_terms(terms, n_sites, 2, basis),
                        label='%s|Z=%d' % (label, z_sector))
    if matrix_free:
        return Operator(dim, terms=terms, n_sites=n_sites, label=label)
    return Operator(dim, _embed_terms(terms, n_sites, 2), n_sites=n_sites, label=label)


def term_operators(n_sites, boundary=None, form=ModelForm.PROJECTOR, config=None):
    """Each local term of the Hamiltonian embedded on its own."""
    terms = hamiltonian_terms(n_sites, boundary, form)
    resolve(config).check_basis(2 ** n_sites, 'hamiltonian')
    return [Operator(2 ** n_sites, _embed_terms([term], n_sites, 2), n_sites=n_sites,
                     label='term%s' % (tuple(s + 1 for s in term.sites),))
            for term in terms]


FormRatios = namedtuple('FormRatios', ['projector', 'pauli', 'fredkin'])


def _ratio(matrix, reference, tol):
    scale = np.abs(matrix).max() / np.abs(reference).max()
    if not np.abs(matrix - scale * reference).max() <= tol:
        return None
    return scale


def check_form_equivalence(n_sites=3, tol=1e-12, config=None):
    """Scalars lambda with H_form = lambda * H_projector on every bulk term."""
    config = resolve(config)
    if n_sites < 3:
        raise SiteOutOfRange('need at least 3 sites for a bulk term, got %d' % n_sites)
    if 2 ** n_sites > config.dense_cap:
        raise SiteOutOfRange('%d sites exceed the dense cap' % n_sites)
    ratios = {}
    for form in ModelForm:
        found = set()
        for j in range(1, n_sites - 1):
            reference = build_bulk_term(j, n_sites, ModelForm.PROJECTOR, config=config)
            term = build_bulk_term(j, n_sites, form, config=config)
            scale = _ratio(term.toarray(), reference.toarray(), tol)
            if scale is None:
                raise FormsInequivalent(
                    '%s form is not a multiple of the projector form on window %d'
                    % (form.value, j))
            found.add(round(scale, 9))
        if len(found) != 1:
            raise FormsInequivalent('%s form scale varies across windows: %s'
                                    % (form.value, sorted(found)))
        ratios[form.value] = found.pop()
    return FormRatios(ratios['projector'], ratios['pauli'], ratios['fredkin'])


def colored_bulk_matrix(n_colors):
    """Sum over colors of the rank-1 projectors onto |w> - |move(w)>, halved."""
    q = 2 * n_colors
    matrix = np.zeros((q ** 3, q ** 3))
    for state in range(q ** 3):
        window = []
        for t in range(3):
            value = (state // q ** (2 - t)) % q
            window.append((value // n_colors, value % n_colors))
        dirs = tuple(d for d, _ in window)
        if dirs not in ((UP, UP, DOWN), (DOWN, UP, DOWN)):
            continue
        for image in _window_images(tuple(window)):
            target = 0
            for d, c in image:
                target = target * q + d * n_colors + c
            vector = np.zeros(q ** 3)
            vector[state] += 1.0
            vector[target] -= 1.0
            matrix += 0.5 * np.outer(vector, vector)
    return matrix


def colored_exchange_matrix(n_colors):
    """Penalty on up-down bonds that are not color singlets."""
    q = 2 * n_colors
    matrix = np.zeros((q * q, q * q))
    singlet = np.zeros(q * q)
    for c1 in range(n_colors):
        for c2 in range(n_colors):
            index = (UP * n_colors + c1) * q + DOWN * n_colors + c2
            matrix[index, index] = 1.0
        singlet[(UP * n_colors + c1) * q + DOWN * n_colors + c1] = 1.0
    return matrix - np.outer(singlet, singlet) / n_colors


def colored_terms(n_sites, n_colors, boundary=None, include_exchange=True):
    if boundary is None:
        boundary = BoundarySpec.open()
    _check_size(n_sites, boundary)
    terms = [Term(window, colored_bulk_matrix(n_colors))
             for window in windows(n_sites, boundary.is_periodic)]
    if include_exchange:
        exchange = colored_exchange_matrix(n_colors)
        bonds = n_sites if boundary.is_periodic else n_sites - 1
        terms.extend(Term((s, (s + 1) % n_sites), exchange) for s in range(bonds))
    if boundary.kind == 'open':
        terms.extend(_boundary_terms(n_sites, boundary, n_colors))
    return terms


def build_colored_hamiltonian(n_sites, n_colors, boundary=None, include_exchange=True,
                              matrix_free=False, config=None):
    """H_F + H_X + H_boundary of the k-colored chain in the product basis."""
    if n_colors < 1:
        raise InvalidArgument('need at least one color, got %d' % n_colors)
    dim = (2 * n_colors) ** n_sites
    resolve(config).check_basis(dim, 'colored hamiltonian')
    terms = colored_terms(n_sites, n_colors, boundary, include_exchange)
    label = 'Hk(%d,%d)' % (n_sites, n_colors)
    if matrix_free:
        return Operator(dim, terms=terms, n_sites=n_sites, local_dim=2 * n_colors,
                        label=label)
    return Operator(dim, _embed_terms(terms, n_sites, 2 * n_colors), n_sites=n_sites,
                    local_dim=2 * n_colors, label=label)


def apply(op, v):
    """op * v for a StateVector or a plain amplitude array."""
    amplitudes = getattr(v, 'amplitudes', v)
    result = op.dot(amplitudes)
    if hasattr(v, 'amplitudes'):
        return v.with_amplitudes(result)
    return result


def _site_values(n_sites, n_colors=1):
    q = 2 * n_colors
    indices = np.arange(q ** n_sites, dtype=np.int64)
    return [site_digit(indices, s, n_sites, q) for s in range(n_sites)]


def magnetization(n_sites, n_colors=1):
    """Diagonal of Z = sum of sigma^z over all basis states."""
    total = np.zeros((2 * n_colors) ** n_sites, dtype=np.int64)
    for values in _site_values(n_sites, n_colors):
        total += 2 * (values // n_colors) - 1
    return total


def sector_indices(n_sites, z, n_colors=1):
    return np.flatnonzero(magnetization(n_sites, n_colors) == z)


def restrict(op, indices):
    """The block of op on the given basis states, in the given order."""
    block = op.tocsr()[indices][:, indices]
    return Operator(len(indices), block, symmetric=op.symmetric,
                    label='%s|sector' % op.label)


def translation_permutation(n_sites, n_colors=1):
    """T|i> = |perm[i]>, moving the state of site j to site j + 1."""
    q = 2 * n_colors
    indices = np.arange(q ** n_sites, dtype=np.int64)
    return indices // q + (indices % q) * q ** (n_sites - 1)


def color_permutation(n_sites, n_colors, perm):
    """Index permutation relabeling every color c as perm[c] on all sites."""
    perm = np.asarray(perm, dtype=np.int64)
    if sorted(perm.tolist()) != list(range(n_colors)):
        raise InvalidArgument('%r is not a permutation of %d colors' % (perm, n_colors))
    q = 2 * n_colors
    image = np.zeros(q ** n_sites, dtype=np.int64)
    for values in _site_values(n_sites, n_colors):
        image = image * q + (values // n_colors) * n_colors + perm[values % n_colors]
    return image


def permutation_operator(perm):
    dim = len(perm)
    matrix = sparse.csr_matrix((np.ones(dim), (perm, np.arange(dim))), shape=(dim, dim))
    return Operator(dim, matrix, symmetric=False, label='permutation')


def build_xxx_hamiltonian(n_sites, periodic=False, config=None):
    """Ferromagnetic Heisenberg chain, sum over bonds of (1 - SWAP) / 2."""
    resolve(config).check_basis(2 ** n_sites, 'hamiltonian')
    bonds = n_sites if periodic and n_sites > 2 else n_sites - 1
    terms = [Term((s, (s + 1) % n_sites), _P_SINGLET) for s in range(bonds)]
    return Operator(2 ** n_sites, _embed_terms(terms, n_sites, 2), n_sites=n_sites,
                    label='XXX(%d)' % n_sites)


def dump_operator(op, stream):
    """Coordinate text: `row col value`, 0-indexed, row-major sorted."""
    for row, col, value in zip(*op.triplets()):
        stream.write('%d %d %.17g\n' % (row, col, value))
