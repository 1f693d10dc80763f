"""Schmidt spectra and entanglement entropies of the Dyck states.

Cutting the length-N Dyck state after L sites, the Schmidt vectors are the
class states with m unmatched ups on the left and m unmatched downs on the
right; p_m = |C_{0,m}(L)| |C_{m,0}(N-L)| / Cat(N/2). In the k-colored state
each m splits into k^m vectors of equal weight.

All logarithms are natural.
"""

import math
from collections import namedtuple
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy.integrate import quad
from scipy.special import gammaln

from .combinatorics import catalan, class_size
from .config import InvalidArgument, resolve
from .states import colored_dyck_state, dyck_state

# above this many sites p_m comes from log-binomials instead of integers
EXACT_SITES = 512

SQRT_PI = math.sqrt(math.pi)


class CutOutOfRange(Exception):
    pass


class NotNormalized(Exception):
    pass


SchmidtEntry = namedtuple('SchmidtEntry', ['m', 'multiplicity', 'p', 'weight'])


class SchmidtSpectrum(namedtuple('SchmidtSpectrum', ['n_sites', 'cut', 'n_colors', 'entries'])):
    """Schmidt probabilities grouped by unmatched count m.

    Each entry holds `multiplicity` Schmidt vectors of probability `p`;
    `weight` = multiplicity * p. Numerical spectra carry m = None.
    """
    __slots__ = ()

    @property
    def total_weight(self):
        return math.fsum(e.weight for e in self.entries)

    def probabilities(self):
        """Every Schmidt probability, descending (materializes multiplicities)."""
        values = []
        for e in self.entries:
            values.extend([e.p] * int(e.multiplicity))
        return sorted(values, reverse=True)


def _check_cut(n_sites, cut):
    if not 1 <= cut < n_sites:
        raise CutOutOfRange('cut %d outside 1..%d' % (cut, n_sites - 1))


def admissible_m(n_sites, cut):
    return range(cut % 2, min(cut, n_sites - cut) + 1, 2)


def _log_ballot(length, m):
    """log |C_{0,m}(length)| = log binom(length, t) + log((m+1)/(t+1)), t = (length+m)/2."""
    t = (length + m) // 2
    return (gammaln(length + 1) - gammaln(t + 1) - gammaln(length - t + 1)
            + math.log(m + 1) - math.log(t + 1))


def _weights(n_sites, cut):
    ms = list(admissible_m(n_sites, cut))
    if n_sites <= EXACT_SITES:
        total = catalan(n_sites // 2)
        return ms, [float(Fraction(class_size((0, m), cut) * class_size((m, 0), n_sites - cut),
                                   total)) for m in ms]
    log_total = _log_ballot(n_sites, 0)
    return ms, [math.exp(_log_ballot(cut, m) + _log_ballot(n_sites - cut, m) - log_total)
                for m in ms]


def _entry(m, multiplicity, weight):
    if weight > 0:
        p = math.exp(math.log(weight) - math.log(multiplicity))
    else:
        p = 0.0
    return SchmidtEntry(m, multiplicity, p, weight)


def schmidt_colored(n, cut, n_colors, config=None):
    """(m, k^m, k^-m p_m) for every admissible m."""
    n_sites = 2 * n
    _check_cut(n_sites, cut)
    ms, weights = _weights(n_sites, cut)
    entries = [_entry(m, n_colors ** m, w) for m, w in zip(ms, weights)]
    return SchmidtSpectrum(n_sites, cut, n_colors, entries)


def schmidt_exact(n, cut, config=None):
    return schmidt_colored(n, cut, 1, config)


def entropy(spec, tol=1e-10):
    """Von Neumann entropy -sum multiplicity * p * log p."""
    if abs(spec.total_weight - 1.0) > tol:
        raise NotNormalized('Schmidt weights sum to %.15g' % spec.total_weight)
    return -math.fsum(e.weight * (math.log(e.weight) - math.log(e.multiplicity))
                      for e in spec.entries if e.weight > 0)


def schmidt_rank(spec):
    return sum(int(e.multiplicity) for e in spec.entries if e.weight > 0)


def height_expectation(n, cut, config=None):
    """Mean height of the Dyck path at the cut, sum of m * p_m."""
    return math.fsum(e.m * e.weight for e in schmidt_exact(n, cut, config).entries)


@lru_cache(maxsize=None)
def entropy_constant():
    """O(1) term of the half-chain entropy.

    The height at the cut, scaled by its width, has density
    rho(x) = x^2 exp(-x^2) / (sqrt(pi) / 4) on x >= 0; the constant is its
    differential entropy minus log(2) / 2.
    """
    def rho(x):
        return x * x * math.exp(-x * x) / (SQRT_PI / 4.0)

    def integrand(x):
        value = rho(x)
        return -value * math.log(value) if value > 0 else 0.0

    differential, _ = quad(integrand, 0.0, np.inf, epsabs=1e-12, epsrel=1e-12, limit=200)
    return differential - 0.5 * math.log(2.0)


def asymptotic_entropy(n_sites, cut):
    _check_cut(n_sites, cut)
    return 0.5 * math.log(cut * (n_sites - cut) / float(n_sites)) + entropy_constant()


def colored_entropy_asymptotic(n_sites, cut, n_colors):
    width = math.sqrt(2.0 * cut * (n_sites - cut) / n_sites)
    return (asymptotic_entropy(n_sites, cut)
            + 2.0 / SQRT_PI * math.log(n_colors) * width)


def colored_entropy(n, cut, n_colors, config=None):
    return entropy(schmidt_colored(n, cut, n_colors, config))


def colored_rank_closed_form(cut, n_colors, n_sites):
    """sum_{h=0}^{floor(M/2)} k^(2h + M mod 2) with M = min(L, N - L)."""
    _check_cut(n_sites, cut)
    smaller = min(cut, n_sites - cut)
    return sum(n_colors ** (2 * h + smaller % 2) for h in range(smaller // 2 + 1))


def rank_deviation(n, cut, config=None):
    """A notice when the measured rank differs from floor(L / 2), else None."""
    measured = schmidt_rank(schmidt_exact(n, cut, config))
    claimed = cut // 2
    if measured == claimed:
        return None
    return ('Schmidt rank at N=%d, L=%d is %d; floor(L/2) gives %d'
            % (2 * n, cut, measured, claimed))


def svd_spectrum(state, n_sites, cut, n_colors=1, tol=1e-12):
    """Numerical Schmidt spectrum of any state vector, equal values grouped."""
    _check_cut(n_sites, cut)
    amplitudes = getattr(state, 'amplitudes', state)
    q = 2 * n_colors
    matrix = np.asarray(amplitudes, dtype=float).reshape(q ** cut, q ** (n_sites - cut))
    singular = np.linalg.svd(matrix, compute_uv=False)
    probabilities = sorted((s * s for s in singular if s * s > tol), reverse=True)
    entries = []
    for p in probabilities:
        if entries and abs(entries[-1].p - p) <= tol:
            last = entries[-1]
            count = last.multiplicity + 1
            mean = (last.p * last.multiplicity + p) / count
            entries[-1] = SchmidtEntry(None, count, mean, mean * count)
        else:
            entries.append(SchmidtEntry(None, 1, p, p))
    return SchmidtSpectrum(n_sites, cut, n_colors, entries)


SWEEP_COLUMNS = ['N', 'L', 'k', 'S_exact', 'S_asymptotic', 'rank', 'height_expectation']
MODES = ('formula', 'svd', 'asymptotic')


def _sweep_row(n_sites, cut, n_colors, mode, config):
    if n_sites % 2:
        raise InvalidArgument('the Dyck state needs an even number of sites, got %d' % n_sites)
    n = n_sites // 2
    if mode == 'formula':
        spec = schmidt_colored(n, cut, n_colors, config)
        exact, rank = entropy(spec), schmidt_rank(spec)
    elif mode == 'svd':
        if n_colors == 1:
            state = dyck_state(n, config)
        else:
            state = colored_dyck_state(n, n_colors, config)
        spec = svd_spectrum(state, n_sites, cut, n_colors)
        exact, rank = entropy(spec), schmidt_rank(spec)
    elif mode == 'asymptotic':
        _check_cut(n_sites, cut)
        exact, rank = float('nan'), colored_rank_closed_form(cut, n_colors, n_sites)
    else:
        raise InvalidArgument('unknown mode %r' % mode)
    return {
        'N': n_sites,
        'L': cut,
        'k': n_colors,
        'S_exact': exact,
        'S_asymptotic': colored_entropy_asymptotic(n_sites, cut, n_colors),
        'rank': rank,
        'height_expectation': height_expectation(n, cut, config),
    }


def sweep(points, n_colors=1, mode='formula', threads=1, config=None):
    """One row per (N, L) point, in input order."""
    config = resolve(config)
    points = list(points)

    def row(point):
        return _sweep_row(point[0], point[1], n_colors, mode, config)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(row, points))
    return [row(point) for point in points]
