"""Dyck words, Fredkin moves and the counting of Fredkin equivalence classes.

A basis state of the chain is a word over '(' (spin up, a step up of the
path) and ')' (spin down, a step down). Words are bit-packed with site 1 as
the most significant bit and up = 1, so lexicographic order with '(' > ')'
is integer order of the encoding.

Colored words carry a direction and a color in [0, k) per site and are
encoded site-major with 2k local states per site, direction-major within a
site (local state = direction * k + color). For k = 1 this is bit-identical
to the uncolored encoding.
"""

import re
from collections import namedtuple
from math import comb

import numpy as np

from .config import resolve

UP = 1
DOWN = 0

_CHUNK_BITS = 16

_colored_token_re = re.compile(r'([()])(\d+)')
_bracket_pairs = ('()', '[]', '{}', '<>')


class EmptyClass(Exception):
    pass


class WordError(ValueError):
    pass


class SpinWord(namedtuple('SpinWord', ['n_sites', 'bits'])):
    """A product basis state; `bits` is the canonical integer encoding."""
    __slots__ = ()

    @classmethod
    def parse(cls, text):
        bits = 0
        for char in text:
            if char == '(':
                bits = (bits << 1) | UP
            elif char == ')':
                bits = bits << 1
            else:
                raise WordError('not a parenthesis word: %r' % text)
        return cls(len(text), bits)

    @classmethod
    def from_sites(cls, sites):
        bits = 0
        for value in sites:
            bits = (bits << 1) | (UP if value else DOWN)
        return cls(len(sites), bits)

    def site(self, j):
        """Direction (UP or DOWN) at site j, 1-based."""
        if not 1 <= j <= self.n_sites:
            raise IndexError('site %d outside 1..%d' % (j, self.n_sites))
        return (self.bits >> (self.n_sites - j)) & 1

    def sites(self):
        return tuple(self.site(j) for j in range(1, self.n_sites + 1))

    @property
    def index(self):
        return self.bits

    @property
    def magnetization(self):
        ups = bin(self.bits).count('1')
        return 2 * ups - self.n_sites

    def __str__(self):
        return ''.join('(' if s == UP else ')' for s in self.sites())


class ColoredSpinWord(namedtuple('ColoredSpinWord', ['directions', 'colors', 'n_colors'])):
    """A basis state of the colored chain: per site a direction and a color."""
    __slots__ = ()

    def __new__(cls, directions, colors, n_colors):
        directions = tuple(int(d) for d in directions)
        colors = tuple(int(c) for c in colors)
        if n_colors < 1:
            raise WordError('need at least one color, got %d' % n_colors)
        if len(directions) != len(colors):
            raise WordError('directions and colors differ in length')
        for c in colors:
            if not 0 <= c < n_colors:
                raise WordError('color %d outside [0, %d)' % (c, n_colors))
        return super(ColoredSpinWord, cls).__new__(cls, directions, colors, n_colors)

    @classmethod
    def parse(cls, text, n_colors):
        """Parse the token format, e.g. "(0)0(1)1"."""
        tokens = _colored_token_re.findall(text)
        if ''.join(p + c for p, c in tokens) != text:
            raise WordError('not a colored word: %r' % text)
        directions = [UP if p == '(' else DOWN for p, _ in tokens]
        return cls(directions, [int(c) for _, c in tokens], n_colors)

    @classmethod
    def from_brackets(cls, text, n_colors):
        """Parse bracket notation: "()" is color 0, "[]" color 1, "{}" 2, "<>" 3."""
        directions, colors = [], []
        for char in text:
            for color, pair in enumerate(_bracket_pairs):
                if char in pair:
                    directions.append(UP if char == pair[0] else DOWN)
                    colors.append(color)
                    break
            else:
                raise WordError('not a bracket word: %r' % text)
        return cls(directions, colors, n_colors)

    @classmethod
    def from_index(cls, index, n_sites, n_colors):
        q = 2 * n_colors
        local = []
        for _ in range(n_sites):
            local.append(index % q)
            index //= q
        local.reverse()
        return cls([v // n_colors for v in local], [v % n_colors for v in local], n_colors)

    @property
    def n_sites(self):
        return len(self.directions)

    @property
    def index(self):
        q = 2 * self.n_colors
        index = 0
        for d, c in zip(self.directions, self.colors):
            index = index * q + d * self.n_colors + c
        return index

    def uncolored(self):
        return SpinWord.from_sites(self.directions)

    def __str__(self):
        return ''.join(('(' if d == UP else ')') + str(c)
                       for d, c in zip(self.directions, self.colors))


class Matching(namedtuple('Matching', ['partner'])):
    """partner[i - 1] is the site matched with site i, or None."""
    __slots__ = ()

    def pairs(self):
        return [(i, p) for i, p in enumerate(self.partner, 1) if p is not None and p > i]

    def unmatched(self):
        return [i for i, p in enumerate(self.partner, 1) if p is None]


ClassId = namedtuple('ClassId', ['a', 'b'])
ColoredClassId = namedtuple('ColoredClassId', ['a', 'colors_a', 'b', 'colors_b'])


def _match_directions(directions):
    partner = [None] * len(directions)
    stack = []
    for i, d in enumerate(directions):
        if d == UP:
            stack.append(i)
        elif stack:
            opener = stack.pop()
            partner[opener] = i + 1
            partner[i] = opener + 1
    return Matching(tuple(partner))


def match_parens(w):
    """Stack matching of a word: each ')' closes the nearest open '('."""
    return _match_directions(w.sites())


def classify(w):
    a = b = 0
    for d in w.sites():
        if d == UP:
            b += 1
        elif b:
            b -= 1
        else:
            a += 1
    return ClassId(a, b)


def is_dyck(w):
    return classify(w) == (0, 0)


def class_size(c, n_sites):
    a, b = c
    if a < 0 or b < 0:
        return 0
    rest = n_sites - a - b
    if rest == 0:
        return 1
    if rest < 0 or rest % 2:
        return 0
    top = (n_sites + a + b) // 2
    return comb(n_sites, top) - comb(n_sites, top + 1)


def catalan(n):
    return comb(2 * n, n) // (n + 1)


def nonempty_classes(n_sites):
    """All ClassIds with at least one word of the given length."""
    return [ClassId(a, s - a)
            for s in range(n_sites % 2, n_sites + 1, 2)
            for a in range(s + 1)]


def standard_form(c, n_sites):
    if class_size(c, n_sites) == 0:
        raise EmptyClass('C_{%d,%d}(%d) is empty' % (c[0], c[1], n_sites))
    pairs = (n_sites - c[0] - c[1]) // 2
    return SpinWord.parse('()' * pairs + ')' * c[0] + '(' * c[1])


def classify_chunks(n_sites, chunk_bits=_CHUNK_BITS):
    """Yield (indices, a, b) for all 2^N encodings, chunk by chunk."""
    total = 1 << n_sites
    chunk = 1 << chunk_bits
    for start in range(0, total, chunk):
        indices = np.arange(start, min(start + chunk, total), dtype=np.int64)
        height = np.zeros(len(indices), dtype=np.int64)
        lowest = np.zeros(len(indices), dtype=np.int64)
        for shift in range(n_sites - 1, -1, -1):
            height += 2 * ((indices >> shift) & 1) - 1
            np.minimum(lowest, height, out=lowest)
        yield indices, -lowest, height - lowest


def class_indices(c, n_sites, config=None):
    """Encodings of every word of C_{a,b}(N), ascending."""
    resolve(config).check_enumeration(n_sites)
    if class_size(c, n_sites) == 0:
        return np.zeros(0, dtype=np.int64)
    found = [indices[(a == c[0]) & (b == c[1])]
             for indices, a, b in classify_chunks(n_sites)]
    return np.concatenate(found)


def enumerate_class(c, n_sites, config=None):
    return [SpinWord(n_sites, int(i)) for i in class_indices(c, n_sites, config)]


def flip_bijection(w):
    """Turn every unmatched ')' into '(' ; maps C_{a,b} onto C_{0,a+b}."""
    matching = match_parens(w)
    sites = list(w.sites())
    for i in matching.unmatched():
        sites[i - 1] = UP
    return SpinWord.from_sites(sites)


def flip_bijection_inverse(w, a):
    """Undo flip_bijection for a word that came from C_{a,b}."""
    sites = list(w.sites())
    for i in match_parens(w).unmatched()[:a]:
        sites[i - 1] = DOWN
    return SpinWord.from_sites(sites)


def _window_images(window):
    """Images of a three-site window under the two Fredkin-move involutions.

    Each site is a (direction, color) pair. The moving pair is an adjacent
    up-down; the bystander keeps its direction and color.
    """
    (d1, c1), (d2, c2), (d3, c3) = window
    dirs = (d1, d2, d3)
    images = []
    # (() <-> ()(
    if dirs == (UP, UP, DOWN):
        images.append(((UP, c2), (DOWN, c3), (UP, c1)))
    elif dirs == (UP, DOWN, UP):
        images.append(((UP, c3), (UP, c1), (DOWN, c2)))
    # )() <-> ())
    if dirs == (DOWN, UP, DOWN):
        images.append(((UP, c2), (DOWN, c3), (DOWN, c1)))
    elif dirs == (UP, DOWN, DOWN):
        images.append(((DOWN, c3), (UP, c1), (DOWN, c2)))
    return images


def windows(n_sites, periodic=False):
    """Zero-based site triples of every three-site window."""
    if periodic:
        if n_sites < 3:
            return []
        return [(s, (s + 1) % n_sites, (s + 2) % n_sites) for s in range(n_sites)]
    return [(s, s + 1, s + 2) for s in range(n_sites - 2)]


def _neighbors(sites, periodic):
    found = set()
    for window in windows(len(sites), periodic):
        for image in _window_images(tuple(sites[s] for s in window)):
            moved = list(sites)
            for s, value in zip(window, image):
                moved[s] = value
            moved = tuple(moved)
            if moved != tuple(sites):
                found.add(moved)
    return found


def fredkin_neighbors(w, periodic=False):
    sites = [(d, 0) for d in w.sites()]
    found = _neighbors(sites, periodic)
    words = [SpinWord.from_sites([d for d, _ in moved]) for moved in found]
    return sorted(words, key=lambda word: word.bits)


def classify_colored(w):
    matching = _match_directions(w.directions)
    colors_a, colors_b = [], []
    for i in matching.unmatched():
        if w.directions[i - 1] == DOWN:
            colors_a.append(w.colors[i - 1])
        else:
            colors_b.append(w.colors[i - 1])
    return ColoredClassId(len(colors_a), tuple(colors_a), len(colors_b), tuple(colors_b))


def is_properly_colored(w):
    matching = _match_directions(w.directions)
    if matching.unmatched():
        return False
    return all(w.colors[i - 1] == w.colors[j - 1] for i, j in matching.pairs())


def colored_fredkin_neighbors(w, periodic=False):
    found = _neighbors(list(zip(w.directions, w.colors)), periodic)
    words = [ColoredSpinWord([d for d, _ in moved], [c for _, c in moved], w.n_colors)
             for moved in found]
    return sorted(words, key=lambda word: word.index)


def periodic_matching(w):
    """Sites matched in the usual sense for at least one cyclic rotation."""
    n = w.n_sites
    sites = w.sites()
    partner = [None] * n
    for shift in range(n):
        rotated = sites[shift:] + sites[:shift]
        for i, j in _match_directions(rotated).pairs():
            opener = (i - 1 + shift) % n
            closer = (j - 1 + shift) % n
            partner[opener] = closer + 1
            partner[closer] = opener + 1
    return Matching(tuple(partner))


def edge_crossings(w):
    """Number of periodically matched pairs whose '(' lies right of its ')'."""
    return sum(1 for i, p in enumerate(periodic_matching(w).partner, 1)
               if p is not None and p < i and w.site(i) == UP)


def site_digit(indices, site, n_sites, q=2):
    """Local state at zero-based `site` for an array of encodings."""
    return (indices // (q ** (n_sites - 1 - site))) % q


def fredkin_move_tables(n_sites, periodic=False, n_colors=1):
    """Permutation tables of every Fredkin-move generator on the full basis.

    Returns a list of int64 arrays g with g[i] the image of basis state i;
    each generator is an involution acting on one window.
    """
    q = 2 * n_colors
    indices = np.arange(q ** n_sites, dtype=np.int64)
    tables = []
    for window in windows(n_sites, periodic):
        weights = [q ** (n_sites - 1 - s) for s in window]
        local = [site_digit(indices, s, n_sites, q) for s in window]
        dirs = [v // n_colors for v in local]
        cols = [v % n_colors for v in local]

        def image(mask, new_sites):
            table = indices.copy()
            shift = np.zeros(len(indices), dtype=np.int64)
            for w_s, old, (d, c) in zip(weights, local, new_sites):
                shift += (d * n_colors + c - old) * w_s
            table[mask] += shift[mask]
            return table

        def pattern(d1, d2, d3):
            return (dirs[0] == d1) & (dirs[1] == d2) & (dirs[2] == d3)

        c1, c2, c3 = cols
        # (() <-> ()(
        table = image(pattern(UP, UP, DOWN), [(UP, c2), (DOWN, c3), (UP, c1)])
        back = image(pattern(UP, DOWN, UP), [(UP, c3), (UP, c1), (DOWN, c2)])
        mask = pattern(UP, DOWN, UP)
        table[mask] = back[mask]
        tables.append(table)
        # )() <-> ())
        table = image(pattern(DOWN, UP, DOWN), [(UP, c2), (DOWN, c3), (DOWN, c1)])
        back = image(pattern(UP, DOWN, DOWN), [(DOWN, c3), (UP, c1), (DOWN, c2)])
        mask = pattern(UP, DOWN, DOWN)
        table[mask] = back[mask]
        tables.append(table)
    return tables
