import itertools

import numpy as np

from fredkin.config import Config

# the 14 Dyck words of length 8
DYCK_WORDS_8 = [
    '(((())))', '((()()))', '((())())', '((()))()', '(()(()))', '(()()())', '(()())()',
    '(())(())', '(())()()', '()((()))', '()(()())', '()(())()', '()()(())', '()()()()',
]

# the 8 properly 2-colored Dyck words of length 4, color 0 = (), color 1 = []
COLORED_DYCK_4 = ['(())', '([])', '[()]', '[[]]', '()()', '()[]', '[]()', '[][]']


def get_config(**overrides):
    return Config(environ={}, **overrides)


def all_words(n_sites):
    return [''.join(w) for w in itertools.product('()', repeat=n_sites)]


def reduce_word(word):
    """Delete adjacent "()" until none is left; the residue is )^a (^b."""
    while '()' in word:
        word = word.replace('()', '')
    return word


def brute_classify(word):
    residue = reduce_word(word)
    return residue.count(')'), residue.count('(')


def brute_class_size(a, b, n_sites):
    return sum(1 for w in all_words(n_sites) if brute_classify(w) == (a, b))


def catalan_recurrence(n):
    values = [1]
    for m in range(n):
        values.append(sum(values[i] * values[m - i] for i in range(m + 1)))
    return values[n]


def brute_neighbors(word, periodic=False):
    """Apply every rewrite ()) <-> )() and (() <-> ()( at every window."""
    moves = {'())': ')()', ')()': '())', '(()': '()(', '()(': '(()'}
    n = len(word)
    starts = range(n) if periodic and n >= 3 else range(n - 2)
    found = set()
    for s in starts:
        sites = [(s + t) % n for t in range(3)]
        window = ''.join(word[i] for i in sites)
        if window in moves:
            chars = list(word)
            for i, c in zip(sites, moves[window]):
                chars[i] = c
            found.add(''.join(chars))
    found.discard(word)
    return found


def random_vectors(dim, count=5, seed=7):
    rng = np.random.default_rng(seed)
    return [rng.standard_normal(dim) for _ in range(count)]
