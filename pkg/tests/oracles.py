"""Independent slow references, written against the definitions only.

Nothing here imports the package's enumeration or expansion code, so
agreement with it is a real cross-check.
"""

from fractions import Fraction
from itertools import combinations, product
from math import comb


def satisfies(clauses, config) -> bool:
    return any(set(c) <= config for c in clauses)


def brute_density(clauses, n):
    counts = [0] * (n + 1)
    for k in range(n + 1):
        for combo in combinations(range(1, n + 1), k):
            if satisfies(clauses, set(combo)):
                counts[k] += 1
    return counts


def brute_bezier(clauses, n):
    return [Fraction(c, comb(n, k)) for k, c in enumerate(brute_density(clauses, n))]


def brute_power(clauses, n):
    """Power-basis coefficients from n_k: x^k (1-x)^(n-k) expanded by the binomial theorem."""
    ns = brute_density(clauses, n)
    alpha = [0] * (n + 1)
    for k, nk in enumerate(ns):
        for j in range(k, n + 1):
            alpha[j] += nk * comb(n - k, j - k) * (-1) ** (j - k)
    return alpha


def brute_xi(clauses, x):
    total = 0
    for bits in product((0, 1), repeat=len(x)):
        config = {i + 1 for i, b in enumerate(bits) if b}
        if satisfies(clauses, config):
            p = 1
            for xi, b in zip(x, bits):
                p *= xi if b else 1 - xi
            total += p
    return total


def brute_cuts(clauses, n):
    """Minimal sets meeting every clause, by scanning subsets in size order."""
    found = []
    for k in range(n + 1):
        for combo in combinations(range(1, n + 1), k):
            s = set(combo)
            if all(s & set(c) for c in clauses) and not any(f <= s for f in found):
                found.append(s)
    return {frozenset(f) for f in found}


def brute_struts(clauses):
    cl = [frozenset(c) for c in clauses]
    return {c for c in cl if not any(o < c for o in cl)}
