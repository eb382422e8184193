"""Koszul sign kernel shared by every graded computation"""
import itertools


def sign(exponent):
    """(-1)^exponent"""
    return -1 if exponent % 2 else 1


def shift_sign(r, degree):
    """Sign picked up by an operator of the given degree acting on s^r c"""
    return sign(r * degree)


def commutator_sign(p, q):
    """Sign in [P, Q] = PQ - (-1)^{pq} QP"""
    return sign(p * q)


def permutation_sign(permutation):
    """Parity of a permutation given as a sequence of distinct integers"""
    inversions = 0
    for i, j in itertools.combinations(range(len(permutation)), 2):
        if permutation[i] > permutation[j]:
            inversions += 1
    return sign(inversions)


def koszul_sign(degrees, permutation):
    """Sign of reordering graded items into [items[p] for p in permutation]"""
    exponent = 0
    for i, j in itertools.combinations(range(len(permutation)), 2):
        a, b = permutation[i], permutation[j]
        if a > b:
            exponent += degrees[a] * degrees[b]
    return sign(exponent)


def subsets(n, k):
    """Increasing k-subsets of range(n), lexicographic"""
    return list(itertools.combinations(range(n), k))


def unshuffle_sign(degrees, chosen):
    """Koszul sign of moving the items at positions `chosen` to the front"""
    rest = [i for i in range(len(degrees)) if i not in chosen]
    return koszul_sign(degrees, list(chosen) + rest)


def set_partitions(items):
    """All partitions of a list into nonempty blocks, each block sorted, blocks ordered by first item"""
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for partition in set_partitions(rest):
        yield [[first]] + partition
        for i in range(len(partition)):
            yield [[first] + partition[i]] + partition[:i] + partition[i + 1:]


def partition_sign(degrees, blocks):
    """Koszul sign of reordering items into the concatenation of the blocks"""
    order = [i for block in blocks for i in block]
    return koszul_sign(degrees, order)
