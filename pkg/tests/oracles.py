"""Brute-force oracles shared by the test suite.

Everything here sticks to the defining enumerations (ints as bit vectors,
most significant bit = first transmitted bit) and never reuses the closed
forms it is meant to check.
"""

import itertools

import numpy as np

from onlinechannel._bits import int_from_bits


def flip_masks_upto(n, max_weight):
    """All n-bit masks of Hamming weight <= max_weight."""
    masks = []
    for w in range(min(n, max_weight) + 1):
        for positions in itertools.combinations(range(n), w):
            mask = 0
            for pos in positions:
                mask |= 1 << pos
            masks.append(mask)
    return masks


def ball_members_bruteforce(spec, z=0):
    """The defining enumeration: every w that agrees with z on the prefix and
    lies within p_n - q_n of it, unioned with the radius-p_n ball around w."""
    s = spec.n - spec.alpha_n
    suffix_mask = (1 << s) - 1
    members = set()
    ball_masks = flip_masks_upto(spec.n, spec.p_n)
    for w_suffix_diff in flip_masks_upto(s, spec.p_n - spec.q_n):
        w = z ^ w_suffix_diff  # prefix untouched, suffix moved within budget
        assert (w >> s) == (z >> s) and ((w ^ z) & ~suffix_mask) == 0
        for mask in ball_masks:
            members.add(w ^ mask)
    return members


def ball_members_literal(spec, z=0):
    """Fully literal double loop over all (y, w) pairs; only viable for tiny n."""
    s = spec.n - spec.alpha_n
    members = set()
    for y in range(1 << spec.n):
        for w in range(1 << spec.n):
            if (w ^ y).bit_count() > spec.p_n:
                continue
            if (w >> s) != (z >> s):
                continue
            if (w ^ z).bit_count() > spec.p_n - spec.q_n:
                continue
            members.add(y)
            break
    return members


def member_oracle(spec):
    """Memoized membership test built on the full existential over w.

    Membership of y in the ball around z depends only on the difference
    z ^ y, so results are cached by it; each fresh difference is settled by
    enumerating every word w that shares the prefix of z.
    """
    s = spec.n - spec.alpha_n
    suffix_mask = (1 << s) - 1
    cache = {}

    def member(z, y):
        d = z ^ y
        hit = cache.get(d)
        if hit is None:
            i = (d >> s).bit_count()
            d_suf = d & suffix_mask
            hit = False
            for w_diff in range(1 << s):
                if (w_diff.bit_count() <= spec.p_n - spec.q_n
                        and i + (w_diff ^ d_suf).bit_count() <= spec.p_n):
                    hit = True
                    break
            cache[d] = hit
        return hit

    return member


def naive_goodness(code, m_bits, e_bits, spec, member=None):
    """Literal recomputation of the goodness quantities.

    Returns (class_size, intrusion_sum, vulnerable_count,
    intrusion_sum_codewords); the intrusion sum loops over every word with
    the given prefix, exactly as defined.  Pass ``member`` to share one
    memoized membership oracle across calls with the same spec.
    """
    s = spec.n - spec.alpha_n
    if member is None:
        member = member_oracle(spec)
    words = [int_from_bits(w) for w in code.words]
    m_int = int_from_bits(m_bits)
    e_int = int_from_bits(e_bits)
    cls = [u for u, w in enumerate(words) if (w >> s) == m_int]
    comp = [u for u, w in enumerate(words) if (w >> s) != m_int]
    intrusion = 0
    for x_suffix in range(1 << s):
        z = ((m_int << s) | x_suffix) ^ e_int
        for u in comp:
            intrusion += member(z, words[u])
    vulnerable = 0
    t_total = 0
    for u in cls:
        z = words[u] ^ e_int
        t_u = sum(member(z, words[v]) for v in comp)
        t_total += t_u
        vulnerable += t_u >= 1
    return len(cls), intrusion, vulnerable, t_total


def valid_ball_specs(n, max_p=3):
    """Every valid (alpha_n, p_n <= max_p, q_n) combination at length n."""
    from onlinechannel import BallSpec

    for alpha_n in range(n + 1):
        for p_n in range(min(n, max_p) + 1):
            for q_n in range(min(p_n, alpha_n) + 1):
                yield BallSpec(n=n, alpha_n=alpha_n, p_n=p_n, q_n=q_n)


def prefix_error_patterns(alpha_n, p_n, n):
    """All first-step errors: support in the first alpha_n bits, weight <= p_n."""
    for w in range(min(alpha_n, p_n) + 1):
        for positions in itertools.combinations(range(alpha_n), w):
            e = np.zeros(n, dtype=np.uint8)
            e[list(positions)] = 1
            yield e
