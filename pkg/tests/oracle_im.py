"""Brute-force interpolated-median oracle via cumulative class counts.

Kept free of package imports so it can disagree with the implementation.
The grouped-median view: classes are the integer scores with boundaries at
half-integers; walk the cumulative distribution to the class containing
rank N/2 and interpolate linearly inside it.
"""

from collections import Counter


def oracle_interpolated_median(values):
    values = [v for v in values if v is not None]
    if not values:
        raise ValueError("need at least one value")
    counts = Counter(values)
    n = len(values)
    half = n / 2
    cumulative = 0
    for score in sorted(counts):
        in_class = counts[score]
        if cumulative + in_class >= half:
            if cumulative + in_class == half:
                # Rank n/2 sits exactly on the class's upper boundary: the
                # plain median falls between classes, no interpolation.
                upper = min(s for s in counts if s > score)
                return (score + upper) / 2
            return (score - 0.5) + (half - cumulative) / in_class
        cumulative += in_class
    raise AssertionError("unreachable")
