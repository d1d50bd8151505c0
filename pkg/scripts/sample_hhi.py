#!/usr/bin/env python3
"""HHI of the reference top-five share vectors under two residual assumptions.

The residual mass (1 - top five) is either spread evenly over the remaining
languages or packed into as few languages as possible, none above the fifth.
"""

from __future__ import annotations

import math

from lingshift.diversity import hhi_of_shares
from lingshift.reference import LANGUAGE_COUNT, SAMPLE_DISTRIBUTIONS


def even(top5, k=LANGUAGE_COUNT):
    rest = 1 - math.fsum(top5)
    return list(top5) + [rest / (k - 5)] * (k - 5)


def packed(top5):
    rest, tail = 1 - math.fsum(top5), []
    while rest > 1e-12:
        tail.append(min(top5[-1], rest))
        rest -= tail[-1]
    return list(top5) + tail


if __name__ == "__main__":
    print(f"{'country':8} {'reference':>9} {'even':>8} {'packed':>8}")
    for country, (ref, top5) in SAMPLE_DISTRIBUTIONS.items():
        print(f"{country:8} {ref:9.3f} {hhi_of_shares(even(top5)):8.4f} {hhi_of_shares(packed(top5)):8.4f}")
