"""Compiled slot loops.

These mirror ``greedy_step`` / ``adaptive_step`` exactly; the test suite checks
the two paths agree slot for slot. Keep them in sync when touching either.
"""

import numpy as np
from numba import njit

# symbol kinds, per slot
RATELESS = 0
UNCODED = 1
MIXED = 2


@njit(cache=True)
def greedy_path(v1, v2, K):
    T = v1.shape[0]
    ages1 = np.empty(T, np.int64)
    ages2 = np.empty(T, np.int64)
    events = np.empty((2 * (T // K) + 2, 3), np.int64)
    ne = 0
    gen = 1
    n1 = 0
    n2 = 0
    a1 = 0
    a2 = 0
    for i in range(T):
        t = i + 1
        a1 += 1
        a2 += 1
        n1 += v1[i]
        dec2 = False
        if v2[i] == 1 and n2 < K:
            n2 += 1
            dec2 = n2 == K
        if n1 == K:
            events[ne, 0] = 1
            events[ne, 1] = t
            events[ne, 2] = gen
            ne += 1
            a1 = t - gen
        if dec2:
            events[ne, 0] = 2
            events[ne, 1] = t
            events[ne, 2] = gen
            ne += 1
            a2 = t - gen
        if n1 == K:
            gen = t + 1
            n1 = 0
            n2 = 0
        ages1[i] = a1
        ages2[i] = a2
    return ages1, ages2, events[:ne].copy()


@njit(cache=True)
def adaptive_path(v1, v2, K):
    T = v1.shape[0]
    ages1 = np.empty(T, np.int64)
    ages2 = np.empty(T, np.int64)
    kinds = np.empty(T, np.int8)
    events = np.empty((2 * (T // K) + 2, 3), np.int64)
    cycles = np.empty((T // K + 1, 3), np.int64)
    ne = 0
    nc = 0
    phase = 1
    c = UNCODED
    k1 = 0
    k2 = 0
    w1 = 1
    w2 = 1
    a1 = 0
    a2 = 0
    cycle_start = 1
    entry = 0
    d2 = 0
    for i in range(T):
        t = i + 1
        a1 += 1
        a2 += 1
        x1 = v1[i]
        x2 = v2[i]
        dec2 = False
        if phase == 1:
            kinds[i] = RATELESS
            k1 += x1
            if x2 == 1 and k2 < K:
                k2 += 1
                dec2 = k2 == K
        elif c == UNCODED:
            kinds[i] = UNCODED
            k1 += x1
            if x1 == 0 and x2 == 1:
                c = MIXED
            else:
                c = UNCODED
        else:
            kinds[i] = MIXED
            k1 += x1
            if x2 == 1 and k2 < K:
                k2 += 1
                dec2 = k2 == K
            if x1 == 1:
                c = UNCODED
            else:
                c = MIXED
        if k1 == K:
            events[ne, 0] = 1
            events[ne, 1] = t
            events[ne, 2] = w1
            ne += 1
            a1 = t - w1
        if dec2:
            events[ne, 0] = 2
            events[ne, 1] = t
            events[ne, 2] = w2
            ne += 1
            a2 = t - w2
            d2 = t
        if k1 == K:
            if k2 == K:
                if phase == 1:
                    cycles[nc, 0] = t - cycle_start + 1
                    cycles[nc, 1] = 0
                    cycles[nc, 2] = 0
                else:
                    cycles[nc, 0] = entry - cycle_start
                    cycles[nc, 1] = d2 - entry + 1
                    cycles[nc, 2] = t - d2
                nc += 1
                w1 = t + 1
                w2 = t + 1
                k1 = 0
                k2 = 0
                phase = 1
                cycle_start = t + 1
            else:
                w1 = t + 1
                k1 = 0
                if phase == 1:
                    phase = 2
                    c = UNCODED
                    entry = t + 1
        ages1[i] = a1
        ages2[i] = a2
    return ages1, ages2, events[:ne].copy(), cycles[:nc].copy(), kinds


@njit(cache=True)
def phase2_chain(v1, v2):
    """Run the phase-2 uncoded/coded chain alone; returns states and k2 rewards per slot."""
    T = v1.shape[0]
    states = np.empty(T, np.int8)
    rewards = np.empty(T, np.int8)
    c = UNCODED
    for i in range(T):
        states[i] = c
        if c == UNCODED:
            rewards[i] = 0
            if v1[i] == 0 and v2[i] == 1:
                c = MIXED
        else:
            rewards[i] = v2[i]
            if v1[i] == 1:
                c = UNCODED
    return states, rewards
