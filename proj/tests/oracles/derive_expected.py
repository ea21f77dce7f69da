#!/usr/bin/env python3
"""Independent oracle for the frozen constants in frozen_values.hpp.

Everything here is brute force over explicit joint tables or direct
recurrences; nothing imports the C++ code. Re-run and diff against
frozen_values.hpp if a model definition changes.
"""
import itertools
import math

import numpy as np
from scipy import integrate


def H(p):
    p = np.asarray(p, dtype=float).ravel()
    p = p[p > 1e-15]
    return float(-(p * np.log2(p)).sum())


def h2(p):
    return H([p, 1 - p])


def xor_channel(bob_flip, eve_flip, eve_x1, eve_x2):
    law = np.zeros((2, 2, 2, 2))
    for x1, x2, y, z in itertools.product(range(2), repeat=4):
        ny = y ^ x1 ^ x2
        nz = z ^ ((x1 if eve_x1 else 0) ^ (x2 if eve_x2 else 0))
        law[x1, x2, y, z] = (bob_flip if ny else 1 - bob_flip) * (eve_flip if nz else 1 - eve_flip)
    return law


def joint(law, p1, p2):
    return np.einsum("a,b,abyz->abyz", p1, p2, law)


def info_terms(j):
    # I(X1;Y|X2) = H(X1,X2) + H(X2,Y) - H(X1,X2,Y) - H(X2)
    pxy = j.sum(3)
    i1 = H(j.sum((2, 3))) + H(pxy.sum(0)) - H(pxy) - H(j.sum((0, 2, 3)))
    i2 = H(j.sum((2, 3))) + H(pxy.sum(1)) - H(pxy) - H(j.sum((1, 2, 3)))
    i12 = H(j.sum((2, 3))) + H(j.sum((0, 1, 3))) - H(pxy)
    p1z = j.sum((1, 2))
    p2z = j.sum((0, 2))
    iz1 = H(p1z.sum(1)) + H(p1z.sum(0)) - H(p1z)
    iz2 = H(p2z.sum(1)) + H(p2z.sum(0)) - H(p2z)
    return i1, i2, i12, iz1, iz2


def section(title):
    print(f"\n// ---- {title}")


section("noisy XOR, Bob flip 0.11, Eve = X1 xor N' (0.25), uniform inputs")
u = np.array([0.5, 0.5])
t = info_terms(joint(xor_channel(0.11, 0.25, True, False), u, u))
for name, v in zip(["i_x1_y_given_x2", "i_x2_y_given_x1", "i_x12_y", "i_x1_z", "i_x2_z"], t):
    print(f"{name} = {v!r}")
print("one_minus_h011 =", repr(1 - h2(0.11)))
s1 = max(t[0] - t[3], 0)
s2 = max(t[1] - t[4], 0)
ss = max(t[2] - t[3] - t[4], 0)
ss = min(ss, s1 + s2)
print("secrecy pentagon =", repr(min(s1, ss)), repr(min(s2, ss)), repr(ss))

section("binary Y = x1 xor x2, Z constant, p1=(0.3,0.7), p2=(0.6,0.4)")
law = np.zeros((2, 2, 2, 1))
for x1, x2 in itertools.product(range(2), repeat=2):
    law[x1, x2, x1 ^ x2, 0] = 1.0
jt = joint(law, np.array([0.3, 0.7]), np.array([0.6, 0.4]))
print("joint (x1,x2,y,z) row-major =", [float(v) for v in jt.ravel()])

section("fading capacity terms h=(1,1) g=(0.5,0.5) P=(2,2) sigma2=(1,1)")
h, g, P, s = (1, 1), (0.5, 0.5), (2, 2), (1, 1)
C1 = 0.5 * math.log2(1 + h[0] * P[0] / s[0])
C2 = 0.5 * math.log2(1 + h[1] * P[1] / s[0])
C1e = 0.5 * math.log2(1 + g[0] * P[0] / (s[1] + g[1] * P[1]))
C2e = 0.5 * math.log2(1 + g[1] * P[1] / (s[1] + g[0] * P[0]))
C = 0.5 * math.log2(1 + (h[0] * P[0] + h[1] * P[1]) / s[0])
print("C1, C2, C1e, C2e, C =", repr(C1), repr(C2), repr(C1e), repr(C2e), repr(C))
print("increment n1=16:", math.floor(16 * max(C1 - C1e, 0)), math.floor(16 * max(C2 - C2e, 0)))

section("ergodic E[0.5 log2(1 + h*4)], h ~ Exp(1)")
val, err = integrate.quad(lambda x: 0.5 * math.log2(1 + 4 * x) * math.exp(-x), 0, math.inf, epsabs=1e-13)
print("ergodic_c_pbar4 =", repr(val), "err", err)

section("protocol ledger n1=8 l=4 Rs=0.25 C=0.75 N1=2 K=20 (one user; both identical)")
n1, l, N1, K = 8, 4, 2, 20
w = math.floor(n1 * 0.25)
cap = math.floor(n1 * l * 0.75)
buf = []  # list of [origin, bits]
engaged = False
rows = []
for k in range(1, K + 1):
    strict = k - N1 - 1
    if not engaged and any(o <= strict for o, _ in buf):
        engaged = True
    limit = strict if engaged else k - 1
    eligible = sum(b for o, b in buf if o <= limit)
    keyed = min(eligible, cap)
    before = sum(b for _, b in buf)
    need = keyed
    used = []
    while need > 0:
        take = min(need, buf[0][1])
        used.append(buf[0][0])
        buf[0][1] -= take
        need -= take
        if buf[0][1] == 0:
            buf.pop(0)
    stored = w + keyed
    if stored:
        buf.append([k, stored])
    after = sum(b for _, b in buf)
    assert after == before + stored - keyed
    rows.append((k, w, keyed, keyed, stored, after, min(used) if used else 0, max(used) if used else 0))
print("// slot, wiretap, keyed, consumed, stored, buffer_after, oldest_origin, newest_origin")
for r in rows:
    print("{" + ", ".join(str(x) for x in r) + "},")

section("leakage engine cross-check: hand codebooks, n=3, Eve = X1 xor X2 xor N'(0.25)")
# user 1: 1 message bit, 1 confusion bit; user 2: 1 message bit, 0 confusion bits
cb1 = {(0, 0): (0, 0, 1), (0, 1): (1, 1, 0), (1, 0): (1, 0, 1), (1, 1): (0, 1, 1)}
cb2 = {(0, 0): (0, 1, 0), (1, 0): (1, 1, 1)}
pe = 0.25
n = 3
rows = []  # (w1, w2, x2 tuple, z index, prob)
for (w1, r1), x1 in cb1.items():
    for (w2, r2), x2 in cb2.items():
        pw = 0.25 * 0.5  # uniform (w1,r1) and w2
        for z in itertools.product(range(2), repeat=n):
            pz = 1.0
            for a, b, c in zip(x1, x2, z):
                pz *= pe if (a ^ b) != c else 1 - pe
            rows.append((w1, w2, x2, z, pw * pz))


def mi(key_a, key_b, key_c):
    from collections import defaultdict
    pabc, pac, pbc, pc = (defaultdict(float) for _ in range(4))
    for r in rows:
        a, b, c, p = key_a(r), key_b(r), key_c(r), r[4]
        pabc[(a, b, c)] += p
        pac[(a, c)] += p
        pbc[(b, c)] += p
        pc[c] += p
    return H(list(pac.values())) + H(list(pbc.values())) - H(list(pabc.values())) - H(list(pc.values()))


print("I(W1;Z|X2) =", repr(mi(lambda r: r[0], lambda r: r[3], lambda r: r[2])))
print("I(W1;Z) =", repr(mi(lambda r: r[0], lambda r: r[3], lambda r: 0)))
print("I(W1,W2;Z) =", repr(mi(lambda r: (r[0], r[1]), lambda r: r[3], lambda r: 0)))
print("I(W2;Z|X1) needs X1 -- skipped")
