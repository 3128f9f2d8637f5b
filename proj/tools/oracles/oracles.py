"""Reference values frozen into the unit tests.

Computed without the C++ library: the random projection re-implements
mt19937_64 and the libstdc++ polar normal sampler, everything else uses
mpmath at 50 digits. Run with python3; prints C++-ready literals.
"""
import re
from collections import Counter

import mpmath as mp

mp.mp.dps = 50
MASK = (1 << 64) - 1


class MT19937_64:
    def __init__(self, seed):
        self.mt = [0] * 312
        self.mt[0] = seed & MASK
        for i in range(1, 312):
            prev = self.mt[i - 1]
            self.mt[i] = (6364136223846793005 * (prev ^ (prev >> 62)) + i) & MASK
        self.idx = 312

    def _twist(self):
        for i in range(312):
            x = (self.mt[i] & 0xFFFFFFFF80000000) | (self.mt[(i + 1) % 312] & 0x7FFFFFFF)
            xa = x >> 1
            if x & 1:
                xa ^= 0xB5026F5AA96619E9
            self.mt[i] = self.mt[(i + 156) % 312] ^ xa
        self.idx = 0

    def __call__(self):
        if self.idx >= 312:
            self._twist()
        y = self.mt[self.idx]
        self.idx += 1
        y ^= (y >> 29) & 0x5555555555555555
        y ^= (y << 17) & 0x71D67FFFEDA60000
        y ^= (y << 37) & 0xFFF7EEE000000000
        y ^= y >> 43
        return y & MASK


class PolarNormal:
    def __init__(self, rng):
        self.rng = rng
        self.saved = None

    def _uniform(self):
        u = float(self.rng()) / 18446744073709551616.0
        return u if u < 1.0 else 0.9999999999999999

    def __call__(self):
        if self.saved is not None:
            v, self.saved = self.saved, None
            return v
        import math
        while True:
            x = 2.0 * self._uniform() - 1.0
            y = 2.0 * self._uniform() - 1.0
            r2 = x * x + y * y
            if 0.0 < r2 <= 1.0:
                break
        mult = math.sqrt(-2 * math.log(r2) / r2)
        self.saved = x * mult
        return y * mult


def lit(x):
    return mp.nstr(mp.mpf(x), 17, min_fixed=-5, max_fixed=5)


def section(title):
    print(f"\n// {title}")


# Random projection embedding: vocabulary a/b/c with df 2/1/1 over N = 3
# documents, counts [2, 1, 0], d = 4, seed 42.
section("projection seed 42, d 4, V 3 (row-major)")
rng = MT19937_64(42)
normal = PolarNormal(rng)
P = [[normal() for _ in range(3)] for _ in range(4)]
for row in P:
    print(", ".join(repr(v) for v in row))
counts, df, n = [2, 1, 0], [2, 1, 1], 3
tfidf = [mp.log(1 + c) * mp.log(1 + mp.mpf(n) / d) for c, d in zip(counts, df)]
v = [mp.fsum(mp.mpf(P[r][c]) * tfidf[c] for c in range(3)) for r in range(4)]
norm = mp.sqrt(mp.fsum(x * x for x in v))
section("embedding of counts [2,1,0]")
print(", ".join(lit(x / norm) for x in v))

section("decay(2.0, 0.5)")
print(lit(mp.exp(-1)))

# Three orthogonal unit vectors in slices 0/1/2, lambda = ln 2, window 2.
section("attention rows, orthogonal fixture")
lam = mp.log(2)
for i in range(3):
    scores = [(1 / mp.sqrt(3) if i == j else 0) * mp.exp(-lam * abs(i - j)) for j in range(3)]
    z = mp.fsum(mp.exp(s) for s in scores)
    print(", ".join(lit(mp.exp(s) / z) for s in scores))

section("softmax [0, ln2, ln3]")
print(", ".join(lit(x) for x in (mp.mpf(1) / 6, mp.mpf(2) / 6, mp.mpf(3) / 6)))

section("supervised loss, two docs at [0.5, 0.5]")
print(lit(-2 * mp.log(0.5)))

section("perplexity of a 2-token doc with p 0.5, 0.25")
print(lit(mp.exp(-(mp.log(0.5) + mp.log(0.25)) / 2)))

section("stability of [0.6,0.4] -> [0.4,0.6]")
a, b = [mp.mpf("0.6"), mp.mpf("0.4")], [mp.mpf("0.4"), mp.mpf("0.6")]
print(lit(mp.fsum(x * y for x, y in zip(a, b)) / (mp.sqrt(mp.fsum(x * x for x in a)) * mp.sqrt(mp.fsum(y * y for y in b)))))

section("npmi, never together in 100 docs, df 10 and 20")
pi, pj, pij = mp.mpf(10) / 100, mp.mpf(20) / 100, mp.mpf(1) / 100
print(lit(mp.log(pij / (pi * pj)) / -mp.log(pij)))

section("forecast, A = [[0.9,0.1],[0.2,0.8]] from [0.3,0.7], 5 steps")
A = [[mp.mpf("0.9"), mp.mpf("0.1")], [mp.mpf("0.2"), mp.mpf("0.8")]]
th = [mp.mpf("0.3"), mp.mpf("0.7")]
for _ in range(5):
    th = [A[0][0] * th[0] + A[0][1] * th[1], A[1][0] * th[0] + A[1][1] * th[1]]
    th = [max(x, 0) for x in th]
    s = mp.fsum(th)
    th = [x / s for x in th]
    print("{" + ", ".join(lit(x) for x in th) + "},")

section("forecast, A = [[1.2,-0.5],[-0.1,0.9]] from [0.5,0.5], 3 steps")
A = [[mp.mpf("1.2"), mp.mpf("-0.5")], [mp.mpf("-0.1"), mp.mpf("0.9")]]
th = [mp.mpf("0.5"), mp.mpf("0.5")]
for _ in range(3):
    th = [A[0][0] * th[0] + A[0][1] * th[1], A[1][0] * th[0] + A[1][1] * th[1]]
    th = [max(x, 0) for x in th]
    s = mp.fsum(th)
    th = [x / s for x in th]
    print("{" + ", ".join(lit(x) for x in th) + "},")

PARAGRAPH = ("The quick-brown FOX jumped over 2 lazy dogs; a dog's life "
             "is NOT easy, e.g. in 2024 x-rays & A/B tests cost $5 each!")
section("tokens of the 20-word paragraph")
tokens = [t for t in re.split(r"[^a-z0-9\x80-\xff]+", PARAGRAPH.lower()) if len(t) >= 2]
print(", ".join(f'"{t}"' for t in tokens))

section("counts of the 50-token document")
words = ("alpha beta gamma delta alpha beta alpha epsilon zeta alpha "
         "beta gamma eta theta alpha iota kappa beta gamma alpha "
         "lambda mu alpha beta nu xi omicron alpha pi rho "
         "sigma tau alpha upsilon phi beta chi psi omega alpha "
         "beta gamma delta alpha beta alpha gamma delta alpha omega").split()
assert len(words) == 50
c = Counter(words)
print(f"{len(words)} tokens, {len(c)} distinct; alpha {c['alpha']}, beta {c['beta']}, "
      f"gamma {c['gamma']}, delta {c['delta']}, omega {c['omega']}")
