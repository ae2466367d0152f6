#!/usr/bin/env python3
"""Rebuild the frozen b-files in this directory from each sequence's
definition, for offline comparison. Terms n = 0..1023, offset 0.

Each file uses the OEIS b-file layout (`<n> <a(n)>` per line). They are
computed here rather than downloaded; replace them with the files from
oeis.org/<A>/b<digits>.txt when network access is available.
"""
from math import comb, prod
import os
import re

N = 1024


def runs(n):
    return [len(r) for r in re.findall("1+", bin(n)[2:])] if n else []


def rlt(seq):
    return lambda n: prod(seq[r] for r in runs(n))


fib = [0, 1]
while len(fib) < 64:
    fib.append(fib[-1] + fib[-2])

DEFS = {
    # Gould's sequence: number of odd entries in row n of Pascal's triangle.
    "A001316": ("Number of odd entries in row n of Pascal's triangle",
                lambda n: sum(comb(n, k) % 2 for k in range(n + 1))),
    # Run length transform of the Fibonacci numbers; run length i -> F(i+1).
    "A246028": ("Run Length Transform of Fibonacci numbers",
                rlt([1] + [fib[i + 1] for i in range(1, 40)])),
    # Run length transform of 1, 2, 3, 5, 8, ...; run length i -> F(i+2).
    "A245564": ("Run Length Transform of Fibonacci numbers 1, 2, 3, 5, 8, ...",
                rlt([1] + [fib[i + 2] for i in range(1, 40)])),
    # 2 to the number of (possibly overlapping) occurrences of 11 in binary n.
    "A245195": ("2^(number of times 11 occurs in binary expansion of n)",
                lambda n: 2 ** sum(1 for i in range(n.bit_length()) if (n >> i) & 3 == 3)),
    "A106737": ("Sum_{k=0..n} (binomial(n+k,n-k)*binomial(n,k) mod 2)",
                lambda n: sum(comb(n + k, n - k) * comb(n, k) % 2 for k in range(n + 1))),
    "A000012": ("The simplest sequence of positive numbers: the all 1's sequence", lambda n: 1),
}

here = os.path.dirname(os.path.abspath(__file__))
for anum, (title, f) in DEFS.items():
    with open(os.path.join(here, anum + ".txt"), "w") as out:
        out.write(f"# {anum}: {title}\n")
        out.write(f"# n = 0..{N - 1}, computed from the definition by regenerate.py\n")
        for n in range(N):
            out.write(f"{n} {f(n)}\n")
