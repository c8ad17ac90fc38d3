"""Left derived functors of ``- (x) A`` from two kinds of free resolutions.

Run with ``python3 demos/derived_functors.py``.  For each group ``M`` we
build a free presimplicial resolution and a free pseudocubical resolution,
apply ``- (x) A`` levelwise and take homology.  Both are compared with Tor
computed from the two-term presentation of ``M``.  Changing the seed
changes the resolution (extra generators, different bases) but never the
answer.
"""

from cubix.derive import (
    FpModule,
    build_pseudocubical_resolution,
    derived_cubical,
    derived_simplicial,
    parse_functor,
    tor_oracle,
)

CASES = [("Z/6", "Z/4"), ("Z+Z/2", "Z/2"), ("Z/3", "Z/2")]


def main():
    for group, coeff in CASES:
        m, f = FpModule.parse(group), parse_functor(f"tensor:{coeff}")
        print(f"M = {group}, A = {coeff}")
        for n in range(3):
            row = [str(derived_simplicial(m, f, n)), str(derived_cubical(m, f, n)), str(tor_oracle(m, f, n))]
            print(f"  L_{n}: simplicial {row[0]:10s} cubical {row[1]:10s} Tor {row[2]}")
        for seed in (0, 1):
            ranks = build_pseudocubical_resolution(m, 3, seed).ranks
            values = [str(derived_cubical(m, f, n, seed)) for n in range(2)]
            print(f"  seed {seed}: cubical ranks {ranks}, L_0, L_1 = {', '.join(values)}")


if __name__ == "__main__":
    main()
