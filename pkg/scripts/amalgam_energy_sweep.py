"""Sweep the closed-form amalgam energy against the projection-sum oracle.

Usage: python scripts/amalgam_energy_sweep.py [radius] [q]

For every reduced word in the ball of the given radius (generators a, b) of
Z/4 * Z/6 over Z/2 with naive quotient structures, print the word, its
syllable count, the tree distance, the oracle energy, the closed-form value
with the linear tree term, and the value with the (wrong) power tree term.
The last two columns agree exactly at q = 1 and split at q >= 2 as soon as
the tree distance reaches 2.
"""

import sys
from fractions import Fraction

from labparts.amalgam import (
    TreeOfCosetSpaces,
    amalgam_energy_formula,
    amalgam_space,
    naive_quotient_structures,
)
from labparts.core import pair_energy
from labparts.groups import ball_enumerate, z4_z6_amalgam


def word_str(am, word):
    parts = []
    for side, x in am.letters(word):
        name = "a" if side == "L" else "b"
        parts.append(name if x == 1 else f"{name}{x}")
    return ".".join(parts) if parts else "e"


def main():
    radius = int(sys.argv[1]) if len(sys.argv) > 1 else 4
    q = Fraction(sys.argv[2]) if len(sys.argv) > 2 else Fraction(2)

    am = z4_z6_amalgam()
    tree = TreeOfCosetSpaces(am)
    sgc, agc, shc, ahc = naive_quotient_structures(tree, q)
    space, _ = amalgam_space(tree, sgc, agc, shc, ahc, q)

    print(f"word | n | d_T | oracle | formula(linear) | formula(power), q={q}")
    mismatches = 0
    for gamma, _ in ball_enumerate(am, radius):
        x = tree.act_point(gamma, tree.base_point)
        d_t = tree.tree_distance(x.vertex, tree.base_vertex)
        oracle = pair_energy(space, x, tree.base_point)
        lin = amalgam_energy_formula(tree, sgc, shc, q, gamma, tree_term="linear")
        pow_ = amalgam_energy_formula(tree, sgc, shc, q, gamma, tree_term="power")
        flag = ""
        if lin != oracle:
            flag = "  <-- LINEAR MISMATCH"
        if pow_ != oracle:
            mismatches += 1
            flag += "  (power differs)"
        print(f"{word_str(am, gamma):>18} | {gamma.syllable_count} | {d_t} | {oracle} | {lin} | {pow_}{flag}")
    print(f"\npower-term mismatches: {mismatches}")


if __name__ == "__main__":
    main()
