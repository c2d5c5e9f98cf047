"""Print the unitary matrix relating the m-th Shintani basis to the
irreducible characters of the pure inner forms, for one test pair."""

import argparse

from shintani.descent import FiniteDescentSession
from shintani.groups import automorphism, cyclic, identity_map, inner_map, permutation_group


def build(pair):
    if pair == "z3inv":
        z3 = cyclic(3)
        return FiniteDescentSession(z3, automorphism(z3, [z3.index[2]]))
    if pair == "z4inv":
        z4 = cyclic(4)
        return FiniteDescentSession(z4, automorphism(z4, [z4.index[3]]))
    if pair == "s3":
        s3 = permutation_group([(1, 0, 2), (1, 2, 0)])
        return FiniteDescentSession(s3, identity_map(s3))
    if pair == "s3ad":
        s3 = permutation_group([(1, 0, 2), (1, 2, 0)])
        return FiniteDescentSession(s3, inner_map(s3, 1))
    if pair == "d4":
        d4 = permutation_group([(1, 2, 3, 0), (1, 0, 3, 2)])
        return FiniteDescentSession(d4, identity_map(d4))
    raise SystemExit(f"unknown pair {pair!r}")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("pair", choices=["z3inv", "z4inv", "s3", "s3ad", "d4"])
    ap.add_argument("--m", type=int, default=1)
    args = ap.parse_args()
    sess = build(args.pair)
    mat = sess.shintani_matrix(args.m)
    labels = [lab for lab, _, _ in sess.f_fixed(args.m)]
    cols = [lab for lab, _ in sess.irrep_family(1)]
    print("columns:", [(lab.form, lab.row) for lab in cols])
    for lab, row in zip(labels, mat):
        print(f"W(form={lab.form}, row={lab.row}):", [str(v) for v in row])


if __name__ == "__main__":
    main()
