"""Scan all built-in test pairs for their stabilization level and print the
almost characters with their twisting-operator eigenvalues."""

import time

from shintani.descent import FiniteDescentSession
from shintani.groups import automorphism, cyclic, identity_map, inner_map, permutation_group
from shintani.unipotent import unipotent_scan


def pairs():
    z3 = cyclic(3)
    z4 = cyclic(4)
    s3 = permutation_group([(1, 0, 2), (1, 2, 0)])
    d4 = permutation_group([(1, 2, 3, 0), (1, 0, 3, 2)])
    yield "(Z3, inv)", FiniteDescentSession(z3, automorphism(z3, [z3.index[2]]))
    yield "(Z4, inv)", FiniteDescentSession(z4, automorphism(z4, [z4.index[3]]))
    yield "(S3, id)", FiniteDescentSession(s3, identity_map(s3))
    yield "(S3, ad(12))", FiniteDescentSession(s3, inner_map(s3, 1))
    yield "(D4, id)", FiniteDescentSession(d4, identity_map(d4))


def main():
    for name, sess in pairs():
        t0 = time.time()
        res = sess.stabilization_scan(48)
        eig = sess.theta_eigencheck(res.almost_characters)
        print(f"{name}: m0 = {res.m0}, dim = {len(res.almost_characters)}, "
              f"theta eigenvalues {sorted(set(eig))}  [{time.time() - t0:.1f}s]")
        for m, cert in sorted(res.certificates.items()):
            ratios = sorted({str(r) for _, _, r in cert})
            print(f"    vs m={m}: ratios {ratios}")

    t0 = time.time()
    res = unipotent_scan(3, 2, 1, m_max=48)
    print(f"unitriangular(3, F_2) connected: m0 = {res.m0}, "
          f"dim = {len(res.almost_characters)}  [{time.time() - t0:.1f}s]")


if __name__ == "__main__":
    main()
