"""The exceptional geometry over GF(2)^6: pi_1 of order 2 and its simply connected double cover."""

from __future__ import annotations

from amalgam_lab.cover import build_cover, cover_distances, deck_regularity, verify_2cover
from amalgam_lab.homotopy import certify_trivial, pi1_presentation


def main():
    cv = build_cover()
    base = certify_trivial(pi1_presentation(cv.pi))
    print(f"base {cv.pi.name}: counts {cv.pi.type_counts()}, pi1 order {base.order}, "
          f"torsion {base.abelian.torsion}")
    rep = verify_2cover(cv)
    print(f"cover: counts {cv.geometry.type_counts()}, CO1 {rep.co1}, CO2 {rep.co2}")
    d = cover_distances(cv)
    print(f"d(Q+, Q-) = {d.q_plus_minus}; distinct base points within {d.max_distinct_base}; "
          f"fiber distances {sorted(set(d.fiber_distances.values()))}")
    deck = deck_regularity(cv)
    print(f"deck transformation swaps all {len(deck.swaps_at)} fibers: {all(deck.swaps_at.values())}; "
          f"random loops agreeing: {deck.random_agreement}/{deck.random_total}")
    top = certify_trivial(pi1_presentation(cv.geometry))
    print(f"pi1 of the cover: {top.status}")


if __name__ == "__main__":
    main()
