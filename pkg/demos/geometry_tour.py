"""Build Gamma(V) for a few small symplectic spaces and run the structural checks."""

from __future__ import annotations

from amalgam_lab.builders import GammaSpec, build_gamma, residue_iso_phi
from amalgam_lab.geometry import check_geometry
from amalgam_lab.homotopy import certify_trivial, pi1_presentation


def main():
    for q, n in ((2, 4), (3, 4), (2, 5), (2, 6)):
        g = build_gamma(GammaSpec(q, n))
        rep = check_geometry(g)
        phi = residue_iso_phi(g, g.objects_of_type(1)[0])
        v = certify_trivial(pi1_presentation(g))
        print(f"{g.name}: counts {g.type_counts()}, chambers {g.count_flags(g.types)}, "
              f"diameter {rep.point_diameter}, point residue ~ Pi: {phi.certified}, pi1 {v.status} ({v.order})")


if __name__ == "__main__":
    main()
