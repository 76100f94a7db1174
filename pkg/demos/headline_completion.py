"""The slim amalgam for Sp_4(3) and its universal completion, computed two ways."""

from __future__ import annotations

from amalgam_lab.amalgams import build_slim_amalgam, check_coherence, completion_presentation, verify_completion
from amalgam_lab.symplectic import SympSpace


def main():
    a = build_slim_amalgam(SympSpace.standard(3, 4))
    print(a.name, {x: a.order(x) for x in a.members}, "coherent:", check_coherence(a).ok)
    for rel in ("Q11", "S12"):
        v = verify_completion(a, relative_to=rel)
        print(f"relative to {rel} (order {v.member_order}): index {v.index}, completion {v.completion_order}, "
              f"iso {v.iso}")
    cp = completion_presentation(a, shared=False)
    v = verify_completion(a, cp=cp)
    print(f"explicit identifications ({cp.presentation.ngens} generators): completion {v.completion_order}, "
          f"iso {v.iso}")


if __name__ == "__main__":
    main()
