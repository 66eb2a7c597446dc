"""Link invariants and local-move rewriting on planar diagram codes."""

from .diagram import (
    ArcId,
    Crossing,
    Diagram,
    DiagramError,
    SublinkSelector,
    disjoint_union,
    mirror_reverse,
    parse,
    sublink,
    validate,
)
from .invariants import (
    CapExceeded,
    ConwayPoly,
    InvariantProfile,
    arf_knot,
    arf_link,
    conway,
    hosokawa_a2_check,
    invariant_profile,
    is_proper,
    is_z2_split,
    linking_matrix,
    reduced_arf,
)
from .milnor import HomotopyVerdict, MuBar, WirtingerData, link_homotopy_verdict, mu_bar, wirtinger
from .moves import (
    BandSpec,
    MoveError,
    MoveSite,
    apply_move,
    band_sum,
    fuse_to_knot,
    is_self_move,
    random_move_sequence,
)
from .classify import Verdict, Witness, self_pass_verdict, self_sharp_verdict, theorem12_check
from . import catalog

__all__ = [
    "ArcId", "BandSpec", "CapExceeded", "ConwayPoly", "Crossing", "Diagram",
    "DiagramError", "HomotopyVerdict", "InvariantProfile", "MoveError",
    "MoveSite", "MuBar", "SublinkSelector", "Verdict", "WirtingerData",
    "Witness", "apply_move", "arf_knot", "arf_link", "band_sum", "catalog",
    "conway", "disjoint_union", "fuse_to_knot", "hosokawa_a2_check",
    "invariant_profile", "is_proper", "is_self_move", "is_z2_split",
    "link_homotopy_verdict", "linking_matrix", "mirror_reverse", "mu_bar",
    "parse", "random_move_sequence", "reduced_arf", "self_pass_verdict",
    "self_sharp_verdict", "sublink", "theorem12_check", "validate",
    "wirtinger",
]
