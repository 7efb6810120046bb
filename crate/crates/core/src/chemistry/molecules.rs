//! Small molecules with explicit hydrogens.

use crate::graph::MolGraph;

/// g0, CH2O.
pub fn formaldehyde() -> MolGraph {
    MolGraph::from_parts(&["C", "O", "H", "H"], &[(0, 1, "="), (0, 2, "-"), (0, 3, "-")])
        .unwrap()
}

/// g1, HOCH2-CHO.
pub fn glycolaldehyde() -> MolGraph {
    MolGraph::from_parts(
        &["C", "O", "H", "C", "H", "H", "O", "H"],
        &[
            (0, 1, "="),
            (0, 2, "-"),
            (0, 3, "-"),
            (3, 4, "-"),
            (3, 5, "-"),
            (3, 6, "-"),
            (6, 7, "-"),
        ],
    )
    .unwrap()
}

/// HO-CH=CH-OH, the enol of glycolaldehyde.
pub fn ethenediol() -> MolGraph {
    MolGraph::from_parts(
        &["C", "O", "H", "H", "C", "O", "H", "H"],
        &[
            (0, 1, "-"),
            (1, 2, "-"),
            (0, 3, "-"),
            (0, 4, "="),
            (4, 5, "-"),
            (5, 6, "-"),
            (4, 7, "-"),
        ],
    )
    .unwrap()
}

/// HOCH2-CH(OH)-CHO.
pub fn glyceraldehyde() -> MolGraph {
    MolGraph::from_parts(
        &["C", "O", "H", "C", "H", "O", "H", "C", "H", "H", "O", "H"],
        &[
            (0, 1, "="),
            (0, 2, "-"),
            (0, 3, "-"),
            (3, 4, "-"),
            (3, 5, "-"),
            (5, 6, "-"),
            (3, 7, "-"),
            (7, 8, "-"),
            (7, 9, "-"),
            (7, 10, "-"),
            (10, 11, "-"),
        ],
    )
    .unwrap()
}

/// H2O.
pub fn water() -> MolGraph {
    MolGraph::from_parts(&["O", "H", "H"], &[(0, 1, "-"), (0, 2, "-")]).unwrap()
}

/// Number of non-hydrogen atoms.
pub fn heavy_atom_count(g: &MolGraph) -> usize {
    g.labels().iter().filter(|l| l.as_str() != "H").count()
}
