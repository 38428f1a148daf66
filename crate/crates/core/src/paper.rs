//! The five published `Q6` labelings and the fixed labels of the zero vertex's neighborhood.
//!
//! Tables are stored in the labeling text format, rows = high vertex bits (5..3),
//! columns = low vertex bits (2..0).

use crate::hypercube::{load_labeling, Labeling};

/// Labels forced onto vertex `2^i` for `i = 0..6`, with vertex 0 labeled 0.
pub const Q6_NEIGHBOR_LABELS: [u32; 6] = [4, 6, 36, 38, 52, 53];

pub const TABLE_COUNT: usize = 5;

const TABLES: [&str; TABLE_COUNT] = [
    include_str!("../data/table1_1.txt"),
    include_str!("../data/table1_2.txt"),
    include_str!("../data/table1_3.txt"),
    include_str!("../data/table1_4.txt"),
    include_str!("../data/table1_5.txt"),
];

/// Raw text of table `index` (1-based).
pub fn table_text(index: usize) -> Option<&'static str> {
    index.checked_sub(1).and_then(|i| TABLES.get(i)).copied()
}

/// Table `index` (1-based) as a labeling.
pub fn table(index: usize) -> Option<Labeling> {
    table_text(index).map(|t| load_labeling(t).expect("bundled table is well formed"))
}

pub fn tables() -> impl Iterator<Item = Labeling> {
    (1..=TABLE_COUNT).filter_map(table)
}
