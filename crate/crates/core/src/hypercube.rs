//! Hypercube `Q_n`, vertex labelings and the distance magic / neighbor-balanced checks.
//!
//! Vertices are the integers `0..2^n`. The neighbor of `v` in direction `i` is `v ^ (1 << i)`,
//! and the digit of a label at position `i` is the bit of weight `2^i`, so digit positions and
//! neighbor directions share the same indexing.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

/// Largest supported dimension; `2^n` labels have to fit in memory.
pub const MAX_DIMENSION: u32 = 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension {0} out of range 1..={MAX_DIMENSION}")]
    Dimension(u32),
    #[error("magic constant undefined (non-integer) for odd n = {0}")]
    MagicUndefined(u32),
    #[error("balance undefined for odd n = {0}")]
    BalanceUndefined(u32),
    #[error("vertex {vertex} out of range for Q{n}")]
    VertexOutOfRange { n: u32, vertex: u32 },
    #[error("expected {expected} labels, got {got}")]
    LabelCount { expected: usize, got: usize },
    #[error("label {label} at vertex {vertex} exceeds {max}")]
    LabelOutOfRange { vertex: u32, label: u32, max: u32 },
    #[error("labeling is not a permutation (vertex {vertex} repeats label {label})")]
    NotPermutation { vertex: u32, label: u32 },
    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

/// Number of hypercube dimensions, `1..=MAX_DIMENSION`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Dimension(u32);

impl Dimension {
    pub fn new(n: u32) -> Result<Self> {
        if (1..=MAX_DIMENSION).contains(&n) {
            Ok(Dimension(n))
        } else {
            Err(Error::Dimension(n))
        }
    }

    pub fn get(self) -> u32 {
        self.0
    }

    /// Number of vertices, `2^n`.
    pub fn order(self) -> usize {
        1usize << self.0
    }

    pub fn is_even(self) -> bool {
        self.0.is_multiple_of(2)
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// The common neighbor-label sum of a distance magic labeling, `n(2^n - 1)/2`.
pub fn magic_constant(n: Dimension) -> Result<u64> {
    if !n.is_even() {
        return Err(Error::MagicUndefined(n.get()));
    }
    let n64 = n.get() as u64;
    Ok(n64 / 2 * ((1u64 << n64) - 1))
}

/// Whether `Q_n` admits a distance magic labeling: exactly when `n ≡ 2 (mod 4)`.
pub fn dml_exists(n: Dimension) -> bool {
    n.get() % 4 == 2
}

/// Neighbors of `v` in increasing direction order.
pub fn neighbors(n: Dimension, v: u32) -> Result<Vec<u32>> {
    check_vertex(n, v)?;
    Ok(neighbors_unchecked(n, v).collect())
}

fn neighbors_unchecked(n: Dimension, v: u32) -> impl Iterator<Item = u32> {
    (0..n.get()).map(move |i| v ^ (1 << i))
}

fn check_vertex(n: Dimension, v: u32) -> Result<()> {
    if (v as usize) < n.order() {
        Ok(())
    } else {
        Err(Error::VertexOutOfRange {
            n: n.get(),
            vertex: v,
        })
    }
}

/// An assignment of labels `0..2^n` to the vertices of `Q_n`, indexed by vertex.
///
/// Construction checks length and label range only. Whether the labels form a
/// permutation is left to [`verify_dml`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Labeling {
    dim: Dimension,
    labels: Vec<u32>,
}

impl Labeling {
    pub fn new(dim: Dimension, labels: Vec<u32>) -> Result<Self> {
        if labels.len() != dim.order() {
            return Err(Error::LabelCount {
                expected: dim.order(),
                got: labels.len(),
            });
        }
        let max = (dim.order() - 1) as u32;
        if let Some((v, &l)) = labels.iter().enumerate().find(|(_, &l)| l > max) {
            return Err(Error::LabelOutOfRange {
                vertex: v as u32,
                label: l,
                max,
            });
        }
        Ok(Labeling { dim, labels })
    }

    /// `label(v) = v`.
    pub fn identity(dim: Dimension) -> Self {
        Labeling {
            dim,
            labels: (0..dim.order() as u32).collect(),
        }
    }

    pub fn dim(&self) -> Dimension {
        self.dim
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn label(&self, v: u32) -> u32 {
        self.labels[v as usize]
    }

    /// First vertex whose label already appeared at a smaller vertex.
    fn first_repeat(&self) -> Option<(u32, u32)> {
        let mut seen = vec![false; self.dim.order()];
        for (v, &l) in self.labels.iter().enumerate() {
            if std::mem::replace(&mut seen[l as usize], true) {
                return Some((v as u32, l));
            }
        }
        None
    }

    pub fn is_permutation(&self) -> bool {
        self.first_repeat().is_none()
    }
}

/// Sum of the labels on the neighbors of `v`.
pub fn neighbor_sum(lab: &Labeling, v: u32) -> Result<u64> {
    check_vertex(lab.dim, v)?;
    Ok(neighbors_unchecked(lab.dim, v)
        .map(|u| lab.label(u) as u64)
        .sum())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// `vertex` carries a label already used by a smaller vertex.
    Repeated { vertex: u32, label: u32 },
    /// No common sum exists for odd dimensions.
    MagicUndefined,
    MagicSum {
        vertex: u32,
        sum: u64,
        expected: u64,
    },
}

impl Violation {
    pub fn vertex(&self) -> u32 {
        match *self {
            Violation::Repeated { vertex, .. } | Violation::MagicSum { vertex, .. } => vertex,
            Violation::MagicUndefined => 0,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Repeated { vertex, label } => {
                write!(f, "label {label} repeated at vertex {vertex}")
            }
            Violation::MagicUndefined => write!(f, "magic constant undefined for odd n"),
            Violation::MagicSum {
                vertex,
                sum,
                expected,
            } => write!(f, "neighbor sum {sum} ≠ {expected} at vertex {vertex}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Valid,
    Invalid(Violation),
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, Verdict::Valid)
    }
}

/// Checks the permutation property, then every neighbor sum against the magic constant,
/// reporting the first failure.
pub fn verify_dml(lab: &Labeling) -> Verdict {
    if let Some((vertex, label)) = lab.first_repeat() {
        return Verdict::Invalid(Violation::Repeated { vertex, label });
    }
    let Ok(expected) = magic_constant(lab.dim) else {
        return Verdict::Invalid(Violation::MagicUndefined);
    };
    for v in 0..lab.dim.order() as u32 {
        let sum: u64 = neighbors_unchecked(lab.dim, v)
            .map(|u| lab.label(u) as u64)
            .sum();
        if sum != expected {
            return Verdict::Invalid(Violation::MagicSum {
                vertex: v,
                sum,
                expected,
            });
        }
    }
    Verdict::Valid
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BalanceWitness {
    pub vertex: u32,
    pub bit: u32,
    pub count: u32,
}

/// Per-vertex, per-digit counts of neighbor labels having a 1 at that digit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BalanceReport {
    pub n: Dimension,
    pub balanced: bool,
    /// `counts[v][i]`: neighbors of `v` whose label has bit `i` set.
    pub counts: Vec<Vec<u32>>,
    /// Entries differing from `n/2`, in (vertex, bit) order.
    pub witnesses: Vec<BalanceWitness>,
}

pub fn balance_report(lab: &Labeling) -> Result<BalanceReport> {
    let n = lab.dim;
    if !n.is_even() {
        return Err(Error::BalanceUndefined(n.get()));
    }
    if let Some((vertex, label)) = lab.first_repeat() {
        return Err(Error::NotPermutation { vertex, label });
    }
    let half = n.get() / 2;
    let mut counts = Vec::with_capacity(n.order());
    let mut witnesses = Vec::new();
    for v in 0..n.order() as u32 {
        let mut row = vec![0u32; n.get() as usize];
        for u in neighbors_unchecked(n, v) {
            let l = lab.label(u);
            for (i, c) in row.iter_mut().enumerate() {
                *c += (l >> i) & 1;
            }
        }
        witnesses.extend(
            row.iter()
                .enumerate()
                .filter(|(_, &c)| c != half)
                .map(|(i, &c)| BalanceWitness {
                    vertex: v,
                    bit: i as u32,
                    count: c,
                }),
        );
        counts.push(row);
    }
    Ok(BalanceReport {
        n,
        balanced: witnesses.is_empty(),
        counts,
        witnesses,
    })
}

/// Parses the labeling text format: a header line `n <dimension>` followed by `2^n`
/// whitespace-separated labels in vertex order.
pub fn load_labeling(text: &str) -> Result<Labeling> {
    let mut tokens = text.lines().enumerate().flat_map(|(ln, line)| {
        line.split_whitespace().map(move |tok| {
            // byte offset of the token within its line; tokens are subslices of `line`
            let col = tok.as_ptr() as usize - line.as_ptr() as usize + 1;
            (ln + 1, col, tok)
        })
    });
    let parse_err = |line, column, message: String| Error::Parse {
        line,
        column,
        message,
    };

    let (line, column, head) = tokens
        .next()
        .ok_or_else(|| parse_err(1, 1, "empty input, expected header `n <dimension>`".into()))?;
    if head != "n" {
        return Err(parse_err(
            line,
            column,
            format!("expected `n`, found `{head}`"),
        ));
    }
    let (line, column, tok) = tokens
        .next()
        .ok_or_else(|| parse_err(line, column + 1, "missing dimension".into()))?;
    let n = tok
        .parse::<u32>()
        .map_err(|_| parse_err(line, column, format!("invalid dimension `{tok}`")))
        .and_then(|n| Dimension::new(n).map_err(|e| parse_err(line, column, e.to_string())))?;

    let max = (n.order() - 1) as u32;
    let mut labels = Vec::with_capacity(n.order());
    let mut last = (line, column);
    for (line, column, tok) in tokens {
        if labels.len() == n.order() {
            return Err(parse_err(
                line,
                column,
                format!("unexpected token `{tok}` after {} labels", n.order()),
            ));
        }
        let l = tok
            .parse::<u32>()
            .map_err(|_| parse_err(line, column, format!("invalid label `{tok}`")))?;
        if l > max {
            return Err(parse_err(line, column, format!("label {l} exceeds {max}")));
        }
        labels.push(l);
        last = (line, column);
    }
    if labels.len() != n.order() {
        return Err(parse_err(
            last.0,
            last.1,
            format!("expected {} labels, found {}", n.order(), labels.len()),
        ));
    }
    Labeling::new(n, labels)
}

/// Writes the labeling as a grid: rows indexed by the high `⌊n/2⌋` vertex bits, columns by
/// the remaining low bits. For `n = 6` this is the familiar 8×8 table.
pub fn store_labeling(lab: &Labeling) -> String {
    let n = lab.dim.get();
    let cols = 1usize << (n - n / 2);
    let width = ((lab.dim.order() - 1).max(1)).to_string().len();
    let mut out = format!("n {n}\n");
    for row in lab.labels.chunks(cols) {
        let cells: Vec<String> = row.iter().map(|l| format!("{l:>width$}")).collect();
        out.push_str(&cells.join(" "));
        out.push('\n');
    }
    out
}

impl FromStr for Labeling {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        load_labeling(s)
    }
}

impl fmt::Display for Labeling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&store_labeling(self))
    }
}
