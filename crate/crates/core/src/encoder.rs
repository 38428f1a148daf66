//! CNF encoding of the search for distance magic labelings of `Q_n`.
//!
//! Variable layout: bit `i` of the label of vertex `v` is variable `v·n + i + 1`, so the
//! `n·2^n` label bits occupy the first variables in `(v, i)` lexicographic order. Auxiliary
//! variables follow in construction order: distinctness gadgets for all vertex pairs, then
//! one adder tree per vertex.

use log::info;
use thiserror::Error;

use crate::cnf::{Cnf, CnfError, Lit, Var};
use crate::hypercube::{self, magic_constant, Dimension, Labeling};
use crate::paper::Q6_NEIGHBOR_LABELS;
use crate::solver::Model;

pub const ENCODER_VERSION: &str = concat!("hypercube-dml ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EncodeError {
    #[error("bit-vector length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("target {target} not representable as a sum (max {max})")]
    TargetOutOfRange { target: u64, max: u64 },
    #[error("the fixed prefix is defined only for n = 6 (got n = {0})")]
    PrefixNeedsQ6(u32),
    #[error(transparent)]
    Magic(#[from] hypercube::Error),
    #[error("labeling has dimension {got}, instance has {expected}")]
    DimensionMismatch { expected: u32, got: u32 },
    #[error("model leaves label variable {0} unassigned")]
    Unassigned(u32),
    #[error(transparent)]
    Cnf(#[from] CnfError),
}

/// Which constraint families to emit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EncodeOptions {
    pub distinct: bool,
    pub sums: bool,
    pub fixed_prefix: bool,
}

impl EncodeOptions {
    /// Distinctness and sums, no fixed prefix.
    pub fn full() -> Self {
        EncodeOptions {
            distinct: true,
            sums: true,
            fixed_prefix: false,
        }
    }

    pub fn with_prefix(self, fixed_prefix: bool) -> Self {
        EncodeOptions {
            fixed_prefix,
            ..self
        }
    }
}

impl Default for EncodeOptions {
    fn default() -> Self {
        Self::full()
    }
}

/// Size contributed by each constraint family.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PartStats {
    pub vars: u32,
    pub clauses: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct InstanceStats {
    pub label_vars: u32,
    pub distinct: PartStats,
    pub sums: PartStats,
    pub prefix: PartStats,
}

/// A built instance together with the map needed to decode its models.
#[derive(Debug, Clone)]
pub struct EncodingArtifacts {
    dim: Dimension,
    cnf: Cnf,
    options: EncodeOptions,
    fixed_prefix: Option<Vec<(u32, u32)>>,
    stats: InstanceStats,
}

impl EncodingArtifacts {
    /// Allocates the label-bit variables of an otherwise empty instance.
    pub fn new(dim: Dimension) -> Self {
        let mut cnf = Cnf::new();
        let label_vars = dim.get() * dim.order() as u32;
        cnf.fresh_vars(label_vars);
        EncodingArtifacts {
            dim,
            cnf,
            options: EncodeOptions {
                distinct: false,
                sums: false,
                fixed_prefix: false,
            },
            fixed_prefix: None,
            stats: InstanceStats {
                label_vars,
                ..Default::default()
            },
        }
    }

    pub fn dim(&self) -> Dimension {
        self.dim
    }

    pub fn cnf(&self) -> &Cnf {
        &self.cnf
    }

    pub fn cnf_mut(&mut self) -> &mut Cnf {
        &mut self.cnf
    }

    pub fn into_cnf(self) -> Cnf {
        self.cnf
    }

    pub fn options(&self) -> EncodeOptions {
        self.options
    }

    pub fn stats(&self) -> InstanceStats {
        self.stats
    }

    /// `(vertex, label)` pairs fixed by [`encode_fixed_prefix`], if applied.
    pub fn fixed_prefix(&self) -> Option<&[(u32, u32)]> {
        self.fixed_prefix.as_deref()
    }

    pub fn label_var(&self, v: u32, bit: u32) -> Var {
        debug_assert!((v as usize) < self.dim.order() && bit < self.dim.get());
        Var::new(v * self.dim.get() + bit + 1)
    }

    /// Label bits of `v`, least significant first.
    pub fn label_bits(&self, v: u32) -> Vec<Lit> {
        (0..self.dim.get())
            .map(|i| self.label_var(v, i).pos())
            .collect()
    }

    /// The `n·2^n` label-bit variables, in layout order.
    pub fn label_vars(&self) -> Vec<Var> {
        (1..=self.stats.label_vars).map(Var::new).collect()
    }

    fn measure<T>(
        &mut self,
        f: impl FnOnce(&mut Self) -> Result<T, EncodeError>,
    ) -> Result<(T, PartStats), EncodeError> {
        let before = self.cnf.stats();
        let out = f(self)?;
        let after = self.cnf.stats();
        Ok((
            out,
            PartStats {
                vars: after.num_vars - before.num_vars,
                clauses: after.num_clauses - before.num_clauses,
            },
        ))
    }
}

/// Asserts that two equal-length bit-vectors differ.
///
/// Emits fresh `d_1..d_n` with `d_i → x_i ≠ y_i` (two clauses each) and the clause
/// `d_1 ∨ … ∨ d_n`: `n` variables and `2n + 1` clauses. Returns the `d_i`.
pub fn encode_pair_distinct(
    cnf: &mut Cnf,
    xs: &[Lit],
    ys: &[Lit],
) -> Result<Vec<Var>, EncodeError> {
    if xs.len() != ys.len() {
        return Err(EncodeError::LengthMismatch(xs.len(), ys.len()));
    }
    let ds = cnf.fresh_vars(xs.len() as u32);
    for ((&x, &y), d) in xs.iter().zip(ys).zip(&ds) {
        cnf.add_clause([d.neg(), x, y])?;
        cnf.add_clause([d.neg(), !x, !y])?;
    }
    cnf.add_clause(ds.iter().map(|d| d.pos()))?;
    Ok(ds)
}

/// One distinctness gadget per unordered vertex pair `u < v`, in lexicographic order.
pub fn encode_all_distinct(art: &mut EncodingArtifacts) -> Result<(), EncodeError> {
    let order = art.dim.order() as u32;
    let bits: Vec<Vec<Lit>> = (0..order).map(|v| art.label_bits(v)).collect();
    let ((), part) = art.measure(|art| {
        for u in 0..order {
            for v in u + 1..order {
                encode_pair_distinct(&mut art.cnf, &bits[u as usize], &bits[v as usize])?;
            }
        }
        Ok(())
    })?;
    art.stats.distinct = part;
    art.options.distinct = true;
    Ok(())
}

/// A bit-vector produced by the adder tree, with an upper bound on its value.
struct Bits {
    lits: Vec<Lit>,
    max: u64,
}

fn bit_len(x: u64) -> usize {
    (u64::BITS - x.leading_zeros()) as usize
}

/// `s ↔ a ⊕ b`, `c ↔ a ∧ b`.
fn half_adder(
    cnf: &mut Cnf,
    a: Lit,
    b: Lit,
    want_carry: bool,
) -> Result<(Lit, Option<Lit>), CnfError> {
    let s = cnf.fresh_var().pos();
    cnf.add_clause([!s, a, b])?;
    cnf.add_clause([!s, !a, !b])?;
    cnf.add_clause([s, !a, b])?;
    cnf.add_clause([s, a, !b])?;
    if !want_carry {
        return Ok((s, None));
    }
    let c = cnf.fresh_var().pos();
    cnf.add_clause([!c, a])?;
    cnf.add_clause([!c, b])?;
    cnf.add_clause([c, !a, !b])?;
    Ok((s, Some(c)))
}

/// `s ↔ a ⊕ b ⊕ cin`, `c ↔ maj(a, b, cin)`.
fn full_adder(
    cnf: &mut Cnf,
    a: Lit,
    b: Lit,
    cin: Lit,
    want_carry: bool,
) -> Result<(Lit, Option<Lit>), CnfError> {
    let s = cnf.fresh_var().pos();
    for mask in 0u8..8 {
        // clause excludes the input pattern given by `mask` paired with the wrong sum bit
        let pick = |k: usize, l: Lit| if mask >> k & 1 == 1 { !l } else { l };
        let parity = mask.count_ones() % 2 == 1;
        cnf.add_clause([
            if parity { s } else { !s },
            pick(0, a),
            pick(1, b),
            pick(2, cin),
        ])?;
    }
    if !want_carry {
        return Ok((s, None));
    }
    let c = cnf.fresh_var().pos();
    for (x, y) in [(a, b), (a, cin), (b, cin)] {
        cnf.add_clause([!c, x, y])?;
        cnf.add_clause([c, !x, !y])?;
    }
    Ok((s, Some(c)))
}

/// Ripple-carry addition. The result width is exactly `bit_len(a.max + b.max)`; a top carry
/// that can never be set is not materialized.
fn add_bits(cnf: &mut Cnf, a: &Bits, b: &Bits) -> Result<Bits, CnfError> {
    let max = a.max + b.max;
    let width = bit_len(max);
    let span = a.lits.len().max(b.lits.len());
    let mut out = Vec::with_capacity(width);
    let mut carry: Option<Lit> = None;
    for i in 0..span {
        let want_carry = i + 1 < width;
        let inputs: Vec<Lit> = [a.lits.get(i).copied(), b.lits.get(i).copied(), carry]
            .into_iter()
            .flatten()
            .collect();
        let (s, c) = match inputs[..] {
            [x] => (x, None),
            [x, y] => half_adder(cnf, x, y, want_carry)?,
            [x, y, z] => full_adder(cnf, x, y, z, want_carry)?,
            _ => unreachable!("at least one operand covers position {i}"),
        };
        out.push(s);
        carry = c;
    }
    if let Some(c) = carry {
        if out.len() < width {
            out.push(c);
        }
    }
    debug_assert_eq!(out.len(), width);
    Ok(Bits { lits: out, max })
}

fn add_tree(cnf: &mut Cnf, addends: &[Bits]) -> Result<Bits, CnfError> {
    match addends {
        [] => Ok(Bits {
            lits: Vec::new(),
            max: 0,
        }),
        [one] => Ok(Bits {
            lits: one.lits.clone(),
            max: one.max,
        }),
        _ => {
            let mid = addends.len() / 2;
            let lo = add_tree(cnf, &addends[..mid])?;
            let hi = add_tree(cnf, &addends[mid..])?;
            add_bits(cnf, &lo, &hi)
        }
    }
}

/// Constrains the sum of `addends` (each a little-endian bit-vector) to equal `target`.
///
/// Builds a balanced binary tree of ripple-carry adders over fresh auxiliary variables and
/// fixes the `w = ⌈log2(max + 1)⌉` output bits by unit clauses, where `max` is the largest
/// representable sum. Returns the auxiliary variables allocated.
pub fn encode_sum_equals(
    cnf: &mut Cnf,
    addends: &[Vec<Lit>],
    target: u64,
) -> Result<Vec<Var>, EncodeError> {
    let bounded: Vec<Bits> = addends
        .iter()
        .map(|lits| Bits {
            max: if lits.len() >= 64 {
                u64::MAX
            } else {
                (1u64 << lits.len()) - 1
            },
            lits: lits.clone(),
        })
        .collect();
    let max = bounded
        .iter()
        .try_fold(0u64, |acc, b| acc.checked_add(b.max))
        .unwrap_or(u64::MAX);
    if target > max {
        return Err(EncodeError::TargetOutOfRange { target, max });
    }
    let first_aux = cnf.num_vars() + 1;
    let sum = add_tree(cnf, &bounded)?;
    for (i, &bit) in sum.lits.iter().enumerate() {
        cnf.add_unit(if target >> i & 1 == 1 { bit } else { !bit })?;
    }
    Ok((first_aux..=cnf.num_vars()).map(Var::new).collect())
}

/// For every vertex, the neighbor labels sum to the magic constant.
pub fn encode_all_sums(art: &mut EncodingArtifacts) -> Result<(), EncodeError> {
    let target = magic_constant(art.dim)?;
    let n = art.dim;
    let ((), part) = art.measure(|art| {
        for v in 0..n.order() as u32 {
            let addends: Vec<Vec<Lit>> = hypercube::neighbors(n, v)?
                .into_iter()
                .map(|u| art.label_bits(u))
                .collect();
            encode_sum_equals(&mut art.cnf, &addends, target)?;
        }
        Ok(())
    })?;
    art.stats.sums = part;
    art.options.sums = true;
    Ok(())
}

/// Fixes label 0 on vertex 0 and `Q6_NEIGHBOR_LABELS[i]` on vertex `2^i` (42 unit clauses).
pub fn encode_fixed_prefix(art: &mut EncodingArtifacts) -> Result<(), EncodeError> {
    if art.dim.get() != 6 {
        return Err(EncodeError::PrefixNeedsQ6(art.dim.get()));
    }
    let fixed: Vec<(u32, u32)> = std::iter::once((0, 0))
        .chain(
            Q6_NEIGHBOR_LABELS
                .iter()
                .enumerate()
                .map(|(i, &l)| (1 << i, l)),
        )
        .collect();
    let ((), part) = art.measure(|art| {
        for &(v, label) in &fixed {
            fix_label(art, v, label)?;
        }
        Ok(())
    })?;
    art.stats.prefix = part;
    art.fixed_prefix = Some(fixed);
    art.options.fixed_prefix = true;
    Ok(())
}

fn fix_label(art: &mut EncodingArtifacts, v: u32, label: u32) -> Result<(), CnfError> {
    for i in 0..art.dim.get() {
        let var = art.label_var(v, i);
        art.cnf.add_unit(var.lit(label >> i & 1 == 1))?;
    }
    Ok(())
}

/// Fixes every label bit to the given labeling.
pub fn fix_labeling(art: &mut EncodingArtifacts, lab: &Labeling) -> Result<(), EncodeError> {
    if lab.dim() != art.dim {
        return Err(EncodeError::DimensionMismatch {
            expected: art.dim.get(),
            got: lab.dim().get(),
        });
    }
    for v in 0..art.dim.order() as u32 {
        fix_label(art, v, lab.label(v))?;
    }
    Ok(())
}

/// Builds the full instance for `Q_n` with the selected constraint families.
pub fn build_instance(
    n: Dimension,
    options: EncodeOptions,
) -> Result<EncodingArtifacts, EncodeError> {
    if options.sums {
        magic_constant(n)?;
    }
    if options.fixed_prefix && n.get() != 6 {
        return Err(EncodeError::PrefixNeedsQ6(n.get()));
    }
    let mut art = EncodingArtifacts::new(n);
    if options.distinct {
        encode_all_distinct(&mut art)?;
    }
    if options.sums {
        encode_all_sums(&mut art)?;
    }
    if options.fixed_prefix {
        encode_fixed_prefix(&mut art)?;
    }

    let cnf = &mut art.cnf;
    cnf.add_comment(format!("distance magic labeling of Q{n}"));
    cnf.add_comment(format!("encoder: {ENCODER_VERSION}"));
    cnf.add_comment(format!(
        "n={n} distinct={} sums={} fixed_prefix={}",
        options.distinct, options.sums, options.fixed_prefix
    ));
    cnf.add_comment(format!(
        "layout: variable v*{n}+i+1 is bit i (weight 2^i) of label(v), v < {}",
        n.order()
    ));
    let stats = art.stats;
    info!(
        "Q{n}: {} vars, {} clauses (labels {}, distinct {}/{}, sums {}/{}, prefix {})",
        art.cnf.num_vars(),
        art.cnf.clauses().len(),
        stats.label_vars,
        stats.distinct.vars,
        stats.distinct.clauses,
        stats.sums.vars,
        stats.sums.clauses,
        stats.prefix.clauses,
    );
    Ok(art)
}

/// Reads labels back from the label-bit variables of a model. No validity check.
pub fn decode_model(art: &EncodingArtifacts, model: &Model) -> Result<Labeling, EncodeError> {
    let n = art.dim;
    let mut labels = Vec::with_capacity(n.order());
    for v in 0..n.order() as u32 {
        let mut label = 0;
        for i in 0..n.get() {
            let var = art.label_var(v, i);
            match model.value(var) {
                Some(true) => label |= 1 << i,
                Some(false) => {}
                None => return Err(EncodeError::Unassigned(var.index())),
            }
        }
        labels.push(label);
    }
    Ok(Labeling::new(n, labels)?)
}
