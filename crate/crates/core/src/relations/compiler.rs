//! Lowering of bounded linear systems over `Z_q'` and native rows over `Z_q`
//! into a single quadratic statement over `Z_q`.
//!
//! Witness elements live in named segments. A lifted row `Σ c·x ≡ t (mod q')`
//! becomes the exact integer identity `Σ c·x - q'·v = t` with centered `c`, `t`
//! and a bounded slack `v`; it holds mod `q` iff it holds over the integers as
//! long as `q` exceeds the row's worst-case magnitude.

use crate::error::{Error, Result};
use crate::lattice::{range_decompose, range_gadget, range_width, Modulus, SparseZqMatrix, ZqVector};
use crate::zk::{QuadraticStatement, QuadraticWitness, Triple};
use std::ops::Range;

/// How the elements of a segment are represented among the witness coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Encoding {
    /// One coordinate per element, constrained to `{0, 1}`.
    Bits,
    /// Element in `[-β, β]`, stored as range-gadget bits of `x + β`.
    Range(u64),
    /// One unconstrained coordinate per element with `|x| <= bound` promised by other rows.
    Free(u64),
}

impl Encoding {
    pub fn width(self) -> usize {
        match self {
            Encoding::Bits | Encoding::Free(_) => 1,
            Encoding::Range(0) => 0,
            Encoding::Range(b) => range_width(b),
        }
    }

    /// Largest absolute value an element can take.
    pub fn bound(self) -> u64 {
        match self {
            Encoding::Bits => 1,
            Encoding::Range(b) | Encoding::Free(b) => b,
        }
    }

    fn is_binary(self) -> bool {
        !matches!(self, Encoding::Free(_))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SegmentId(usize);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Segment {
    pub name: String,
    /// First witness coordinate.
    pub offset: usize,
    /// Number of elements.
    pub len: usize,
    pub encoding: Encoding,
}

impl Segment {
    pub fn coords(&self) -> Range<usize> {
        self.offset..self.offset + self.len * self.encoding.width()
    }
}

/// Disjoint named segments covering the witness coordinates.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WitnessLayout {
    segments: Vec<Segment>,
    n_vars: usize,
}

impl WitnessLayout {
    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn get(&self, id: SegmentId) -> &Segment {
        &self.segments[id.0]
    }

    pub fn id(&self, name: &str) -> Result<SegmentId> {
        self.segments
            .iter()
            .position(|s| s.name == name)
            .map(SegmentId)
            .ok_or_else(|| Error::Dimension(format!("no segment named {name}")))
    }

    fn push(&mut self, name: &str, len: usize, encoding: Encoding) -> SegmentId {
        let seg = Segment { name: name.to_string(), offset: self.n_vars, len, encoding };
        self.n_vars = seg.coords().end;
        self.segments.push(seg);
        SegmentId(self.segments.len() - 1)
    }
}

/// How a coefficient enters the lifted-row magnitude bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coef {
    /// Entry of a public matrix: counted at the worst case `(q'-1)/2`, so the
    /// bound does not depend on the instance.
    Public,
    /// Structural constant, counted at its actual centered size.
    Exact,
}

#[derive(Clone, Copy, Debug)]
struct Term {
    seg: SegmentId,
    idx: u32,
    /// Centered mod `q'` for lifted rows, canonical mod `q` for native ones.
    coef: i64,
}

#[derive(Clone, Debug)]
struct Row {
    terms: Vec<Term>,
    rhs: i64,
    lifted: bool,
}

/// A row under construction; hand it back to [`RelationBuilder::push`].
#[derive(Clone, Debug)]
pub struct RowDraft {
    modulus: Modulus,
    lifted: bool,
    terms: Vec<(Term, Coef)>,
    rhs: i64,
}

impl RowDraft {
    /// Adds `coef · element` with `coef` reduced modulo the row's modulus.
    pub fn add(&mut self, seg: SegmentId, idx: usize, coef: u64, kind: Coef) -> &mut Self {
        let q = self.modulus;
        let coef = if self.lifted { q.center(coef % q.value()) } else { (coef % q.value()) as i64 };
        self.terms.push((Term { seg, idx: idx as u32, coef }, kind));
        self
    }

    pub fn add_signed(&mut self, seg: SegmentId, idx: usize, coef: i64, kind: Coef) -> &mut Self {
        let c = self.modulus.from_i64(coef);
        self.add(seg, idx, c, kind)
    }

    /// Adds `coef · Σ_k 2^k · bits[base + k]` for `width` consecutive bit elements.
    pub fn add_binary(&mut self, seg: SegmentId, base: usize, width: usize, coef: u64, kind: Coef) -> &mut Self {
        let q = self.modulus;
        let mut c = coef % q.value();
        for k in 0..width {
            self.add(seg, base + k, c, kind);
            c = q.add(c, c);
        }
        self
    }
}

/// Bookkeeping for one group of rows sharing a slack segment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockStatement {
    pub name: String,
    pub rows: Range<usize>,
    /// Slack segment for the lifted rows, if any.
    pub slack: Option<SegmentId>,
    /// Segments referenced by the block's rows, slack excluded.
    pub uses: Vec<SegmentId>,
    /// Every lifted row's integer magnitude stays strictly below this value
    /// (zero for purely native blocks); `q` must exceed it.
    pub q_bound: u128,
}

#[derive(Debug)]
pub struct RelationBuilder {
    q: Modulus,
    q_prime: Modulus,
    layout: WitnessLayout,
    rows: Vec<Row>,
    blocks: Vec<BlockStatement>,
    open: Option<OpenBlock>,
    products: Vec<[(SegmentId, u32); 3]>,
}

#[derive(Debug)]
struct OpenBlock {
    name: String,
    start: usize,
    lifted_bounds: Vec<(usize, u128)>,
    uses: Vec<SegmentId>,
}

impl RelationBuilder {
    pub fn new(q: Modulus, q_prime: Modulus) -> Self {
        Self { q, q_prime, layout: WitnessLayout::default(), rows: Vec::new(), blocks: Vec::new(), open: None, products: Vec::new() }
    }

    pub fn segment(&mut self, name: &str, len: usize, encoding: Encoding) -> SegmentId {
        self.layout.push(name, len, encoding)
    }

    pub fn layout(&self) -> &WitnessLayout {
        &self.layout
    }

    /// A row `Σ c·x ≡ rhs (mod q')`.
    pub fn lifted_row(&self, rhs: u64) -> RowDraft {
        let qp = self.q_prime;
        RowDraft { modulus: qp, lifted: true, terms: Vec::new(), rhs: qp.center(rhs % qp.value()) }
    }

    /// A row `Σ c·x = rhs (mod q)`.
    pub fn native_row(&self, rhs: u64) -> RowDraft {
        RowDraft { modulus: self.q, lifted: false, terms: Vec::new(), rhs: (rhs % self.q.value()) as i64 }
    }

    pub fn begin_block(&mut self, name: &str) -> Result<()> {
        if let Some(b) = &self.open {
            return Err(Error::Param(format!("block {} still open", b.name)));
        }
        self.open = Some(OpenBlock { name: name.to_string(), start: self.rows.len(), lifted_bounds: Vec::new(), uses: Vec::new() });
        Ok(())
    }

    pub fn push(&mut self, draft: RowDraft) -> Result<()> {
        let block = self.open.as_mut().ok_or_else(|| Error::Param("row pushed outside a block".into()))?;
        let half = ((self.q_prime.value() - 1) / 2) as u128;
        let mut bound: u128 = if draft.lifted { half } else { 0 };
        let mut terms = Vec::with_capacity(draft.terms.len());
        for (t, kind) in draft.terms {
            let seg = self.layout.segments.get(t.seg.0).ok_or_else(|| Error::Dimension(format!("segment {:?} unknown", t.seg)))?;
            if t.idx as usize >= seg.len {
                return Err(Error::Dimension(format!("element {} outside segment {} of length {}", t.idx, seg.name, seg.len)));
            }
            if draft.lifted {
                let c = match kind {
                    Coef::Public => half,
                    Coef::Exact => t.coef.unsigned_abs() as u128,
                };
                bound += c * seg.encoding.bound() as u128;
            }
            if !block.uses.contains(&t.seg) {
                block.uses.push(t.seg);
            }
            terms.push(t);
        }
        if draft.lifted {
            block.lifted_bounds.push((self.rows.len(), bound));
        }
        self.rows.push(Row { terms, rhs: draft.rhs, lifted: draft.lifted });
        Ok(())
    }

    /// Closes the current block, allocating its slack segment.
    pub fn end_block(&mut self) -> Result<()> {
        let block = self.open.take().ok_or_else(|| Error::Param("no open block".into()))?;
        let qp = self.q_prime.value() as u128;
        let max_sum = block.lifted_bounds.iter().map(|&(_, b)| b).max();
        let (slack, q_bound) = match max_sum {
            None => (None, 0),
            Some(sum) => {
                let beta = sum.div_ceil(qp);
                let beta = u64::try_from(beta).map_err(|_| Error::Range(format!("slack bound of block {} overflows", block.name)))?;
                let seg = self.layout.push(&format!("{}.slack", block.name), block.lifted_bounds.len(), Encoding::Range(beta));
                let neg_qp = -(self.q_prime.value() as i64);
                for (k, &(row, _)) in block.lifted_bounds.iter().enumerate() {
                    self.rows[row].terms.push(Term { seg, idx: k as u32, coef: neg_qp });
                }
                (Some(seg), sum + qp * beta as u128 + 1)
            }
        };
        self.blocks.push(BlockStatement { name: block.name, rows: block.start..self.rows.len(), slack, uses: block.uses, q_bound });
        Ok(())
    }

    /// Requires `h = i · j` on three single-coordinate elements.
    pub fn product(&mut self, h: (SegmentId, usize), i: (SegmentId, usize), j: (SegmentId, usize)) -> Result<()> {
        let mut out = [(h.0, 0u32); 3];
        for (slot, (seg, idx)) in out.iter_mut().zip([h, i, j]) {
            let s = self.layout.get(seg);
            if s.encoding.width() != 1 || idx >= s.len {
                return Err(Error::Dimension(format!("product operand {}[{idx}] is not a single coordinate", s.name)));
            }
            *slot = (seg, idx as u32);
        }
        self.products.push(out);
        Ok(())
    }

    pub fn finish(self) -> Result<Relation> {
        if let Some(b) = self.open {
            return Err(Error::Param(format!("block {} never closed", b.name)));
        }
        Ok(Relation { q: self.q, q_prime: self.q_prime, layout: self.layout, rows: self.rows, blocks: self.blocks, products: self.products })
    }
}

/// A compiled relation: layout, rows, blocks and product constraints.
#[derive(Clone, Debug)]
pub struct Relation {
    q: Modulus,
    q_prime: Modulus,
    layout: WitnessLayout,
    rows: Vec<Row>,
    blocks: Vec<BlockStatement>,
    products: Vec<[(SegmentId, u32); 3]>,
}

/// Element values per segment, prior to encoding.
#[derive(Clone, Debug)]
pub struct Assignment {
    values: Vec<Option<Vec<i64>>>,
}

impl Assignment {
    pub fn set(&mut self, seg: SegmentId, values: Vec<i64>) -> &mut Self {
        self.values[seg.0] = Some(values);
        self
    }

    pub fn get(&self, seg: SegmentId) -> Option<&[i64]> {
        self.values[seg.0].as_deref()
    }
}

impl Relation {
    pub fn modulus(&self) -> Modulus {
        self.q
    }

    pub fn q_prime(&self) -> Modulus {
        self.q_prime
    }

    pub fn layout(&self) -> &WitnessLayout {
        &self.layout
    }

    pub fn blocks(&self) -> &[BlockStatement] {
        &self.blocks
    }

    pub fn block(&self, name: &str) -> Option<&BlockStatement> {
        self.blocks.iter().find(|b| b.name == name)
    }

    pub fn n_vars(&self) -> usize {
        self.layout.n_vars
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_triples(&self) -> usize {
        self.layout
            .segments
            .iter()
            .filter(|s| s.encoding.is_binary())
            .map(|s| s.coords().len())
            .sum::<usize>()
            + self.products.len()
    }

    /// `(block name, value q must exceed)` for every block with lifted rows.
    pub fn q_bounds(&self) -> Vec<(String, u128)> {
        self.blocks.iter().filter(|b| b.slack.is_some()).map(|b| (b.name.clone(), b.q_bound)).collect()
    }

    fn check_modulus(&self) -> Result<()> {
        match self.blocks.iter().find(|b| b.q_bound >= self.q.value() as u128) {
            Some(b) => Err(Error::Param(format!("q = {} does not exceed the {} bound {}", self.q.value(), b.name, b.q_bound))),
            None => Ok(()),
        }
    }

    pub fn statement(&self) -> Result<QuadraticStatement> {
        self.check_modulus()?;
        let q = self.q;
        let gadgets: Vec<Vec<u64>> = self
            .layout
            .segments
            .iter()
            .map(|s| match s.encoding {
                Encoding::Range(b) if b > 0 => range_gadget(b).map(|g| g.into_iter().map(|w| w as u64).collect()),
                _ => Ok(Vec::new()),
            })
            .collect::<Result<_>>()?;
        let mut a = SparseZqMatrix::new(q, self.n_vars());
        let mut y = Vec::with_capacity(self.rows.len());
        let mut entries: Vec<(usize, u64)> = Vec::new();
        for row in &self.rows {
            entries.clear();
            let mut rhs = q.from_i64(row.rhs);
            for t in &row.terms {
                if t.coef == 0 {
                    continue;
                }
                let c = q.from_i64(t.coef);
                let seg = &self.layout.segments[t.seg.0];
                match seg.encoding {
                    Encoding::Bits | Encoding::Free(_) => entries.push((seg.offset + t.idx as usize, c)),
                    Encoding::Range(0) => {}
                    Encoding::Range(beta) => {
                        let g = &gadgets[t.seg.0];
                        let base = seg.offset + t.idx as usize * g.len();
                        entries.extend(g.iter().enumerate().map(|(j, &w)| (base + j, q.mul(c, w))));
                        rhs = q.add(rhs, q.mul(c, beta % q.value()));
                    }
                }
            }
            a.push_row(entries.iter().copied())?;
            y.push(rhs);
        }
        let mut triples = Vec::with_capacity(self.n_triples());
        for s in self.layout.segments.iter().filter(|s| s.encoding.is_binary()) {
            triples.extend(s.coords().map(|c| Triple::new(c, c, c)));
        }
        for p in &self.products {
            let [h, i, j] = p.map(|(seg, idx)| self.layout.get(seg).offset + idx as usize);
            triples.push(Triple::new(h, i, j));
        }
        QuadraticStatement::new(a, ZqVector::from_u64(q, y), triples)
    }

    /// An empty assignment; slack segments are filled by [`Relation::witness`].
    pub fn assignment(&self) -> Assignment {
        Assignment { values: vec![None; self.layout.segments.len()] }
    }

    /// Computes slacks, checks every bound and encodes the witness.
    pub fn witness(&self, assignment: &Assignment) -> Result<QuadraticWitness> {
        let mut values = assignment.values.clone();
        let slack_ids: Vec<SegmentId> = self.blocks.iter().filter_map(|b| b.slack).collect();
        for (id, seg) in self.layout.segments.iter().enumerate() {
            if slack_ids.contains(&SegmentId(id)) {
                continue;
            }
            let vals = values[id].as_ref().ok_or_else(|| Error::Witness(format!("segment {} unassigned", seg.name)))?;
            check_segment(seg, vals)?;
        }
        let qp = self.q_prime.value() as i128;
        for block in &self.blocks {
            let Some(slack) = block.slack else { continue };
            let mut v = Vec::new();
            for (k, row) in self.rows[block.rows.clone()].iter().enumerate().filter(|(_, r)| r.lifted) {
                let mut acc: i128 = -(row.rhs as i128);
                for t in row.terms.iter().filter(|t| t.seg != slack) {
                    let x = values[t.seg.0].as_ref().expect("checked above")[t.idx as usize];
                    acc += t.coef as i128 * x as i128;
                }
                if acc % qp != 0 {
                    return Err(Error::Witness(format!("block {} row {k} does not hold mod q' (residue {})", block.name, acc.rem_euclid(qp))));
                }
                v.push((acc / qp) as i64);
            }
            check_segment(self.layout.get(slack), &v)?;
            values[slack.0] = Some(v);
        }
        let q = self.q;
        let mut x = Vec::with_capacity(self.n_vars());
        for (seg, vals) in self.layout.segments.iter().zip(&values) {
            let vals = vals.as_ref().expect("all segments assigned");
            match seg.encoding {
                Encoding::Bits => x.extend(vals.iter().map(|&b| b as u64)),
                Encoding::Free(_) => x.extend(vals.iter().map(|&v| q.from_i64(v))),
                Encoding::Range(0) => {}
                Encoding::Range(beta) => {
                    for &v in vals {
                        let bits = range_decompose((v + beta as i64) as u64, beta)?;
                        x.extend(bits.as_slice().iter().map(|&b| b as u64));
                    }
                }
            }
        }
        Ok(QuadraticWitness(ZqVector::from_u64(q, x)))
    }

    /// Names of the blocks with at least one row violated by `wit`, plus
    /// `"products"` or `"bits"` when a quadratic constraint fails.
    pub fn violated_blocks(&self, stmt: &QuadraticStatement, wit: &QuadraticWitness) -> Result<Vec<String>> {
        let lhs = stmt.matrix().mul_vec(&wit.0)?;
        let y = stmt.target();
        let mut out: Vec<String> = self
            .blocks
            .iter()
            .filter(|b| b.rows.clone().any(|r| lhs.get(r) != y.get(r)))
            .map(|b| b.name.clone())
            .collect();
        let q = self.q;
        let n_bits = stmt.triples().len() - self.products.len();
        let bad = |t: &Triple| wit.0.get(t.h as usize) != q.mul(wit.0.get(t.i as usize), wit.0.get(t.j as usize));
        if stmt.triples()[..n_bits].iter().any(bad) {
            out.push("bits".into());
        }
        if stmt.triples()[n_bits..].iter().any(bad) {
            out.push("products".into());
        }
        Ok(out)
    }
}

fn check_segment(seg: &Segment, vals: &[i64]) -> Result<()> {
    if vals.len() != seg.len {
        return Err(Error::Witness(format!("segment {} has {} values, expected {}", seg.name, vals.len(), seg.len)));
    }
    let ok = |v: i64| match seg.encoding {
        Encoding::Bits => v == 0 || v == 1,
        Encoding::Range(b) | Encoding::Free(b) => v.unsigned_abs() <= b,
    };
    match vals.iter().position(|&v| !ok(v)) {
        Some(i) => Err(Error::Witness(format!("segment {} element {i} = {} violates {:?}", seg.name, vals[i], seg.encoding))),
        None => Ok(()),
    }
}

/// Compiles `A·x ≡ y (mod q')` with `‖x‖∞ <= beta` into a statement over `Z_q`.
pub fn lift_and_binarize(a: &crate::lattice::ZqMatrix, y: &ZqVector, beta: u64, q: Modulus) -> Result<Relation> {
    let qp = a.modulus();
    if y.modulus() != qp {
        return Err(Error::ModulusMismatch(qp.value(), y.modulus().value()));
    }
    if y.len() != a.rows() {
        return Err(Error::Dimension(format!("{} rows but target of length {}", a.rows(), y.len())));
    }
    let mut b = RelationBuilder::new(q, qp);
    let x = b.segment("x", a.cols(), Encoding::Range(beta));
    b.begin_block("lift")?;
    for r in 0..a.rows() {
        let mut row = b.lifted_row(y.get(r));
        for (c, &v) in a.row(r).iter().enumerate() {
            row.add(x, c, v, Coef::Public);
        }
        b.push(row)?;
    }
    b.end_block()?;
    let rel = b.finish()?;
    rel.check_modulus()?;
    Ok(rel)
}
