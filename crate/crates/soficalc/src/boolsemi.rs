//! Linear algebra over the Boolean semiring 𝔹 = {0,1 | 1+1=1} and the order
//! theory of finite 𝔹-semimodules (join-semilattices with 0).
//!
//! Vectors and matrices are bit-packed; joins are bitwise OR and the order is
//! `u ≤ v iff u | v == v`.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

/// Fixed-width vector over 𝔹, stored in 64-bit blocks.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BoolVec {
    width: usize,
    blocks: Vec<u64>,
}

fn block_count(width: usize) -> usize {
    width.div_ceil(64)
}

impl BoolVec {
    pub fn zeros(width: usize) -> Self {
        BoolVec {
            width,
            blocks: vec![0; block_count(width)],
        }
    }

    pub fn unit(width: usize, index: usize) -> Self {
        let mut v = BoolVec::zeros(width);
        v.set(index, true);
        v
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut v = BoolVec::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    /// Parse a bitstring like `"0110"`.
    pub fn from_str01(s: &str) -> Result<Self> {
        let mut v = BoolVec::zeros(s.len());
        for (i, c) in s.chars().enumerate() {
            match c {
                '1' => v.set(i, true),
                '0' => {}
                _ => return Err(Error::Parse(format!("bad bit '{c}' in \"{s}\""))),
            }
        }
        Ok(v)
    }

    pub fn from_ones(width: usize, ones: impl IntoIterator<Item = usize>) -> Self {
        let mut v = BoolVec::zeros(width);
        for i in ones {
            v.set(i, true);
        }
        v
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.width);
        self.blocks[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.width, "bit index {i} out of width {}", self.width);
        if value {
            self.blocks[i / 64] |= 1 << (i % 64);
        } else {
            self.blocks[i / 64] &= !(1 << (i % 64));
        }
    }

    /// Bitwise join (𝔹-module addition).
    pub fn or(&self, other: &Self) -> Self {
        assert_eq!(self.width, other.width, "width mismatch in join");
        let blocks = self
            .blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| a | b)
            .collect();
        BoolVec {
            width: self.width,
            blocks,
        }
    }

    pub fn or_assign(&mut self, other: &Self) {
        assert_eq!(self.width, other.width, "width mismatch in join");
        for (a, b) in self.blocks.iter_mut().zip(&other.blocks) {
            *a |= b;
        }
    }

    pub fn and(&self, other: &Self) -> Self {
        assert_eq!(self.width, other.width, "width mismatch in meet");
        let blocks = self
            .blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| a & b)
            .collect();
        BoolVec {
            width: self.width,
            blocks,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.iter().all(|&b| b == 0)
    }

    /// Order of the semimodule: `self ≤ other` iff `self | other == other`.
    pub fn leq(&self, other: &Self) -> bool {
        assert_eq!(self.width, other.width, "width mismatch in comparison");
        self.blocks
            .iter()
            .zip(&other.blocks)
            .all(|(a, b)| a | b == *b)
    }

    /// Boolean inner product: OR over AND of coordinate pairs.
    pub fn dot(&self, other: &Self) -> bool {
        assert_eq!(self.width, other.width, "width mismatch in pairing");
        self.blocks
            .iter()
            .zip(&other.blocks)
            .any(|(a, b)| a & b != 0)
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.width).filter(|&i| self.get(i))
    }

    pub fn count_ones(&self) -> usize {
        self.blocks.iter().map(|b| b.count_ones() as usize).sum()
    }
}

impl fmt::Display for BoolVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.width {
            write!(f, "{}", if self.get(i) { '1' } else { '0' })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BoolVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BoolVec({self})")
    }
}

/// Matrix over 𝔹; realizes 𝔹-linear maps acting on row vectors (`v · M`).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BoolMat {
    rows: Vec<BoolVec>,
    cols: usize,
}

impl BoolMat {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        BoolMat {
            rows: vec![BoolVec::zeros(ncols); nrows],
            cols: ncols,
        }
    }

    pub fn identity(n: usize) -> Self {
        let rows = (0..n).map(|i| BoolVec::unit(n, i)).collect();
        BoolMat { rows, cols: n }
    }

    pub fn from_rows(rows: Vec<BoolVec>, ncols: usize) -> Self {
        for r in &rows {
            assert_eq!(r.width(), ncols, "row width mismatch");
        }
        BoolMat { rows, cols: ncols }
    }

    pub fn from_fn(nrows: usize, ncols: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut m = BoolMat::zeros(nrows, ncols);
        for i in 0..nrows {
            for j in 0..ncols {
                if f(i, j) {
                    m.set(i, j, true);
                }
            }
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.nrows() == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.rows[i].get(j)
    }

    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        self.rows[i].set(j, value);
    }

    pub fn row(&self, i: usize) -> &BoolVec {
        &self.rows[i]
    }

    /// Matrix product realizing composition of 𝔹-linear maps: `self` first,
    /// then `g`; entry (i,j) = OR over l of self(i,l) AND g(l,j).
    pub fn compose(&self, g: &BoolMat) -> Result<BoolMat> {
        if self.cols != g.nrows() {
            return Err(Error::Shape(format!(
                "cannot compose {}x{} with {}x{}",
                self.nrows(),
                self.cols,
                g.nrows(),
                g.cols
            )));
        }
        let rows = self.rows.iter().map(|r| g.act_row(r)).collect();
        Ok(BoolMat {
            rows,
            cols: g.cols,
        })
    }

    /// Trace over 𝔹: 1 iff some diagonal entry is 1.
    pub fn trace(&self) -> Result<bool> {
        if !self.is_square() {
            return Err(Error::Shape(format!(
                "trace of non-square {}x{} matrix",
                self.nrows(),
                self.cols
            )));
        }
        Ok((0..self.cols).any(|i| self.get(i, i)))
    }

    pub fn transpose(&self) -> BoolMat {
        BoolMat::from_fn(self.cols, self.nrows(), |i, j| self.get(j, i))
    }

    /// Row vector action `v · M`: OR of the rows selected by `v`.
    pub fn act_row(&self, v: &BoolVec) -> BoolVec {
        assert_eq!(v.width(), self.nrows(), "vector/matrix shape mismatch");
        let mut out = BoolVec::zeros(self.cols);
        for i in v.ones() {
            out.or_assign(&self.rows[i]);
        }
        out
    }

    /// Column vector action `M · v`.
    pub fn act_col(&self, v: &BoolVec) -> BoolVec {
        assert_eq!(v.width(), self.cols, "vector/matrix shape mismatch");
        let bits: Vec<bool> = self.rows.iter().map(|r| r.dot(v)).collect();
        BoolVec::from_bits(&bits)
    }

    pub fn pow(&self, k: usize) -> Result<BoolMat> {
        if !self.is_square() {
            return Err(Error::Shape("power of non-square matrix".into()));
        }
        let mut acc = BoolMat::identity(self.cols);
        for _ in 0..k {
            acc = acc.compose(self)?;
        }
        Ok(acc)
    }

    /// Smallest `t, p ≥ 1` with `M^(t+p) = M^t`. Power indexing starts at 1;
    /// `M^0` is excluded from the periodicity search.
    pub fn eventual_period(&self) -> Result<(usize, usize)> {
        if !self.is_square() {
            return Err(Error::Shape("eventual_period of non-square matrix".into()));
        }
        let mut seen: HashMap<BoolMat, usize> = HashMap::new();
        let mut power = self.clone();
        let mut k = 1usize;
        loop {
            if let Some(&t) = seen.get(&power) {
                return Ok((t, k - t));
            }
            seen.insert(power.clone(), k);
            power = power.compose(self)?;
            k += 1;
        }
    }

    /// All distinct positive powers `M^1 .. M^(t+p-1)`.
    pub fn distinct_powers(&self) -> Result<Vec<BoolMat>> {
        let (t, p) = self.eventual_period()?;
        let mut out = Vec::with_capacity(t + p - 1);
        let mut power = self.clone();
        for _ in 1..t + p {
            out.push(power.clone());
            power = power.compose(self)?;
        }
        Ok(out)
    }
}

impl fmt::Display for BoolMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, r) in self.rows.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{r}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for BoolMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BoolMat[")?;
        for (i, r) in self.rows.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{r}")?;
        }
        write!(f, "]")
    }
}

/// Finite 𝔹-semimodule: a join-closed set of vectors containing 0, kept
/// sorted for deterministic indexing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Semilattice {
    width: usize,
    elements: Vec<BoolVec>,
    generators: Vec<BoolVec>,
}

/// Smallest join-closed set containing `generators` and the zero vector.
pub fn join_closure(width: usize, generators: &[BoolVec]) -> Result<Semilattice> {
    for g in generators {
        if g.width() != width {
            return Err(Error::Shape(format!(
                "generator width {} does not match ambient width {width}",
                g.width()
            )));
        }
    }
    let mut elements: Vec<BoolVec> = vec![BoolVec::zeros(width)];
    let mut seen: std::collections::HashSet<BoolVec> = elements.iter().cloned().collect();
    let mut queue: Vec<BoolVec> = Vec::new();
    for g in generators {
        if seen.insert(g.clone()) {
            elements.push(g.clone());
            queue.push(g.clone());
        }
    }
    while let Some(x) = queue.pop() {
        let joins: Vec<BoolVec> = elements.iter().map(|y| x.or(y)).collect();
        for j in joins {
            if seen.insert(j.clone()) {
                elements.push(j.clone());
                queue.push(j);
            }
        }
    }
    elements.sort();
    Ok(Semilattice {
        width,
        elements,
        generators: generators.to_vec(),
    })
}

impl Semilattice {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        false // always contains 0
    }

    pub fn elements(&self) -> &[BoolVec] {
        &self.elements
    }

    pub fn generators(&self) -> &[BoolVec] {
        &self.generators
    }

    pub fn element(&self, i: usize) -> &BoolVec {
        &self.elements[i]
    }

    pub fn index_of(&self, v: &BoolVec) -> Option<usize> {
        self.elements.binary_search(v).ok()
    }

    pub fn contains(&self, v: &BoolVec) -> bool {
        self.index_of(v).is_some()
    }

    pub fn zero_index(&self) -> usize {
        self.index_of(&BoolVec::zeros(self.width))
            .expect("semilattice always contains 0")
    }

    /// Join of all elements.
    pub fn top(&self) -> BoolVec {
        let mut t = BoolVec::zeros(self.width);
        for e in &self.elements {
            t.or_assign(e);
        }
        t
    }

    /// Greatest `z` in the lattice with `z ≤ x` and `z ≤ y`: the join of all
    /// common lower bounds, which is itself a common lower bound.
    pub fn meet(&self, x: &BoolVec, y: &BoolVec) -> Result<BoolVec> {
        if !self.contains(x) || !self.contains(y) {
            return Err(Error::Input("meet arguments must be lattice elements".into()));
        }
        let mut z = BoolVec::zeros(self.width);
        for e in &self.elements {
            if e.leq(x) && e.leq(y) {
                z.or_assign(e);
            }
        }
        Ok(z)
    }

    /// Triple test: meet(x, y ∨ z) = meet(x,y) ∨ meet(x,z) for all x,y,z.
    pub fn is_distributive(&self) -> bool {
        let n = self.elements.len();
        for x in 0..n {
            for y in 0..n {
                for z in y..n {
                    let yz = self.elements[y].or(&self.elements[z]);
                    let lhs = self.meet(&self.elements[x], &yz).unwrap();
                    let rhs = self
                        .meet(&self.elements[x], &self.elements[y])
                        .unwrap()
                        .or(&self.meet(&self.elements[x], &self.elements[z]).unwrap());
                    if lhs != rhs {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Nonzero elements that are not the join of the elements strictly below
    /// them.
    pub fn join_irreducibles(&self) -> Vec<BoolVec> {
        self.elements
            .iter()
            .filter(|x| {
                if x.is_zero() {
                    return false;
                }
                let mut below = BoolVec::zeros(self.width);
                for y in &self.elements {
                    if y.leq(x) && *y != **x {
                        below.or_assign(y);
                    }
                }
                below != **x
            })
            .cloned()
            .collect()
    }
}

/// Birkhoff presentation of a distributive lattice as a retract of the free
/// module on its join-irreducibles: `project ∘ inject = id`.
#[derive(Clone, Debug)]
pub struct LatticeEmbedding {
    source: Semilattice,
    irreducibles: Vec<BoolVec>,
}

pub fn birkhoff_embedding(s: &Semilattice) -> Result<LatticeEmbedding> {
    if !s.is_distributive() {
        return Err(Error::Projectivity(
            "semilattice is not distributive, no Birkhoff embedding".into(),
        ));
    }
    Ok(LatticeEmbedding {
        irreducibles: s.join_irreducibles(),
        source: s.clone(),
    })
}

impl LatticeEmbedding {
    pub fn source(&self) -> &Semilattice {
        &self.source
    }

    pub fn irreducibles(&self) -> &[BoolVec] {
        &self.irreducibles
    }

    /// Down-set of `x` among the irreducibles, as a vector over J.
    pub fn inject(&self, x: &BoolVec) -> Result<BoolVec> {
        if !self.source.contains(x) {
            return Err(Error::Input("inject argument must be a lattice element".into()));
        }
        let bits: Vec<bool> = self.irreducibles.iter().map(|j| j.leq(x)).collect();
        Ok(BoolVec::from_bits(&bits))
    }

    /// Join of the selected irreducibles.
    pub fn project(&self, t: &BoolVec) -> BoolVec {
        assert_eq!(t.width(), self.irreducibles.len());
        let mut x = BoolVec::zeros(self.source.width());
        for i in t.ones() {
            x.or_assign(&self.irreducibles[i]);
        }
        x
    }
}

/// An endomorphism of a semilattice given by where each element goes,
/// indexed like `Semilattice::elements`.
pub type ElementMap = Vec<usize>;

/// Does the element map preserve joins and 0?
pub fn is_linear_map(s: &Semilattice, f: &ElementMap) -> bool {
    if f.len() != s.len() || f.iter().any(|&t| t >= s.len()) {
        return false;
    }
    if f[s.zero_index()] != s.zero_index() {
        return false;
    }
    for i in 0..s.len() {
        for j in i..s.len() {
            let join = s.element(i).or(s.element(j));
            let join_idx = match s.index_of(&join) {
                Some(k) => k,
                None => return false,
            };
            let rhs = s.element(f[i]).or(s.element(f[j]));
            if *s.element(f[join_idx]) != rhs {
                return false;
            }
        }
    }
    true
}

/// Does the 𝔹-valued functional preserve joins and 0?
pub fn is_linear_functional(s: &Semilattice, b: &[bool]) -> bool {
    if b.len() != s.len() || b[s.zero_index()] {
        return false;
    }
    for i in 0..s.len() {
        for j in i..s.len() {
            let join = s.element(i).or(s.element(j));
            let join_idx = match s.index_of(&join) {
                Some(k) => k,
                None => return false,
            };
            if b[join_idx] != (b[i] || b[j]) {
                return false;
            }
        }
    }
    true
}

fn check_linear(e: &LatticeEmbedding, f: &ElementMap) -> Result<()> {
    if f.len() != e.source.len() {
        return Err(Error::Shape("element map length mismatch".into()));
    }
    if !is_linear_map(&e.source, f) {
        return Err(Error::Linearity(
            "map is not join-preserving on the element set".into(),
        ));
    }
    Ok(())
}

/// Matrix of a join-preserving endomorphism on the irreducible basis:
/// entry (i,j) = 1 iff J_j ≤ f(J_i).
pub fn action_matrix(e: &LatticeEmbedding, f: &ElementMap) -> Result<BoolMat> {
    check_linear(e, f)?;
    let s = &e.source;
    let jn = e.irreducibles.len();
    Ok(BoolMat::from_fn(jn, jn, |i, j| {
        let src = s.index_of(&e.irreducibles[i]).expect("irreducible is an element");
        e.irreducibles[j].leq(s.element(f[src]))
    }))
}

/// Boolean trace of an endomorphism of a projective semilattice.
pub fn projective_trace(e: &LatticeEmbedding, f: &ElementMap) -> Result<bool> {
    action_matrix(e, f)?.trace()
}
