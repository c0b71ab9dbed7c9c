//! Decorated one-dimensional cobordisms as stacks of slices, theory
//! backends assigning Boolean matrices to the generators, closed-diagram
//! evaluation, and universal-construction state spaces for small objects.
//!
//! Morphisms act on row vectors; a morphism from an `m`-dimensional object
//! to an `n`-dimensional one is an `m×n` matrix, slices tensor by Kronecker
//! product and stacking composes bottom-to-top.

use std::fmt;

use crate::boolsemi::{
    action_matrix, birkhoff_embedding, join_closure, BoolMat, BoolVec, LatticeEmbedding,
};
use crate::error::{Error, Result};
use crate::omega::{gamma, omega_statespace, Condition, OmegaAutomaton, QuasiAutomaton};
use crate::regular::Nfa;
use crate::sofic::{transition_semigroup, SoficShift, DEFAULT_BUDGET};
use crate::words::{
    parse_left_up, parse_right_up, Alphabet, FinWord, LeftUp, RightUp,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sign::Plus => write!(f, "+"),
            Sign::Minus => write!(f, "-"),
        }
    }
}

pub type SignSeq = Vec<Sign>;

/// Word decorating an inner endpoint, when the theory flavor requires
/// accumulation there.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BoundaryWord {
    None,
    Left(LeftUp),
    Right(RightUp),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Generator {
    Id(Sign),
    Dot(char, Sign),
    /// ∅ → (+,−)
    Cup,
    /// ∅ → (−,+)
    CupRev,
    /// (−,+) → ∅
    Cap,
    /// (+,−) → ∅
    CapRev,
    Swap(Sign, Sign),
    Birth(Sign, BoundaryWord),
    Death(Sign, BoundaryWord),
}

impl Generator {
    pub fn inputs(&self) -> SignSeq {
        match self {
            Generator::Id(s) | Generator::Dot(_, s) => vec![*s],
            Generator::Cup | Generator::CupRev | Generator::Birth(_, _) => vec![],
            Generator::Cap => vec![Sign::Minus, Sign::Plus],
            Generator::CapRev => vec![Sign::Plus, Sign::Minus],
            Generator::Swap(s1, s2) => vec![*s1, *s2],
            Generator::Death(s, _) => vec![*s],
        }
    }

    pub fn outputs(&self) -> SignSeq {
        match self {
            Generator::Id(s) | Generator::Dot(_, s) => vec![*s],
            Generator::Cup => vec![Sign::Plus, Sign::Minus],
            Generator::CupRev => vec![Sign::Minus, Sign::Plus],
            Generator::Cap | Generator::CapRev | Generator::Death(_, _) => vec![],
            Generator::Swap(s1, s2) => vec![*s2, *s1],
            Generator::Birth(s, _) => vec![*s],
        }
    }
}

/// A decorated cobordism: a stack of horizontal slices, read bottom to top.
#[derive(Clone, Debug)]
pub struct Diagram {
    source: SignSeq,
    slices: Vec<Vec<Generator>>,
    target: SignSeq,
}

impl Diagram {
    /// Type-check the slice boundaries and derive the target.
    pub fn new(source: SignSeq, slices: Vec<Vec<Generator>>) -> Result<Self> {
        let mut boundary = source.clone();
        for (k, slice) in slices.iter().enumerate() {
            let mut inputs = boundary.iter();
            let mut next = Vec::new();
            for g in slice {
                for need in g.inputs() {
                    match inputs.next() {
                        Some(&have) if have == need => {}
                        _ => {
                            return Err(Error::Parse(format!(
                                "slice {k}: generator {g:?} does not match the boundary"
                            )))
                        }
                    }
                }
                next.extend(g.outputs());
            }
            if inputs.next().is_some() {
                return Err(Error::Parse(format!(
                    "slice {k}: boundary points left unconsumed"
                )));
            }
            boundary = next;
        }
        Ok(Diagram {
            source,
            slices,
            target: boundary,
        })
    }

    pub fn source(&self) -> &SignSeq {
        &self.source
    }

    pub fn target(&self) -> &SignSeq {
        &self.target
    }

    pub fn slices(&self) -> &[Vec<Generator>] {
        &self.slices
    }

    pub fn is_closed(&self) -> bool {
        self.source.is_empty() && self.target.is_empty()
    }

    /// Stack `self` first, then `other`.
    pub fn stack(&self, other: &Diagram) -> Result<Diagram> {
        if self.target != other.source {
            return Err(Error::Shape("stacked diagrams do not compose".into()));
        }
        let mut slices = self.slices.clone();
        slices.extend(other.slices.iter().cloned());
        Diagram::new(self.source.clone(), slices)
    }

    /// Horizontal juxtaposition; shorter stacks are padded with identities.
    pub fn tensor(&self, other: &Diagram) -> Result<Diagram> {
        let height = self.slices.len().max(other.slices.len());
        let pad = |d: &Diagram, k: usize| -> Vec<Generator> {
            if k < d.slices.len() {
                d.slices[k].clone()
            } else {
                d.target.iter().map(|&s| Generator::Id(s)).collect()
            }
        };
        let mut slices = Vec::with_capacity(height);
        for k in 0..height {
            let mut row = pad(self, k);
            row.extend(pad(other, k));
            slices.push(row);
        }
        let mut source = self.source.clone();
        source.extend(other.source.iter().copied());
        Diagram::new(source, slices)
    }
}

/// Parse the diagram format: an `obj` line of signs followed by `slice`
/// lines; `#` starts a comment.
pub fn parse_diagram(text: &str, alphabet: &Alphabet) -> Result<Diagram> {
    let mut source: Option<SignSeq> = None;
    let mut slices: Vec<Vec<Generator>> = Vec::new();
    // boundary tracking lets `swap` infer its signs
    let mut boundary: SignSeq = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let head = tokens.next().unwrap();
        match head {
            "obj" => {
                if source.is_some() {
                    return Err(Error::Parse("duplicate obj line".into()));
                }
                let mut signs = Vec::new();
                for tok in tokens {
                    if tok == "_" {
                        continue;
                    }
                    for c in tok.chars() {
                        match c {
                            '+' => signs.push(Sign::Plus),
                            '-' => signs.push(Sign::Minus),
                            _ => {
                                return Err(Error::Parse(format!(
                                    "line {}: bad sign '{c}'",
                                    lineno + 1
                                )))
                            }
                        }
                    }
                }
                boundary = signs.clone();
                source = Some(signs);
            }
            "slice" => {
                if source.is_none() {
                    return Err(Error::Parse("slice before obj line".into()));
                }
                let mut gens = Vec::new();
                let mut pos = 0usize;
                for tok in tokens {
                    let g = parse_generator(tok, alphabet, &boundary, pos)
                        .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))?;
                    pos += g.inputs().len();
                    gens.push(g);
                }
                let mut next = Vec::new();
                for g in &gens {
                    next.extend(g.outputs());
                }
                if pos != boundary.len() {
                    return Err(Error::Parse(format!(
                        "line {}: slice consumes {pos} of {} boundary points",
                        lineno + 1,
                        boundary.len()
                    )));
                }
                boundary = next;
                slices.push(gens);
            }
            _ => {
                return Err(Error::Parse(format!(
                    "line {}: expected 'obj' or 'slice'",
                    lineno + 1
                )))
            }
        }
    }
    let source = source.ok_or_else(|| Error::Parse("diagram needs an obj line".into()))?;
    Diagram::new(source, slices)
}

fn parse_generator(
    tok: &str,
    alphabet: &Alphabet,
    boundary: &[Sign],
    pos: usize,
) -> Result<Generator> {
    let sign_of = |c: char| match c {
        '+' => Ok(Sign::Plus),
        '-' => Ok(Sign::Minus),
        _ => Err(Error::Parse(format!("bad sign '{c}'"))),
    };
    match tok {
        "cup" => return Ok(Generator::Cup),
        "cup'" => return Ok(Generator::CupRev),
        "cap" => return Ok(Generator::Cap),
        "cap'" => return Ok(Generator::CapRev),
        "swap" => {
            let s1 = *boundary
                .get(pos)
                .ok_or_else(|| Error::Parse("swap has no boundary to act on".into()))?;
            let s2 = *boundary
                .get(pos + 1)
                .ok_or_else(|| Error::Parse("swap needs two boundary points".into()))?;
            return Ok(Generator::Swap(s1, s2));
        }
        _ => {}
    }
    if let Some(rest) = tok.strip_prefix("id") {
        let mut it = rest.chars();
        if let (Some(c), None) = (it.next(), it.next()) {
            return Ok(Generator::Id(sign_of(c)?));
        }
        return Err(Error::Parse(format!("bad id token '{tok}'")));
    }
    if let Some(rest) = tok.strip_prefix("dot:") {
        let mut parts = rest.split(':');
        let letter = parts
            .next()
            .filter(|p| p.chars().count() == 1)
            .and_then(|p| p.chars().next())
            .ok_or_else(|| Error::Parse(format!("bad dot token '{tok}'")))?;
        if !alphabet.contains(letter) {
            return Err(Error::UnknownLetter(letter));
        }
        let sign = parts
            .next()
            .filter(|p| p.chars().count() == 1)
            .and_then(|p| p.chars().next())
            .ok_or_else(|| Error::Parse(format!("bad dot token '{tok}'")))?;
        return Ok(Generator::Dot(letter, sign_of(sign)?));
    }
    for (prefix, is_birth) in [("birth", true), ("death", false)] {
        if let Some(rest) = tok.strip_prefix(prefix) {
            let mut it = rest.chars();
            let sign = sign_of(
                it.next()
                    .ok_or_else(|| Error::Parse(format!("bad token '{tok}'")))?,
            )?;
            let remainder: String = it.collect();
            let word = if remainder.is_empty() {
                BoundaryWord::None
            } else {
                let wtext = remainder
                    .strip_prefix(':')
                    .ok_or_else(|| Error::Parse(format!("bad token '{tok}'")))?;
                // the word kind follows the strand direction at the endpoint
                let leftish = is_birth == (sign == Sign::Plus);
                if leftish {
                    BoundaryWord::Left(parse_left_up(alphabet, wtext)?)
                } else {
                    BoundaryWord::Right(parse_right_up(alphabet, wtext)?)
                }
            };
            return Ok(if is_birth {
                Generator::Birth(sign, word)
            } else {
                Generator::Death(sign, word)
            });
        }
    }
    Err(Error::Parse(format!("unknown generator '{tok}'")))
}

/// A theory backend: assigns the state module of a point and a matrix to
/// every legal generator.
pub enum Theory {
    /// Free module on the states of an NFA; finite-dot endpoints only.
    Fsa(Nfa),
    /// Presentation modules of a sofic shift; every inner endpoint carries
    /// an accumulating word.
    Sofic(SoficShift),
    /// Büchi automaton; words accumulate at out-oriented endpoints only.
    Buchi(OmegaAutomaton),
    /// Quasi-automaton carrier in Birkhoff coordinates; cup and cap come
    /// from the retraction.
    Projective(ProjectiveTheory),
}

/// Birkhoff-coordinate data of a quasi-automaton carrier.
pub struct ProjectiveTheory {
    quasi: QuasiAutomaton,
    emb: LatticeEmbedding,
    idem: BoolMat,
    letter_mats: Vec<BoolMat>,
    initial_row: BoolVec,
    functional_col: BoolVec,
}

impl ProjectiveTheory {
    pub fn new(quasi: QuasiAutomaton) -> Result<Self> {
        let emb = birkhoff_embedding(quasi.carrier())?;
        let n = emb.irreducibles().len();
        let id_map: Vec<usize> = (0..quasi.carrier().len()).collect();
        let idem = action_matrix(&emb, &id_map)?;
        let letter_mats = quasi
            .alphabet()
            .letters()
            .iter()
            .map(|&c| action_matrix(&emb, quasi.letter_map(c)?))
            .collect::<Result<Vec<_>>>()?;
        let initial_row = emb.inject(quasi.carrier().element(quasi.initial()))?;
        let functional_col = BoolVec::from_bits(
            &(0..n)
                .map(|j| {
                    let idx = quasi
                        .carrier()
                        .index_of(&emb.irreducibles()[j])
                        .expect("irreducible is an element");
                    quasi.functional()[idx]
                })
                .collect::<Vec<_>>(),
        );
        Ok(ProjectiveTheory {
            quasi,
            emb,
            idem,
            letter_mats,
            initial_row,
            functional_col,
        })
    }

    pub fn quasi(&self) -> &QuasiAutomaton {
        &self.quasi
    }

    pub fn embedding(&self) -> &LatticeEmbedding {
        &self.emb
    }
}

impl Theory {
    pub fn alphabet(&self) -> &Alphabet {
        match self {
            Theory::Fsa(n) => n.alphabet(),
            Theory::Sofic(s) => s.alphabet(),
            Theory::Buchi(a) => a.alphabet(),
            Theory::Projective(p) => p.quasi.alphabet(),
        }
    }

    /// Dimension of the state module of a single point.
    pub fn dim(&self) -> usize {
        match self {
            Theory::Fsa(n) => n.n_states(),
            Theory::Sofic(s) => s.n_presentation_states(),
            Theory::Buchi(a) => a.n_states(),
            Theory::Projective(p) => p.emb.irreducibles().len(),
        }
    }

    /// Matrix of the straight strand; the Birkhoff idempotent for the
    /// projective flavor, the identity for the free ones.
    fn strand(&self, s: Sign) -> BoolMat {
        match self {
            Theory::Projective(p) => match s {
                Sign::Plus => p.idem.clone(),
                Sign::Minus => p.idem.transpose(),
            },
            _ => BoolMat::identity(self.dim()),
        }
    }

    fn idem(&self) -> BoolMat {
        match self {
            Theory::Projective(p) => p.idem.clone(),
            _ => BoolMat::identity(self.dim()),
        }
    }

    fn letter_rep(&self, c: char) -> Result<BoolMat> {
        match self {
            Theory::Fsa(n) => Ok(n.letter_matrix(c)?.clone()),
            Theory::Sofic(s) => Ok(s.letter_matrix(c)?.clone()),
            Theory::Buchi(a) => Ok(a.letter_matrix(c)?.clone()),
            Theory::Projective(p) => {
                let i = p
                    .quasi
                    .alphabet()
                    .index_of(c)
                    .ok_or(Error::UnknownLetter(c))?;
                Ok(p.letter_mats[i].clone())
            }
        }
    }

    fn birth_row(&self, s: Sign, word: &BoundaryWord) -> Result<BoolVec> {
        match (self, s, word) {
            (Theory::Fsa(n), Sign::Plus, BoundaryWord::None) => Ok(n.initial().clone()),
            (Theory::Fsa(n), Sign::Minus, BoundaryWord::None) => Ok(n.accepting().clone()),
            (Theory::Sofic(sh), Sign::Plus, BoundaryWord::Left(w)) => sh.limit_left(w),
            (Theory::Sofic(sh), Sign::Minus, BoundaryWord::Right(w)) => sh.limit_right(w),
            (Theory::Buchi(a), Sign::Plus, BoundaryWord::None) => Ok(a.initial().clone()),
            (Theory::Buchi(a), Sign::Minus, BoundaryWord::Right(w)) => gamma(a, w),
            (Theory::Projective(p), Sign::Plus, BoundaryWord::None) => Ok(p.initial_row.clone()),
            (Theory::Projective(p), Sign::Minus, BoundaryWord::None) => {
                Ok(p.functional_col.clone())
            }
            _ => Err(Error::Input(format!(
                "birth{s} with {} is not legal in this theory flavor",
                describe_word(word)
            ))),
        }
    }

    fn death_col(&self, s: Sign, word: &BoundaryWord) -> Result<BoolVec> {
        match (self, s, word) {
            (Theory::Fsa(n), Sign::Plus, BoundaryWord::None) => Ok(n.accepting().clone()),
            (Theory::Fsa(n), Sign::Minus, BoundaryWord::None) => Ok(n.initial().clone()),
            (Theory::Sofic(sh), Sign::Plus, BoundaryWord::Right(w)) => sh.limit_right(w),
            (Theory::Sofic(sh), Sign::Minus, BoundaryWord::Left(w)) => sh.limit_left(w),
            (Theory::Buchi(a), Sign::Plus, BoundaryWord::Right(w)) => gamma(a, w),
            (Theory::Buchi(a), Sign::Minus, BoundaryWord::None) => Ok(a.initial().clone()),
            (Theory::Projective(p), Sign::Plus, BoundaryWord::None) => {
                Ok(p.functional_col.clone())
            }
            (Theory::Projective(p), Sign::Minus, BoundaryWord::None) => Ok(p.initial_row.clone()),
            _ => Err(Error::Input(format!(
                "death{s} with {} is not legal in this theory flavor",
                describe_word(word)
            ))),
        }
    }

    /// Matrix of one generator.
    pub fn generator_matrix(&self, g: &Generator) -> Result<BoolMat> {
        let n = self.dim();
        let e = self.idem();
        match g {
            Generator::Id(s) => Ok(self.strand(*s)),
            Generator::Dot(c, s) => {
                let m = self.letter_rep(*c)?;
                Ok(match s {
                    Sign::Plus => m,
                    Sign::Minus => m.transpose(),
                })
            }
            // coevaluations and evaluations carry the idempotent pattern;
            // for free flavors it is the Kronecker delta
            Generator::Cup => Ok(BoolMat::from_fn(1, n * n, |_, x| e.get(x % n, x / n))),
            Generator::CupRev => Ok(BoolMat::from_fn(1, n * n, |_, x| e.get(x / n, x % n))),
            Generator::Cap => Ok(BoolMat::from_fn(n * n, 1, |x, _| e.get(x % n, x / n))),
            Generator::CapRev => Ok(BoolMat::from_fn(n * n, 1, |x, _| e.get(x / n, x % n))),
            Generator::Swap(s1, s2) => {
                let perm = BoolMat::from_fn(n * n, n * n, |x, y| {
                    let (i, j) = (x / n, x % n);
                    y == j * n + i
                });
                let sandwich = kron(&self.strand(*s2), &self.strand(*s1));
                perm.compose(&sandwich)
            }
            Generator::Birth(s, w) => {
                let row = self.birth_row(*s, w)?;
                Ok(BoolMat::from_rows(vec![row], n))
            }
            Generator::Death(s, w) => {
                let col = self.death_col(*s, w)?;
                Ok(BoolMat::from_fn(n, 1, |i, _| col.get(i)))
            }
        }
    }
}

fn describe_word(w: &BoundaryWord) -> String {
    match w {
        BoundaryWord::None => "no word".to_string(),
        BoundaryWord::Left(l) => format!("left-infinite word {l}"),
        BoundaryWord::Right(r) => format!("right-infinite word {r}"),
    }
}

/// Kronecker product in row-vector convention.
pub fn kron(a: &BoolMat, b: &BoolMat) -> BoolMat {
    let (ra, ca) = (a.nrows(), a.ncols());
    let (rb, cb) = (b.nrows(), b.ncols());
    BoolMat::from_fn(ra * rb, ca * cb, |i, j| {
        a.get(i / rb, j / cb) && b.get(i % rb, j % cb)
    })
}

/// Evaluate a diagram: Kronecker within slices, matrix product across them.
pub fn evaluate(t: &Theory, d: &Diagram) -> Result<BoolMat> {
    let n = t.dim();
    let dim_of = |signs: &SignSeq| n.checked_pow(signs.len() as u32).expect("dimension overflow");
    let mut m = BoolMat::identity(dim_of(d.source()));
    for slice in d.slices() {
        let mut sm = BoolMat::identity(1);
        for g in slice {
            sm = kron(&sm, &t.generator_matrix(g)?);
        }
        m = m.compose(&sm)?;
    }
    Ok(m)
}

/// Evaluate a closed diagram to its Boolean value.
pub fn evaluate_closed(t: &Theory, d: &Diagram) -> Result<bool> {
    if !d.is_closed() {
        return Err(Error::Input(format!(
            "diagram is not closed: {} -> {}",
            render_signs(d.source()),
            render_signs(d.target())
        )));
    }
    Ok(evaluate(t, d)?.get(0, 0))
}

pub fn render_signs(s: &SignSeq) -> String {
    if s.is_empty() {
        "_".to_string()
    } else {
        s.iter().map(|x| x.to_string()).collect()
    }
}

/// Universal-construction state space of a small object.
#[derive(Clone, Debug)]
pub struct StateSpaceUc {
    pub object: String,
    /// Number of elements of A(object).
    pub size: usize,
    /// Size of the join-span of split classes inside A(+-).
    pub split_span_size: Option<usize>,
    /// Whether the cup class lies in that span.
    pub cup_in_split_span: Option<bool>,
}

/// State space of ε ∈ {+, -, +-} under the universal construction. (+) and
/// (−) delegate to the sofic or Büchi state spaces; (+,−) is computed from
/// cup-with-word diagrams and split pairs, quotiented by closure pairing.
pub fn universal_statespace(t: &Theory, object: &str) -> Result<StateSpaceUc> {
    match object {
        "+" | "-" => {
            let size = match t {
                Theory::Sofic(s) => {
                    let pair = s.statespace_pair()?;
                    if object == "+" {
                        pair.plus.len()
                    } else {
                        pair.minus.len()
                    }
                }
                Theory::Buchi(a) => {
                    let pair = omega_statespace(a, DEFAULT_BUDGET)?;
                    if object == "+" {
                        pair.plus.len()
                    } else {
                        pair.minus.len()
                    }
                }
                _ => {
                    return Err(Error::Unsupported(
                        "universal state spaces need a sofic or Büchi theory".into(),
                    ))
                }
            };
            Ok(StateSpaceUc {
                object: object.to_string(),
                size,
                split_span_size: None,
                cup_in_split_span: None,
            })
        }
        "+-" => {
            let s = match t {
                Theory::Sofic(s) => s,
                _ => {
                    return Err(Error::Unsupported(
                        "A(+-) is computed for sofic theories only".into(),
                    ))
                }
            };
            universal_plus_minus(s)
        }
        _ => Err(Error::Unsupported(format!(
            "object '{object}' is outside the implemented range (+, -, +-)"
        ))),
    }
}

fn universal_plus_minus(s: &SoficShift) -> Result<StateSpaceUc> {
    let n = s.n_presentation_states();
    let alphabet = s.alphabet();
    let flat = |f: &dyn Fn(usize, usize) -> bool| -> BoolVec {
        BoolVec::from_bits(
            &(0..n * n)
                .map(|x| f(x / n, x % n))
                .collect::<Vec<_>>(),
        )
    };
    // word classes: the transition monoid including the identity (ε)
    let mut monoid: Vec<BoolMat> = vec![BoolMat::identity(n)];
    for (m, _) in transition_semigroup(alphabet, s.letter_matrices(), DEFAULT_BUDGET)? {
        if !monoid.contains(&m) {
            monoid.push(m);
        }
    }
    // generator vectors of the two sides
    let pair = s.statespace_pair()?;
    let plus_vecs: Vec<BoolVec> = (0..pair.plus.len())
        .map(|i| pair.plus.rep(i).clone())
        .collect();
    let minus_vecs: Vec<BoolVec> = (0..pair.minus.len())
        .map(|i| pair.minus.rep(i).clone())
        .collect();
    // basis of A(+-) candidates: cup-with-word rows and split rows
    let mut cup_rows: Vec<BoolVec> = Vec::new();
    for m in &monoid {
        cup_rows.push(flat(&|i, j| m.get(j, i)));
    }
    let mut split_rows: Vec<BoolVec> = Vec::new();
    for x in &plus_vecs {
        for f in &minus_vecs {
            split_rows.push(flat(&|i, j| x.get(i) && f.get(j)));
        }
    }
    // mirror basis: cap-with-word columns and split death columns
    let mut cols: Vec<BoolVec> = Vec::new();
    for m in &monoid {
        cols.push(flat(&|i, j| m.get(i, j)));
    }
    for f in &minus_vecs {
        for x in &plus_vecs {
            cols.push(flat(&|i, j| f.get(i) && x.get(j)));
        }
    }
    let profile = |row: &BoolVec| -> BoolVec {
        BoolVec::from_bits(&cols.iter().map(|c| row.dot(c)).collect::<Vec<_>>())
    };
    let mut all_profiles: Vec<BoolVec> = Vec::new();
    for r in cup_rows.iter().chain(split_rows.iter()) {
        all_profiles.push(profile(r));
    }
    let lattice = join_closure(cols.len(), &all_profiles)?;
    let split_span = join_closure(
        cols.len(),
        &split_rows.iter().map(&profile).collect::<Vec<_>>(),
    )?;
    let cup_profile = profile(&flat(&|i, j| i == j));
    Ok(StateSpaceUc {
        object: "+-".to_string(),
        size: lattice.len(),
        split_span_size: Some(split_span.len()),
        cup_in_split_span: Some(split_span.contains(&cup_profile)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::omega::dba_to_quasi;
    use crate::regular::regex_parse;
    use crate::sofic::build_shift;
    use crate::words::parse_bi_up;

    fn ab() -> Alphabet {
        Alphabet::from_str("ab").unwrap()
    }

    fn fsa_theory() -> Theory {
        // two-point-shift automaton: a-loop on state 0, b-loop on state 1
        let a = ab();
        let ma = BoolMat::from_fn(2, 2, |i, j| i == 0 && j == 0);
        let mb = BoolMat::from_fn(2, 2, |i, j| i == 1 && j == 1);
        Theory::Fsa(
            Nfa::new(
                a,
                vec!["qa".into(), "qb".into()],
                vec![ma, mb],
                BoolVec::from_str01("11").unwrap(),
                BoolVec::from_str01("11").unwrap(),
            )
            .unwrap(),
        )
    }

    fn sofic_theory(w: &str) -> Theory {
        Theory::Sofic(build_shift(&regex_parse(w).unwrap(), &ab()).unwrap())
    }

    fn buchi_theory() -> Theory {
        // machine for {a b^ω, b^ω}
        let a = ab();
        let ma = BoolMat::from_fn(2, 2, |i, j| i == 0 && j == 1);
        let mb = BoolMat::from_fn(2, 2, |i, j| i == 1 && j == 1);
        Theory::Buchi(
            OmegaAutomaton::new(
                a,
                vec!["v1".into(), "v2".into()],
                vec![ma, mb],
                BoolVec::from_str01("11").unwrap(),
                Condition::Buchi(BoolVec::from_str01("11").unwrap()),
            )
            .unwrap(),
        )
    }

    fn projective_free_theory() -> Theory {
        // free carrier via the dBA → quasi conversion of a 2-state machine
        let a = ab();
        let ma = BoolMat::from_fn(2, 2, |i, j| i == j);
        let mb = BoolMat::from_fn(2, 2, |i, j| i != j);
        let dba = OmegaAutomaton::new(
            a,
            vec!["even".into(), "odd".into()],
            vec![ma, mb],
            BoolVec::from_str01("10").unwrap(),
            Condition::Buchi(BoolVec::from_str01("10").unwrap()),
        )
        .unwrap();
        Theory::Projective(ProjectiveTheory::new(dba_to_quasi(&dba).unwrap()).unwrap())
    }

    fn projective_chain_theory() -> Theory {
        // the golden-mean chain 0 < y < x as a non-free distributive carrier
        let a = ab();
        let carrier = join_closure(
            2,
            &[
                BoolVec::from_str01("11").unwrap(),
                BoolVec::from_str01("01").unwrap(),
            ],
        )
        .unwrap();
        let zero = carrier.index_of(&BoolVec::from_str01("00").unwrap()).unwrap();
        let y = carrier.index_of(&BoolVec::from_str01("01").unwrap()).unwrap();
        let x = carrier.index_of(&BoolVec::from_str01("11").unwrap()).unwrap();
        // a fixes x and y; b sends x to y and y to 0
        let mut fa = vec![0; 3];
        fa[zero] = zero;
        fa[y] = y;
        fa[x] = x;
        let mut fb = vec![0; 3];
        fb[zero] = zero;
        fb[y] = zero;
        fb[x] = y;
        let functional = (0..3).map(|e| e == x || e == y).collect::<Vec<_>>();
        Theory::Projective(
            ProjectiveTheory::new(
                QuasiAutomaton::new(a, carrier, vec![fa, fb], x, functional).unwrap(),
            )
            .unwrap(),
        )
    }

    fn snake_a(alphabet: &Alphabet) -> Diagram {
        parse_diagram("obj +\nslice cup id+\nslice id+ cap\n", alphabet).unwrap()
    }

    fn snake_b(alphabet: &Alphabet) -> Diagram {
        parse_diagram("obj -\nslice id- cup\nslice cap id-\n", alphabet).unwrap()
    }

    #[test]
    fn parse_diagram_examples() {
        let a = ab();
        let d = parse_diagram("obj\nslice cup\n", &a).unwrap();
        assert!(d.source().is_empty());
        assert_eq!(d.target(), &vec![Sign::Plus, Sign::Minus]);
        let d = parse_diagram("obj - +\nslice cap\n", &a).unwrap();
        assert!(d.target().is_empty());
        assert!(parse_diagram("obj +\nslice cap\n", &a).is_err());
        // boundary mismatch between slices
        assert!(parse_diagram("obj\nslice cup\nslice cap\n", &a).is_err());
    }

    #[test]
    fn zig_zag_identities_all_flavors() {
        let a = ab();
        for theory in [
            fsa_theory(),
            sofic_theory("bb"),
            buchi_theory(),
            projective_free_theory(),
        ] {
            let n = theory.dim();
            let sa = evaluate(&theory, &snake_a(&a)).unwrap();
            let sb = evaluate(&theory, &snake_b(&a)).unwrap();
            assert_eq!(sa, BoolMat::identity(n), "snake A");
            assert_eq!(sb, BoolMat::identity(n), "snake B");
        }
    }

    #[test]
    fn zig_zag_on_nonfree_projective_carrier() {
        // the snake equals the straight strand (the sandwiched identity),
        // which for a non-free carrier is not the identity matrix
        let a = ab();
        let t = projective_chain_theory();
        let strand = evaluate(
            &t,
            &parse_diagram("obj +\nslice id+\n", &a).unwrap(),
        )
        .unwrap();
        let sa = evaluate(&t, &snake_a(&a)).unwrap();
        assert_eq!(sa, strand);
        assert_ne!(strand, BoolMat::identity(t.dim()));
        let sb = evaluate(&t, &snake_b(&a)).unwrap();
        let strand_minus = evaluate(
            &t,
            &parse_diagram("obj -\nslice id-\n", &a).unwrap(),
        )
        .unwrap();
        assert_eq!(sb, strand_minus);
    }

    #[test]
    fn dot_matrices_fsa() {
        let t = fsa_theory();
        let a = ab();
        let d = parse_diagram("obj +\nslice dot:a:+\n", &a).unwrap();
        let m = evaluate(&t, &d).unwrap();
        assert_eq!(m, BoolMat::from_fn(2, 2, |i, j| i == 0 && j == 0));
    }

    #[test]
    fn swap_relations() {
        let a = ab();
        for theory in [fsa_theory(), sofic_theory("bb"), projective_free_theory()] {
            let twice = parse_diagram("obj ++\nslice swap\nslice swap\n", &a).unwrap();
            let id2 = parse_diagram("obj ++\nslice id+ id+\n", &a).unwrap();
            assert_eq!(
                evaluate(&theory, &twice).unwrap(),
                evaluate(&theory, &id2).unwrap()
            );
            // naturality with a dot
            let lhs = parse_diagram("obj ++\nslice dot:a:+ id+\nslice swap\n", &a).unwrap();
            let rhs = parse_diagram("obj ++\nslice swap\nslice id+ dot:a:+\n", &a).unwrap();
            assert_eq!(
                evaluate(&theory, &lhs).unwrap(),
                evaluate(&theory, &rhs).unwrap()
            );
        }
    }

    #[test]
    fn dot_cup_slide() {
        let a = ab();
        for theory in [fsa_theory(), sofic_theory("bb"), buchi_theory()] {
            for letter in ["a", "b"] {
                let lhs = parse_diagram(
                    &format!("obj\nslice cup\nslice dot:{letter}:+ id-\n"),
                    &a,
                )
                .unwrap();
                let rhs = parse_diagram(
                    &format!("obj\nslice cup\nslice id+ dot:{letter}:-\n"),
                    &a,
                )
                .unwrap();
                assert_eq!(
                    evaluate(&theory, &lhs).unwrap(),
                    evaluate(&theory, &rhs).unwrap()
                );
            }
        }
    }

    #[test]
    fn closed_circle_is_trace() {
        let a = ab();
        let t = fsa_theory();
        // circle with word ab: trace of M_ab = 0 on the two-point automaton
        let d = parse_diagram(
            "obj\nslice cup\nslice dot:a:+ id-\nslice dot:b:+ id-\nslice cap'\n",
            &a,
        )
        .unwrap();
        assert!(!evaluate_closed(&t, &d).unwrap());
        // circle with word aa: trace 1
        let d = parse_diagram(
            "obj\nslice cup\nslice dot:a:+ id-\nslice dot:a:+ id-\nslice cap'\n",
            &a,
        )
        .unwrap();
        assert!(evaluate_closed(&t, &d).unwrap());
        // empty diagram evaluates to 1
        let d = parse_diagram("obj\n", &a).unwrap();
        assert!(evaluate_closed(&t, &d).unwrap());
    }

    #[test]
    fn closed_interval_even_b() {
        let a = ab();
        let t = sofic_theory("ab(bb)*a");
        let d = parse_diagram(
            "obj\nslice birth+:w^(b)\nslice death+:abbba(b)^w\n",
            &a,
        )
        .unwrap();
        assert!(!evaluate_closed(&t, &d).unwrap());
        let d = parse_diagram("obj\nslice birth+:w^(b)\nslice death+:a(b)^w\n", &a).unwrap();
        assert!(evaluate_closed(&t, &d).unwrap());
    }

    #[test]
    fn closed_values_match_member_biinfinite() {
        let a = ab();
        let shift = build_shift(&regex_parse("bb").unwrap(), &ab()).unwrap();
        let t = Theory::Sofic(shift.clone());
        for (l, r) in [("w^(a)", "(a)^w"), ("w^(a)b", "b(a)^w"), ("w^(ab)", "(ba)^w")] {
            let d = parse_diagram(
                &format!("obj\nslice birth+:{l}\nslice death+:{r}\n"),
                &a,
            )
            .unwrap();
            let lhs = evaluate_closed(&t, &d).unwrap();
            let lu = parse_left_up(&a, l).unwrap();
            let ru = parse_right_up(&a, r).unwrap();
            let w = crate::words::BiUp::from_parts(&lu, &FinWord::empty(), &ru);
            assert_eq!(lhs, shift.member_biinfinite(&w).unwrap(), "{l} · {r}");
        }
        // a two-component diagram evaluates to the product of the values
        let good = "obj\nslice birth+:w^(a)\nslice death+:(a)^w\n";
        let bad = "obj\nslice birth+:w^(ab)\nslice death+:(ba)^w\n"; // bb inside
        let d_good = parse_diagram(good, &a).unwrap();
        let d_bad = parse_diagram(bad, &a).unwrap();
        let both = d_good.tensor(&d_bad).unwrap();
        assert_eq!(
            evaluate_closed(&t, &both).unwrap(),
            evaluate_closed(&t, &d_good).unwrap() && evaluate_closed(&t, &d_bad).unwrap()
        );
        assert!(!evaluate_closed(&t, &both).unwrap());
        let w = parse_bi_up(&a, "w^(ab).(ba)^w").unwrap();
        assert!(!shift.member_biinfinite(&w).unwrap());
    }

    #[test]
    fn buchi_interval_evaluates_acceptance() {
        let a = ab();
        let t = buchi_theory();
        // birth+ then death+:σ is acceptance of σ from the initial set
        let d = parse_diagram("obj\nslice birth+\nslice death+:a(b)^w\n", &a).unwrap();
        assert!(evaluate_closed(&t, &d).unwrap());
        let d = parse_diagram("obj\nslice birth+\nslice death+:(a)^w\n", &a).unwrap();
        assert!(!evaluate_closed(&t, &d).unwrap());
    }

    #[test]
    fn flavor_legality() {
        let a = ab();
        let t = fsa_theory();
        let d = parse_diagram("obj\nslice birth+:w^(a)\nslice death+:(a)^w\n", &a).unwrap();
        assert!(matches!(evaluate_closed(&t, &d), Err(Error::Input(_))));
        let t = sofic_theory("bb");
        let d = parse_diagram("obj +\nslice death+\n", &a).unwrap();
        assert!(matches!(evaluate(&t, &d), Err(Error::Input(_))));
        let t = buchi_theory();
        let d = parse_diagram("obj\nslice birth+:w^(a)\n", &a).unwrap();
        assert!(matches!(evaluate(&t, &d), Err(Error::Input(_))));
    }

    #[test]
    fn functoriality_and_monoidality_random() {
        use rand::{Rng, SeedableRng};
        let a = ab();
        let mut rng = rand::rngs::StdRng::seed_from_u64(97);
        let theories = [fsa_theory(), sofic_theory("bb"), projective_free_theory()];
        // random slice extending a boundary, avoiding births/deaths so that
        // all flavors accept the diagram
        fn random_slice(
            rng: &mut rand::rngs::StdRng,
            boundary: &[Sign],
        ) -> Vec<Generator> {
            let mut out = Vec::new();
            let mut width = boundary.len();
            let mut i = 0;
            while i < boundary.len() {
                let two = i + 1 < boundary.len();
                match rng.gen_range(0..5) {
                    0 if two && boundary[i] == Sign::Minus && boundary[i + 1] == Sign::Plus => {
                        out.push(Generator::Cap);
                        i += 2;
                        width -= 2;
                    }
                    1 if two => {
                        out.push(Generator::Swap(boundary[i], boundary[i + 1]));
                        i += 2;
                    }
                    2 => {
                        let c = ['a', 'b'][rng.gen_range(0..2)];
                        out.push(Generator::Dot(c, boundary[i]));
                        i += 1;
                    }
                    // keep the boundary small: tensor dimensions are n^width
                    3 if width < 4 => {
                        out.push(Generator::Id(boundary[i]));
                        out.push(Generator::Cup);
                        i += 1;
                        width += 2;
                    }
                    _ => {
                        out.push(Generator::Id(boundary[i]));
                        i += 1;
                    }
                }
            }
            out
        }
        for _ in 0..40 {
            let source = vec![Sign::Plus, Sign::Minus];
            let mut slices1 = Vec::new();
            let mut boundary = source.clone();
            for _ in 0..rng.gen_range(1..3) {
                let s = random_slice(&mut rng, &boundary);
                boundary = s.iter().flat_map(|g| g.outputs()).collect();
                slices1.push(s);
            }
            let d1 = Diagram::new(source, slices1).unwrap();
            let mut slices2 = Vec::new();
            let mut b2 = d1.target().clone();
            for _ in 0..rng.gen_range(1..3) {
                let s = random_slice(&mut rng, &b2);
                b2 = s.iter().flat_map(|g| g.outputs()).collect();
                slices2.push(s);
            }
            let d2 = Diagram::new(d1.target().clone(), slices2).unwrap();
            let stacked = d1.stack(&d2).unwrap();
            for t in &theories {
                let m1 = evaluate(t, &d1).unwrap();
                let m2 = evaluate(t, &d2).unwrap();
                let ms = evaluate(t, &stacked).unwrap();
                assert_eq!(ms, m1.compose(&m2).unwrap(), "functoriality");
                // monoidality
                let tens = d1.tensor(&d2).unwrap();
                let mt = evaluate(t, &tens).unwrap();
                assert_eq!(mt, kron(&m1, &m2), "monoidality");
            }
        }
    }

    #[test]
    fn universal_statespace_golden() {
        let t = sofic_theory("bb");
        let uc = universal_statespace(&t, "+-").unwrap();
        assert!(uc.size >= 1);
        // strictly larger than the split span: the cup class is new
        assert!(uc.size > uc.split_span_size.unwrap());
        assert_eq!(uc.cup_in_split_span, Some(false));
        let plus = universal_statespace(&t, "+").unwrap();
        assert_eq!(plus.size, 3);
    }

    #[test]
    fn universal_statespace_full_shift_collapses() {
        let t = sofic_theory("0");
        let uc = universal_statespace(&t, "+-").unwrap();
        assert_eq!(uc.cup_in_split_span, Some(true));
        assert_eq!(uc.size, uc.split_span_size.unwrap());
    }

    #[test]
    fn universal_statespace_refusals() {
        let t = fsa_theory();
        assert!(matches!(
            universal_statespace(&t, "+"),
            Err(Error::Unsupported(_))
        ));
        let t = buchi_theory();
        assert!(matches!(
            universal_statespace(&t, "+-"),
            Err(Error::Unsupported(_))
        ));
        assert!(universal_statespace(&t, "+").is_ok());
    }
}
