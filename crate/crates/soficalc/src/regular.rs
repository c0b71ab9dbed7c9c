//! Classical regular-language engine: regex parsing, automata constructions
//! and the factor-language operations shifts are built from.

use std::collections::HashMap;
use std::fmt;

use crate::boolsemi::{BoolMat, BoolVec};
use crate::error::{Error, Result};
use crate::words::{Alphabet, CircWord, FinWord};

/// Regular expression syntax tree. `0` is the empty language, `1` the empty
/// word; `*` binds tighter than juxtaposition binds tighter than `+`.
#[derive(Clone, PartialEq, Eq)]
pub enum Regex {
    Empty,
    Eps,
    Letter(char),
    Union(Box<Regex>, Box<Regex>),
    Concat(Box<Regex>, Box<Regex>),
    Star(Box<Regex>),
}

impl Regex {
    pub fn union(a: Regex, b: Regex) -> Regex {
        Regex::Union(Box::new(a), Box::new(b))
    }

    pub fn concat(a: Regex, b: Regex) -> Regex {
        Regex::Concat(Box::new(a), Box::new(b))
    }

    pub fn star(a: Regex) -> Regex {
        Regex::Star(Box::new(a))
    }

    /// Letters occurring in the expression, in first-occurrence order.
    pub fn letters(&self) -> Vec<char> {
        let mut out = Vec::new();
        fn walk(r: &Regex, out: &mut Vec<char>) {
            match r {
                Regex::Empty | Regex::Eps => {}
                Regex::Letter(c) => {
                    if !out.contains(c) {
                        out.push(*c);
                    }
                }
                Regex::Union(a, b) | Regex::Concat(a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
                Regex::Star(a) => walk(a, out),
            }
        }
        walk(self, &mut out);
        out
    }

    pub fn nullable(&self) -> bool {
        match self {
            Regex::Empty | Regex::Letter(_) => false,
            Regex::Eps | Regex::Star(_) => true,
            Regex::Union(a, b) => a.nullable() || b.nullable(),
            Regex::Concat(a, b) => a.nullable() && b.nullable(),
        }
    }
}

impl fmt::Display for Regex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn prec(r: &Regex) -> u8 {
            match r {
                Regex::Union(_, _) => 0,
                Regex::Concat(_, _) => 1,
                _ => 2,
            }
        }
        fn go(r: &Regex, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
            let p = prec(r);
            if p < min {
                write!(f, "(")?;
            }
            match r {
                Regex::Empty => write!(f, "0")?,
                Regex::Eps => write!(f, "1")?,
                Regex::Letter(c) => write!(f, "{c}")?,
                Regex::Union(a, b) => {
                    go(a, f, 0)?;
                    write!(f, "+")?;
                    go(b, f, 0)?;
                }
                Regex::Concat(a, b) => {
                    go(a, f, 1)?;
                    go(b, f, 1)?;
                }
                Regex::Star(a) => {
                    go(a, f, 2)?;
                    write!(f, "*")?;
                }
            }
            if p < min {
                write!(f, ")")?;
            }
            Ok(())
        }
        go(self, f, 0)
    }
}

impl fmt::Debug for Regex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Regex({self})")
    }
}

struct RegexParser<'a> {
    chars: Vec<char>,
    pos: usize,
    text: &'a str,
}

impl<'a> RegexParser<'a> {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn error(&self, msg: &str) -> Error {
        Error::Parse(format!("regex \"{}\" at position {}: {msg}", self.text, self.pos))
    }

    fn union(&mut self) -> Result<Regex> {
        let mut r = self.concat()?;
        while self.peek() == Some('+') {
            self.pos += 1;
            r = Regex::union(r, self.concat()?);
        }
        Ok(r)
    }

    fn concat(&mut self) -> Result<Regex> {
        let mut r = self.starred()?;
        while matches!(self.peek(), Some(c) if c != '+' && c != ')') {
            r = Regex::concat(r, self.starred()?);
        }
        Ok(r)
    }

    fn starred(&mut self) -> Result<Regex> {
        let mut r = self.atom()?;
        while self.peek() == Some('*') {
            self.pos += 1;
            r = Regex::star(r);
        }
        Ok(r)
    }

    fn atom(&mut self) -> Result<Regex> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let r = self.union()?;
                if self.peek() != Some(')') {
                    return Err(self.error("expected ')'"));
                }
                self.pos += 1;
                Ok(r)
            }
            Some('0') => {
                self.pos += 1;
                Ok(Regex::Empty)
            }
            Some('1') => {
                self.pos += 1;
                Ok(Regex::Eps)
            }
            Some(c) if c.is_alphabetic() => {
                self.pos += 1;
                Ok(Regex::Letter(c))
            }
            Some(c) => Err(self.error(&format!("unexpected '{c}'"))),
            None => Err(self.error("unexpected end of input")),
        }
    }
}

pub fn regex_parse(text: &str) -> Result<Regex> {
    let mut p = RegexParser {
        chars: text.chars().filter(|c| !c.is_whitespace()).collect(),
        pos: 0,
        text,
    };
    if p.chars.is_empty() {
        return Err(p.error("empty regex"));
    }
    let r = p.union()?;
    if p.pos != p.chars.len() {
        return Err(p.error("trailing input"));
    }
    Ok(r)
}

/// Nondeterministic finite automaton without ε-moves, with transitions kept
/// as one Boolean matrix per letter.
#[derive(Clone, Debug)]
pub struct Nfa {
    alphabet: Alphabet,
    names: Vec<String>,
    trans: Vec<BoolMat>,
    initial: BoolVec,
    accepting: BoolVec,
}

impl Nfa {
    pub fn new(
        alphabet: Alphabet,
        names: Vec<String>,
        trans: Vec<BoolMat>,
        initial: BoolVec,
        accepting: BoolVec,
    ) -> Result<Self> {
        let n = names.len();
        if n == 0 {
            return Err(Error::Input("automaton must have at least one state".into()));
        }
        if trans.len() != alphabet.len() {
            return Err(Error::Shape("one transition matrix per letter required".into()));
        }
        for m in &trans {
            if m.nrows() != n || m.ncols() != n {
                return Err(Error::Shape("transition matrix shape mismatch".into()));
            }
        }
        if initial.width() != n || accepting.width() != n {
            return Err(Error::Shape("initial/accepting vector width mismatch".into()));
        }
        Ok(Nfa {
            alphabet,
            names,
            trans,
            initial,
            accepting,
        })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn n_states(&self) -> usize {
        self.names.len()
    }

    pub fn state_names(&self) -> &[String] {
        &self.names
    }

    pub fn initial(&self) -> &BoolVec {
        &self.initial
    }

    pub fn accepting(&self) -> &BoolVec {
        &self.accepting
    }

    pub fn letter_matrix(&self, c: char) -> Result<&BoolMat> {
        let i = self.alphabet.index_of(c).ok_or(Error::UnknownLetter(c))?;
        Ok(&self.trans[i])
    }

    /// Matrix of a word: the product of its letter matrices, identity for ε.
    pub fn word_matrix(&self, w: &FinWord) -> Result<BoolMat> {
        let mut m = BoolMat::identity(self.n_states());
        for &c in w.letters() {
            m = m.compose(self.letter_matrix(c)?)?;
        }
        Ok(m)
    }

    pub fn accepts(&self, w: &FinWord) -> Result<bool> {
        let mut v = self.initial.clone();
        for &c in w.letters() {
            v = self.letter_matrix(c)?.act_row(&v);
        }
        Ok(v.dot(&self.accepting))
    }

    /// 1 iff some closed path is labelled by (a rotation of) the word; the
    /// empty circular word evaluates to 1 on any nonempty automaton.
    pub fn circular_member(&self, c: &CircWord) -> Result<bool> {
        self.word_matrix(c.rep())?.trace()
    }
}

/// Deterministic complete automaton. A designated non-accepting sink, when
/// present, is the unique dead state.
#[derive(Clone, Debug)]
pub struct Dfa {
    alphabet: Alphabet,
    trans: Vec<Vec<usize>>,
    initial: usize,
    accepting: BoolVec,
    minimal: bool,
}

impl Dfa {
    pub fn from_parts(
        alphabet: Alphabet,
        trans: Vec<Vec<usize>>,
        initial: usize,
        accepting: BoolVec,
    ) -> Result<Self> {
        let n = trans.len();
        if n == 0 || initial >= n || accepting.width() != n {
            return Err(Error::Shape("malformed DFA".into()));
        }
        for row in &trans {
            if row.len() != alphabet.len() || row.iter().any(|&t| t >= n) {
                return Err(Error::Shape("DFA transition table must be total".into()));
            }
        }
        Ok(Dfa {
            alphabet,
            trans,
            initial,
            accepting,
            minimal: false,
        })
    }

    pub fn minimized(&self) -> Dfa {
        minimize(self)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn n_states(&self) -> usize {
        self.trans.len()
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn accepting(&self) -> &BoolVec {
        &self.accepting
    }

    pub fn is_minimal(&self) -> bool {
        self.minimal
    }

    pub fn step(&self, state: usize, c: char) -> Result<usize> {
        let i = self.alphabet.index_of(c).ok_or(Error::UnknownLetter(c))?;
        Ok(self.trans[state][i])
    }

    pub fn run(&self, from: usize, w: &FinWord) -> Result<usize> {
        let mut s = from;
        for &c in w.letters() {
            s = self.step(s, c)?;
        }
        Ok(s)
    }

    pub fn accepts(&self, w: &FinWord) -> Result<bool> {
        Ok(self.accepting.get(self.run(self.initial, w)?))
    }

    /// The unique non-accepting absorbing state, if any.
    pub fn sink(&self) -> Option<usize> {
        (0..self.n_states())
            .find(|&q| !self.accepting.get(q) && self.trans[q].iter().all(|&t| t == q))
    }

    pub fn complement(&self) -> Dfa {
        let accepting = BoolVec::from_bits(
            &(0..self.n_states())
                .map(|q| !self.accepting.get(q))
                .collect::<Vec<_>>(),
        );
        Dfa {
            alphabet: self.alphabet.clone(),
            trans: self.trans.clone(),
            initial: self.initial,
            accepting,
            minimal: self.minimal,
        }
    }

    pub fn to_nfa(&self) -> Nfa {
        let n = self.n_states();
        let trans = (0..self.alphabet.len())
            .map(|ci| BoolMat::from_fn(n, n, |q, r| self.trans[q][ci] == r))
            .collect();
        Nfa::new(
            self.alphabet.clone(),
            (0..n).map(|q| format!("d{q}")).collect(),
            trans,
            BoolVec::unit(n, self.initial),
            self.accepting.clone(),
        )
        .expect("DFA is a well-formed NFA")
    }
}

/// Glushkov position automaton of a regex; ε-free, one state per letter
/// occurrence plus a start state.
pub fn to_nfa(r: &Regex, alphabet: &Alphabet) -> Result<Nfa> {
    for c in r.letters() {
        if !alphabet.contains(c) {
            return Err(Error::UnknownLetter(c));
        }
    }

    // positions are numbered from 1; 0 is the start state
    struct Info {
        nullable: bool,
        first: Vec<usize>,
        last: Vec<usize>,
    }
    fn walk(r: &Regex, letters: &mut Vec<char>, follow: &mut Vec<Vec<usize>>) -> Info {
        match r {
            Regex::Empty => Info {
                nullable: false,
                first: vec![],
                last: vec![],
            },
            Regex::Eps => Info {
                nullable: true,
                first: vec![],
                last: vec![],
            },
            Regex::Letter(c) => {
                letters.push(*c);
                follow.push(Vec::new());
                let p = letters.len();
                Info {
                    nullable: false,
                    first: vec![p],
                    last: vec![p],
                }
            }
            Regex::Union(a, b) => {
                let ia = walk(a, letters, follow);
                let ib = walk(b, letters, follow);
                Info {
                    nullable: ia.nullable || ib.nullable,
                    first: [ia.first, ib.first].concat(),
                    last: [ia.last, ib.last].concat(),
                }
            }
            Regex::Concat(a, b) => {
                let ia = walk(a, letters, follow);
                let ib = walk(b, letters, follow);
                for &p in &ia.last {
                    follow[p - 1].extend_from_slice(&ib.first);
                }
                Info {
                    nullable: ia.nullable && ib.nullable,
                    first: if ia.nullable {
                        [ia.first, ib.first.clone()].concat()
                    } else {
                        ia.first
                    },
                    last: if ib.nullable {
                        [ia.last, ib.last.clone()].concat()
                    } else {
                        ib.last
                    },
                }
            }
            Regex::Star(a) => {
                let ia = walk(a, letters, follow);
                for &p in &ia.last {
                    let firsts = ia.first.clone();
                    follow[p - 1].extend(firsts);
                }
                Info {
                    nullable: true,
                    first: ia.first,
                    last: ia.last,
                }
            }
        }
    }

    let mut letters = Vec::new();
    let mut follow: Vec<Vec<usize>> = Vec::new();
    let info = walk(r, &mut letters, &mut follow);
    let n = letters.len() + 1;
    let mut trans: Vec<BoolMat> = (0..alphabet.len()).map(|_| BoolMat::zeros(n, n)).collect();
    for &p in &info.first {
        let ci = alphabet.index_of(letters[p - 1]).unwrap();
        trans[ci].set(0, p, true);
    }
    for (q, fs) in follow.iter().enumerate() {
        for &p in fs {
            let ci = alphabet.index_of(letters[p - 1]).unwrap();
            trans[ci].set(q + 1, p, true);
        }
    }
    let mut accepting = BoolVec::zeros(n);
    if info.nullable {
        accepting.set(0, true);
    }
    for &p in &info.last {
        accepting.set(p, true);
    }
    Nfa::new(
        alphabet.clone(),
        (0..n).map(|q| format!("p{q}")).collect(),
        trans,
        BoolVec::unit(n, 0),
        accepting,
    )
}

/// Determinize by the subset construction, then minimize. The result is the
/// minimal complete DFA, with states numbered by breadth-first discovery.
pub fn canonical_dfa(nfa: &Nfa) -> Dfa {
    let nl = nfa.alphabet.len();
    let mut subsets: Vec<BoolVec> = vec![nfa.initial.clone()];
    let mut index: HashMap<BoolVec, usize> = HashMap::new();
    index.insert(nfa.initial.clone(), 0);
    let mut trans: Vec<Vec<usize>> = Vec::new();
    let mut i = 0;
    while i < subsets.len() {
        let cur = subsets[i].clone();
        let mut row = Vec::with_capacity(nl);
        for ci in 0..nl {
            let next = nfa.trans[ci].act_row(&cur);
            let id = *index.entry(next.clone()).or_insert_with(|| {
                subsets.push(next.clone());
                subsets.len() - 1
            });
            row.push(id);
        }
        trans.push(row);
        i += 1;
    }
    let accepting = BoolVec::from_bits(
        &subsets
            .iter()
            .map(|s| s.dot(&nfa.accepting))
            .collect::<Vec<_>>(),
    );
    let dfa = Dfa {
        alphabet: nfa.alphabet.clone(),
        trans,
        initial: 0,
        accepting,
        minimal: false,
    };
    minimize(&dfa)
}

/// Partition-refinement minimization followed by canonical (BFS) renumbering.
fn minimize(dfa: &Dfa) -> Dfa {
    let n = dfa.n_states();
    let nl = dfa.alphabet.len();
    let mut class: Vec<usize> = (0..n).map(|q| dfa.accepting.get(q) as usize).collect();
    loop {
        let mut sig_index: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
        let mut next: Vec<usize> = vec![0; n];
        for q in 0..n {
            let sig = (
                class[q],
                (0..nl).map(|c| class[dfa.trans[q][c]]).collect::<Vec<_>>(),
            );
            let fresh = sig_index.len();
            let id = *sig_index.entry(sig).or_insert(fresh);
            next[q] = id;
        }
        if next == class {
            break;
        }
        class = next;
    }
    // canonical numbering: BFS from the initial class in letter order
    let class_target = |cl: usize, c: usize| {
        let q = (0..n).find(|&q| class[q] == cl).unwrap();
        class[dfa.trans[q][c]]
    };
    let mut renum: HashMap<usize, usize> = HashMap::new();
    let mut order: Vec<usize> = Vec::new();
    renum.insert(class[dfa.initial], 0);
    order.push(class[dfa.initial]);
    let mut i = 0;
    while i < order.len() {
        let cl = order[i];
        for c in 0..nl {
            let t = class_target(cl, c);
            if !renum.contains_key(&t) {
                renum.insert(t, order.len());
                order.push(t);
            }
        }
        i += 1;
    }
    // classes unreachable from the initial state are dropped
    let m = order.len();
    let mut trans = vec![vec![0; nl]; m];
    let mut accepting = BoolVec::zeros(m);
    for (new_id, &cl) in order.iter().enumerate() {
        for c in 0..nl {
            trans[new_id][c] = renum[&class_target(cl, c)];
        }
        let q = (0..n).find(|&q| class[q] == cl).unwrap();
        if dfa.accepting.get(q) {
            accepting.set(new_id, true);
        }
    }
    Dfa {
        alphabet: dfa.alphabet.clone(),
        trans,
        initial: 0,
        accepting,
        minimal: true,
    }
}

fn check_same_alphabet(a: &Alphabet, b: &Alphabet) -> Result<()> {
    if a != b {
        return Err(Error::Input("alphabet mismatch between automata".into()));
    }
    Ok(())
}

pub fn union(a: &Nfa, b: &Nfa) -> Result<Nfa> {
    check_same_alphabet(&a.alphabet, &b.alphabet)?;
    let (na, nb) = (a.n_states(), b.n_states());
    let n = na + nb;
    let trans = (0..a.alphabet.len())
        .map(|ci| {
            BoolMat::from_fn(n, n, |q, r| {
                if q < na && r < na {
                    a.trans[ci].get(q, r)
                } else if q >= na && r >= na {
                    b.trans[ci].get(q - na, r - na)
                } else {
                    false
                }
            })
        })
        .collect();
    let initial = BoolVec::from_ones(
        n,
        a.initial
            .ones()
            .chain(b.initial.ones().map(|q| q + na))
            .collect::<Vec<_>>(),
    );
    let accepting = BoolVec::from_ones(
        n,
        a.accepting
            .ones()
            .chain(b.accepting.ones().map(|q| q + na))
            .collect::<Vec<_>>(),
    );
    let names = a
        .names
        .iter()
        .map(|s| format!("l.{s}"))
        .chain(b.names.iter().map(|s| format!("r.{s}")))
        .collect();
    Nfa::new(a.alphabet.clone(), names, trans, initial, accepting)
}

pub fn intersect(a: &Nfa, b: &Nfa) -> Result<Nfa> {
    check_same_alphabet(&a.alphabet, &b.alphabet)?;
    let (na, nb) = (a.n_states(), b.n_states());
    let n = na * nb;
    let pair = |q: usize, p: usize| q * nb + p;
    let trans = (0..a.alphabet.len())
        .map(|ci| {
            BoolMat::from_fn(n, n, |x, y| {
                let (q1, p1) = (x / nb, x % nb);
                let (q2, p2) = (y / nb, y % nb);
                a.trans[ci].get(q1, q2) && b.trans[ci].get(p1, p2)
            })
        })
        .collect();
    let mut initial = BoolVec::zeros(n);
    let mut accepting = BoolVec::zeros(n);
    for q in a.initial.ones() {
        for p in b.initial.ones() {
            initial.set(pair(q, p), true);
        }
    }
    for q in a.accepting.ones() {
        for p in b.accepting.ones() {
            accepting.set(pair(q, p), true);
        }
    }
    let names = (0..n)
        .map(|x| format!("{}&{}", a.names[x / nb], b.names[x % nb]))
        .collect();
    Nfa::new(a.alphabet.clone(), names, trans, initial, accepting)
}

pub fn concat(a: &Nfa, b: &Nfa) -> Result<Nfa> {
    check_same_alphabet(&a.alphabet, &b.alphabet)?;
    let (na, nb) = (a.n_states(), b.n_states());
    let n = na + nb;
    let a_nullable = a.initial.dot(&a.accepting);
    let b_nullable = b.initial.dot(&b.accepting);
    let trans = (0..a.alphabet.len())
        .map(|ci| {
            BoolMat::from_fn(n, n, |q, r| {
                if q < na && r < na {
                    a.trans[ci].get(q, r)
                } else if q >= na && r >= na {
                    b.trans[ci].get(q - na, r - na)
                } else if q < na && r >= na {
                    // bridge: finish a, start b
                    a.accepting.get(q).then(|| ()).is_some()
                        && b.initial.ones().any(|p| b.trans[ci].get(p, r - na))
                } else {
                    false
                }
            })
        })
        .collect();
    let mut initial = BoolVec::from_ones(n, a.initial.ones().collect::<Vec<_>>());
    if a_nullable {
        for p in b.initial.ones() {
            initial.set(na + p, true);
        }
    }
    let mut accepting = BoolVec::from_ones(n, b.accepting.ones().map(|p| p + na).collect::<Vec<_>>());
    if b_nullable {
        for q in a.accepting.ones() {
            accepting.set(q, true);
        }
    }
    let names = a
        .names
        .iter()
        .map(|s| format!("l.{s}"))
        .chain(b.names.iter().map(|s| format!("r.{s}")))
        .collect();
    Nfa::new(a.alphabet.clone(), names, trans, initial, accepting)
}

pub fn star(a: &Nfa) -> Result<Nfa> {
    let na = a.n_states();
    let n = na + 1; // fresh initial-and-accepting state at index na
    let initial_step = |ci: usize, r: usize| a.initial.ones().any(|p| a.trans[ci].get(p, r));
    let trans = (0..a.alphabet.len())
        .map(|ci| {
            BoolMat::from_fn(n, n, |q, r| {
                if r == na {
                    false
                } else if q == na {
                    initial_step(ci, r)
                } else {
                    a.trans[ci].get(q, r)
                        || (a.accepting.get(q) && initial_step(ci, r))
                }
            })
        })
        .collect();
    let initial = BoolVec::unit(n, na);
    let mut accepting = BoolVec::from_ones(n, a.accepting.ones().collect::<Vec<_>>());
    accepting.set(na, true);
    let names = a
        .names
        .iter()
        .cloned()
        .chain(std::iter::once("s".to_string()))
        .collect();
    Nfa::new(a.alphabet.clone(), names, trans, initial, accepting)
}

/// NFA of the full language Σ*.
pub fn sigma_star(alphabet: &Alphabet) -> Nfa {
    let trans = (0..alphabet.len()).map(|_| BoolMat::identity(1)).collect();
    Nfa::new(
        alphabet.clone(),
        vec!["s".to_string()],
        trans,
        BoolVec::unit(1, 0),
        BoolVec::unit(1, 0),
    )
    .expect("one-state NFA")
}

/// Minimal DFA of `W⊥f = Σ* \ Σ*WΣ*`, the factor-closed language of words
/// avoiding `W`. Every state is accepting except the unique sink.
pub fn factor_complement(w: &Regex, alphabet: &Alphabet) -> Result<Dfa> {
    let w_nfa = to_nfa(w, alphabet)?;
    let any = sigma_star(alphabet);
    let saturated = concat(&concat(&any, &w_nfa)?, &any)?;
    Ok(canonical_dfa(&saturated).complement())
}

/// Language equality of two DFAs over the same alphabet, by a product walk.
pub fn equivalent(a: &Dfa, b: &Dfa) -> Result<bool> {
    check_same_alphabet(&a.alphabet, &b.alphabet)?;
    let nl = a.alphabet.len();
    let mut seen = std::collections::HashSet::new();
    let mut queue = vec![(a.initial, b.initial)];
    seen.insert((a.initial, b.initial));
    while let Some((q, p)) = queue.pop() {
        if a.accepting.get(q) != b.accepting.get(p) {
            return Ok(false);
        }
        for c in 0..nl {
            let t = (a.trans[q][c], b.trans[p][c]);
            if seen.insert(t) {
                queue.push(t);
            }
        }
    }
    Ok(true)
}

/// Language emptiness of a DFA.
pub fn is_empty(d: &Dfa) -> bool {
    let mut seen = std::collections::HashSet::new();
    let mut queue = vec![d.initial];
    seen.insert(d.initial);
    while let Some(q) = queue.pop() {
        if d.accepting.get(q) {
            return false;
        }
        for c in 0..d.alphabet.len() {
            let t = d.trans[q][c];
            if seen.insert(t) {
                queue.push(t);
            }
        }
    }
    true
}
