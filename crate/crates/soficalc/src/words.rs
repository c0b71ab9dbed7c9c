//! Finite, circular, left-infinite, right-infinite and bi-infinite words,
//! restricted to ultimately periodic representatives, with canonical normal
//! forms so that two values denote the same word iff they compare equal.

use std::fmt;

use crate::error::{Error, Result};

/// Ordered set of single-character letters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    letters: Vec<char>,
}

impl Alphabet {
    pub fn new(letters: impl IntoIterator<Item = char>) -> Result<Self> {
        let letters: Vec<char> = letters.into_iter().collect();
        if letters.is_empty() {
            return Err(Error::Input("alphabet must have at least one letter".into()));
        }
        for (i, c) in letters.iter().enumerate() {
            if letters[..i].contains(c) {
                return Err(Error::Input(format!("duplicate letter '{c}' in alphabet")));
            }
        }
        Ok(Alphabet { letters })
    }

    pub fn from_str(s: &str) -> Result<Self> {
        Alphabet::new(s.chars())
    }

    pub fn letters(&self) -> &[char] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn index_of(&self, c: char) -> Option<usize> {
        self.letters.iter().position(|&l| l == c)
    }

    pub fn contains(&self, c: char) -> bool {
        self.index_of(c).is_some()
    }

    fn check(&self, letters: &[char]) -> Result<()> {
        for &c in letters {
            if !self.contains(c) {
                return Err(Error::UnknownLetter(c));
            }
        }
        Ok(())
    }
}

/// Finite word, possibly empty.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FinWord(Vec<char>);

impl FinWord {
    pub fn new(letters: impl IntoIterator<Item = char>) -> Self {
        FinWord(letters.into_iter().collect())
    }

    pub fn empty() -> Self {
        FinWord(Vec::new())
    }

    pub fn letters(&self) -> &[char] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &FinWord) -> FinWord {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        FinWord(v)
    }

    pub fn repeat(&self, n: usize) -> FinWord {
        let mut v = Vec::with_capacity(self.0.len() * n);
        for _ in 0..n {
            v.extend_from_slice(&self.0);
        }
        FinWord(v)
    }
}

impl fmt::Display for FinWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            write!(f, "_")
        } else {
            for c in &self.0 {
                write!(f, "{c}")?;
            }
            Ok(())
        }
    }
}

impl fmt::Debug for FinWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FinWord({self})")
    }
}

/// Finite word up to rotation, stored as its canonical rotation.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CircWord {
    rep: FinWord,
}

impl CircWord {
    pub fn rep(&self) -> &FinWord {
        &self.rep
    }

    pub fn len(&self) -> usize {
        self.rep.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rep.is_empty()
    }
}

impl fmt::Display for CircWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "@{}", self.rep)
    }
}

impl fmt::Debug for CircWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CircWord({self})")
    }
}

/// Least rotation of `w` under the alphabet's declared letter order.
pub fn circ_canonical(alphabet: &Alphabet, w: &FinWord) -> Result<CircWord> {
    alphabet.check(w.letters())?;
    let n = w.len();
    if n == 0 {
        return Ok(CircWord { rep: FinWord::empty() });
    }
    let key: Vec<usize> = w
        .letters()
        .iter()
        .map(|&c| alphabet.index_of(c).unwrap())
        .collect();
    let mut best = 0usize;
    for start in 1..n {
        for k in 0..n {
            let a = key[(start + k) % n];
            let b = key[(best + k) % n];
            if a != b {
                if a < b {
                    best = start;
                }
                break;
            }
        }
    }
    let rep = FinWord::new((0..n).map(|k| w.letters()[(best + k) % n]));
    Ok(CircWord { rep })
}

fn primitive_root(w: &[char]) -> Vec<char> {
    let n = w.len();
    for d in 1..=n {
        if n % d == 0 && (0..n).all(|i| w[i] == w[i % d]) {
            return w[..d].to_vec();
        }
    }
    unreachable!("every nonempty word has a primitive root")
}

/// Right-infinite ultimately periodic word `u v^ω` in normal form: the
/// preperiod `u` is minimal and the period `v` primitive.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RightUp {
    prefix: Vec<char>,
    period: Vec<char>,
}

impl RightUp {
    pub fn new(prefix: &FinWord, period: &FinWord) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::Parse("empty period in right-infinite word".into()));
        }
        let mut u = prefix.letters().to_vec();
        let mut v = primitive_root(period.letters());
        while let Some(&last) = u.last() {
            if last == *v.last().unwrap() {
                u.pop();
                v.rotate_right(1);
            } else {
                break;
            }
        }
        Ok(RightUp { prefix: u, period: v })
    }

    pub fn prefix(&self) -> FinWord {
        FinWord::new(self.prefix.iter().copied())
    }

    pub fn period(&self) -> FinWord {
        FinWord::new(self.period.iter().copied())
    }

    /// First `n` letters of `u v^ω`.
    pub fn unfold(&self, n: usize) -> Vec<char> {
        (0..n).map(|i| self.letter_at(i)).collect()
    }

    /// Letter at position `i ≥ 0`.
    pub fn letter_at(&self, i: usize) -> char {
        if i < self.prefix.len() {
            self.prefix[i]
        } else {
            self.period[(i - self.prefix.len()) % self.period.len()]
        }
    }

    /// The word `w · self` (prepending a finite word).
    pub fn prepend(&self, w: &FinWord) -> RightUp {
        RightUp::new(&w.concat(&self.prefix()), &self.period()).expect("period stays nonempty")
    }
}

impl fmt::Display for RightUp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.prefix {
            write!(f, "{c}")?;
        }
        write!(f, "(")?;
        for c in &self.period {
            write!(f, "{c}")?;
        }
        write!(f, ")^w")
    }
}

impl fmt::Debug for RightUp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RightUp({self})")
    }
}

/// Left-infinite ultimately periodic word `···vvv u` in normal form.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LeftUp {
    period: Vec<char>,
    suffix: Vec<char>,
}

impl LeftUp {
    pub fn new(period: &FinWord, suffix: &FinWord) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::Parse("empty period in left-infinite word".into()));
        }
        let mut v = primitive_root(period.letters());
        let mut u = suffix.letters().to_vec();
        while let Some(&first) = u.first() {
            if first == v[0] {
                u.remove(0);
                v.rotate_left(1);
            } else {
                break;
            }
        }
        Ok(LeftUp { period: v, suffix: u })
    }

    pub fn period(&self) -> FinWord {
        FinWord::new(self.period.iter().copied())
    }

    pub fn suffix(&self) -> FinWord {
        FinWord::new(self.suffix.iter().copied())
    }

    /// Last `n` letters of `···vvv u`, in reading order.
    pub fn unfold(&self, n: usize) -> Vec<char> {
        (0..n).map(|i| self.letter_at_back(n - 1 - i)).collect()
    }

    /// Letter at distance `back` from the right end (0 = last letter).
    pub fn letter_at_back(&self, back: usize) -> char {
        if back < self.suffix.len() {
            self.suffix[self.suffix.len() - 1 - back]
        } else {
            let k = back - self.suffix.len();
            let p = self.period.len();
            self.period[p - 1 - k % p]
        }
    }

    /// The word `self · w` (appending a finite word).
    pub fn append(&self, w: &FinWord) -> LeftUp {
        LeftUp::new(&self.period(), &self.suffix().concat(w)).expect("period stays nonempty")
    }
}

impl fmt::Display for LeftUp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "w^(")?;
        for c in &self.period {
            write!(f, "{c}")?;
        }
        write!(f, ")")?;
        for c in &self.suffix {
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for LeftUp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LeftUp({self})")
    }
}

/// Bi-infinite ultimately periodic word `···v₁v₁ m v₂v₂···` up to shift.
///
/// Normal form: both periods primitive, the middle is the maximal
/// aperiodic core, and purely periodic words are stored with the least
/// rotation as both periods and an empty middle.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BiUp {
    left: Vec<char>,
    middle: Vec<char>,
    right: Vec<char>,
}

impl BiUp {
    pub fn new(left: &FinWord, middle: &FinWord, right: &FinWord) -> Result<Self> {
        if left.is_empty() || right.is_empty() {
            return Err(Error::Parse("empty period in bi-infinite word".into()));
        }
        let vl = primitive_root(left.letters());
        let vr = primitive_root(right.letters());
        let m = middle.letters();

        let copies = |p: usize| (m.len() + 2 * (vl.len() + vr.len())) / p + 3;
        let kl = copies(vl.len());
        let kr = copies(vr.len());
        let mut window: Vec<char> = Vec::new();
        for _ in 0..kl {
            window.extend_from_slice(&vl);
        }
        window.extend_from_slice(m);
        for _ in 0..kr {
            window.extend_from_slice(&vr);
        }
        let len = window.len();

        // Extent of the left periodicity: first index where it fails.
        let mut e = vl.len();
        while e < len && window[e] == window[e - vl.len()] {
            e += 1;
        }
        // Start of the right periodicity.
        let mut b = len - vr.len();
        while b > 0 && window[b - 1] == window[b - 1 + vr.len()] {
            b -= 1;
        }
        if e == len || b == 0 {
            // Purely periodic: both periods force each other, the word is
            // v^Z for the least rotation of the left period.
            let v = least_rotation(&vl);
            return Ok(BiUp {
                left: v.clone(),
                middle: Vec::new(),
                right: v,
            });
        }
        if e >= b {
            // Periodic zones meet: the cut sits at the start of the right
            // zone and the middle is empty.
            let c = b;
            Ok(BiUp {
                left: window[c - vl.len()..c].to_vec(),
                middle: Vec::new(),
                right: window[c..c + vr.len()].to_vec(),
            })
        } else {
            Ok(BiUp {
                left: window[e - vl.len()..e].to_vec(),
                middle: window[e..b].to_vec(),
                right: window[b..b + vr.len()].to_vec(),
            })
        }
    }

    pub fn from_parts(left: &LeftUp, middle: &FinWord, right: &RightUp) -> BiUp {
        let m = left.suffix().concat(middle).concat(&right.prefix());
        BiUp::new(&left.period(), &m, &right.period()).expect("periods nonempty")
    }

    pub fn left_period(&self) -> FinWord {
        FinWord::new(self.left.iter().copied())
    }

    pub fn middle(&self) -> FinWord {
        FinWord::new(self.middle.iter().copied())
    }

    pub fn right_period(&self) -> FinWord {
        FinWord::new(self.right.iter().copied())
    }

    /// Window of `n_left` letters before the middle, the middle, and
    /// `n_right` letters after it.
    pub fn unfold(&self, n_left: usize, n_right: usize) -> Vec<char> {
        let lu = LeftUp::new(&self.left_period(), &FinWord::empty()).unwrap();
        let ru = RightUp::new(&FinWord::empty(), &self.right_period()).unwrap();
        let mut w = lu.unfold(n_left);
        w.extend_from_slice(&self.middle);
        w.extend(ru.unfold(n_right));
        w
    }
}

fn least_rotation(w: &[char]) -> Vec<char> {
    let n = w.len();
    let mut best = 0usize;
    for start in 1..n {
        for k in 0..n {
            let a = w[(start + k) % n];
            let b = w[(best + k) % n];
            if a != b {
                if a < b {
                    best = start;
                }
                break;
            }
        }
    }
    (0..n).map(|k| w[(best + k) % n]).collect()
}

impl fmt::Display for BiUp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "w^(")?;
        for c in &self.left {
            write!(f, "{c}")?;
        }
        write!(f, ").")?;
        if !self.middle.is_empty() {
            for c in &self.middle {
                write!(f, "{c}")?;
            }
            write!(f, ".")?;
        }
        write!(f, "(")?;
        for c in &self.right {
            write!(f, "{c}")?;
        }
        write!(f, ")^w")
    }
}

impl fmt::Debug for BiUp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BiUp({self})")
    }
}

/// Any of the five word kinds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Word {
    Finite(FinWord),
    Circular(CircWord),
    Right(RightUp),
    Left(LeftUp),
    Bi(BiUp),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WordKind {
    Finite,
    Circular,
    RightUp,
    LeftUp,
    BiUp,
}

/// Parse a word in the surface grammar: finite `abba`, empty `_`, circular
/// `@abba`, right-UP `ab(ba)^w`, left-UP `w^(b)a`, bi-infinite
/// `w^(b).aba.(b)^w` (middle optional).
pub fn parse_word(alphabet: &Alphabet, text: &str, kind: WordKind) -> Result<Word> {
    match kind {
        WordKind::Finite => Ok(Word::Finite(parse_fin(alphabet, text)?)),
        WordKind::Circular => Ok(Word::Circular(parse_circ(alphabet, text)?)),
        WordKind::RightUp => Ok(Word::Right(parse_right_up(alphabet, text)?)),
        WordKind::LeftUp => Ok(Word::Left(parse_left_up(alphabet, text)?)),
        WordKind::BiUp => Ok(Word::Bi(parse_bi_up(alphabet, text)?)),
    }
}

fn letters_of(alphabet: &Alphabet, text: &str) -> Result<Vec<char>> {
    if text == "_" {
        return Ok(Vec::new());
    }
    let letters: Vec<char> = text.chars().collect();
    alphabet.check(&letters)?;
    Ok(letters)
}

pub fn parse_fin(alphabet: &Alphabet, text: &str) -> Result<FinWord> {
    if text.is_empty() {
        return Err(Error::Parse("empty word text; write '_' for the empty word".into()));
    }
    Ok(FinWord(letters_of(alphabet, text)?))
}

pub fn parse_circ(alphabet: &Alphabet, text: &str) -> Result<CircWord> {
    let rest = text
        .strip_prefix('@')
        .ok_or_else(|| Error::Parse(format!("circular word must start with '@': {text}")))?;
    let w = if rest.is_empty() {
        FinWord::empty()
    } else {
        parse_fin(alphabet, rest)?
    };
    circ_canonical(alphabet, &w)
}

pub fn parse_right_up(alphabet: &Alphabet, text: &str) -> Result<RightUp> {
    let open = text
        .find('(')
        .ok_or_else(|| Error::Parse(format!("right-infinite word must contain '(v)^w': {text}")))?;
    let rest = &text[open + 1..];
    let close = rest
        .find(')')
        .ok_or_else(|| Error::Parse(format!("missing ')' in {text}")))?;
    if &rest[close + 1..] != "^w" {
        return Err(Error::Parse(format!("right-infinite word must end in ')^w': {text}")));
    }
    let prefix = if open == 0 {
        FinWord::empty()
    } else {
        parse_fin(alphabet, &text[..open])?
    };
    let period = parse_fin(alphabet, &rest[..close])?;
    RightUp::new(&prefix, &period)
}

pub fn parse_left_up(alphabet: &Alphabet, text: &str) -> Result<LeftUp> {
    let rest = text
        .strip_prefix("w^(")
        .ok_or_else(|| Error::Parse(format!("left-infinite word must start with 'w^(': {text}")))?;
    let close = rest
        .find(')')
        .ok_or_else(|| Error::Parse(format!("missing ')' in {text}")))?;
    let period = parse_fin(alphabet, &rest[..close])?;
    let tail = &rest[close + 1..];
    let suffix = if tail.is_empty() {
        FinWord::empty()
    } else {
        parse_fin(alphabet, tail)?
    };
    LeftUp::new(&period, &suffix)
}

pub fn parse_bi_up(alphabet: &Alphabet, text: &str) -> Result<BiUp> {
    let rest = text
        .strip_prefix("w^(")
        .ok_or_else(|| Error::Parse(format!("bi-infinite word must start with 'w^(': {text}")))?;
    let close = rest
        .find(')')
        .ok_or_else(|| Error::Parse(format!("missing ')' in {text}")))?;
    let left = parse_fin(alphabet, &rest[..close])?;
    let tail = rest[close + 1..]
        .strip_prefix('.')
        .ok_or_else(|| Error::Parse(format!("expected '.' after left period in {text}")))?;
    let (middle, right_text) = if let Some(stripped) = tail.strip_prefix('(') {
        (FinWord::empty(), format!("({stripped}"))
    } else {
        let dot = tail
            .find('.')
            .ok_or_else(|| Error::Parse(format!("expected '.' after middle in {text}")))?;
        (parse_fin(alphabet, &tail[..dot])?, tail[dot + 1..].to_string())
    };
    let rt = right_text
        .strip_prefix('(')
        .ok_or_else(|| Error::Parse(format!("expected '(v)^w' at the end of {text}")))?;
    let close = rt
        .find(')')
        .ok_or_else(|| Error::Parse(format!("missing ')' in {text}")))?;
    if &rt[close + 1..] != "^w" {
        return Err(Error::Parse(format!("bi-infinite word must end in ')^w': {text}")));
    }
    let right = parse_fin(alphabet, &rt[..close])?;
    BiUp::new(&left, &middle, &right)
}
