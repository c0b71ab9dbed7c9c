//! Automata on right-infinite words (Büchi, Muller, Rabin, Streett),
//! quasi-automata over projective carriers, ω-regular expressions, exact
//! acceptance on ultimately periodic words, and the state spaces attached
//! to ω-evaluations.

use std::collections::{HashMap, HashSet};

use crate::boolsemi::{is_linear_functional, is_linear_map, BoolMat, BoolVec, ElementMap, Semilattice};
use crate::error::{Error, Result};
use crate::regular::{canonical_dfa, to_nfa, Regex};
use crate::sofic::{
    action_closure, build_state_pair, statespace_trace, StateSpacePair, Witness,
};
use crate::words::{Alphabet, CircWord, FinWord, RightUp};

/// Acceptance condition over the set of states visited infinitely often.
#[derive(Clone, Debug)]
pub enum Condition {
    Buchi(BoolVec),
    Muller(Vec<BoolVec>),
    Rabin(Vec<(BoolVec, BoolVec)>),
    Streett(Vec<(BoolVec, BoolVec)>),
}

#[derive(Clone, Debug)]
pub struct OmegaAutomaton {
    alphabet: Alphabet,
    names: Vec<String>,
    trans: Vec<BoolMat>,
    initial: BoolVec,
    condition: Condition,
}

impl OmegaAutomaton {
    pub fn new(
        alphabet: Alphabet,
        names: Vec<String>,
        trans: Vec<BoolMat>,
        initial: BoolVec,
        condition: Condition,
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
        if initial.width() != n {
            return Err(Error::Shape("initial vector width mismatch".into()));
        }
        let width_ok = |v: &BoolVec| v.width() == n;
        let cond_ok = match &condition {
            Condition::Buchi(acc) => width_ok(acc),
            Condition::Muller(sets) => sets.iter().all(width_ok),
            Condition::Rabin(ps) | Condition::Streett(ps) => {
                ps.iter().all(|(b, g)| width_ok(b) && width_ok(g))
            }
        };
        if !cond_ok {
            return Err(Error::Shape("acceptance condition width mismatch".into()));
        }
        Ok(OmegaAutomaton {
            alphabet,
            names,
            trans,
            initial,
            condition,
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

    pub fn condition(&self) -> &Condition {
        &self.condition
    }

    pub fn letter_matrix(&self, c: char) -> Result<&BoolMat> {
        let i = self.alphabet.index_of(c).ok_or(Error::UnknownLetter(c))?;
        Ok(&self.trans[i])
    }

    pub fn letter_matrices(&self) -> &[BoolMat] {
        &self.trans
    }

    pub fn word_matrix(&self, w: &FinWord) -> Result<BoolMat> {
        let mut m = BoolMat::identity(self.n_states());
        for &c in w.letters() {
            m = m.compose(self.letter_matrix(c)?)?;
        }
        Ok(m)
    }

    /// Deterministic: a single initial state and at most one successor per
    /// state and letter.
    pub fn is_deterministic(&self) -> bool {
        self.initial.count_ones() == 1
            && self.trans.iter().all(|m| {
                (0..m.nrows()).all(|q| m.row(q).count_ones() <= 1)
            })
    }

    /// Exact acceptance of an ultimately periodic word, by cycle analysis on
    /// the run graph of the period.
    pub fn accepts(&self, w: &RightUp) -> Result<bool> {
        let u = w.prefix();
        let v = w.period();
        let mut start = self.initial.clone();
        for &c in u.letters() {
            start = self.letter_matrix(c)?.act_row(&start);
        }
        let h = RunGraph::new(self, &v)?;
        let reach = h.reachable(&start);
        match &self.condition {
            Condition::Buchi(acc) => Ok(h.sccs().iter().any(|scc| {
                h.is_cyclic(scc)
                    && scc.iter().any(|&x| reach[x])
                    && scc.iter().any(|&x| acc.get(h.state_of(x)))
            })),
            Condition::Muller(family) => {
                for f in family {
                    let keep: Vec<bool> = (0..h.n_nodes())
                        .map(|x| f.get(h.state_of(x)))
                        .collect();
                    for scc in h.sccs_within(&keep) {
                        if !h.is_cyclic(&scc) || !scc.iter().any(|&x| reach[x]) {
                            continue;
                        }
                        let proj: HashSet<usize> = scc.iter().map(|&x| h.state_of(x)).collect();
                        let f_set: HashSet<usize> = f.ones().collect();
                        if proj == f_set {
                            return Ok(true);
                        }
                    }
                }
                Ok(false)
            }
            Condition::Rabin(pairs) => {
                for (bad, good) in pairs {
                    let keep: Vec<bool> = (0..h.n_nodes())
                        .map(|x| !bad.get(h.state_of(x)))
                        .collect();
                    for scc in h.sccs_within(&keep) {
                        if h.is_cyclic(&scc)
                            && scc.iter().any(|&x| reach[x])
                            && scc.iter().any(|&x| good.get(h.state_of(x)))
                        {
                            return Ok(true);
                        }
                    }
                }
                Ok(false)
            }
            Condition::Streett(pairs) => {
                // SCC refinement: drop the bad states of violated pairs and
                // recurse until some strongly connected subgraph satisfies
                // every pair.
                fn search(
                    h: &RunGraph,
                    pairs: &[(BoolVec, BoolVec)],
                    nodes: &[bool],
                    reach: Option<&[bool]>,
                ) -> bool {
                    for scc in h.sccs_within(nodes) {
                        if !h.is_cyclic(&scc) {
                            continue;
                        }
                        if let Some(r) = reach {
                            if !scc.iter().any(|&x| r[x]) {
                                continue;
                            }
                        }
                        let violated: Vec<&(BoolVec, BoolVec)> = pairs
                            .iter()
                            .filter(|(b, g)| {
                                scc.iter().any(|&x| b.get(h.state_of(x)))
                                    && !scc.iter().any(|&x| g.get(h.state_of(x)))
                            })
                            .collect();
                        if violated.is_empty() {
                            return true;
                        }
                        let mut sub = vec![false; h.n_nodes()];
                        for &x in &scc {
                            sub[x] = !violated.iter().any(|(b, _)| b.get(h.state_of(x)));
                        }
                        if search(h, pairs, &sub, None) {
                            return true;
                        }
                    }
                    false
                }
                let all = vec![true; h.n_nodes()];
                Ok(search(&h, pairs, &all, Some(&reach)))
            }
        }
    }
}

/// Run graph of a period: nodes are (state, position mod |v|), edges follow
/// the letter at each position.
struct RunGraph {
    n_states: usize,
    period_len: usize,
    adj: Vec<Vec<usize>>,
}

impl RunGraph {
    fn new(a: &OmegaAutomaton, v: &FinWord) -> Result<Self> {
        let n = a.n_states();
        let p = v.len().max(1);
        let mut adj = vec![Vec::new(); n * p];
        if v.is_empty() {
            return Err(Error::Parse("empty period".into()));
        }
        for (i, &c) in v.letters().iter().enumerate() {
            let m = a.letter_matrix(c)?;
            for q in 0..n {
                for r in m.row(q).ones() {
                    adj[q * p + i].push(r * p + (i + 1) % p);
                }
            }
        }
        Ok(RunGraph {
            n_states: n,
            period_len: p,
            adj,
        })
    }

    fn n_nodes(&self) -> usize {
        self.n_states * self.period_len
    }

    fn state_of(&self, node: usize) -> usize {
        node / self.period_len
    }

    fn reachable(&self, start_states: &BoolVec) -> Vec<bool> {
        let mut seen = vec![false; self.n_nodes()];
        let mut queue = Vec::new();
        for q in start_states.ones() {
            let x = q * self.period_len;
            if !seen[x] {
                seen[x] = true;
                queue.push(x);
            }
        }
        while let Some(x) = queue.pop() {
            for &y in &self.adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    queue.push(y);
                }
            }
        }
        seen
    }

    fn sccs(&self) -> Vec<Vec<usize>> {
        let all = vec![true; self.n_nodes()];
        self.sccs_within(&all)
    }

    /// Kosaraju on the subgraph induced by `keep`.
    fn sccs_within(&self, keep: &[bool]) -> Vec<Vec<usize>> {
        let n = self.n_nodes();
        let mut order = Vec::with_capacity(n);
        let mut seen = vec![false; n];
        for s in 0..n {
            if seen[s] || !keep[s] {
                continue;
            }
            // iterative post-order
            let mut stack = vec![(s, 0usize)];
            seen[s] = true;
            while let Some(&mut (x, ref mut i)) = stack.last_mut() {
                if *i < self.adj[x].len() {
                    let y = self.adj[x][*i];
                    *i += 1;
                    if keep[y] && !seen[y] {
                        seen[y] = true;
                        stack.push((y, 0));
                    }
                } else {
                    order.push(x);
                    stack.pop();
                }
            }
        }
        let mut radj = vec![Vec::new(); n];
        for x in 0..n {
            if !keep[x] {
                continue;
            }
            for &y in &self.adj[x] {
                if keep[y] {
                    radj[y].push(x);
                }
            }
        }
        let mut comp = vec![usize::MAX; n];
        let mut out: Vec<Vec<usize>> = Vec::new();
        for &s in order.iter().rev() {
            if comp[s] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut members = vec![s];
            comp[s] = id;
            let mut queue = vec![s];
            while let Some(x) = queue.pop() {
                for &y in &radj[x] {
                    if comp[y] == usize::MAX {
                        comp[y] = id;
                        members.push(y);
                        queue.push(y);
                    }
                }
            }
            out.push(members);
        }
        out
    }

    fn is_cyclic(&self, scc: &[usize]) -> bool {
        if scc.len() > 1 {
            return true;
        }
        let x = scc[0];
        self.adj[x].contains(&x)
    }
}

/// ω-regular expression: a sum of `r·s^ω` summands, each `s` with an ε-free
/// language.
#[derive(Clone, Debug)]
pub struct OmegaRegex {
    summands: Vec<(Regex, Regex)>,
}

impl OmegaRegex {
    pub fn new(summands: Vec<(Regex, Regex)>) -> Result<Self> {
        if summands.is_empty() {
            return Err(Error::Parse("ω-regex needs at least one summand".into()));
        }
        for (_, s) in &summands {
            if s.nullable() {
                return Err(Error::Input(
                    "s^w is ill-defined when the language of s contains the empty word".into(),
                ));
            }
        }
        Ok(OmegaRegex { summands })
    }

    pub fn summands(&self) -> &[(Regex, Regex)] {
        &self.summands
    }
}

/// Parse summands `r.(s)^w` joined by `+`; a bare `(s)^w` means `r = 1`.
/// An `r` containing a top-level `+` must be parenthesized.
pub fn parse_omega_regex(text: &str) -> Result<OmegaRegex> {
    let mut summands = Vec::new();
    for part in split_top_level(text) {
        let part = part.trim();
        let tail = part
            .strip_suffix(")^w")
            .ok_or_else(|| Error::Parse(format!("ω-regex summand must end in ')^w': {part}")))?;
        // find the matching '(' of the final group
        let chars: Vec<char> = tail.chars().collect();
        let mut depth = 0i32;
        let mut open = None;
        for (i, &c) in chars.iter().enumerate().rev() {
            match c {
                ')' => depth += 1,
                '(' => {
                    if depth == 0 {
                        open = Some(i);
                        break;
                    }
                    depth -= 1;
                }
                _ => {}
            }
        }
        let open = open.ok_or_else(|| Error::Parse(format!("unbalanced ω-regex summand: {part}")))?;
        let s_text: String = chars[open + 1..].iter().collect();
        let mut r_text: String = chars[..open].iter().collect();
        if let Some(stripped) = r_text.strip_suffix('.') {
            r_text = stripped.to_string();
        }
        let r = if r_text.is_empty() {
            Regex::Eps
        } else {
            crate::regular::regex_parse(&r_text)?
        };
        let s = crate::regular::regex_parse(&s_text)?;
        summands.push((r, s));
    }
    OmegaRegex::new(summands)
}

fn split_top_level(text: &str) -> Vec<String> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for c in text.chars() {
        match c {
            '(' => {
                depth += 1;
                cur.push(c);
            }
            ')' => {
                depth -= 1;
                cur.push(c);
            }
            '+' if depth == 0 => {
                parts.push(std::mem::take(&mut cur));
            }
            _ => cur.push(c),
        }
    }
    parts.push(cur);
    parts
}

/// Büchi automaton recognizing the ω-regex. Each summand gets a loop state
/// entered exactly at block boundaries of `s^ω`; it is the accepting state.
pub fn omega_regex_to_buchi(e: &OmegaRegex, alphabet: &Alphabet) -> Result<OmegaAutomaton> {
    let mut total: usize = 0;
    let mut pieces = Vec::new();
    for (r, s) in e.summands() {
        let nr = to_nfa(r, alphabet)?;
        let ns = to_nfa(s, alphabet)?;
        pieces.push((nr, ns));
    }
    for (nr, ns) in &pieces {
        total += nr.n_states() + ns.n_states() + 1;
    }
    let nl = alphabet.len();
    let mut trans = vec![BoolMat::zeros(total, total); nl];
    let mut initial = BoolVec::zeros(total);
    let mut accepting = BoolVec::zeros(total);
    let mut names = Vec::with_capacity(total);
    let mut base = 0;
    for (nr, ns) in &pieces {
        let (kr, ks) = (nr.n_states(), ns.n_states());
        let loop_state = base + kr + ks;
        for ci in 0..nl {
            let c = alphabet.letters()[ci];
            let mr = nr.letter_matrix(c).unwrap();
            let ms = ns.letter_matrix(c).unwrap();
            // first-letter successors of s from its initial states
            let s_start = ms.act_row(ns.initial());
            let s_start_hits_final = s_start.dot(ns.accepting());
            for q in 0..kr {
                for t in mr.row(q).ones() {
                    trans[ci].set(base + q, base + t, true);
                }
                // completing r bridges to the loop state
                if mr.row(q).dot(nr.accepting()) {
                    trans[ci].set(base + q, loop_state, true);
                }
            }
            for q in 0..ks {
                for t in ms.row(q).ones() {
                    trans[ci].set(base + kr + q, base + kr + t, true);
                }
                if ms.row(q).dot(ns.accepting()) {
                    trans[ci].set(base + kr + q, loop_state, true);
                }
            }
            for t in s_start.ones() {
                trans[ci].set(loop_state, base + kr + t, true);
            }
            if s_start_hits_final {
                trans[ci].set(loop_state, loop_state, true);
            }
        }
        for q in nr.initial().ones() {
            initial.set(base + q, true);
        }
        if nr.initial().dot(nr.accepting()) {
            initial.set(loop_state, true);
        }
        accepting.set(loop_state, true);
        for q in 0..kr {
            names.push(format!("r{}.{q}", names.len()));
        }
        for q in 0..ks {
            names.push(format!("s{}.{q}", names.len()));
        }
        names.push(format!("loop{}", names.len()));
        base += kr + ks + 1;
    }
    OmegaAutomaton::new(alphabet.clone(), names, trans, initial, Condition::Buchi(accepting))
}

/// Semantic membership of an ultimately periodic word in `∪ rᵢ·sᵢ^ω`, by a
/// bounded block-cut search with period alignment. Exact for UP words.
pub fn omega_regex_member(e: &OmegaRegex, alphabet: &Alphabet, w: &RightUp) -> Result<bool> {
    let u_len = w.prefix().len();
    let v_len = w.period().len();
    for (r, s) in e.summands() {
        let dr = canonical_dfa(&to_nfa(r, alphabet)?);
        let ds = canonical_dfa(&to_nfa(s, alphabet)?);
        // positions 0..|u|+|v| are distinct; beyond that they wrap mod |v|
        let canon_positions = u_len + v_len;
        let max_block = v_len * (2 * ds.n_states() + 2) + canon_positions + 1;
        let window = w.unfold(canon_positions + max_block + 1);
        let canon = |p: usize| -> usize {
            if p < canon_positions {
                p
            } else {
                u_len + (p - u_len) % v_len
            }
        };
        // block edges between canonical positions
        let mut edges: Vec<HashSet<usize>> = vec![HashSet::new(); canon_positions];
        for p in 0..canon_positions {
            let mut state = ds.initial();
            for m in 1..=max_block {
                let c = window[p + m - 1];
                state = ds.step(state, c)?;
                if ds.accepting().get(state) {
                    edges[p].insert(canon(p + m));
                }
            }
        }
        // start cuts: prefixes of the word in L(r); positions beyond the
        // canonical range keep wrapping, so one extra period suffices
        let mut starts = HashSet::new();
        {
            let mut state = dr.initial();
            if dr.accepting().get(state) {
                starts.insert(canon(0));
            }
            for (p, &c) in window.iter().enumerate().take(canon_positions + v_len) {
                state = dr.step(state, c)?;
                if dr.accepting().get(state) {
                    starts.insert(canon(p + 1));
                }
            }
        }
        // an infinite tiling exists iff some start cut reaches a cycle in
        // the canonical block graph
        let mut reach: HashSet<usize> = starts.iter().copied().collect();
        let mut queue: Vec<usize> = reach.iter().copied().collect();
        while let Some(p) = queue.pop() {
            for &q in &edges[p] {
                if reach.insert(q) {
                    queue.push(q);
                }
            }
        }
        // cycle detection among reachable canonical positions
        for &p in &reach {
            // is p on a cycle of the edge graph?
            let mut seen = HashSet::new();
            let mut stack: Vec<usize> = edges[p].iter().copied().collect();
            while let Some(q) = stack.pop() {
                if q == p {
                    return Ok(true);
                }
                if seen.insert(q) {
                    stack.extend(edges[q].iter().copied());
                }
            }
        }
    }
    Ok(false)
}

/// Quasi-automaton: a distributive (hence projective) carrier with linear
/// letter actions, an initial vector and a linear accepting functional.
#[derive(Clone, Debug)]
pub struct QuasiAutomaton {
    alphabet: Alphabet,
    carrier: Semilattice,
    letter_maps: Vec<ElementMap>,
    initial: usize,
    functional: Vec<bool>,
}

impl QuasiAutomaton {
    pub fn new(
        alphabet: Alphabet,
        carrier: Semilattice,
        letter_maps: Vec<ElementMap>,
        initial: usize,
        functional: Vec<bool>,
    ) -> Result<Self> {
        if !carrier.is_distributive() {
            return Err(Error::Projectivity(
                "quasi-automaton carrier must be a distributive lattice".into(),
            ));
        }
        if letter_maps.len() != alphabet.len() {
            return Err(Error::Shape("one letter map per letter required".into()));
        }
        for m in &letter_maps {
            if !is_linear_map(&carrier, m) {
                return Err(Error::Linearity("letter map is not 𝔹-linear".into()));
            }
        }
        if initial >= carrier.len() {
            return Err(Error::Shape("initial element out of range".into()));
        }
        if !is_linear_functional(&carrier, &functional) {
            return Err(Error::Linearity("accepting functional is not 𝔹-linear".into()));
        }
        Ok(QuasiAutomaton {
            alphabet,
            carrier,
            letter_maps,
            initial,
            functional,
        })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn carrier(&self) -> &Semilattice {
        &self.carrier
    }

    pub fn letter_map(&self, c: char) -> Result<&ElementMap> {
        let i = self.alphabet.index_of(c).ok_or(Error::UnknownLetter(c))?;
        Ok(&self.letter_maps[i])
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn functional(&self) -> &[bool] {
        &self.functional
    }

    /// Track the orbit of the initial vector along `u v^ω`; accept iff the
    /// functional fires somewhere inside the eventual cycle.
    pub fn accepts(&self, w: &RightUp) -> Result<bool> {
        let mut x = self.initial;
        for &c in w.prefix().letters() {
            x = self.letter_map(c)?[x];
        }
        let block: Vec<&ElementMap> = w
            .period()
            .letters()
            .iter()
            .map(|&c| self.letter_map(c))
            .collect::<Result<_>>()?;
        // period-boundary states after u v^k are eventually periodic
        let mut seen: HashMap<usize, usize> = HashMap::new();
        let mut orbit: Vec<usize> = Vec::new();
        let mut y = x;
        let cycle_start = loop {
            if let Some(&first) = seen.get(&y) {
                break first;
            }
            seen.insert(y, orbit.len());
            orbit.push(y);
            for m in &block {
                y = m[y];
            }
        };
        // walk the cycle checking the functional at every position
        for &boundary in &orbit[cycle_start..] {
            let mut cur = boundary;
            for m in &block {
                cur = m[cur];
                if self.functional[cur] {
                    return Ok(true);
                }
            }
        }
        Ok(false)
    }
}

/// dBA → quasi-automaton: free carrier on the states, indicator functional.
pub fn dba_to_quasi(a: &OmegaAutomaton) -> Result<QuasiAutomaton> {
    let acc = match a.condition() {
        Condition::Buchi(acc) => acc.clone(),
        _ => {
            return Err(Error::Determinism(
                "quasi-automaton conversion takes a Büchi automaton".into(),
            ))
        }
    };
    if !a.is_deterministic() {
        return Err(Error::Determinism(
            "Büchi automaton must be deterministic for the quasi-automaton conversion".into(),
        ));
    }
    let n = a.n_states();
    if n > 12 {
        return Err(Error::Budget(format!(
            "free carrier on {n} states is too large"
        )));
    }
    let units: Vec<BoolVec> = (0..n).map(|q| BoolVec::unit(n, q)).collect();
    let carrier = crate::boolsemi::join_closure(n, &units)?;
    let letter_maps: Vec<ElementMap> = (0..a.alphabet().len())
        .map(|ci| {
            (0..carrier.len())
                .map(|e| {
                    let moved = a.trans[ci].act_row(carrier.element(e));
                    carrier.index_of(&moved).expect("free carrier is closed")
                })
                .collect()
        })
        .collect();
    let initial = carrier.index_of(a.initial()).expect("free carrier");
    let functional: Vec<bool> = (0..carrier.len())
        .map(|e| carrier.element(e).dot(&acc))
        .collect();
    QuasiAutomaton::new(
        a.alphabet().clone(),
        carrier,
        letter_maps,
        initial,
        functional,
    )
}

/// Quasi-automaton → dBA: states are the orbit closure of the initial
/// vector, accepting where the functional fires.
pub fn quasi_to_dba(p: &QuasiAutomaton) -> Result<OmegaAutomaton> {
    let mut orbit: Vec<usize> = vec![p.initial];
    let mut index: HashMap<usize, usize> = HashMap::new();
    index.insert(p.initial, 0);
    let mut i = 0;
    while i < orbit.len() {
        let e = orbit[i];
        i += 1;
        for m in &p.letter_maps {
            let t = m[e];
            if !index.contains_key(&t) {
                index.insert(t, orbit.len());
                orbit.push(t);
            }
        }
    }
    let n = orbit.len();
    let trans: Vec<BoolMat> = p
        .letter_maps
        .iter()
        .map(|m| BoolMat::from_fn(n, n, |q, r| index[&m[orbit[q]]] == r))
        .collect();
    let accepting = BoolVec::from_bits(&orbit.iter().map(|&e| p.functional[e]).collect::<Vec<_>>());
    OmegaAutomaton::new(
        p.alphabet.clone(),
        orbit.iter().map(|&e| format!("x{e}")).collect(),
        trans,
        BoolVec::unit(n, 0),
        Condition::Buchi(accepting),
    )
}

/// Flagged transition matrix: plain reachability plus
/// reachability-through-an-accepting-entry.
#[derive(Clone, PartialEq, Eq, Hash)]
struct Flagged {
    reach: BoolMat,
    acc: BoolMat,
}

impl Flagged {
    fn letter(m: &BoolMat, acc_states: &BoolVec) -> Flagged {
        let n = m.nrows();
        let acc = BoolMat::from_fn(n, n, |q, r| m.get(q, r) && acc_states.get(r));
        Flagged {
            reach: m.clone(),
            acc,
        }
    }

    fn compose(&self, other: &Flagged) -> Result<Flagged> {
        Ok(Flagged {
            reach: self.reach.compose(&other.reach)?,
            acc: self
                .acc
                .compose(&other.reach)?
                .or(&self.reach.compose(&other.acc)?),
        })
    }
}

impl BoolMat {
    fn or(&self, other: &BoolMat) -> BoolMat {
        BoolMat::from_fn(self.nrows(), self.ncols(), |i, j| {
            self.get(i, j) || other.get(i, j)
        })
    }
}

/// γ functional of `v^ω`: states admitting a run of the periodic word that
/// enters accepting states infinitely often.
fn gamma_of_period(f: &Flagged) -> Result<BoolVec> {
    let n = f.reach.nrows();
    // distinct powers of the flagged matrix
    let mut powers = Vec::new();
    let mut seen: HashSet<(BoolMat, BoolMat)> = HashSet::new();
    let mut cur = f.clone();
    while seen.insert((cur.reach.clone(), cur.acc.clone())) {
        powers.push(cur.clone());
        cur = cur.compose(f)?;
    }
    let mut loop_states = BoolVec::zeros(n);
    for p in &powers {
        for q in 0..n {
            if p.acc.get(q, q) {
                loop_states.set(q, true);
            }
        }
    }
    let mut gamma = loop_states.clone();
    for p in &powers {
        for q in 0..n {
            if p.reach.row(q).dot(&loop_states) {
                gamma.set(q, true);
            }
        }
    }
    Ok(gamma)
}

/// γ functional of an ultimately periodic word `u v^ω` on a Büchi
/// automaton: γ(q) = 1 iff some run of the word from `q` visits accepting
/// states infinitely often.
pub fn gamma(a: &OmegaAutomaton, w: &RightUp) -> Result<BoolVec> {
    let acc = match a.condition() {
        Condition::Buchi(acc) => acc.clone(),
        _ => {
            return Err(Error::Unsupported(
                "γ functionals are defined for Büchi automata".into(),
            ))
        }
    };
    let v = w.period();
    let mut f = Flagged::letter(a.letter_matrix(v.letters()[0])?, &acc);
    for &c in &v.letters()[1..] {
        f = f.compose(&Flagged::letter(a.letter_matrix(c)?, &acc))?;
    }
    let mut g = gamma_of_period(&f)?;
    for &c in w.prefix().letters().iter().rev() {
        g = a.letter_matrix(c)?.act_col(&g);
    }
    Ok(g)
}

/// State spaces of a Büchi evaluation: A(+) from finite-word vectors, A(−)
/// from the γ functionals of ultimately periodic tails.
pub fn omega_statespace(a: &OmegaAutomaton, budget: usize) -> Result<StateSpacePair> {
    let acc = match a.condition() {
        Condition::Buchi(acc) => acc.clone(),
        _ => {
            return Err(Error::Unsupported(
                "state spaces are computed for Büchi automata".into(),
            ))
        }
    };
    let alphabet = a.alphabet().clone();
    let plus_seeds = vec![(a.initial().clone(), Witness::Finite(FinWord::empty()))];
    let plus_gens = action_closure(
        plus_seeds,
        &alphabet,
        |v, ci| a.trans[ci].act_row(v),
        |w, c| match w {
            Witness::Finite(f) => Witness::Finite(f.concat(&FinWord::new([c]))),
            _ => unreachable!(),
        },
        budget,
    )?;
    // flagged semigroup with shortest witnesses
    let mut sg: Vec<(Flagged, FinWord)> = Vec::new();
    let mut seen: HashSet<(BoolMat, BoolMat)> = HashSet::new();
    for (i, &c) in alphabet.letters().iter().enumerate() {
        let f = Flagged::letter(&a.trans[i], &acc);
        if seen.insert((f.reach.clone(), f.acc.clone())) {
            sg.push((f, FinWord::new([c])));
        }
    }
    let mut qi = 0;
    while qi < sg.len() {
        let (f, w) = sg[qi].clone();
        qi += 1;
        for (i, &c) in alphabet.letters().iter().enumerate() {
            let next = f.compose(&Flagged::letter(&a.trans[i], &acc))?;
            if seen.insert((next.reach.clone(), next.acc.clone())) {
                if sg.len() >= budget {
                    return Err(Error::Budget(format!(
                        "flagged transition monoid exceeded {budget} elements"
                    )));
                }
                sg.push((next, w.concat(&FinWord::new([c]))));
            }
        }
    }
    let mut minus_seeds = Vec::new();
    for (f, w) in &sg {
        let g = gamma_of_period(f)?;
        if !g.is_zero() {
            minus_seeds.push((g, Witness::Right(RightUp::new(&FinWord::empty(), w)?)));
        }
    }
    let minus_gens = action_closure(
        minus_seeds,
        &alphabet,
        |v, ci| a.trans[ci].act_col(v),
        |w, c| match w {
            Witness::Right(r) => Witness::Right(r.prepend(&FinWord::new([c]))),
            _ => unreachable!(),
        },
        budget,
    )?;
    build_state_pair(&alphabet, plus_gens, minus_gens, &a.trans)
}

/// Circular membership of a finite word for the Büchi evaluation: by the
/// trace on A(+) (statespace route, requires projectivity) or by closed
/// paths in the machine (machine route).
pub fn omega_circular(
    a: &OmegaAutomaton,
    pair: Option<&StateSpacePair>,
    c: &CircWord,
    statespace_route: bool,
) -> Result<bool> {
    if statespace_route {
        let computed;
        let p = match pair {
            Some(p) => p,
            None => {
                computed = omega_statespace(a, crate::sofic::DEFAULT_BUDGET)?;
                &computed
            }
        };
        statespace_trace(&p.plus, c.rep())
    } else {
        a.word_matrix(c.rep())?.trace()
    }
}
