//! Word problem for the orbifold fundamental group of a simple handlebody.
//!
//! The group is an HNN extension of the right-angled Coxeter group on the
//! non-belt facets of `P_Q`, with one stable letter `t_B` per belt. The
//! convention used throughout is
//!
//! ```text
//! t_B^-1 · s_F · t_B = s_phi(F)      for F adjacent to the plus facet of B,
//! ```
//!
//! where `phi` is the belt matching. Equivalently `s_F t_B = t_B s_phi(F)`
//! and `s_F' t_B^-1 = t_B^-1 s_phiinv(F')` for `F'` adjacent to the minus
//! facet.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::handlebody::{BeltWitness, SimpleHandlebody};

/// A signed generator. Involutive letters carry a facet index of `P_Q`;
/// stable letters carry a belt index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Letter {
    S(usize),
    T { belt: usize, inverse: bool },
}

impl Letter {
    pub fn t(belt: usize) -> Letter {
        Letter::T {
            belt,
            inverse: false,
        }
    }

    pub fn t_inv(belt: usize) -> Letter {
        Letter::T {
            belt,
            inverse: true,
        }
    }

    pub fn inverse(self) -> Letter {
        match self {
            Letter::S(f) => Letter::S(f),
            Letter::T { belt, inverse } => Letter::T {
                belt,
                inverse: !inverse,
            },
        }
    }

    pub fn is_stable(self) -> bool {
        matches!(self, Letter::T { .. })
    }
}

pub type Word = Vec<Letter>;

pub fn inverse_word(w: &[Letter]) -> Word {
    w.iter().rev().map(|l| l.inverse()).collect()
}

/// `g0 t^e1 g1 ... t^em gm`; `segments` has one more entry than `stable`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NormalForm {
    pub segments: Vec<Vec<usize>>,
    pub stable: Vec<Letter>,
}

impl NormalForm {
    pub fn identity() -> Self {
        NormalForm {
            segments: vec![Vec::new()],
            stable: Vec::new(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.stable.is_empty() && self.segments[0].is_empty()
    }

    pub fn t_length(&self) -> usize {
        self.stable.len()
    }

    /// Total letter count.
    pub fn length(&self) -> usize {
        self.stable.len() + self.segments.iter().map(Vec::len).sum::<usize>()
    }

    pub fn to_word(&self) -> Word {
        let mut w = Vec::with_capacity(self.length());
        for (i, seg) in self.segments.iter().enumerate() {
            if i > 0 {
                w.push(self.stable[i - 1]);
            }
            w.extend(seg.iter().map(|&f| Letter::S(f)));
        }
        w
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Torsion {
    Finite,
    Infinite,
}

/// Relations (1)-(4) with `t_{B-}` eliminated in favour of `t_{B+}^-1`.
#[derive(Clone, Debug)]
pub struct Presentation {
    labels: Vec<String>,
    involutive: Vec<usize>,
    belt_labels: Vec<String>,
    commute: Vec<Vec<bool>>,
    forward: Vec<BTreeMap<usize, usize>>,
    backward: Vec<BTreeMap<usize, usize>>,
    plus_letters: Vec<BTreeSet<usize>>,
    minus_letters: Vec<BTreeSet<usize>>,
}

/// Upper bound on equal-length conjugates explored by `cyclic_reduce`.
const CONJUGATE_SEARCH_CAP: usize = 4096;

impl Presentation {
    pub fn new(h: &SimpleHandlebody) -> Result<Self> {
        h.require_valid()?;
        let nerve = h.nerve();
        let labels = nerve.labels().to_vec();
        let involutive = h.ordinary_facets();
        let commute = nerve.adjacency();
        let forward: Vec<_> = h.belts.iter().map(|b| b.matching.clone()).collect();
        let backward = h.belts.iter().map(|b| b.inverse_matching()).collect();
        let plus_letters = forward.iter().map(|m| m.keys().copied().collect()).collect();
        let minus_letters = forward.iter().map(|m| m.values().copied().collect()).collect();
        Ok(Presentation {
            labels,
            involutive,
            belt_labels: (0..h.genus()).map(|b| h.belt_label(b).to_string()).collect(),
            commute,
            forward,
            backward,
            plus_letters,
            minus_letters,
        })
    }

    pub fn involutive_generators(&self) -> &[usize] {
        &self.involutive
    }

    pub fn belt_count(&self) -> usize {
        self.belt_labels.len()
    }

    pub fn conjugation_table(&self, belt: usize) -> &BTreeMap<usize, usize> {
        &self.forward[belt]
    }

    /// Involutive letters followed by `t_B`, `t_B^-1` for each belt.
    pub fn generators(&self) -> Vec<Letter> {
        let mut g: Vec<Letter> = self.involutive.iter().map(|&f| Letter::S(f)).collect();
        for b in 0..self.belt_count() {
            g.push(Letter::t(b));
            g.push(Letter::t_inv(b));
        }
        g
    }

    pub fn commutes_letters(&self, a: usize, b: usize) -> bool {
        a != b && self.commute[a][b]
    }

    pub fn commutation_edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (i, &a) in self.involutive.iter().enumerate() {
            for &b in &self.involutive[i + 1..] {
                if self.commute[a][b] {
                    out.push((a, b));
                }
            }
        }
        out
    }

    pub fn relators(&self) -> Vec<Word> {
        let mut out = Vec::new();
        for &f in &self.involutive {
            out.push(vec![Letter::S(f), Letter::S(f)]);
        }
        for (a, b) in self.commutation_edges() {
            let (a, b) = (Letter::S(a), Letter::S(b));
            out.push(vec![a, b, a, b]);
        }
        for (belt, table) in self.forward.iter().enumerate() {
            for (&f, &g) in table {
                out.push(vec![Letter::S(f), Letter::t(belt), Letter::S(g), Letter::t_inv(belt)]);
            }
        }
        out
    }

    // ---- right-angled Coxeter part -------------------------------------

    /// Multiplies a reduced word by `s` on the right, keeping it reduced.
    fn push_reduced(&self, w: &mut Vec<usize>, s: usize) {
        for j in (0..w.len()).rev() {
            if w[j] == s {
                w.remove(j);
                return;
            }
            if !self.commute[w[j]][s] {
                break;
            }
        }
        w.push(s);
    }

    fn reduce(&self, letters: impl IntoIterator<Item = usize>) -> Vec<usize> {
        let mut w = Vec::new();
        for s in letters {
            self.push_reduced(&mut w, s);
        }
        w
    }

    /// Lexicographically least word in the commutation class of a reduced word.
    fn lex_least(&self, w: &[usize]) -> Vec<usize> {
        let n = w.len();
        let mut pending: Vec<usize> = (0..n)
            .map(|j| (0..j).filter(|&i| !self.commutes_letters(w[i], w[j])).count())
            .collect();
        let mut used = vec![false; n];
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            let pick = (0..n)
                .filter(|&j| !used[j] && pending[j] == 0)
                .min_by_key(|&j| w[j])
                .expect("a minimal letter always exists");
            used[pick] = true;
            out.push(w[pick]);
            for j in pick + 1..n {
                if !used[j] && !self.commutes_letters(w[pick], w[j]) {
                    pending[j] -= 1;
                }
            }
        }
        out
    }

    /// Canonical reduced form of a word in the involutive letters.
    pub fn coxeter_canonical(&self, w: &[usize]) -> Vec<usize> {
        self.lex_least(&self.reduce(w.iter().copied()))
    }

    pub fn support(&self, w: &[usize]) -> BTreeSet<usize> {
        self.reduce(w.iter().copied()).into_iter().collect()
    }

    pub fn in_parabolic(&self, w: &[usize], t: &BTreeSet<usize>) -> bool {
        self.support(w).is_subset(t)
    }

    /// Splits `w = w_min · w_T` with `w_min` the shortest element of `w W_T`.
    pub fn coset_decompose(&self, w: &[usize], t: &BTreeSet<usize>) -> (Vec<usize>, Vec<usize>) {
        let mut rest = self.reduce(w.iter().copied());
        let mut tail: VecDeque<usize> = VecDeque::new();
        // Strip right descents lying in T until none is left.
        while let Some(j) = (0..rest.len()).rev().find(|&j| {
            t.contains(&rest[j]) && rest[j + 1..].iter().all(|&x| self.commutes_letters(x, rest[j]))
        }) {
            tail.push_front(rest.remove(j));
        }
        let tail: Vec<usize> = tail.into_iter().collect();
        (self.lex_least(&rest), self.lex_least(&tail))
    }

    // ---- HNN part -------------------------------------------------------

    fn side_letters(&self, belt: usize, plus: bool) -> &BTreeSet<usize> {
        if plus {
            &self.plus_letters[belt]
        } else {
            &self.minus_letters[belt]
        }
    }

    /// Image of `g` under `phi` (`forward`) or its inverse.
    fn conjugate_segment(&self, g: &[usize], belt: usize, forward: bool) -> Vec<usize> {
        let table = if forward { &self.forward[belt] } else { &self.backward[belt] };
        g.iter().map(|f| table[f]).collect()
    }

    pub fn hnn_normal_form(&self, w: &[Letter]) -> NormalForm {
        // Britton reduction: a stack of (segment before, stable letter).
        let mut stack: Vec<(Vec<usize>, Letter)> = Vec::new();
        let mut current: Vec<usize> = Vec::new();
        for &x in w {
            match x {
                Letter::S(f) => self.push_reduced(&mut current, f),
                Letter::T { belt, inverse } => {
                    let pinch = match stack.last() {
                        Some(&(_, Letter::T { belt: b, inverse: i })) if b == belt && i != inverse => {
                            // t^-1 g t needs g in the plus side, t g t^-1 the minus side.
                            let plus = !inverse;
                            current.iter().all(|s| self.side_letters(belt, plus).contains(s))
                        }
                        _ => false,
                    };
                    if pinch {
                        let (mut prev, _) = stack.pop().unwrap();
                        for s in self.conjugate_segment(&current, belt, !inverse) {
                            self.push_reduced(&mut prev, s);
                        }
                        current = prev;
                    } else {
                        stack.push((std::mem::take(&mut current), x));
                    }
                }
            }
        }
        let mut segments: Vec<Vec<usize>> = Vec::with_capacity(stack.len() + 1);
        let mut stable = Vec::with_capacity(stack.len());
        for (seg, t) in stack {
            segments.push(seg);
            stable.push(t);
        }
        segments.push(current);

        // Push parabolic tails through the stable letters, left to right.
        for i in 0..stable.len() {
            let Letter::T { belt, inverse } = stable[i] else {
                unreachable!()
            };
            let plus = !inverse;
            let (min, tail) = self.coset_decompose(&segments[i], self.side_letters(belt, plus));
            segments[i] = min;
            if !tail.is_empty() {
                let moved = self.conjugate_segment(&tail, belt, plus);
                let next = std::mem::take(&mut segments[i + 1]);
                segments[i + 1] = self.reduce(moved.into_iter().chain(next));
            }
        }
        for seg in &mut segments {
            *seg = self.lex_least(seg);
        }
        NormalForm { segments, stable }
    }

    pub fn normal_word(&self, w: &[Letter]) -> Word {
        self.hnn_normal_form(w).to_word()
    }

    /// Word length of the normal form.
    pub fn length(&self, w: &[Letter]) -> usize {
        self.hnn_normal_form(w).length()
    }

    pub fn is_identity(&self, w: &[Letter]) -> bool {
        self.hnn_normal_form(w).is_identity()
    }

    pub fn equal(&self, u: &[Letter], v: &[Letter]) -> bool {
        let mut w = u.to_vec();
        w.extend(inverse_word(v));
        self.is_identity(&w)
    }

    pub fn commutes(&self, u: &[Letter], v: &[Letter]) -> bool {
        let mut w = u.to_vec();
        w.extend_from_slice(v);
        w.extend(inverse_word(u));
        w.extend(inverse_word(v));
        self.is_identity(&w)
    }

    /// Generators `x` with `l(wx) < l(w)`. Stable letters appear with the
    /// sign that shortens, so `descent_set(t_B) = {t_B^-1}`.
    pub fn descent_set(&self, w: &[Letter]) -> Vec<Letter> {
        let base = self.hnn_normal_form(w);
        let len = base.length();
        let word = base.to_word();
        self.generators()
            .into_iter()
            .filter(|&x| {
                let mut wx = word.clone();
                wx.push(x);
                self.length(&wx) < len
            })
            .collect()
    }

    fn conjugate_by(&self, w: &[Letter], x: Letter) -> Word {
        let mut c = Vec::with_capacity(w.len() + 2);
        c.push(x.inverse());
        c.extend_from_slice(w);
        c.push(x);
        self.normal_word(&c)
    }

    /// Shortest conjugate reachable by single-letter conjugations. Among
    /// minimal-length conjugates found, the least word is returned.
    pub fn cyclic_reduce(&self, w: &[Letter]) -> Word {
        let gens = self.generators();
        let mut best = self.normal_word(w);
        loop {
            let mut seen: HashSet<Word> = HashSet::new();
            let mut queue = VecDeque::new();
            seen.insert(best.clone());
            queue.push_back(best.clone());
            let mut shorter: Option<Word> = None;
            while let Some(u) = queue.pop_front() {
                for &x in &gens {
                    let c = self.conjugate_by(&u, x);
                    if c.len() < best.len() {
                        if shorter.as_ref().is_none_or(|s| (c.len(), &c) < (s.len(), s)) {
                            shorter = Some(c);
                        }
                        continue;
                    }
                    if c.len() == best.len() && seen.len() < CONJUGATE_SEARCH_CAP && seen.insert(c.clone()) {
                        queue.push_back(c);
                    }
                }
                if shorter.is_some() {
                    break;
                }
            }
            match shorter {
                Some(s) => best = s,
                None => return seen.into_iter().min().unwrap_or(best),
            }
        }
    }

    pub fn torsion_status(&self, w: &[Letter]) -> Torsion {
        let c = self.cyclic_reduce(w);
        if c.iter().any(|l| l.is_stable()) {
            return Torsion::Infinite;
        }
        let support: Vec<usize> = c
            .iter()
            .map(|l| match l {
                Letter::S(f) => *f,
                Letter::T { .. } => unreachable!(),
            })
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let clique = support
            .iter()
            .enumerate()
            .all(|(i, &a)| support[i + 1..].iter().all(|&b| self.commute[a][b]));
        if clique {
            Torsion::Finite
        } else {
            Torsion::Infinite
        }
    }

    // ---- text syntax ----------------------------------------------------

    pub fn format_letter(&self, l: Letter) -> String {
        match l {
            Letter::S(f) => format!("sF{}", self.labels[f]),
            Letter::T { belt, inverse } => {
                let suffix = if inverse { "^-1" } else { "" };
                format!("tB{}{suffix}", self.belt_labels[belt])
            }
        }
    }

    pub fn format_word(&self, w: &[Letter]) -> String {
        w.iter().map(|&l| self.format_letter(l)).collect::<Vec<_>>().join(" ")
    }

    /// Parses whitespace-separated `sF<label>`, `tB<label>`, `tB<label>^-1`.
    pub fn parse_word(&self, text: &str) -> Result<Word> {
        text.split_whitespace().map(|tok| self.parse_letter(tok)).collect()
    }

    fn parse_letter(&self, tok: &str) -> Result<Letter> {
        if let Some(label) = tok.strip_prefix("sF") {
            let f = self
                .labels
                .iter()
                .position(|l| l == label)
                .ok_or_else(|| Error::input(format!("unknown facet in letter {tok:?}")))?;
            if !self.involutive.contains(&f) {
                return Err(Error::input(format!(
                    "{tok:?} names a belt facet, which has no generator"
                )));
            }
            return Ok(Letter::S(f));
        }
        if let Some(rest) = tok.strip_prefix("tB") {
            let (label, inverse) = match rest.strip_suffix("^-1") {
                Some(l) => (l, true),
                None => (rest, false),
            };
            let belt = self
                .belt_labels
                .iter()
                .position(|l| l == label)
                .ok_or_else(|| Error::input(format!("unknown belt in letter {tok:?}")))?;
            return Ok(Letter::T { belt, inverse });
        }
        Err(Error::input(format!(
            "letter {tok:?} must start with sF or tB"
        )))
    }
}

/// A Display adapter for words.
pub struct Show<'a>(pub &'a Presentation, pub &'a [Letter]);

impl fmt::Display for Show<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.1.is_empty() {
            write!(f, "ε")
        } else {
            write!(f, "{}", self.0.format_word(self.1))
        }
    }
}

/// Words `x = s1 s3` and `y = s2 T s4 T^-1` carried by a square witness,
/// where `T` spells the belt crossings of its chain.
pub fn square_words(w: &BeltWitness) -> Option<(Word, Word)> {
    let chain = w.chain.as_ref()?;
    let x = vec![Letter::S(chain.f1[0]), Letter::S(chain.f3[0])];
    let through: Word = w
        .crossing_belts
        .iter()
        .map(|c| if c.forward { Letter::t(c.belt) } else { Letter::t_inv(c.belt) })
        .collect();
    let mut y = vec![Letter::S(chain.f2)];
    y.extend_from_slice(&through);
    y.push(Letter::S(chain.f4));
    y.extend(inverse_word(&through));
    Some((x, y))
}

/// Checks that `x`, `y` commute and satisfy no relation `x^a y^b = 1` with
/// `|a|, |b| <= 4`.
pub fn verify_commuting_pair(pres: &Presentation, x: &[Letter], y: &[Letter]) -> Result<()> {
    if !pres.commutes(x, y) {
        return Err(Error::internal(format!(
            "square witness words do not commute: x = {}, y = {}",
            Show(pres, x),
            Show(pres, y)
        )));
    }
    if let Some((a, b)) = power_relation(pres, x, y, 4) {
        return Err(Error::internal(format!(
            "square witness satisfies x^{a} y^{b} = 1 for x = {}, y = {}",
            Show(pres, x),
            Show(pres, y)
        )));
    }
    Ok(())
}

/// Commuting pair `(x, y)` from the first square belt.
pub fn z2_witness(h: &SimpleHandlebody, pres: &Presentation) -> Result<Option<(Word, Word)>> {
    if !h.is_flag() {
        return Ok(None);
    }
    let squares = h.square_belts()?;
    let Some((x, y)) = squares.first().and_then(square_words) else {
        return Ok(None);
    };
    verify_commuting_pair(pres, &x, &y)?;
    Ok(Some((x, y)))
}

fn power(w: &[Letter], k: i32) -> Word {
    let base = if k < 0 { inverse_word(w) } else { w.to_vec() };
    base.repeat(k.unsigned_abs() as usize)
}

/// First `(a, b) != (0, 0)` with `|a|, |b| <= bound` and `x^a y^b = 1`.
pub fn power_relation(pres: &Presentation, x: &[Letter], y: &[Letter], bound: i32) -> Option<(i32, i32)> {
    for a in -bound..=bound {
        for b in -bound..=bound {
            if (a, b) == (0, 0) {
                continue;
            }
            let mut w = power(x, a);
            w.extend(power(y, b));
            if pres.is_identity(&w) {
                return Some((a, b));
            }
        }
    }
    None
}

/// True iff the flag handlebody has a square belt.
#[allow(non_snake_case)]
pub fn has_Z2(h: &SimpleHandlebody) -> Result<bool> {
    if !h.is_flag() {
        return Err(Error::Precondition(
            "has_Z2 is defined for flag handlebodies only".into(),
        ));
    }
    Ok(!h.square_belts()?.is_empty())
}
