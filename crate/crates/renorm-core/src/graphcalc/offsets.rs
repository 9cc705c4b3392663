//! Symbolic bookkeeping of the W₄ → W and C₆ → C promotions, checking that the
//! singular pieces they shed cancel against table rows with an even number of
//! components.
//!
//! Tuple patterns are written as strings: lowercase letters are named points,
//! uppercase letters are free points; equal adjacent letters form a run.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::pattern::{cancels, sequence_label, TuplePattern};
use super::poly::{CoeffPoly, Rational};
use super::tables::{sequence_coefficient, sources_for_order};
use super::GraphCalcError;

/// A diagonal or kernel factor of an operator word.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Node {
    /// v^power, times ω when `random`.
    Diag {
        power: u8,
        random: bool,
    },
    W4,
    W,
    C6,
    C,
    R6,
    S,
    St,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tok {
    G0,
    Gt,
    N(Node),
}

/// Word G₀ X G̃₀ Y ⋯ G₀ with adjacent diagonals merged.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<Tok>);

impl Word {
    pub fn new(tokens: Vec<Tok>) -> Self {
        let mut out: Vec<Tok> = Vec::with_capacity(tokens.len());
        for t in tokens {
            if let (Some(Tok::N(Node::Diag { power: p0, random: r0 })), Tok::N(Node::Diag { power, random })) =
                (out.last().copied(), t)
            {
                assert!(!(r0 && random), "two random factors at one site");
                *out.last_mut().expect("nonempty") = Tok::N(Node::Diag { power: p0 + power, random: r0 || random });
                continue;
            }
            if let Tok::N(Node::Diag { power: 0, random: false }) = t {
                continue;
            }
            out.push(t);
        }
        Word(out)
    }

    /// `G0 n₁ G~0 n₂ ⋯ G~0 n_k G0` where each group is a block of adjacent nodes.
    pub fn from_groups(groups: Vec<Vec<Node>>) -> Self {
        let mut toks = vec![Tok::G0];
        for (k, g) in groups.into_iter().enumerate() {
            if k > 0 {
                toks.push(Tok::Gt);
            }
            toks.extend(g.into_iter().map(Tok::N));
        }
        toks.push(Tok::G0);
        Word::new(toks)
    }

    /// Composition label when every node is diagonal in v, ω.
    pub fn class(&self) -> String {
        let mut seq = Vec::new();
        for t in &self.0 {
            match t {
                Tok::N(Node::Diag { power, random }) => seq.push(*power as usize + *random as usize),
                Tok::N(_) => return self.to_string(),
                _ => {}
            }
        }
        sequence_label(&seq)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for t in &self.0 {
            match t {
                Tok::G0 => f.write_str("G0")?,
                Tok::Gt => f.write_str("G~0")?,
                Tok::N(n) => match n {
                    Node::Diag { power: 0, random: true } => f.write_str("V")?,
                    Node::Diag { power, random } => {
                        write!(f, "v{power}")?;
                        if *random {
                            f.write_str("V")?;
                        }
                    }
                    other => write!(f, "{other:?}")?,
                },
            }
        }
        Ok(())
    }
}

/// Linear combination of classes (composition label or word string).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LinComb(BTreeMap<String, CoeffPoly>);

impl LinComb {
    pub fn add(&mut self, key: String, c: &CoeffPoly) {
        let e = self.0.entry(key.clone()).or_default();
        *e = &*e + c;
        if e.is_zero() {
            self.0.remove(&key);
        }
    }

    pub fn add_word(&mut self, w: &Word, c: &CoeffPoly) {
        self.add(w.class(), c);
    }

    pub fn merge(&mut self, other: &LinComb, scale: &CoeffPoly) {
        for (k, c) in &other.0 {
            self.add(k.clone(), &(c * scale));
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &CoeffPoly)> {
        self.0.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }
}

/// Promotion rules: W₄ = W + (σ³−ρ)v⁴ and C₆ = C + η v⁶.
#[derive(Clone, Debug)]
pub struct Promotion {
    pub w4_shift: CoeffPoly,
    pub c6_shift: CoeffPoly,
}

impl Default for Promotion {
    fn default() -> Self {
        Self { w4_shift: CoeffPoly::parse("s^3-r").expect("static"), c6_shift: CoeffPoly::eta() }
    }
}

impl Promotion {
    /// Expands every W₄ and C₆ in `w`.
    pub fn apply(&self, w: &Word) -> Vec<(Word, CoeffPoly)> {
        let mut acc: Vec<(Vec<Tok>, CoeffPoly)> = vec![(Vec::new(), CoeffPoly::one())];
        for t in &w.0 {
            let options: Vec<(Tok, CoeffPoly)> = match t {
                Tok::N(Node::W4) => vec![
                    (Tok::N(Node::W), CoeffPoly::one()),
                    (Tok::N(Node::Diag { power: 4, random: false }), self.w4_shift.clone()),
                ],
                Tok::N(Node::C6) => vec![
                    (Tok::N(Node::C), CoeffPoly::one()),
                    (Tok::N(Node::Diag { power: 6, random: false }), self.c6_shift.clone()),
                ],
                other => vec![(*other, CoeffPoly::one())],
            };
            let mut next = Vec::with_capacity(acc.len() * options.len());
            for (prefix, c) in &acc {
                for (tok, oc) in &options {
                    let mut p = prefix.clone();
                    p.push(*tok);
                    next.push((p, c * oc));
                }
            }
            acc = next;
        }
        acc.into_iter().map(|(t, c)| (Word::new(t), c)).collect()
    }
}

const C6_PATTERNS: [[u8; 6]; 4] = [[0, 1, 2, 0, 1, 2], [0, 1, 2, 0, 2, 1], [0, 1, 0, 2, 1, 2], [0, 1, 2, 1, 0, 2]];

/// Canonical three-vertex tuples that build C₆.
pub fn c6_patterns() -> Vec<TuplePattern> {
    C6_PATTERNS.iter().map(|p| TuplePattern::new(p)).collect()
}

#[derive(Clone, Copy, Debug)]
struct Run {
    label: char,
    len: usize,
}

fn runs(pattern: &str) -> Vec<Run> {
    let mut out: Vec<Run> = Vec::new();
    for ch in pattern.chars() {
        match out.last_mut() {
            Some(r) if r.label == ch => r.len += 1,
            _ => out.push(Run { label: ch, len: 1 }),
        }
    }
    out
}

fn free_node(r: &Run) -> Node {
    if r.len % 2 == 1 {
        Node::Diag { power: (r.len - 1) as u8, random: true }
    } else {
        Node::Diag { power: r.len as u8, random: false }
    }
}

fn diag(power: usize) -> Node {
    Node::Diag { power: power as u8, random: false }
}

/// Operator words represented by a tuple pattern containing one cancelled
/// block (W₄ from `abab`, C₆ from a three-vertex sextuple). Alongside the main
/// word, returns the correction words produced when restricting the free
/// neighbours of the block (`r6_neighbours` enables the R₆ identification of
/// two free neighbours enclosing a W₄ block).
pub fn pattern_words(pattern: &str, r6_neighbours: bool) -> Result<Vec<(Word, CoeffPoly)>, String> {
    let rs = runs(pattern);
    let named = |r: &Run| r.label.is_ascii_lowercase();
    let count = |c: char| rs.iter().filter(|r| r.label == c).count();
    // C₆ block: six single named runs matching a C₆ sextuple.
    for i in 0..rs.len().saturating_sub(5) {
        let win = &rs[i..i + 6];
        if !win.iter().all(|r| named(r) && r.len == 1 && count(r.label) == 2) {
            continue;
        }
        let labels: Vec<char> = win.iter().map(|r| r.label).collect();
        let p = TuplePattern::new(&labels);
        if !c6_patterns().contains(&p) {
            continue;
        }
        let mut groups: Vec<Vec<Node>> = rs[..i].iter().map(|r| vec![free_node(r)]).collect();
        groups.push(vec![Node::C6]);
        groups.extend(rs[i + 6..].iter().map(|r| vec![free_node(r)]));
        let mut out = vec![(Word::from_groups(groups), CoeffPoly::one())];
        // A single free neighbour equal to a block vertex can close a
        // cancelled 4-window; those tuples are excluded.
        let mut flat: Vec<char> = pattern.chars().collect();
        for (side, idx) in [(0usize, i.wrapping_sub(1)), (1, i + 6)] {
            if idx >= rs.len() || rs[idx].len != 1 || named(&rs[idx]) {
                continue;
            }
            let pos = rs[..idx].iter().map(|r| r.len).sum::<usize>();
            let mut candidates = labels.clone();
            candidates.sort_unstable();
            candidates.dedup();
            for cand in candidates {
                let saved = flat[pos];
                flat[pos] = cand;
                let tuple = TuplePattern::new(&flat);
                let hits = (0..=tuple.len() - 4).any(|s| cancels(&tuple.window(s, s + 4)));
                flat[pos] = saved;
                if hits {
                    if rs.len() != 7 || p != TuplePattern::new(&[0u8, 1, 0, 2, 1, 2]) {
                        return Err(format!("unhandled exclusion in {pattern}"));
                    }
                    let w = if side == 1 {
                        Word::from_groups(vec![vec![Node::St, Node::Diag { power: 0, random: true }]])
                    } else {
                        Word::from_groups(vec![vec![Node::Diag { power: 0, random: true }, Node::S]])
                    };
                    out.push((w, CoeffPoly::int(-1)));
                }
            }
        }
        return Ok(out);
    }
    // W₄ block: named runs p q p q, each label used only there.
    for i in 0..rs.len().saturating_sub(3) {
        let win = &rs[i..i + 4];
        if !win.iter().all(named) {
            continue;
        }
        let (p, q) = (win[0].label, win[1].label);
        if p == q || win[2].label != p || win[3].label != q || count(p) != 2 || count(q) != 2 {
            continue;
        }
        let left = win[0].len - 1 + win[2].len - 1;
        let right = win[1].len - 1 + win[3].len - 1;
        let block = vec![diag(left), Node::W4, diag(right)];
        let mut groups: Vec<Vec<Node>> = rs[..i].iter().map(|r| vec![free_node(r)]).collect();
        groups.push(block);
        groups.extend(rs[i + 4..].iter().map(|r| vec![free_node(r)]));
        if rs.iter().any(|r| named(r) && r.label != p && r.label != q) {
            return Err(format!("stray named point in {pattern}"));
        }
        let mut out = vec![(Word::from_groups(groups), CoeffPoly::one())];
        if r6_neighbours && i >= 1 && i + 4 < rs.len() {
            let (l, r) = (&rs[i - 1], &rs[i + 4]);
            if l.len == 1 && r.len == 1 && left == 0 && right == 0 {
                let mut g: Vec<Vec<Node>> = rs[..i - 1].iter().map(|r| vec![free_node(r)]).collect();
                g.push(vec![Node::R6]);
                g.extend(rs[i + 5..].iter().map(|r| vec![free_node(r)]));
                out.push((Word::from_groups(g), CoeffPoly::one()));
            }
        }
        return Ok(out);
    }
    Err(format!("no cancelled block in {pattern}"))
}

/// Graph coefficient of a pattern string (free letters are distinct points).
fn pattern_coefficient(pattern: &str, order: usize) -> Result<CoeffPoly, GraphCalcError> {
    let seq: Vec<usize> = runs(pattern).iter().map(|r| r.len).collect();
    sequence_coefficient(&seq, &sources_for_order(order)?)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OffsetReport {
    pub order: usize,
    /// Non-zero entries of bookkeeping + table rows − displayed terms.
    pub residual: Vec<(String, String)>,
    /// Singular classes whose contributions were cancelled.
    pub cancelled: Vec<String>,
}

impl OffsetReport {
    pub fn passed(&self) -> bool {
        self.residual.is_empty()
    }
}

fn parse(s: &str) -> CoeffPoly {
    CoeffPoly::parse(s).expect("static polynomial")
}

fn words(groups: &[&[&[Node]]]) -> Vec<Word> {
    groups.iter().map(|w| Word::from_groups(w.iter().map(|g| g.to_vec()).collect())).collect()
}

const V: Node = Node::Diag { power: 0, random: true };
const V2: Node = Node::Diag { power: 2, random: false };
const V2R: Node = Node::Diag { power: 2, random: true };

fn accumulate(
    patterns: &[&str],
    order: usize,
    promo: &Promotion,
    r6: bool,
    into: &mut LinComb,
    singular: &mut Vec<String>,
) -> Result<(), GraphCalcError> {
    for p in patterns {
        let coef = pattern_coefficient(p, order)?;
        let ws = pattern_words(p, r6).map_err(GraphCalcError::OffsetFailure)?;
        for (w, c) in ws {
            for (pw, pc) in promo.apply(&w) {
                if pw.class().starts_with('<') || pw.to_string().contains("R6") {
                    singular.push(pw.class());
                }
                into.add_word(&pw, &(&coef * &(&c * &pc)));
            }
        }
    }
    Ok(())
}

fn finish(
    order: usize,
    total: LinComb,
    expected: &LinComb,
    mut singular: Vec<String>,
) -> Result<OffsetReport, GraphCalcError> {
    let mut diff = total;
    diff.merge(expected, &CoeffPoly::int(-1));
    singular.sort();
    singular.dedup();
    let report = OffsetReport {
        order,
        residual: diff.iter().map(|(k, c)| (k.clone(), c.to_string())).collect(),
        cancelled: singular,
    };
    match report.residual.first() {
        None => Ok(report),
        Some((k, c)) => Err(GraphCalcError::OffsetFailure(format!("order {order}: {k} left with coefficient {c}"))),
    }
}

/// Sixth order: the W₄ words from the all-distinct sextuple plus the ⟨4,1,1⟩
/// family must equal the W words.
pub fn verify_offset_order6(promo: &Promotion) -> Result<OffsetReport, GraphCalcError> {
    let mut total = LinComb::default();
    let mut singular = Vec::new();
    accumulate(&["ababXY", "XababY", "XYabab"], 6, promo, false, &mut total, &mut singular)?;
    let sources = sources_for_order(6)?;
    for seq in [[4usize, 1, 1], [1, 4, 1], [1, 1, 4]] {
        let c = sequence_coefficient(&seq, &sources)?;
        total.add(sequence_label(&seq), &c);
    }
    let mut expected = LinComb::default();
    let one = CoeffPoly::one();
    for w in words(&[&[&[Node::W], &[V], &[V]], &[&[V], &[Node::W], &[V]], &[&[V], &[V], &[Node::W]]]) {
        expected.add_word(&w, &one);
    }
    finish(6, total, &expected, singular)
}

/// Seventh order: the singular pieces shed by the ⟨3,1,1,1,1⟩-family, the
/// cancelled-4-window part and the cancelled-6-window part of ⟨1,…,1⟩ cancel
/// the ⟨6,1⟩, ⟨4,3⟩, ⟨1,1,1,4⟩-family and R₆-word table rows.
pub fn verify_offset_order7(promo: &Promotion) -> Result<OffsetReport, GraphCalcError> {
    let mut total = LinComb::default();
    let mut singular = Vec::new();
    // ⟨3,1,1,1,1⟩ family carrying a cancelled 4-window.
    accumulate(&["ababXXX", "XXXabab"], 7, promo, false, &mut total, &mut singular)?;
    accumulate(
        &["aaababX", "abaaabX", "abbbabX", "ababbbX", "Xaaabab", "Xabaaab", "Xabbbab", "Xababbb"],
        7,
        promo,
        false,
        &mut total,
        &mut singular,
    )?;
    // ⟨1,…,1⟩ with a cancelled 4-window.
    accumulate(&["XYZabab", "XYababZ", "XababYZ", "ababXYZ"], 7, promo, true, &mut total, &mut singular)?;
    // ⟨1,…,1⟩ with a cancelled 6-window and no cancelled 4-window.
    let mut sextuples = Vec::new();
    for p in C6_PATTERNS {
        let s: String = p.iter().map(|&l| (b'a' + l) as char).collect();
        sextuples.push(format!("{s}X"));
        sextuples.push(format!("X{s}"));
    }
    let refs: Vec<&str> = sextuples.iter().map(|s| s.as_str()).collect();
    accumulate(&refs, 7, promo, false, &mut total, &mut singular)?;

    // Rows of the table with an even number of components, and the R₆ rows.
    let sources = sources_for_order(7)?;
    let even_rows: Vec<Vec<usize>> = vec![
        vec![6, 1],
        vec![1, 6],
        vec![4, 3],
        vec![3, 4],
        vec![4, 1, 1, 1],
        vec![1, 4, 1, 1],
        vec![1, 1, 4, 1],
        vec![1, 1, 1, 4],
    ];
    for seq in &even_rows {
        total.add(sequence_label(seq), &sequence_coefficient(seq, &sources)?);
    }
    for row in super::tables::coefficient_table(7)?.iter().take(2) {
        let w = if row.class == "G0R6G~0VG0" {
            Word::from_groups(vec![vec![Node::R6], vec![V]])
        } else {
            Word::from_groups(vec![vec![V], vec![Node::R6]])
        };
        total.add_word(&w, &row.coefficient);
    }

    let mut expected = LinComb::default();
    let s2 = parse("s^2");
    for w in words(&[&[&[Node::W], &[V2R]], &[&[V2R], &[Node::W]]]) {
        expected.add_word(&w, &s2);
    }
    let two_s2 = parse("2*s^2");
    for w in
        words(&[&[&[Node::W, V2], &[V]], &[&[V2, Node::W], &[V]], &[&[V], &[V2, Node::W]], &[&[V], &[Node::W, V2]]])
    {
        expected.add_word(&w, &two_s2);
    }
    let minus = CoeffPoly::int(-1);
    for w in words(&[
        &[&[V], &[V], &[V], &[Node::W]],
        &[&[V], &[V], &[Node::W], &[V]],
        &[&[V], &[Node::W], &[V], &[V]],
        &[&[Node::W], &[V], &[V], &[V]],
    ]) {
        expected.add_word(&w, &minus);
    }
    let minus4 = CoeffPoly::int(-4);
    for w in words(&[&[&[Node::C], &[V]], &[&[V], &[Node::C]]]) {
        expected.add_word(&w, &minus4);
    }
    for w in words(&[&[&[V, Node::S]], &[&[Node::St, V]]]) {
        expected.add_word(&w, &CoeffPoly::one());
    }
    finish(7, total, &expected, singular)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OffsetsSummary {
    pub order6: OffsetReport,
    pub order7: OffsetReport,
}

/// Both offset certifications with the published promotion rules.
pub fn verify_offsets() -> Result<OffsetsSummary, GraphCalcError> {
    let promo = Promotion::default();
    Ok(OffsetsSummary { order6: verify_offset_order6(&promo)?, order7: verify_offset_order7(&promo)? })
}

/// Sensitivity control: the η coefficient of the C₆ promotion is shifted so
/// that each ⟨6,1⟩ bookkeeping term 4η becomes 4η + `shift`.
pub fn verify_offsets_with_eta_shift(shift: Rational) -> Result<OffsetsSummary, GraphCalcError> {
    let mut promo = Promotion::default();
    promo.c6_shift = &promo.c6_shift + &CoeffPoly::constant(shift / Rational::from_integer(4));
    Ok(OffsetsSummary { order6: verify_offset_order6(&promo)?, order7: verify_offset_order7(&promo)? })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pattern_words_examples() {
        let w = pattern_words("ababXXX", false).unwrap();
        assert_eq!(w.len(), 1);
        assert_eq!(w[0].0.to_string(), "G0W4G~0v2VG0");
        let a = pattern_words("aaababX", false).unwrap()[0].0.clone();
        let b = pattern_words("abaaabX", false).unwrap()[0].0.clone();
        assert_eq!(a, b);
        assert_eq!(a.to_string(), "G0v2W4G~0VG0");
        let r = pattern_words("XYababZ", true).unwrap();
        assert_eq!(r.len(), 2);
        assert_eq!(r[1].0.to_string(), "G0VG~0R6G0");
    }

    #[test]
    fn only_the_interleaved_sextuple_needs_an_exclusion() {
        for p in C6_PATTERNS {
            let s: String = p.iter().map(|&l| (b'a' + l) as char).collect();
            let n = pattern_words(&format!("{s}X"), false).unwrap().len();
            let expect = if s == "abacbc" { 2 } else { 1 };
            assert_eq!(n, expect, "{s}");
        }
    }

    #[test]
    fn promotion_sheds_diagonals() {
        let w = Word::from_groups(vec![vec![V2, Node::W4], vec![V]]);
        let out = Promotion::default().apply(&w);
        assert_eq!(out.len(), 2);
        assert_eq!(out[1].0.class(), "<6,1>");
    }
}
