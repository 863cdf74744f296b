use super::diagram::LinkDiagram;
use super::magnus::MagnusSeries;
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_traits::Zero;
use std::collections::{BTreeSet, HashMap};

/// A letter `x_arc^exponent`.
pub type Letter = (usize, i64);

/// Wirtinger presentation: one generator per arc, one relator per crossing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presentation {
    pub generators: usize,
    /// Each relator reads `x_out⁻¹ · x_over^{-ε} x_in x_over^{ε}`.
    pub relators: Vec<Vec<Letter>>,
}

pub fn wirtinger(d: &LinkDiagram) -> Presentation {
    let relators = d
        .crossings()
        .iter()
        .map(|x| {
            let e = x.sign as i64;
            vec![(x.under_out, -1), (x.over, -e), (x.under_in, 1), (x.over, e)]
        })
        .collect();
    Presentation { generators: d.arc_count(), relators }
}

/// Zero-framed longitude of component `c` (1-based), starting on its first arc.
///
/// One letter `x_over^ε` per under-pass in traversal order, then `x_base^{-w}` for self-writhe `w`.
pub fn longitude_word(d: &LinkDiagram, c: usize) -> Result<Vec<Letter>> {
    let c0 = component_index(d, c)?;
    let mut word: Vec<Letter> = d.under_passes(c0).map(|x| (x.over, x.sign as i64)).collect();
    let w = d.self_writhe(c0);
    if w != 0 {
        word.push((d.arcs()[c0][0], -w));
    }
    Ok(word)
}

fn component_index(d: &LinkDiagram, c: usize) -> Result<usize> {
    if c == 0 || c > d.components() {
        return Err(Error::Invalid(format!("component {c} is not in 1..={}", d.components())));
    }
    Ok(c - 1)
}

/// Magnus images of arc generators, expanded to a fixed nesting depth.
///
/// Each arc is a conjugate of its component's first arc by the product of the
/// over-letters met before it; depth 0 replaces every arc by `1 + X_c`.
struct Expander<'a> {
    d: &'a LinkDiagram,
    degree: usize,
    memo: HashMap<(usize, usize), MagnusSeries>,
}

impl<'a> Expander<'a> {
    fn new(d: &'a LinkDiagram, degree: usize) -> Self {
        Self { d, degree, memo: HashMap::new() }
    }

    fn arc(&mut self, arc: usize, depth: usize) -> MagnusSeries {
        if let Some(s) = self.memo.get(&(arc, depth)) {
            return s.clone();
        }
        let c = self.d.component_of(arc);
        let base = MagnusSeries::generator(c, 1, self.degree);
        let out = if depth == 0 {
            base
        } else {
            let k = self.d.position_of(arc);
            let letters: Vec<_> = self.d.under_passes(c).take(k).map(|x| (x.over, x.sign as i64)).collect();
            let prefix = self.word(&letters, depth - 1);
            base.conjugate(&prefix)
        };
        self.memo.insert((arc, depth), out.clone());
        out
    }

    fn word(&mut self, letters: &[Letter], depth: usize) -> MagnusSeries {
        let mut acc = MagnusSeries::one(self.degree);
        for &(a, e) in letters {
            let s = self.arc(a, depth);
            let p = if e >= 0 { s.pow(e as u64) } else { s.inverse().expect("unit").pow(e.unsigned_abs()) };
            acc = acc.mul(&p);
        }
        acc
    }
}

/// Magnus expansion of the longitude of component `c` (1-based) through degree `degree`.
pub fn longitude_magnus(d: &LinkDiagram, c: usize, degree: usize) -> Result<MagnusSeries> {
    let word = longitude_word(d, c)?;
    let mut ex = Expander::new(d, degree);
    Ok(ex.word(&word, degree))
}

/// Value of one invariant together with the lower-order invariants that were checked first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MuBar {
    pub index: Vec<usize>,
    pub value: BigInt,
    /// `(index, value)` for every lower multi-index examined, all zero.
    pub trail: Vec<(Vec<usize>, BigInt)>,
}

pub fn format_index(index: &[usize]) -> String {
    if index.iter().all(|&i| i < 10) {
        index.iter().map(|i| i.to_string()).collect()
    } else {
        index.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(",")
    }
}

/// Raw coefficient: `X_{i1} … X_{ik}` in the longitude of `i_{k+1}`, indices 1-based.
pub fn mu_coefficient(d: &LinkDiagram, index: &[usize]) -> Result<BigInt> {
    if index.len() < 2 {
        return Err(Error::Invalid("a multi-index needs at least two entries".into()));
    }
    for &i in index {
        component_index(d, i)?;
    }
    let (last, head) = index.split_last().expect("non-empty");
    let m = longitude_magnus(d, *last, head.len())?;
    let word: Vec<usize> = head.iter().map(|i| i - 1).collect();
    Ok(m.coefficient(&word))
}

/// Proper sub-multi-indices of length at least two (deletions) and their cyclic rotations.
fn lower_indices(index: &[usize]) -> Vec<Vec<usize>> {
    let n = index.len();
    let mut set = BTreeSet::new();
    for mask in 1..(1u32 << n) - 1 {
        let sub: Vec<usize> = (0..n).filter(|b| mask & (1 << b) != 0).map(|b| index[b]).collect();
        if sub.len() >= 2 {
            for r in 0..sub.len() {
                let mut s = sub.clone();
                s.rotate_left(r);
                set.insert(s);
            }
        }
    }
    let mut v: Vec<_> = set.into_iter().collect();
    v.sort_by_key(|s| s.len());
    v
}

/// The invariant `μ̄(index)` with 1-based component indices.
///
/// The value is only defined when every lower invariant vanishes; otherwise the
/// first non-zero one is reported in an `IndeterminateInvariant` error.
pub fn mu_bar(d: &LinkDiagram, index: &[usize]) -> Result<MuBar> {
    let mut trail = Vec::new();
    for sub in lower_indices(index) {
        let v = mu_coefficient(d, &sub)?;
        if !v.is_zero() {
            return Err(Error::IndeterminateInvariant {
                index: format_index(index),
                sub_index: format_index(&sub),
                value: v.to_string(),
            });
        }
        trail.push((sub, v));
    }
    let value = mu_coefficient(d, index)?;
    Ok(MuBar { index: index.to_vec(), value, trail })
}
