use super::domain::MaskedDomain;
use super::hierarchy::MasseyHierarchy;
use crate::error::{Error, Result};
use crate::grid::{ext_d, wedge, GridField};

/// Strictly upper-triangular matrix of 1-forms, `size × size`, with missing entries zero.
#[derive(Debug, Clone)]
pub struct NilpotentConnection {
    size: usize,
    entries: Vec<Option<GridField>>,
}

impl NilpotentConnection {
    pub fn new(size: usize) -> Self {
        Self { size, entries: vec![None; size * size] }
    }

    /// Level 1 holds `v_1, v_2, v_3` on the first superdiagonal; level 2 adds `v_12, v_23`.
    pub fn from_hierarchy(h: &MasseyHierarchy, level: usize) -> Result<Self> {
        if !(1..=2).contains(&level) {
            return Err(Error::Invalid(format!("connection level {level} is not 1 or 2")));
        }
        let mut a = Self::new(4);
        a.set(0, 1, h.v("1")?.clone())?;
        a.set(1, 2, h.v("2")?.clone())?;
        a.set(2, 3, h.v("3")?.clone())?;
        if level == 2 {
            a.set(0, 2, h.v("12")?.clone())?;
            a.set(1, 3, h.v("23")?.clone())?;
        }
        Ok(a)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn set(&mut self, row: usize, col: usize, f: GridField) -> Result<()> {
        if row >= col || col >= self.size {
            return Err(Error::Invalid(format!("entry ({row},{col}) is not strictly upper triangular")));
        }
        if f.degree() != 1 {
            return Err(Error::Degree("connection entries are 1-forms".into()));
        }
        self.entries[row * self.size + col] = Some(f);
        Ok(())
    }

    pub fn get(&self, row: usize, col: usize) -> Option<&GridField> {
        self.entries.get(row * self.size + col).and_then(|e| e.as_ref())
    }
}

/// Strictly upper-triangular matrix of 2-forms.
#[derive(Debug, Clone)]
pub struct Curvature {
    size: usize,
    entries: Vec<Option<GridField>>,
}

impl Curvature {
    pub fn get(&self, row: usize, col: usize) -> Option<&GridField> {
        self.entries.get(row * self.size + col).and_then(|e| e.as_ref())
    }
}

fn add_opt(acc: Option<GridField>, f: GridField) -> Result<Option<GridField>> {
    Ok(Some(match acc {
        Some(a) => a.add(&f)?,
        None => f,
    }))
}

/// `F = dA + A ∧ A`, summed over `k` in increasing order.
pub fn connection_curvature(a: &NilpotentConnection) -> Result<Curvature> {
    let n = a.size;
    let mut entries = vec![None; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let mut acc = None;
            if let Some(f) = a.get(i, j) {
                acc = add_opt(acc, ext_d(f)?)?;
            }
            for k in i + 1..j {
                if let (Some(x), Some(y)) = (a.get(i, k), a.get(k, j)) {
                    acc = add_opt(acc, wedge(x, y)?)?;
                }
            }
            entries[i * n + j] = acc;
        }
    }
    Ok(Curvature { size: n, entries })
}

/// Masked Bianchi defect `dF + A∧F − F∧A`, relative to the curvature norm.
///
/// Squares of entries are summed before the square root, so the result is
/// `sqrt(Σ ‖mask·B_e‖²) / sqrt(Σ ‖F_e‖²)`.
pub fn bianchi_residual(a: &NilpotentConnection, f: &Curvature, dom: &MaskedDomain) -> Result<f64> {
    let n = a.size;
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..n {
        for j in i + 1..n {
            let mut acc = None;
            if let Some(fij) = f.get(i, j) {
                let d = ext_d(fij)?;
                den += fij.l2_norm().powi(2);
                acc = add_opt(acc, d)?;
            }
            for k in i + 1..j {
                if let (Some(x), Some(y)) = (a.get(i, k), f.get(k, j)) {
                    acc = add_opt(acc, wedge(x, y)?)?;
                }
                if let (Some(x), Some(y)) = (f.get(i, k), a.get(k, j)) {
                    acc = add_opt(acc, wedge(x, y)?.scale(-1.0))?;
                }
            }
            if let Some(b) = acc {
                num += dom.masked_norm(&b).powi(2);
            }
        }
    }
    Ok(if num == 0.0 { 0.0 } else if den == 0.0 { f64::INFINITY } else { (num / den).sqrt() })
}
