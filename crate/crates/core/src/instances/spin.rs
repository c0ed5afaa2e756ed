use crate::{Error, Result};

/// One coupling `J_ij` between spins `i < j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bond {
    pub i: usize,
    pub j: usize,
    pub coupling: i32,
}

/// Ising spin glass with integer couplings and fields.
///
/// Bonds are kept in canonical order (`i < j`, sorted lexicographically).
/// The same pair may carry several bonds: a periodic lattice of side 2 links
/// each neighbor pair once directly and once around the boundary.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SpinGlassInstance {
    n: usize,
    bonds: Vec<Bond>,
    fields: Vec<i32>,
}

impl SpinGlassInstance {
    pub fn new(n: usize, bonds: impl IntoIterator<Item = Bond>, fields: Vec<i32>) -> Result<Self> {
        if fields.len() != n {
            return Err(Error::InvalidInstance(format!(
                "expected {n} fields, got {}",
                fields.len()
            )));
        }
        let mut canonical = Vec::new();
        for b in bonds {
            if b.i >= n || b.j >= n {
                return Err(Error::InvalidInstance(format!(
                    "bond ({}, {}) out of range for n={n}",
                    b.i, b.j
                )));
            }
            if b.i == b.j {
                return Err(Error::InvalidInstance(format!("self-coupling at spin {}", b.i)));
            }
            canonical.push(Bond {
                i: b.i.min(b.j),
                j: b.i.max(b.j),
                coupling: b.coupling,
            });
        }
        canonical.sort_unstable();
        Ok(Self {
            n,
            bonds: canonical,
            fields,
        })
    }

    /// Zero external field.
    pub fn without_fields(n: usize, bonds: impl IntoIterator<Item = Bond>) -> Result<Self> {
        Self::new(n, bonds, vec![0; n])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bonds(&self) -> &[Bond] {
        &self.bonds
    }

    pub fn fields(&self) -> &[i32] {
        &self.fields
    }

    pub fn has_fields(&self) -> bool {
        self.fields.iter().any(|&h| h != 0)
    }

    /// Side length if `n` is a perfect cube.
    pub fn lattice_side(&self) -> Option<usize> {
        let l = (self.n as f64).cbrt().round() as usize;
        (l * l * l == self.n).then_some(l)
    }
}
