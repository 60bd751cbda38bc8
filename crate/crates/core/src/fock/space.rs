use std::collections::HashMap;

use crate::error::{Error, Result};

pub const DEFAULT_LEVEL_CUTOFF: usize = 6;
pub const DEFAULT_OSC_CUTOFF: usize = 4;

/// Occupation-number basis for one field mode, truncated at a highest
/// oscillator level and a maximum total oscillaton number.
///
/// Ordering is by total oscillaton number, then lexicographic on the
/// occupation vector `(m_0, ..., m_L)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModeSpace {
    level_cutoff: usize,
    osc_cutoff: usize,
    basis: Vec<Vec<u32>>,
    index: HashMap<Vec<u32>, usize>,
}

impl ModeSpace {
    pub fn new(level_cutoff: usize, osc_cutoff: usize) -> Result<Self> {
        if level_cutoff < 1 {
            return Err(Error::InvalidSpace("level_cutoff must be >= 1".into()));
        }
        if osc_cutoff < 1 {
            return Err(Error::InvalidSpace("osc_cutoff must be >= 1".into()));
        }
        let levels = level_cutoff + 1;
        let mut basis = Vec::new();
        for total in 0..=osc_cutoff {
            let mut sector = Vec::new();
            let mut current = vec![0u32; levels];
            compositions(total as u32, 0, &mut current, &mut sector);
            sector.sort();
            basis.extend(sector);
        }
        let index = basis
            .iter()
            .enumerate()
            .map(|(i, v)| (v.clone(), i))
            .collect();
        Ok(Self {
            level_cutoff,
            osc_cutoff,
            basis,
            index,
        })
    }

    pub fn level_cutoff(&self) -> usize {
        self.level_cutoff
    }

    pub fn osc_cutoff(&self) -> usize {
        self.osc_cutoff
    }

    /// Number of oscillator levels retained (`level_cutoff + 1`).
    pub fn levels(&self) -> usize {
        self.level_cutoff + 1
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<u32>] {
        &self.basis
    }

    pub fn occupation(&self, index: usize) -> &[u32] {
        &self.basis[index]
    }

    pub fn index_of(&self, occupation: &[u32]) -> Option<usize> {
        self.index.get(occupation).copied()
    }

    pub fn total(&self, index: usize) -> u32 {
        self.basis[index].iter().sum()
    }

    pub fn vacuum(&self) -> usize {
        0
    }

    /// Index of the state holding a single oscillaton at `level`.
    pub fn single(&self, level: usize) -> Result<usize> {
        self.check_level(level)?;
        let mut occ = vec![0u32; self.levels()];
        occ[level] = 1;
        Ok(self.index[&occ])
    }

    /// Indices of the one-oscillaton sector, ordered by level `0..=L`.
    pub fn single_sector(&self) -> Vec<usize> {
        (0..self.levels())
            .map(|n| self.single(n).expect("level within cutoff"))
            .collect()
    }

    /// Basis vector `e_index` as a complex amplitude vector.
    pub fn basis_vector(&self, index: usize) -> Vec<num_complex::Complex64> {
        let mut v = vec![num_complex::Complex64::new(0.0, 0.0); self.dim()];
        v[index] = num_complex::Complex64::new(1.0, 0.0);
        v
    }

    pub(crate) fn check_level(&self, level: usize) -> Result<()> {
        if level > self.level_cutoff {
            return Err(Error::LevelOutOfBounds {
                level,
                cutoff: self.level_cutoff,
            });
        }
        Ok(())
    }
}

fn compositions(remaining: u32, pos: usize, current: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if pos + 1 == current.len() {
        current[pos] = remaining;
        out.push(current.clone());
        return;
    }
    for k in 0..=remaining {
        current[pos] = k;
        compositions(remaining - k, pos + 1, current, out);
    }
    current[pos] = 0;
}

/// Truncation-safe subspace: states at least `margin` away from both cutoffs.
#[derive(Debug, Clone)]
pub struct InteriorProjector {
    margin: usize,
    kept: Vec<usize>,
}

impl InteriorProjector {
    pub fn new(space: &ModeSpace, margin: usize) -> Result<Self> {
        if margin < 1 {
            return Err(Error::InvalidSpace("projector margin must be >= 1".into()));
        }
        let max_total = space.osc_cutoff() as i64 - margin as i64;
        let max_level = space.level_cutoff() as i64 - margin as i64;
        let kept = (0..space.dim())
            .filter(|&i| {
                let occ = space.occupation(i);
                let total: i64 = occ.iter().map(|&m| m as i64).sum();
                total <= max_total
                    && occ
                        .iter()
                        .enumerate()
                        .all(|(n, &m)| m == 0 || n as i64 <= max_level)
            })
            .collect();
        Ok(Self { margin, kept })
    }

    pub fn margin(&self) -> usize {
        self.margin
    }

    pub fn kept_indices(&self) -> &[usize] {
        &self.kept
    }

    pub fn contains(&self, index: usize) -> bool {
        self.kept.binary_search(&index).is_ok()
    }
}
