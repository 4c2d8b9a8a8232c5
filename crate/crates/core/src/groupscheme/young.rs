use crate::error::{Error, Result};
use std::fmt;

/// Weakly decreasing positive rows (n_1, ..., n_s); row i stands for a factor W_{n_i}^1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct YoungDiagram {
    rows: Vec<u32>,
}

impl YoungDiagram {
    pub fn new(rows: Vec<u32>) -> Result<Self> {
        if rows.iter().any(|&r| r == 0) {
            return Err(Error::Invalid("Young diagram rows must be positive".into()));
        }
        if rows.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::Invalid("Young diagram rows must be weakly decreasing".into()));
        }
        Ok(YoungDiagram { rows })
    }

    /// Sorts the rows into decreasing order first.
    pub fn from_unsorted(mut rows: Vec<u32>) -> Result<Self> {
        rows.sort_unstable_by(|a, b| b.cmp(a));
        Self::new(rows)
    }

    pub fn rows(&self) -> &[u32] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn boxes(&self) -> u32 {
        self.rows.iter().sum()
    }

    /// n_1, or 0 for the empty diagram.
    pub fn first_row(&self) -> u32 {
        self.rows.first().copied().unwrap_or(0)
    }

    /// Row-wise containment.
    pub fn contains(&self, other: &YoungDiagram) -> bool {
        other.rows.len() <= self.rows.len() && other.rows.iter().zip(&self.rows).all(|(a, b)| a <= b)
    }
}

impl fmt::Display for YoungDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.rows.iter().map(|r| r.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Smallest diagram containing every input: row-wise maximum.
pub fn young_join(diagrams: &[YoungDiagram]) -> YoungDiagram {
    let len = diagrams.iter().map(|d| d.len()).max().unwrap_or(0);
    let rows = (0..len)
        .map(|j| diagrams.iter().filter_map(|d| d.rows.get(j)).copied().max().unwrap_or(0))
        .collect();
    YoungDiagram { rows }
}

/// s ≤ n and n_1 ≤ n − s.
pub fn necessary_condition(ker_f_diagram: &YoungDiagram, mu_count: usize, n: usize) -> bool {
    mu_count <= n && ker_f_diagram.first_row() as usize <= n - mu_count
}
