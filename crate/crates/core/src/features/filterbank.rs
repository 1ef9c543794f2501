//! Triangular filter banks over Doppler bins.
//!
//! Text format: a `# filterbank v1` line, a `# n_bins=<N>` line, then one
//! `start peak end` triple per filter.

use std::fmt::Write as _;

use rand::Rng;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TriangularFilter {
    pub start: usize,
    pub peak: usize,
    pub end: usize,
}

impl TriangularFilter {
    /// Piecewise-linear response: 0 at `start`/`end`, 1 at `peak`.
    pub fn weight(&self, k: usize) -> f64 {
        if k <= self.start || k >= self.end {
            0.0
        } else if k <= self.peak {
            (k - self.start) as f64 / (self.peak - self.start) as f64
        } else {
            (self.end - k) as f64 / (self.end - self.peak) as f64
        }
    }

    /// Orders the three positions and forces `start < peak < end` inside `[0, n_bins − 1]`.
    pub fn repaired(genes: [usize; 3], n_bins: usize) -> Self {
        let mut g = genes.map(|v| v.min(n_bins - 1));
        g.sort_unstable();
        let peak = g[1].clamp(1, n_bins - 2);
        Self { start: g[0].min(peak - 1), peak, end: g[2].max(peak + 1) }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FilterBank {
    pub n_bins: usize,
    pub filters: Vec<TriangularFilter>,
}

impl FilterBank {
    pub fn new(n_bins: usize, filters: Vec<TriangularFilter>) -> Result<Self> {
        let bank = Self { n_bins, filters };
        bank.validate()?;
        Ok(bank)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_bins < 3 {
            return Err(Error::domain("a filter bank needs at least 3 bins"));
        }
        if self.filters.is_empty() {
            return Err(Error::domain("a filter bank needs at least one filter"));
        }
        for (i, f) in self.filters.iter().enumerate() {
            if !(f.start < f.peak && f.peak < f.end && f.end < self.n_bins) {
                return Err(Error::domain(format!(
                    "filter {i} ({}, {}, {}) violates start < peak < end < {}",
                    f.start, f.peak, f.end, self.n_bins
                )));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.filters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.filters.is_empty()
    }

    /// `m` equally spaced filters, each spanning its neighbours' peaks.
    pub fn uniform(m: usize, n_bins: usize) -> Result<Self> {
        if m == 0 || n_bins < m + 2 {
            return Err(Error::domain(format!("cannot fit {m} filters into {n_bins} bins")));
        }
        let step = (n_bins - 1) as f64 / (m + 1) as f64;
        let pos = |i: usize| (i as f64 * step).round() as usize;
        let filters = (0..m)
            .map(|i| TriangularFilter::repaired([pos(i), pos(i + 1), pos(i + 2)], n_bins))
            .collect();
        Self::new(n_bins, filters)
    }

    pub fn random<R: Rng>(m: usize, n_bins: usize, rng: &mut R) -> Result<Self> {
        if m == 0 || n_bins < 3 {
            return Err(Error::domain("random bank needs m >= 1 and n_bins >= 3"));
        }
        let genes: Vec<usize> = (0..3 * m).map(|_| rng.random_range(0..n_bins)).collect();
        Ok(Self::from_chromosome(&genes, n_bins))
    }

    /// Decodes a 3M-gene chromosome, repairing each triple.
    pub fn from_chromosome(genes: &[usize], n_bins: usize) -> Self {
        let filters = genes
            .chunks_exact(3)
            .map(|g| TriangularFilter::repaired([g[0], g[1], g[2]], n_bins))
            .collect();
        Self { n_bins, filters }
    }

    pub fn to_chromosome(&self) -> Vec<usize> {
        self.filters.iter().flat_map(|f| [f.start, f.peak, f.end]).collect()
    }

    /// `h_m(k)` for every bin.
    pub fn responses(&self) -> Vec<Vec<f64>> {
        self.filters
            .iter()
            .map(|f| (0..self.n_bins).map(|k| f.weight(k)).collect())
            .collect()
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("# filterbank v1\n# n_bins={}\n", self.n_bins);
        for f in &self.filters {
            let _ = writeln!(out, "{} {} {}", f.start, f.peak, f.end);
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, l)) if l.trim() == "# filterbank v1" => {}
            _ => return Err(Error::Parse("line 1: expected '# filterbank v1'".into())),
        }
        let n_bins = match lines.next() {
            Some((_, l)) => l
                .trim()
                .strip_prefix("# n_bins=")
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| Error::Parse("line 2: expected '# n_bins=<N>'".into()))?,
            None => return Err(Error::Parse("missing n_bins line".into())),
        };
        let mut filters = Vec::new();
        for (i, line) in lines {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let nums = line
                .split_whitespace()
                .map(|t| t.parse::<usize>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::Parse(format!("line {}: {e}", i + 1)))?;
            let [start, peak, end] = nums[..] else {
                return Err(Error::Parse(format!("line {}: expected three integers", i + 1)));
            };
            filters.push(TriangularFilter { start, peak, end });
        }
        Self::new(n_bins, filters)
    }
}
