use std::collections::BTreeMap;

use rayon::prelude::*;

use super::ngd::{ngd_distance, HitCountProvider};
use crate::error::{Error, Result};

/// Symmetric pairwise distances with a zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    terms: Vec<String>,
    d: Vec<f64>,
}

impl DistanceMatrix {
    /// Builds from the strict upper triangle given row by row.
    pub fn from_fn(terms: Vec<String>, mut f: impl FnMut(usize, usize) -> f64) -> DistanceMatrix {
        let n = terms.len();
        let mut d = vec![0.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let v = f(i, j);
                d[i * n + j] = v;
                d[j * n + i] = v;
            }
        }
        DistanceMatrix { terms, d }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.d[i * self.terms.len() + j]
    }

    pub fn index_of(&self, term: &str) -> Option<usize> {
        self.terms.iter().position(|t| t == term)
    }

    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        let mut seen = BTreeMap::new();
        for (i, t) in self.terms.iter().enumerate() {
            if let Some(j) = seen.insert(t, i) {
                problems.push(format!("term `{t}` appears at {j} and {i}"));
            }
        }
        for i in 0..self.len() {
            if self.get(i, i) != 0.0 {
                problems.push(format!("nonzero diagonal for `{}`", self.terms[i]));
            }
            for j in i + 1..self.len() {
                let v = self.get(i, j);
                if v != self.get(j, i) || !(0.0..=1.0).contains(&v) {
                    problems.push(format!("bad distance {v} for ({}, {})", self.terms[i], self.terms[j]));
                }
            }
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(problems))
        }
    }

    /// `term_i<TAB>term_j<TAB>distance` for every i ≤ j.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for i in 0..self.len() {
            for j in i..self.len() {
                out.push_str(&format!("{}\t{}\t{}\n", self.terms[i], self.terms[j], self.get(i, j)));
            }
        }
        out
    }

    pub fn from_tsv(text: &str, source_name: &str) -> Result<DistanceMatrix> {
        let mut terms: Vec<String> = Vec::new();
        let mut pos: BTreeMap<String, usize> = BTreeMap::new();
        let mut rows = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let err = |reason: String| Error::Parse {
                source_name: source_name.to_string(),
                line: i + 1,
                reason,
            };
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 3 {
                return Err(err(format!("expected 3 columns, found {}", cols.len())));
            }
            let v: f64 = cols[2].parse().map_err(|_| err(format!("bad distance `{}`", cols[2])))?;
            for t in &cols[..2] {
                if !pos.contains_key(*t) {
                    pos.insert(t.to_string(), terms.len());
                    terms.push(t.to_string());
                }
            }
            rows.push((pos[cols[0]], pos[cols[1]], v));
        }
        let n = terms.len();
        let mut d = vec![0.0; n * n];
        for (i, j, v) in rows {
            d[i * n + j] = v;
            d[j * n + i] = v;
        }
        let m = DistanceMatrix { terms, d };
        m.validate()?;
        Ok(m)
    }
}

/// Pairwise NGD, computed in parallel over pairs.
pub fn build_distance_matrix(terms: &[String], provider: &dyn HitCountProvider) -> Result<DistanceMatrix> {
    let n = terms.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let values = pairs
        .par_iter()
        .map(|&(i, j)| ngd_distance(&terms[i], &terms[j], provider))
        .collect::<Result<Vec<f64>>>()?;
    let mut it = values.into_iter();
    Ok(DistanceMatrix::from_fn(terms.to_vec(), |_, _| it.next().expect("one value per pair")))
}
