//! Exact linear algebra over a [`FieldCtx`]: small dense matrices for group
//! elements and a sparse incremental echelon form for the large systems in
//! cohomology and module checks.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::gf::{Field, FieldCtx, GfError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatrixError {
    #[error("malformed matrix literal: {0}")]
    Malformed(String),
    #[error("matrix rows have unequal lengths")]
    Ragged,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error(transparent)]
    Field(#[from] GfError),
}

/// Dense row-major matrix of field codes.
#[derive(Clone)]
pub struct Matrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl PartialEq for Matrix {
    fn eq(&self, other: &Self) -> bool {
        self.rows == other.rows && self.cols == other.cols && self.data == other.data && *self.field == *other.field
    }
}

impl Eq for Matrix {}

impl std::hash::Hash for Matrix {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.rows.hash(state);
        self.cols.hash(state);
        self.data.hash(state);
    }
}

impl Matrix {
    pub fn zeros(field: &Field, rows: usize, cols: usize) -> Self {
        Matrix { field: field.clone(), rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(field: &Field, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn from_rows(field: &Field, rows: &[Vec<u32>]) -> Result<Self, MatrixError> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(MatrixError::Ragged);
        }
        let q = field.order();
        if let Some(&bad) = rows.iter().flatten().find(|&&c| c >= q) {
            return Err(MatrixError::Malformed(format!("entry code {bad} is not in {}", field.describe())));
        }
        Ok(Matrix { field: field.clone(), rows: rows.len(), cols, data: rows.concat() })
    }

    /// Parses `[[a,b],[c,d]]`; entries use the field element grammar.
    pub fn parse(field: &Field, text: &str) -> Result<Self, MatrixError> {
        let t = text.trim();
        let inner = t
            .strip_prefix('[')
            .and_then(|s| s.strip_suffix(']'))
            .ok_or_else(|| MatrixError::Malformed("expected `[[...], ...]`".into()))?;
        let mut rows = Vec::new();
        let mut rest = inner.trim();
        while !rest.is_empty() {
            let body = rest
                .strip_prefix('[')
                .ok_or_else(|| MatrixError::Malformed(format!("expected `[` at `{rest}`")))?;
            let close = body.find(']').ok_or_else(|| MatrixError::Malformed("unclosed row".into()))?;
            let row = body[..close]
                .split(',')
                .map(|e| field.parse_code(e.trim()))
                .collect::<Result<Vec<u32>, _>>()?;
            rows.push(row);
            rest = body[close + 1..].trim_start();
            if let Some(r) = rest.strip_prefix(',') {
                rest = r.trim_start();
                if rest.is_empty() {
                    return Err(MatrixError::Malformed("trailing comma".into()));
                }
            } else if !rest.is_empty() {
                return Err(MatrixError::Malformed(format!("expected `,` at `{rest}`")));
            }
        }
        if rows.is_empty() {
            return Err(MatrixError::Malformed("empty matrix".into()));
        }
        Self::from_rows(field, &rows)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: u32) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[u32] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    /// Row-major codes; also the canonical sort key for group elements.
    pub fn data(&self) -> &[u32] {
        &self.data
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix, MatrixError> {
        if self.cols != other.rows {
            return Err(MatrixError::DimensionMismatch { expected: self.cols, found: other.rows });
        }
        let f = &self.field;
        let mut out = Matrix::zeros(f, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let idx = i * other.cols + j;
                    out.data[idx] = f.add(out.data[idx], f.mul(a, other.get(k, j)));
                }
            }
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix, MatrixError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(MatrixError::DimensionMismatch { expected: self.rows * self.cols, found: other.rows * other.cols });
        }
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| self.field.sub(a, b)).collect();
        Ok(Matrix { field: self.field.clone(), rows: self.rows, cols: self.cols, data })
    }

    pub fn mul_vec(&self, v: &[u32]) -> Vec<u32> {
        assert_eq!(v.len(), self.cols);
        let f = &self.field;
        (0..self.rows)
            .map(|i| (0..self.cols).fold(0, |acc, j| f.add(acc, f.mul(self.get(i, j), v[j]))))
            .collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(&self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j));
            }
        }
        out
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let f = &self.field;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(pr) = (r..m.rows).find(|&i| m.get(i, c) != 0) else { continue };
            for j in 0..m.cols {
                m.data.swap(r * m.cols + j, pr * m.cols + j);
            }
            let inv = f.inv(m.get(r, c)).expect("pivot is nonzero");
            for j in 0..m.cols {
                let v = f.mul(m.get(r, j), inv);
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                let factor = m.get(i, c);
                if i == r || factor == 0 {
                    continue;
                }
                for j in 0..m.cols {
                    let v = f.sub(m.get(i, j), f.mul(factor, m.get(r, j)));
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of `{v : M v = 0}`, one vector per free column.
    pub fn kernel(&self) -> Vec<Vec<u32>> {
        let f = &self.field;
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&fc| {
                let mut v = vec![0; self.cols];
                v[fc] = 1;
                for (row, &pc) in pivots.iter().enumerate() {
                    v[pc] = f.neg(r.get(row, fc));
                }
                v
            })
            .collect()
    }

    pub fn inverse(&self) -> Option<Matrix> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let mut aug = Matrix::zeros(&self.field, n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j));
            }
            aug.set(i, n + i, 1);
        }
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let mut inv = Matrix::zeros(&self.field, n, n);
        for i in 0..n {
            for j in 0..n {
                inv.set(i, j, r.get(i, n + j));
            }
        }
        Some(inv)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..self.cols).all(|j| self.get(i, j) == u32::from(i == j)))
    }

    /// True if every row and column has a single nonzero entry equal to 1.
    pub fn is_permutation(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                let row = self.row(i);
                row.iter().filter(|&&c| c != 0).count() == 1 && row.contains(&1)
            })
            && (0..self.cols).all(|j| (0..self.rows).filter(|&i| self.get(i, j) != 0).count() == 1)
    }

    /// Block-diagonal sum of `k` copies.
    pub fn block_diagonal(&self, k: usize) -> Matrix {
        let mut out = Matrix::zeros(&self.field, self.rows * k, self.cols * k);
        for b in 0..k {
            for i in 0..self.rows {
                for j in 0..self.cols {
                    out.set(b * self.rows + i, b * self.cols + j, self.get(i, j));
                }
            }
        }
        out
    }

    /// Entrywise image under the field embedding into `target`.
    pub fn embed(&self, target: &Field) -> Result<Matrix, MatrixError> {
        let data = self
            .data
            .iter()
            .map(|&c| target.embed_code(&self.field, c))
            .collect::<Result<Vec<u32>, _>>()?;
        Ok(Matrix { field: target.clone(), rows: self.rows, cols: self.cols, data })
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for i in 0..self.rows {
            if i > 0 {
                f.write_str(",")?;
            }
            let row: Vec<String> = self.row(i).iter().map(|&c| self.field.format(c)).collect();
            write!(f, "[{}]", row.join(","))?;
        }
        f.write_str("]")
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Sparse vector: `(index, nonzero code)` pairs sorted by index.
pub type SparseVec = Vec<(u32, u32)>;

/// `y + c·x`.
pub fn axpy(field: &FieldCtx, y: &[(u32, u32)], c: u32, x: &[(u32, u32)]) -> SparseVec {
    if c == 0 {
        return y.to_vec();
    }
    let mut out = Vec::with_capacity(y.len() + x.len());
    let (mut i, mut j) = (0, 0);
    while i < y.len() || j < x.len() {
        let take_y = j == x.len() || (i < y.len() && y[i].0 < x[j].0);
        let take_x = i == y.len() || (j < x.len() && x[j].0 < y[i].0);
        if take_y {
            out.push(y[i]);
            i += 1;
        } else if take_x {
            out.push((x[j].0, field.mul(c, x[j].1)));
            j += 1;
        } else {
            let v = field.add(y[i].1, field.mul(c, x[j].1));
            if v != 0 {
                out.push((y[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

pub fn scale(field: &FieldCtx, c: u32, x: &[(u32, u32)]) -> SparseVec {
    if c == 0 {
        return Vec::new();
    }
    x.iter().map(|&(i, v)| (i, field.mul(c, v))).collect()
}

/// Sparse vector from unsorted `(index, code)` contributions, summing duplicates.
pub fn collect_sparse(field: &FieldCtx, entries: impl IntoIterator<Item = (u32, u32)>) -> SparseVec {
    let mut acc: HashMap<u32, u32> = HashMap::new();
    for (i, v) in entries {
        let slot = acc.entry(i).or_insert(0);
        *slot = field.add(*slot, v);
    }
    let mut out: SparseVec = acc.into_iter().filter(|&(_, v)| v != 0).collect();
    out.sort_unstable_by_key(|e| e.0);
    out
}

/// Result of reducing a vector against an [`Echelon`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reduction {
    /// Nonzero iff the vector is outside the span.
    pub remainder: SparseVec,
    /// Coefficients on the inserted vectors (by insertion id) when tracking;
    /// `vector = remainder + Σ coeff·inserted[id]`.
    pub combination: Option<SparseVec>,
}

/// Incremental echelon basis of inserted sparse vectors. Each stored vector
/// has a distinct leading index (its smallest index) with coefficient 1.
#[derive(Clone)]
pub struct Echelon {
    field: Field,
    track: bool,
    pivots: HashMap<u32, usize>,
    rows: Vec<SparseVec>,
    combos: Vec<SparseVec>,
    kernel: Vec<SparseVec>,
    inserted: u32,
}

impl Echelon {
    /// With `track`, combinations over inserted vectors are maintained, so
    /// membership witnesses and linear dependencies become available.
    pub fn new(field: &Field, track: bool) -> Self {
        Echelon {
            field: field.clone(),
            track,
            pivots: HashMap::new(),
            rows: Vec::new(),
            combos: Vec::new(),
            kernel: Vec::new(),
            inserted: 0,
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn inserted(&self) -> u32 {
        self.inserted
    }

    /// Dependencies among inserted vectors found so far (tracking only).
    pub fn kernel(&self) -> &[SparseVec] {
        &self.kernel
    }

    pub fn pivot_indices(&self) -> impl Iterator<Item = u32> + '_ {
        self.pivots.keys().copied()
    }

    /// Inserts the next vector; returns its leading index if it enlarged the span.
    pub fn insert(&mut self, v: SparseVec) -> Option<u32> {
        let id = self.inserted;
        self.inserted += 1;
        let f = self.field.clone();
        let mut v = v;
        let mut combo: SparseVec = if self.track { vec![(id, 1)] } else { Vec::new() };
        let mut cursor = 0;
        while cursor < v.len() {
            let (idx, c) = v[cursor];
            let Some(&k) = self.pivots.get(&idx) else {
                break;
            };
            let neg = f.neg(c);
            v = axpy(&f, &v, neg, &self.rows[k]);
            if self.track {
                combo = axpy(&f, &combo, neg, &self.combos[k]);
            }
            cursor = v.partition_point(|e| e.0 <= idx);
        }
        let Some(&(lead, c)) = v.get(cursor) else {
            if self.track {
                self.kernel.push(combo);
            }
            return None;
        };
        // Entries before `cursor` would be pivots; all were eliminated.
        debug_assert_eq!(cursor, 0);
        let inv = f.inv(c).expect("nonzero lead");
        self.pivots.insert(lead, self.rows.len());
        self.rows.push(scale(&f, inv, &v));
        if self.track {
            self.combos.push(scale(&f, inv, &combo));
        }
        Some(lead)
    }

    /// Eliminates leading entries until the lead is not a pivot.
    pub fn reduce(&self, v: &[(u32, u32)]) -> Reduction {
        self.reduce_inner(v, false)
    }

    /// Eliminates every pivot index; the remainder is canonical modulo the span.
    pub fn reduce_full(&self, v: &[(u32, u32)]) -> Reduction {
        self.reduce_inner(v, true)
    }

    fn reduce_inner(&self, v: &[(u32, u32)], full: bool) -> Reduction {
        let f = &self.field;
        let mut v = v.to_vec();
        let mut combo: SparseVec = Vec::new();
        let mut cursor = 0;
        while cursor < v.len() {
            let (idx, c) = v[cursor];
            match self.pivots.get(&idx) {
                Some(&k) => {
                    v = axpy(f, &v, f.neg(c), &self.rows[k]);
                    if self.track {
                        combo = axpy(f, &combo, c, &self.combos[k]);
                    }
                    cursor = v.partition_point(|e| e.0 <= idx);
                }
                None if full => cursor += 1,
                None => break,
            }
        }
        Reduction { remainder: v, combination: self.track.then_some(combo) }
    }

    pub fn contains(&self, v: &[(u32, u32)]) -> bool {
        self.reduce(v).remainder.is_empty()
    }

    /// Reduced echelon basis of the span, sorted by leading index: every
    /// pivot index occurs in exactly one row.
    pub fn reduced_rows(&self) -> Vec<SparseVec> {
        let untracked = Echelon { track: false, combos: Vec::new(), kernel: Vec::new(), ..self.clone() };
        let mut out: Vec<SparseVec> = self
            .rows
            .iter()
            .map(|row| {
                // Rows used on the tail have larger leads, so the lead never returns.
                let mut v = vec![row[0]];
                v.extend(untracked.reduce_full(&row[1..]).remainder);
                v
            })
            .collect();
        out.sort_by_key(|r| r[0].0);
        out
    }
}
