//! Exact linear algebra over the rationals.
//!
//! Vectors are sparse and sorted by index. Elimination runs on primitive
//! integer rows (fraction-free, content removed after every step) and the
//! pivot of a row is always its first nonzero column, so results depend only
//! on the order in which vectors are supplied.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::rat::{gcd_all, primitive_ints, Q, Z};

/// Sparse rational vector: strictly increasing indices, no zero entries.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SparseVec(pub Vec<(usize, Q)>);

impl SparseVec {
    pub fn new() -> Self {
        SparseVec(Vec::new())
    }

    pub fn from_map(m: BTreeMap<usize, Q>) -> Self {
        SparseVec(m.into_iter().filter(|(_, v)| !v.is_zero()).collect())
    }

    pub fn from_dense(v: &[Q]) -> Self {
        SparseVec(
            v.iter()
                .enumerate()
                .filter(|(_, x)| !x.is_zero())
                .map(|(i, x)| (i, x.clone()))
                .collect(),
        )
    }

    pub fn unit(i: usize) -> Self {
        SparseVec(alloc::vec![(i, Q::one())])
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> Q {
        match self.0.binary_search_by(|(j, _)| j.cmp(&i)) {
            Ok(p) => self.0[p].1.clone(),
            Err(_) => Q::zero(),
        }
    }

    pub fn to_dense(&self, dim: usize) -> Vec<Q> {
        let mut out = alloc::vec![Q::zero(); dim];
        for (i, v) in &self.0 {
            out[*i] = v.clone();
        }
        out
    }

    pub fn axpy(&self, a: &Q, other: &SparseVec) -> SparseVec {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() || j < other.0.len() {
            let ord = match (self.0.get(i), other.0.get(j)) {
                (Some(x), Some(y)) => x.0.cmp(&y.0),
                (Some(_), None) => Ordering::Less,
                _ => Ordering::Greater,
            };
            match ord {
                Ordering::Less => {
                    out.push(self.0[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    let v = a * &other.0[j].1;
                    if !v.is_zero() {
                        out.push((other.0[j].0, v));
                    }
                    j += 1;
                }
                Ordering::Equal => {
                    let v = &self.0[i].1 + a * &other.0[j].1;
                    if !v.is_zero() {
                        out.push((self.0[i].0, v));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        SparseVec(out)
    }

    pub fn add(&self, other: &SparseVec) -> SparseVec {
        self.axpy(&Q::one(), other)
    }

    pub fn scale(&self, a: &Q) -> SparseVec {
        if a.is_zero() {
            return SparseVec::new();
        }
        SparseVec(self.0.iter().map(|(i, v)| (*i, v * a)).collect())
    }

    pub fn dot(&self, other: &SparseVec) -> Q {
        let mut acc = Q::zero();
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].0.cmp(&other.0[j].0) {
                Ordering::Less => i += 1,
                Ordering::Greater => j += 1,
                Ordering::Equal => {
                    acc += &self.0[i].1 * &other.0[j].1;
                    i += 1;
                    j += 1;
                }
            }
        }
        acc
    }

    /// Linear combination `sum coeffs[i] * vecs[i]`.
    pub fn combination(coeffs: &[Q], vecs: &[SparseVec]) -> SparseVec {
        let mut acc: BTreeMap<usize, Q> = BTreeMap::new();
        for (c, v) in coeffs.iter().zip(vecs) {
            if c.is_zero() {
                continue;
            }
            for (i, x) in &v.0 {
                *acc.entry(*i).or_insert_with(Q::zero) += c * x;
            }
        }
        SparseVec::from_map(acc)
    }
}

/// Sparse rational matrix. Absent entries are zero.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RatMatrix {
    pub rows: usize,
    pub cols: usize,
    entries: BTreeMap<(usize, usize), Q>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix { rows, cols, entries: BTreeMap::new() }
    }

    pub fn from_dense(rows: &[Vec<Q>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut m = RatMatrix::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                m.set(i, j, v.clone());
            }
        }
        m
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let dense: Vec<Vec<Q>> = rows
            .iter()
            .map(|r| r.iter().map(|&v| crate::rat::q(v)).collect())
            .collect();
        Self::from_dense(&dense)
    }

    /// Builds a matrix whose `j`-th column is `cols[j]`.
    pub fn from_columns(rows: usize, cols: &[SparseVec]) -> Self {
        let mut m = RatMatrix::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            for (i, v) in &c.0 {
                assert!(*i < rows, "column entry out of range");
                m.set(*i, j, v.clone());
            }
        }
        m
    }

    pub fn set(&mut self, i: usize, j: usize, v: Q) {
        if v.is_zero() {
            self.entries.remove(&(i, j));
        } else {
            self.entries.insert((i, j), v);
        }
    }

    pub fn get(&self, i: usize, j: usize) -> Q {
        self.entries.get(&(i, j)).cloned().unwrap_or_else(Q::zero)
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(usize, usize), &Q)> {
        self.entries.iter()
    }

    pub fn transpose(&self) -> RatMatrix {
        let mut t = RatMatrix::zeros(self.cols, self.rows);
        for ((i, j), v) in &self.entries {
            t.entries.insert((*j, *i), v.clone());
        }
        t
    }

    pub fn columns(&self) -> Vec<SparseVec> {
        let mut cols: Vec<Vec<(usize, Q)>> = alloc::vec![Vec::new(); self.cols];
        for ((i, j), v) in &self.entries {
            cols[*j].push((*i, v.clone()));
        }
        cols.into_iter()
            .map(|mut c| {
                c.sort_by_key(|a| a.0);
                SparseVec(c)
            })
            .collect()
    }

    pub fn mul_vec(&self, v: &SparseVec) -> SparseVec {
        let mut acc: BTreeMap<usize, Q> = BTreeMap::new();
        for ((i, j), x) in &self.entries {
            let y = v.get(*j);
            if !y.is_zero() {
                *acc.entry(*i).or_insert_with(Q::zero) += x * y;
            }
        }
        SparseVec::from_map(acc)
    }

    pub fn mul(&self, other: &RatMatrix) -> RatMatrix {
        assert_eq!(self.cols, other.rows);
        let mut by_row: BTreeMap<usize, Vec<(usize, &Q)>> = BTreeMap::new();
        for ((i, j), v) in &other.entries {
            by_row.entry(*i).or_default().push((*j, v));
        }
        let mut out = RatMatrix::zeros(self.rows, other.cols);
        for ((i, k), a) in &self.entries {
            if let Some(row) = by_row.get(k) {
                for (j, b) in row {
                    let e = out.entries.entry((*i, *j)).or_insert_with(Q::zero);
                    *e += a * *b;
                }
            }
        }
        out.entries.retain(|_, v| !v.is_zero());
        out
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn rank(&self) -> usize {
        rank_kernel(self).0
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinAlgError {
    #[error("boundary vector {0} is not in the span of the cycles")]
    BoundaryNotCycle(usize),
}

type IntVec = Vec<(usize, Z)>;

fn to_int(v: &SparseVec) -> IntVec {
    if v.0.is_empty() {
        return Vec::new();
    }
    let (ints, _) = primitive_ints(v.0.iter().map(|(_, x)| x));
    v.0.iter().map(|(i, _)| *i).zip(ints).collect()
}

/// `a*x - b*y` on sparse integer vectors.
fn lin(a: &Z, x: &IntVec, b: &Z, y: &IntVec) -> IntVec {
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0, 0);
    while i < x.len() || j < y.len() {
        let ord = match (x.get(i), y.get(j)) {
            (Some(p), Some(q)) => p.0.cmp(&q.0),
            (Some(_), None) => Ordering::Less,
            _ => Ordering::Greater,
        };
        match ord {
            Ordering::Less => {
                out.push((x[i].0, a * &x[i].1));
                i += 1;
            }
            Ordering::Greater => {
                out.push((y[j].0, -(b * &y[j].1)));
                j += 1;
            }
            Ordering::Equal => {
                let v = a * &x[i].1 - b * &y[j].1;
                if !v.is_zero() {
                    out.push((x[i].0, v));
                }
                i += 1;
                j += 1;
            }
        }
    }
    out
}

fn divide_out(v: &mut IntVec, g: &Z) {
    for (_, x) in v.iter_mut() {
        *x = &*x / g;
    }
}

#[derive(Clone, Debug)]
struct Row {
    main: IntVec,
    aug: IntVec,
}

/// Incremental row echelon form with optional tracking of how each stored
/// row is combined from the inserted generators.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    rows: Vec<Row>,
    pivots: BTreeMap<usize, usize>,
    inserted: usize,
}

/// Result of reducing a vector against an [`Echelon`].
struct Reduced {
    rest: IntVec,
    aug: IntVec,
    scale: Z,
}

impl Echelon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn pivot_columns(&self) -> impl Iterator<Item = usize> + '_ {
        self.pivots.keys().copied()
    }

    fn reduce(&self, v: &SparseVec, track: bool) -> Reduced {
        let mut rest = to_int(v);
        let mut aug: IntVec = Vec::new();
        let mut scale = Z::one();
        if !rest.is_empty() && !v.0.is_empty() {
            // remember the factor introduced by clearing denominators
            let (_, c) = primitive_ints(v.0.iter().map(|(_, x)| x));
            // rest = c * v  =>  v = rest / c
            scale = c.numer().clone();
            if !c.denom().is_one() {
                // v = rest * denom / numer; fold denom into the vector
                let d = c.denom().clone();
                for (_, x) in rest.iter_mut() {
                    *x = &*x * &d;
                }
            }
        }
        let mut cursor = 0usize;
        loop {
            let hit = rest
                .iter()
                .enumerate()
                .skip_while(|(_, (c, _))| *c < cursor)
                .find(|(_, (c, _))| self.pivots.contains_key(c))
                .map(|(k, (c, val))| (k, *c, val.clone()));
            let Some((_, col, val)) = hit else { break };
            let row = &self.rows[self.pivots[&col]];
            let p = &row.main[0].1;
            let g = p.gcd(&val);
            let a = p / &g;
            let b = &val / &g;
            rest = lin(&a, &rest, &b, &row.main);
            if track {
                aug = lin(&a, &aug, &b, &row.aug);
            }
            scale = &scale * &a;
            let mut g2 = gcd_all(rest.iter().map(|(_, x)| x));
            if track {
                for (_, x) in &aug {
                    g2 = g2.gcd(x);
                }
            }
            g2 = g2.gcd(&scale);
            if !g2.is_zero() && !g2.is_one() {
                divide_out(&mut rest, &g2);
                divide_out(&mut aug, &g2);
                scale = &scale / &g2;
            }
            cursor = col + 1;
        }
        Reduced { rest, aug, scale }
    }

    /// Inserts a vector; returns `true` when it was independent of the rows
    /// already present. The generator receives index `inserted_count()`.
    pub fn insert(&mut self, v: &SparseVec) -> bool {
        self.insert_tagged(v, true)
    }

    /// Inserts a vector whose contribution is not tracked in solutions.
    pub fn insert_untracked(&mut self, v: &SparseVec) -> bool {
        self.insert_tagged(v, false)
    }

    fn insert_tagged(&mut self, v: &SparseVec, tracked: bool) -> bool {
        let idx = self.inserted;
        self.inserted += 1;
        let red = self.reduce(v, true);
        if red.rest.is_empty() {
            return false;
        }
        // rest = scale*v + sum aug_i g_i
        let mut aug: IntVec = red.aug;
        if tracked {
            aug.push((idx, red.scale.clone()));
            aug.sort_by_key(|a| a.0);
        }
        let mut main = red.rest;
        let mut g = gcd_all(main.iter().map(|(_, x)| x));
        for (_, x) in &aug {
            g = g.gcd(x);
        }
        if main[0].1.is_negative() {
            g = -g;
        }
        if !g.is_one() {
            divide_out(&mut main, &g);
            divide_out(&mut aug, &g);
        }
        let col = main[0].0;
        self.pivots.insert(col, self.rows.len());
        self.rows.push(Row { main, aug });
        true
    }

    pub fn inserted_count(&self) -> usize {
        self.inserted
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v, false).rest.is_empty()
    }

    /// Expresses `v` as a combination of the tracked inserted generators.
    pub fn solve(&self, v: &SparseVec) -> Option<Vec<Q>> {
        let red = self.reduce(v, true);
        if !red.rest.is_empty() {
            return None;
        }
        let mut out = alloc::vec![Q::zero(); self.inserted];
        let s = Q::from_integer(red.scale);
        // 0 = scale*v + sum aug_i g_i
        for (i, x) in red.aug {
            out[i] = -Q::from_integer(x) / &s;
        }
        Some(out)
    }
}

/// Rank and kernel basis of `m` viewed as a map `Q^cols -> Q^rows`.
pub fn rank_kernel(m: &RatMatrix) -> (usize, Vec<SparseVec>) {
    let mut ech = Echelon::new();
    let mut kernel = Vec::new();
    for (j, col) in m.columns().into_iter().enumerate() {
        if let Some(rel) = relation_if_dependent(&mut ech, &col) {
            let mut v = rel;
            v.push((j, -Q::one()));
            v.sort_by_key(|a| a.0);
            kernel.push(SparseVec(v.into_iter().filter(|(_, x)| !x.is_zero()).collect()));
        }
    }
    (ech.rank(), kernel)
}

/// Inserts `col`; if dependent returns the coefficients expressing it by the
/// previously inserted generators.
fn relation_if_dependent(ech: &mut Echelon, col: &SparseVec) -> Option<Vec<(usize, Q)>> {
    if let Some(sol) = ech.solve(col) {
        ech.inserted += 1;
        return Some(
            sol.into_iter()
                .enumerate()
                .filter(|(_, x)| !x.is_zero())
                .collect(),
        );
    }
    ech.insert(col);
    None
}

/// Rank of a list of vectors.
pub fn rank_of(vecs: &[SparseVec]) -> usize {
    let mut e = Echelon::new();
    for v in vecs {
        e.insert_untracked(v);
    }
    e.rank()
}

/// A subquotient `span(cycles) / span(boundaries)` with a fixed basis of
/// representatives chosen from the cycles in the order supplied.
#[derive(Clone, Debug)]
pub struct Subquotient {
    pub ambient_dim: usize,
    pub cycle_basis: Vec<SparseVec>,
    pub boundary_basis: Vec<SparseVec>,
    pub representatives: Vec<SparseVec>,
    solver: Echelon,
    rep_index: Vec<usize>,
}

impl Subquotient {
    pub fn new(
        ambient_dim: usize,
        cycles: &[SparseVec],
        boundaries: &[SparseVec],
    ) -> Result<Self, LinAlgError> {
        let mut zech = Echelon::new();
        let mut cycle_basis = Vec::new();
        for z in cycles {
            if zech.insert_untracked(z) {
                cycle_basis.push(z.clone());
            }
        }
        let mut solver = Echelon::new();
        let mut boundary_basis = Vec::new();
        for (k, b) in boundaries.iter().enumerate() {
            if !zech.contains(b) {
                return Err(LinAlgError::BoundaryNotCycle(k));
            }
            if solver.insert_untracked(b) {
                boundary_basis.push(b.clone());
            }
        }
        let mut representatives = Vec::new();
        let mut rep_index = Vec::new();
        for z in &cycle_basis {
            let idx = solver.inserted_count();
            if solver.insert(z) {
                representatives.push(z.clone());
                rep_index.push(idx);
            }
        }
        Ok(Subquotient { ambient_dim, cycle_basis, boundary_basis, representatives, solver, rep_index })
    }

    pub fn dim(&self) -> usize {
        self.representatives.len()
    }

    /// Coordinates of a cycle with respect to the representatives, modulo
    /// boundaries. `None` if `z` is not in the cycle span.
    pub fn reduce(&self, z: &SparseVec) -> Option<Vec<Q>> {
        let sol = self.solver.solve(z)?;
        Some(self.rep_index.iter().map(|&i| sol[i].clone()).collect())
    }

    /// Whether `z` (a cycle) is a boundary.
    pub fn is_boundary(&self, z: &SparseVec) -> bool {
        match self.reduce(z) {
            Some(c) => c.iter().all(|x| x.is_zero()),
            None => false,
        }
    }
}

/// Cohomology dimensions of a cochain complex given by its differentials
/// `d[k]: C^k -> C^{k+1}` (as matrices of size dim C^{k+1} x dim C^k).
pub fn complex_betti(dims: &[usize], diffs: &[RatMatrix]) -> Vec<usize> {
    let ranks: Vec<usize> = diffs.iter().map(|m| m.rank()).collect();
    (0..dims.len())
        .map(|k| {
            let out = if k < ranks.len() { ranks[k] } else { 0 };
            let inc = if k > 0 && k - 1 < ranks.len() { ranks[k - 1] } else { 0 };
            dims[k] - out - inc
        })
        .collect()
}

/// Solves `A x = b` exactly; `cols` are the columns of `A`.
pub fn solve_columns(cols: &[SparseVec], b: &SparseVec) -> Option<Vec<Q>> {
    let mut e = Echelon::new();
    for c in cols {
        e.insert(c);
    }
    e.solve(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::q;
    use alloc::vec;

    fn sv(v: &[i64]) -> SparseVec {
        SparseVec::from_dense(&v.iter().map(|&x| q(x)).collect::<Vec<_>>())
    }

    #[test]
    fn identity_has_full_rank() {
        let m = RatMatrix::from_i64(&[&[1, 0], &[0, 1]]);
        let (r, k) = rank_kernel(&m);
        assert_eq!(r, 2);
        assert!(k.is_empty());
    }

    #[test]
    fn zero_map_kernel_is_everything() {
        let m = RatMatrix::zeros(2, 3);
        let (r, k) = rank_kernel(&m);
        assert_eq!(r, 0);
        assert_eq!(k.len(), 3);
    }

    #[test]
    fn proportional_rows() {
        let m = RatMatrix::from_i64(&[&[1, 2], &[2, 4]]);
        let (r, k) = rank_kernel(&m);
        assert_eq!(r, 1);
        assert_eq!(k.len(), 1);
        // kernel spanned by (2,-1)
        let v = &k[0];
        assert_eq!(v.get(0) * q(-1), v.get(1) * q(2));
        assert!(m.mul_vec(v).is_zero());
    }

    #[test]
    fn empty_matrix() {
        let m = RatMatrix::zeros(0, 0);
        assert_eq!(rank_kernel(&m), (0, vec![]));
    }

    #[test]
    fn subquotient_simple() {
        let s = Subquotient::new(2, &[sv(&[1, 0]), sv(&[0, 1])], &[sv(&[1, 0])]).unwrap();
        assert_eq!(s.dim(), 1);
        assert_eq!(s.representatives[0], sv(&[0, 1]));
        assert_eq!(s.reduce(&sv(&[5, 3])).unwrap(), vec![q(3)]);
        let s = Subquotient::new(2, &[sv(&[1, 1])], &[sv(&[2, 2])]).unwrap();
        assert_eq!(s.dim(), 0);
    }

    #[test]
    fn subquotient_rejects_non_cycle_boundary() {
        let e = Subquotient::new(2, &[sv(&[1, 0])], &[sv(&[0, 1])]).unwrap_err();
        assert_eq!(e, LinAlgError::BoundaryNotCycle(0));
    }

    #[test]
    fn reduce_of_representative_is_unit() {
        let cycles = [sv(&[1, 2, 0, 1]), sv(&[0, 1, 1, 0]), sv(&[1, 0, 3, 3]), sv(&[2, 3, -1, 2])];
        let bounds = [sv(&[1, 3, 1, 1])];
        let s = Subquotient::new(4, &cycles, &bounds).unwrap();
        for (i, r) in s.representatives.iter().enumerate() {
            let c = s.reduce(r).unwrap();
            for (j, x) in c.iter().enumerate() {
                assert_eq!(*x, if i == j { q(1) } else { q(0) });
            }
        }
    }

    #[test]
    fn echelon_solve_rational() {
        let mut e = Echelon::new();
        e.insert(&SparseVec(vec![(0, crate::rat::qf(1, 2)), (1, q(3))]));
        e.insert(&SparseVec(vec![(1, q(2))]));
        let sol = e.solve(&SparseVec(vec![(0, q(1)), (1, q(1))])).unwrap();
        // (1,1) = 2*(1/2,3) + c*(0,2) => c = -5/2
        assert_eq!(sol, vec![q(2), crate::rat::qf(-5, 2)]);
    }
}
