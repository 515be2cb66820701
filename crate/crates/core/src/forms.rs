//! Algebraic differential forms with localized coefficients, chart
//! translation along Laurent-monomial maps, canonical coordinates for exact
//! linear algebra, and subcomplex enlargement.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::exactla::{rank_kernel, Echelon, RatMatrix, SparseVec};
use crate::poly::{LocalFraction, Mono, Poly};
use crate::rat::{q, Q};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormError {
    #[error("chart translation produced a denominator outside the target divisor")]
    BadDenominator,
    #[error("exhaustion level cap {0} reached without matching the target cohomology (degree {1})")]
    LevelCap(usize, usize),
    #[error("subcomplex has cohomology {have} below target {want} in degree {degree}")]
    BelowTarget { degree: usize, have: usize, want: usize },
    #[error(transparent)]
    LinAlg(#[from] crate::exactla::LinAlgError),
}

/// Sign of `dx_i ∧ dx_I` relative to `dx_{I ∪ i}` (0 if `i ∈ I`).
pub fn wedge_sign_one(i: usize, mask: u32) -> i32 {
    if mask & (1 << i) != 0 {
        return 0;
    }
    if (mask & ((1u32 << i) - 1)).count_ones().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Sign of `dx_I ∧ dx_J` relative to `dx_{I ∪ J}` (0 on overlap).
pub fn wedge_sign(a: u32, b: u32) -> i32 {
    if a & b != 0 {
        return 0;
    }
    let mut inv = 0u32;
    let mut m = a;
    while m != 0 {
        let i = m.trailing_zeros();
        inv += (b & ((1u32 << i) - 1)).count_ones();
        m &= m - 1;
    }
    if inv.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// A differential form `Σ_I u_I dx_I` on the complement of `base` in
/// affine `n`-space; `u_I` are fractions over `base`.
#[derive(Clone, Debug)]
pub struct DiffForm {
    pub n: usize,
    pub degree: usize,
    pub base: Arc<Poly>,
    pub comps: BTreeMap<u32, LocalFraction>,
}

impl PartialEq for DiffForm {
    fn eq(&self, other: &Self) -> bool {
        self.sub(other).is_zero()
    }
}

impl DiffForm {
    pub fn zero(base: Arc<Poly>, degree: usize) -> Self {
        DiffForm { n: base.nvars, degree, base, comps: BTreeMap::new() }
    }

    pub fn function(f: LocalFraction) -> Self {
        let mut w = Self::zero(f.base.clone(), 0);
        if !f.is_zero() {
            w.comps.insert(0, f);
        }
        w
    }

    pub fn one(base: Arc<Poly>) -> Self {
        Self::function(LocalFraction::poly(Poly::one(base.nvars), base))
    }

    /// `u dx_I` for a single index set.
    pub fn monomial(u: LocalFraction, mask: u32) -> Self {
        let mut w = Self::zero(u.base.clone(), mask.count_ones() as usize);
        if !u.is_zero() {
            w.comps.insert(mask, u);
        }
        w
    }

    pub fn is_zero(&self) -> bool {
        self.comps.values().all(|u| u.is_zero())
    }

    fn insert_add(&mut self, mask: u32, u: LocalFraction) {
        if u.is_zero() {
            return;
        }
        let next = match self.comps.get(&mask) {
            Some(v) => v.add(&u),
            None => u,
        };
        if next.is_zero() {
            self.comps.remove(&mask);
        } else {
            self.comps.insert(mask, next);
        }
    }

    pub fn add(&self, other: &DiffForm) -> DiffForm {
        let mut out = self.clone();
        for (m, u) in &other.comps {
            out.insert_add(*m, u.clone());
        }
        out.degree = self.degree.max(other.degree);
        out
    }

    pub fn sub(&self, other: &DiffForm) -> DiffForm {
        self.add(&other.scale(&q(-1)))
    }

    pub fn scale(&self, c: &Q) -> DiffForm {
        let mut out = DiffForm::zero(self.base.clone(), self.degree);
        if c.is_zero() {
            return out;
        }
        for (m, u) in &self.comps {
            out.comps.insert(*m, u.scale(c));
        }
        out
    }

    pub fn mul_fn(&self, f: &LocalFraction) -> DiffForm {
        let mut out = DiffForm::zero(self.base.clone(), self.degree);
        for (m, u) in &self.comps {
            out.insert_add(*m, u.mul(f));
        }
        out
    }

    pub fn wedge(&self, other: &DiffForm) -> DiffForm {
        let mut out = DiffForm::zero(self.base.clone(), self.degree + other.degree);
        for (a, u) in &self.comps {
            for (b, v) in &other.comps {
                let s = wedge_sign(*a, *b);
                if s == 0 {
                    continue;
                }
                out.insert_add(a | b, u.mul(v).scale(&q(s as i64)));
            }
        }
        out
    }

    /// Exterior derivative.
    pub fn d(&self) -> DiffForm {
        let mut out = DiffForm::zero(self.base.clone(), self.degree + 1);
        for (m, u) in &self.comps {
            for i in 0..self.n {
                let s = wedge_sign_one(i, *m);
                if s == 0 {
                    continue;
                }
                let du = u.derivative(i);
                out.insert_add(m | (1 << i), du.scale(&q(s as i64)));
            }
        }
        out
    }

    /// Re-expresses over a base that is a multiple of the current one.
    pub fn rebase(&self, base: Arc<Poly>) -> Option<DiffForm> {
        let mut out = DiffForm::zero(base.clone(), self.degree);
        for (m, u) in &self.comps {
            out.comps.insert(*m, u.rebase(base.clone())?);
        }
        Some(out)
    }

    pub fn max_power(&self) -> u32 {
        self.comps.values().map(|u| u.power).max().unwrap_or(0)
    }

    pub fn fmt_with(&self, names: &[String]) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (m, u) in &self.comps {
            let mut dx = String::new();
            for i in 0..self.n {
                if m & (1 << i) != 0 {
                    if !dx.is_empty() {
                        dx.push('^');
                    }
                    dx.push_str(&alloc::format!("d{}", names[i]));
                }
            }
            let coef = u.fmt_with(names);
            if dx.is_empty() {
                parts.push(coef);
            } else {
                parts.push(alloc::format!("({})*{}", coef, dx));
            }
        }
        parts.join(" + ")
    }
}

/// Coordinate system for exact linear algebra on forms: every form is
/// multiplied by `base^K` and read off as a vector over `(mask, monomial)`.
#[derive(Clone, Debug, Default)]
pub struct FormCoords {
    pub power: u32,
    pub index: BTreeMap<(u32, Mono), usize>,
}

impl FormCoords {
    pub fn new(power: u32) -> Self {
        FormCoords { power, index: BTreeMap::new() }
    }

    pub fn dim(&self) -> usize {
        self.index.len()
    }

    /// Vector of a form; grows the index as needed. Requires
    /// `max_power() <= power`.
    pub fn vector(&mut self, w: &DiffForm) -> SparseVec {
        assert!(w.max_power() <= self.power, "form exceeds the coordinate power");
        let mut acc: BTreeMap<usize, Q> = BTreeMap::new();
        for (m, u) in &w.comps {
            let num = u.num.mul(&w.base.pow(self.power - u.power));
            for (e, c) in &num.terms {
                let len = self.index.len();
                let idx = *self.index.entry((*m, e.clone())).or_insert(len);
                *acc.entry(idx).or_insert_with(Q::zero) += c;
            }
        }
        SparseVec::from_map(acc)
    }
}

/// Coefficient matrix (columns = forms) over a common monomial basis.
pub fn canonical_coordinates(forms: &[DiffForm]) -> (RatMatrix, FormCoords) {
    let k = forms.iter().map(|w| w.max_power()).max().unwrap_or(0);
    let mut coords = FormCoords::new(k);
    let cols: Vec<SparseVec> = forms.iter().map(|w| coords.vector(w)).collect();
    (RatMatrix::from_columns(coords.dim(), &cols), coords)
}

/// Laurent-monomial map between charts: source coordinate `y_l` equals
/// `z^{images[l]}` in target coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChartMap {
    pub src_n: usize,
    pub dst_n: usize,
    pub images: Vec<Vec<i32>>,
}

/// Fraction `num / (z^mono * g^k)` for a fixed polynomial `g`.
#[derive(Clone, Debug)]
struct MonoFrac {
    num: Poly,
    mono: Vec<u32>,
    k: u32,
}

impl MonoFrac {
    fn lift(&self, mono: &[u32], k: u32, g: &Poly) -> Poly {
        let extra: Vec<u32> = mono.iter().zip(&self.mono).map(|(a, b)| a - b).collect();
        self.num.mul_mono(&extra, &Q::one()).mul(&g.pow(k - self.k))
    }

    fn add(&self, other: &MonoFrac, g: &Poly) -> MonoFrac {
        let mono: Vec<u32> = self.mono.iter().zip(&other.mono).map(|(a, b)| *a.max(b)).collect();
        let k = self.k.max(other.k);
        MonoFrac { num: self.lift(&mono, k, g).add(&other.lift(&mono, k, g)), mono, k }
    }

    fn mul(&self, other: &MonoFrac) -> MonoFrac {
        MonoFrac {
            num: self.num.mul(&other.num),
            mono: self.mono.iter().zip(&other.mono).map(|(a, b)| a + b).collect(),
            k: self.k + other.k,
        }
    }

    fn scale(&self, c: &Q) -> MonoFrac {
        MonoFrac { num: self.num.scale(c), mono: self.mono.clone(), k: self.k }
    }

    /// Rewrites as `h / target^{k'}` for the least admissible `k'`.
    fn to_local(&self, g: &Poly, target: &Arc<Poly>, max_extra: u32) -> Option<LocalFraction> {
        if self.num.is_zero() {
            return Some(LocalFraction::zero(target.clone()));
        }
        let n = target.nvars;
        let den = Poly::monomial(self.mono.clone(), Q::one()).mul(&g.pow(self.k));
        let bound = self.k + self.mono.iter().sum::<u32>() + max_extra;
        let mut acc = self.num.clone();
        for kk in 0..=bound {
            if let Some(h) = acc.div_exact(&den) {
                return Some(LocalFraction::new(h, target.clone(), kk));
            }
            acc = acc.mul(target);
        }
        let _ = n;
        None
    }
}

/// Transports a form along a chart map into the target chart with base
/// `target`. Fails if the result is not a fraction over `target`.
pub fn translate_chart(w: &DiffForm, map: &ChartMap, target: &Arc<Poly>) -> Result<DiffForm, FormError> {
    let m = map.dst_n;
    assert_eq!(target.nvars, m);
    let (gz, gb) = w.base.map_laurent(&map.images, m);
    // base∘map = gz / z^gb
    let zero_mono = vec![0u32; m];
    // dy_l = z^{M_l} Σ_j M_lj dz_j / z_j
    let mut dys: Vec<BTreeMap<u32, MonoFrac>> = Vec::new();
    for l in 0..map.src_n {
        let mut comps = BTreeMap::new();
        for j in 0..m {
            let c = map.images[l][j];
            if c == 0 {
                continue;
            }
            let mut expo: Vec<i64> = map.images[l].iter().map(|&x| x as i64).collect();
            expo[j] -= 1;
            let pos: Vec<u32> = expo.iter().map(|&x| x.max(0) as u32).collect();
            let neg: Vec<u32> = expo.iter().map(|&x| (-x).max(0) as u32).collect();
            comps.insert(
                1u32 << j,
                MonoFrac { num: Poly::monomial(pos, q(c as i64)), mono: neg, k: 0 },
            );
        }
        dys.push(comps);
    }
    let mut acc: BTreeMap<u32, MonoFrac> = BTreeMap::new();
    for (mask, u) in &w.comps {
        let (nz, na) = u.num.map_laurent(&map.images, m);
        // u∘map = nz z^{gb k} / (z^{na} gz^k)
        let shift: Vec<u32> = gb.iter().map(|b| b * u.power).collect();
        let coef = MonoFrac { num: nz.mul_mono(&shift, &Q::one()), mono: na, k: u.power };
        let mut terms: BTreeMap<u32, MonoFrac> = BTreeMap::new();
        terms.insert(0, coef);
        for l in 0..map.src_n {
            if mask & (1 << l) == 0 {
                continue;
            }
            let mut next: BTreeMap<u32, MonoFrac> = BTreeMap::new();
            for (a, fa) in &terms {
                for (b, fb) in &dys[l] {
                    let s = wedge_sign(*a, *b);
                    if s == 0 {
                        continue;
                    }
                    let t = fa.mul(fb).scale(&q(s as i64));
                    let e = match next.remove(&(a | b)) {
                        Some(prev) => prev.add(&t, &gz),
                        None => t,
                    };
                    next.insert(a | b, e);
                }
            }
            terms = next;
        }
        for (k, t) in terms {
            let e = match acc.remove(&k) {
                Some(prev) => prev.add(&t, &gz),
                None => t,
            };
            acc.insert(k, e);
        }
    }
    let _ = zero_mono;
    let mut out = DiffForm::zero(target.clone(), w.degree);
    for (mask, f) in acc {
        let lf = f.to_local(&gz, target, 8).ok_or(FormError::BadDenominator)?;
        out.insert_add(mask, lf);
    }
    Ok(out)
}

/// Span of a list of forms of one degree with an exact membership test.
/// Vectors are taken after multiplying by `base^power`; the power grows on
/// demand.
#[derive(Clone, Debug)]
pub struct FormSpace {
    pub base: Arc<Poly>,
    pub degree: usize,
    pub forms: Vec<DiffForm>,
    coords: FormCoords,
    ech: Echelon,
}

impl FormSpace {
    pub fn new(base: Arc<Poly>, degree: usize) -> Self {
        FormSpace { base, degree, forms: Vec::new(), coords: FormCoords::new(0), ech: Echelon::new() }
    }

    pub fn dim(&self) -> usize {
        self.forms.len()
    }

    fn ensure_power(&mut self, p: u32) {
        if p <= self.coords.power {
            return;
        }
        let mut coords = FormCoords::new(p);
        let mut ech = Echelon::new();
        for w in &self.forms {
            ech.insert(&coords.vector(w));
        }
        self.coords = coords;
        self.ech = ech;
    }

    /// Vector of `w` in the current coordinates.
    pub fn vector(&mut self, w: &DiffForm) -> SparseVec {
        self.ensure_power(w.max_power());
        self.coords.vector(w)
    }

    /// Coefficients of `w` in terms of `forms`, if it lies in the span.
    pub fn express(&mut self, w: &DiffForm) -> Option<Vec<Q>> {
        if w.max_power() > self.coords.power && !self.forms.is_empty() {
            // a member of the span never needs a larger power than its spanning forms
            let maxp = self.forms.iter().map(|f| f.max_power()).max().unwrap_or(0);
            if w.max_power() > maxp {
                return if w.is_zero() { Some(vec![Q::zero(); self.forms.len()]) } else { None };
            }
        }
        let v = self.vector(w);
        if v.is_zero() {
            return Some(vec![Q::zero(); self.forms.len()]);
        }
        self.ech.solve(&v)
    }

    pub fn contains(&mut self, w: &DiffForm) -> bool {
        self.express(w).is_some()
    }

    /// Appends `w` if it is independent of the current forms.
    pub fn insert(&mut self, w: &DiffForm) -> bool {
        if w.is_zero() {
            return false;
        }
        let v = self.vector(w);
        if self.ech.contains(&v) {
            return false;
        }
        self.ech.insert(&v);
        self.forms.push(w.clone());
        true
    }
}

/// Finite-dimensional subcomplex of the de Rham complex of an affine
/// hypersurface complement: per degree a basis of forms, closed under `d`.
/// `generator` is the cyclic generator `F^{-a}` used for exhaustions.
#[derive(Clone, Debug)]
pub struct Subcomplex {
    pub n: usize,
    pub base: Arc<Poly>,
    pub generator: LocalFraction,
    pub spaces: Vec<FormSpace>,
}

/// Outcome of an enlargement: the forms added per degree and the highest
/// exhaustion level used.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EnlargeReport {
    pub added: Vec<usize>,
    pub max_level: Option<u32>,
}

impl Subcomplex {
    pub fn new(base: Arc<Poly>, generator: LocalFraction) -> Self {
        let n = base.nvars;
        let spaces = (0..=n).map(|d| FormSpace::new(base.clone(), d)).collect();
        Subcomplex { n, base, generator, spaces }
    }

    pub fn basis(&self, degree: usize) -> &[DiffForm] {
        &self.spaces[degree].forms
    }

    pub fn contains(&mut self, w: &DiffForm) -> bool {
        if w.is_zero() {
            return true;
        }
        self.spaces[w.degree].contains(w)
    }

    /// Adds `w` and `d(w)` (if not already in the span). Returns whether
    /// anything changed.
    pub fn add(&mut self, w: &DiffForm) -> bool {
        let mut changed = false;
        if w.degree < self.n {
            let dw = w.d();
            if !dw.is_zero() {
                changed |= self.spaces[w.degree + 1].insert(&dw);
            }
        }
        changed | self.spaces[w.degree].insert(w)
    }

    /// Ranks of `d: C^i -> C^{i+1}`.
    pub fn d_ranks(&self) -> Vec<usize> {
        (0..=self.n)
            .map(|i| {
                if i == self.n {
                    return 0;
                }
                let ds: Vec<DiffForm> = self.spaces[i].forms.iter().map(|w| w.d()).collect();
                let (m, _) = canonical_coordinates(&ds);
                m.rank()
            })
            .collect()
    }

    pub fn cohomology_dims(&self) -> Vec<usize> {
        let r = self.d_ranks();
        (0..=self.n)
            .map(|i| self.spaces[i].dim() - r[i] - if i > 0 { r[i - 1] } else { 0 })
            .collect()
    }

    /// Whether `d` maps every basis form into the next space.
    pub fn is_closed_under_d(&mut self) -> bool {
        for i in 0..self.n {
            let ds: Vec<DiffForm> = self.spaces[i].forms.iter().map(|w| w.d()).collect();
            for dw in ds {
                if !self.spaces[i + 1].contains(&dw) {
                    return false;
                }
            }
        }
        true
    }

    /// Exhaustion elements `(x^α ∂^β · F^{-a}) dx_J` with `|α + β| = k` and
    /// `|J| = degree`.
    pub fn exhaustion(&self, degree: usize, k: u32) -> Vec<DiffForm> {
        let mut out = Vec::new();
        for (alpha, beta) in exhaustion_level(self.n, k) {
            let u = apply_monomial_op(&alpha, &beta, &self.generator);
            if u.is_zero() {
                continue;
            }
            for mask in masks_of_size(self.n, degree) {
                out.push(DiffForm::monomial(u.clone(), mask));
            }
        }
        out
    }
}

/// Enlarges `c` until its cohomology dimensions equal `target`, working
/// from the top degree down and searching exhaustion levels in increasing
/// order. Requires `c` to surject onto the true cohomology.
pub fn enlarge_subcomplex(c: &mut Subcomplex, target: &[usize], max_level: u32) -> Result<EnlargeReport, FormError> {
    let mut report = EnlargeReport { added: vec![0; c.n + 1], max_level: None };
    loop {
        let dims = c.cohomology_dims();
        let Some(i0) = (0..=c.n).rev().find(|&i| dims[i] != target[i]) else {
            return Ok(report);
        };
        if dims[i0] < target[i0] || i0 == 0 {
            return Err(FormError::BelowTarget { degree: i0, have: dims[i0], want: target[i0] });
        }
        let mut need = dims[i0] - target[i0];
        let mut cands: Vec<DiffForm> = Vec::new();
        let mut level = 0u32;
        while need > 0 {
            if level > max_level {
                return Err(FormError::LevelCap(max_level as usize, i0));
            }
            cands.extend(c.exhaustion(i0 - 1, level));
            let added = kill_classes(c, i0, &cands, need);
            if added > 0 {
                report.added[i0 - 1] += added;
                report.max_level = Some(report.max_level.map_or(level, |m| m.max(level)));
                need -= added;
            }
            level += 1;
        }
    }
}

/// Adds combinations of `cands` (degree `i0 - 1`) whose differential lies in
/// `C^{i0}` but not among its boundaries. Returns how many were added.
fn kill_classes(c: &mut Subcomplex, i0: usize, cands: &[DiffForm], need: usize) -> usize {
    let dc: Vec<DiffForm> = cands.iter().map(|w| w.d()).collect();
    let cur: Vec<DiffForm> = c.spaces[i0].forms.clone();
    let bnd: Vec<DiffForm> = c.spaces[i0 - 1].forms.iter().map(|w| w.d()).collect();
    let mut all = dc.clone();
    all.extend(cur.iter().cloned());
    all.extend(bnd.iter().cloned());
    let (m, _) = canonical_coordinates(&all);
    let cols = m.columns();
    let nd = dc.len();
    let nc = cur.len();
    // combinations of d(cands) lying in span(C^{i0})
    let mut sys = Vec::with_capacity(nd + nc);
    sys.extend(cols[..nd].iter().cloned());
    sys.extend(cols[nd..nd + nc].iter().cloned());
    let (_, kernel) = rank_kernel(&RatMatrix::from_columns(m_rows(&cols), &sys));
    let mut bech = Echelon::new();
    for v in &cols[nd + nc..] {
        bech.insert_untracked(v);
    }
    let mut added = 0;
    for kv in kernel {
        if added == need {
            break;
        }
        let coeffs: Vec<(usize, Q)> = kv.0.iter().filter(|(i, _)| *i < nd).cloned().collect();
        if coeffs.is_empty() {
            continue;
        }
        let mut image = SparseVec::new();
        for (i, a) in &coeffs {
            image = image.axpy(a, &cols[*i]);
        }
        if image.is_zero() || bech.contains(&image) {
            continue;
        }
        bech.insert_untracked(&image);
        let mut w = DiffForm::zero(c.base.clone(), i0 - 1);
        for (i, a) in &coeffs {
            w = w.add(&cands[*i].scale(a));
        }
        w.degree = i0 - 1;
        c.add(&w);
        added += 1;
    }
    added
}

fn m_rows(cols: &[SparseVec]) -> usize {
    cols.iter().flat_map(|v| v.0.iter().map(|(i, _)| i + 1)).max().unwrap_or(0)
}

/// Exhaustion of `D_n` applied to a generator: operators
/// `x^α ∂^β` with `|α| + |β| = k` exactly.
pub fn exhaustion_level(n: usize, k: u32) -> Vec<(Vec<u32>, Vec<u32>)> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; 2 * n];
    fn rec(pos: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<(Vec<u32>, Vec<u32>)>, n: usize) {
        if pos == 2 * n - 1 {
            cur[pos] = left;
            out.push((cur[..n].to_vec(), cur[n..].to_vec()));
            return;
        }
        for v in (0..=left).rev() {
            cur[pos] = v;
            rec(pos + 1, left - v, cur, out, n);
        }
        cur[pos] = 0;
    }
    if n == 0 {
        if k == 0 {
            out.push((Vec::new(), Vec::new()));
        }
        return out;
    }
    rec(0, k, &mut cur, &mut out, n);
    out
}

/// Applies `x^α ∂^β` to a fraction.
pub fn apply_monomial_op(alpha: &[u32], beta: &[u32], u: &LocalFraction) -> LocalFraction {
    let mut v = u.clone();
    for (i, &b) in beta.iter().enumerate() {
        for _ in 0..b {
            v = v.derivative(i);
        }
    }
    v.mul_poly(&Poly::monomial(alpha.to_vec(), Q::one()))
}

/// Collects every mask of the given size.
pub fn masks_of_size(n: usize, k: usize) -> Vec<u32> {
    (0u32..(1 << n)).filter(|m| m.count_ones() as usize == k).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_poly;
    use alloc::string::ToString;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    fn xbase() -> Arc<Poly> {
        Arc::new(Poly::var(1, 0))
    }

    #[test]
    fn d_of_constants_and_powers() {
        let b = xbase();
        assert!(DiffForm::one(b.clone()).d().is_zero());
        let w = DiffForm::function(LocalFraction::new(Poly::one(1), b.clone(), 2));
        let dw = w.d();
        let want = DiffForm::monomial(LocalFraction::new(Poly::constant(1, q(-2)), b.clone(), 3), 1);
        assert_eq!(dw, want);
        let dlog = DiffForm::monomial(LocalFraction::new(Poly::one(1), b, 1), 1);
        assert!(dlog.d().is_zero());
    }

    #[test]
    fn d_squared_vanishes() {
        let v = names(&["x", "y", "z"]);
        let f = Arc::new(parse_poly("x^2+y*z", &v).unwrap());
        let u = LocalFraction::new(parse_poly("x*y^2+z", &v).unwrap(), f.clone(), 2);
        let w = DiffForm::function(u.clone());
        assert!(w.d().d().is_zero());
        let w1 = DiffForm::monomial(u, 0b010);
        assert!(w1.d().d().is_zero());
    }

    #[test]
    fn rank_of_dlog_forms() {
        let b = xbase();
        let a = DiffForm::monomial(LocalFraction::new(Poly::one(1), b.clone(), 1), 1);
        let c = DiffForm::monomial(LocalFraction::new(Poly::one(1), b.clone(), 2), 1);
        let (m, _) = canonical_coordinates(&[a.clone(), a.clone()]);
        assert_eq!(m.rank(), 1);
        let (m, _) = canonical_coordinates(&[a, c]);
        assert_eq!(m.rank(), 2);
    }

    #[test]
    fn conic_triple_overlap_generator() {
        // s = x/z, t = y/z on the complement of s^2 + t and of s t
        let st = names(&["s", "t"]);
        let p = |src: &str| parse_poly(src, &st).unwrap();
        let base = Arc::new(p("(s^2+t)*s*t"));
        let one_form = |ds: &str, dt: &str, b: &Arc<Poly>| {
            DiffForm::monomial(LocalFraction::new(p(ds), b.clone(), 2), 1)
                .add(&DiffForm::monomial(LocalFraction::new(p(dt), b.clone(), 2), 2))
        };
        let w = one_form("-2*t^2*s^5", "t*s^6", &base);
        assert!(w.d().is_zero());
        // the same class written over the smaller base (s^2 + t) t
        let pair = Arc::new(p("(s^2+t)*t"));
        let v = one_form("-2*t^2*s^3", "t*s^4", &pair);
        assert_eq!(v.rebase(base.clone()).unwrap(), w);
        // dropping the dt term leaves a form that is not closed
        assert!(!one_form("-2*t^2*s^5", "0", &base).d().is_zero());
    }

    #[test]
    fn translate_inverse_coordinate() {
        // chart with coordinate u = x_{j'}/x_j, target coordinate v = x_j/x_{j'} = 1/u
        let src = Arc::new(Poly::var(1, 0));
        let dst = Arc::new(Poly::var(1, 0));
        let map = ChartMap { src_n: 1, dst_n: 1, images: vec![vec![-1]] };
        let du = DiffForm::monomial(LocalFraction::poly(Poly::one(1), src.clone()), 1);
        let got = translate_chart(&du, &map, &dst).unwrap();
        let want = DiffForm::monomial(LocalFraction::new(Poly::constant(1, q(-1)), dst.clone(), 2), 1);
        assert_eq!(got, want);
        // round trip
        let back = translate_chart(&got, &map, &src).unwrap();
        assert_eq!(back, du);
    }

    #[test]
    fn translate_affine_chart_quotient() {
        // chart y (coords a = x/y, b = z/y) to chart z (coords s = x/z, t = y/z):
        // a = s/t, b = 1/t.  d(x/y) = t^{-1} ds - s t^{-2} dt
        let src = Arc::new(Poly::one(2));
        let dst = Arc::new(Poly::var(2, 1));
        let map = ChartMap { src_n: 2, dst_n: 2, images: vec![vec![1, -1], vec![0, -1]] };
        let da = DiffForm::monomial(LocalFraction::poly(Poly::one(2), src), 0b01);
        let got = translate_chart(&da, &map, &dst).unwrap();
        let v = names(&["s", "t"]);
        let want = DiffForm::monomial(LocalFraction::new(parse_poly("t", &v).unwrap(), dst.clone(), 2), 0b01)
            .add(&DiffForm::monomial(
                LocalFraction::new(parse_poly("-s", &v).unwrap(), dst.clone(), 2),
                0b10,
            ));
        assert_eq!(got, want);
    }

    #[test]
    fn translate_commutes_with_d() {
        let v = names(&["a", "b"]);
        let src = Arc::new(parse_poly("a*(1+a*b)", &v).unwrap());
        // a -> 1/s, b -> s^2 t  (so 1 + a b = 1 + s t, a = 1/s)
        let map = ChartMap { src_n: 2, dst_n: 2, images: vec![vec![-1, 0], vec![2, 1]] };
        let dst = Arc::new(parse_poly("s*(1+s*t)", &names(&["s", "t"])).unwrap());
        let u = LocalFraction::new(parse_poly("b^2+a", &v).unwrap(), src.clone(), 1);
        let w = DiffForm::function(u);
        let lhs = translate_chart(&w.d(), &map, &dst).unwrap();
        let rhs = translate_chart(&w, &map, &dst).unwrap().d();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn bad_denominator_rejected() {
        let src = Arc::new(Poly::var(1, 0));
        let dst = Arc::new(Poly::one(1));
        let map = ChartMap { src_n: 1, dst_n: 1, images: vec![vec![1]] };
        let w = DiffForm::function(LocalFraction::new(Poly::one(1), src, 1));
        assert_eq!(translate_chart(&w, &map, &dst), Err(FormError::BadDenominator));
    }

    #[test]
    fn exhaustion_counts() {
        assert_eq!(exhaustion_level(1, 0).len(), 1);
        let l1 = exhaustion_level(1, 0).len() + exhaustion_level(1, 1).len();
        assert_eq!(l1, 3);
        let l2 = l1 + exhaustion_level(1, 2).len();
        assert_eq!(l2, 6);
    }

    #[test]
    fn wedge_signs() {
        assert_eq!(wedge_sign(0b01, 0b10), 1);
        assert_eq!(wedge_sign(0b10, 0b01), -1);
        assert_eq!(wedge_sign(0b11, 0b01), 0);
        assert_eq!(wedge_sign_one(0, 0b10), 1);
        assert_eq!(wedge_sign_one(1, 0b01), -1);
    }

    #[test]
    fn enlarge_punctured_line() {
        let b = xbase();
        let mut c = Subcomplex::new(b.clone(), LocalFraction::new(Poly::one(1), b.clone(), 1));
        c.add(&DiffForm::one(b.clone()));
        c.add(&DiffForm::monomial(LocalFraction::new(Poly::one(1), b.clone(), 1), 1));
        c.add(&DiffForm::monomial(LocalFraction::new(Poly::one(1), b.clone(), 3), 1));
        assert_eq!(c.cohomology_dims(), vec![1, 2]);
        let rep = enlarge_subcomplex(&mut c, &[1, 1], 6).unwrap();
        assert_eq!(c.cohomology_dims(), vec![1, 1]);
        assert_eq!(rep.added, vec![1, 0]);
        assert_eq!(rep.max_level, Some(1));
        let inv2 = DiffForm::function(LocalFraction::new(Poly::one(1), b.clone(), 2));
        assert!(c.contains(&inv2));
        assert!(c.is_closed_under_d());
    }

    #[test]
    fn enlarge_reports_cap() {
        let b = xbase();
        let mut c = Subcomplex::new(b.clone(), LocalFraction::new(Poly::one(1), b.clone(), 1));
        c.add(&DiffForm::one(b.clone()));
        c.add(&DiffForm::monomial(LocalFraction::new(Poly::one(1), b.clone(), 1), 1));
        c.add(&DiffForm::monomial(LocalFraction::new(Poly::one(1), b.clone(), 3), 1));
        assert_eq!(enlarge_subcomplex(&mut c, &[1, 1], 0), Err(FormError::LevelCap(0, 1)));
    }
}
