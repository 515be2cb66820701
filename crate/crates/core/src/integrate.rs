//! Integration of a localization `R_n[F^{-1}]` to a point: Ṽ-strict free
//! resolutions, the b-function for integration, truncation to a finite
//! complex of vector spaces and conversion of classes to differential forms.

use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::dmod::{localize_cyclic, DmodError, PresentedDModule, UniPoly};
use crate::exactla::{rank_kernel, RatMatrix, SparseVec, Subquotient};
use crate::forms::{wedge_sign_one, DiffForm};
use crate::poly::{LocalFraction, Poly};
use crate::rat::{binomial, factorial, Q, Z};
use crate::weyl::{
    groebner, homogenize, schreyer_syzygies, set_var_one, Algebra, Elem, Exp, GbOptions, Order,
    WeylElement, WeylError,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IntegrateError {
    #[error(transparent)]
    Dmod(#[from] DmodError),
    #[error(transparent)]
    Groebner(#[from] WeylError),
    #[error("resolution map at level {0} is not strict")]
    NotStrict(usize),
    #[error("no b-function for integration was found")]
    NoBFunction,
}

#[derive(Clone, Debug)]
pub struct IntegrateOptions {
    pub gb: GbOptions,
    /// Extra levels added above the largest integer root when truncating.
    pub extra_levels: i64,
    /// Whether to convert cohomology classes into differential forms.
    pub forms: bool,
}

impl Default for IntegrateOptions {
    fn default() -> Self {
        IntegrateOptions { gb: GbOptions::default(), extra_levels: 0, forms: true }
    }
}

/// Free complex `A^{-k} = D^{ranks[k]}` with Ṽ-shifts, resolving `D / J`.
/// Row `i` of `maps[k]` is the image of the `i`-th basis vector of `A^{-k}`
/// in `A^{-(k-1)}` (component index = basis index there). `maps[0]` is
/// empty.
#[derive(Clone, Debug)]
pub struct ShiftedFreeComplex {
    pub n: usize,
    pub ranks: Vec<usize>,
    pub shifts: Vec<Vec<i32>>,
    pub maps: Vec<Vec<Elem>>,
    /// Initial forms (highest Ṽ-weight part) of the generators of `J`.
    pub in_w: Vec<Elem>,
}

fn wvec(n: usize, with_h: bool) -> Vec<i32> {
    let mut w = vec![1; n];
    w.extend(vec![-1; n]);
    if with_h {
        w.push(0);
    }
    w
}

fn v_weight(e: &Exp, n: usize) -> i64 {
    (0..n).map(|i| e[i] as i64 - e[n + i] as i64).sum()
}

impl ShiftedFreeComplex {
    pub fn len(&self) -> usize {
        self.ranks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranks.is_empty()
    }

    /// Strictness: an entry from a generator of shift `p` to one of shift
    /// `q` has Ṽ-degree at most `p - q`.
    pub fn is_strict(&self) -> bool {
        for k in 1..self.maps.len() {
            for (i, row) in self.maps[k].iter().enumerate() {
                let p = self.shifts[k][i] as i64;
                for (e, c, _) in &row.terms {
                    let qv = self.shifts[k - 1][*c as usize] as i64;
                    if v_weight(e, self.n) > p - qv {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Composite of consecutive maps vanishes.
    pub fn d_squared_zero(&self) -> bool {
        let alg = Algebra::weyl(self.n);
        let ord = Order::degrevlex(alg.nv);
        for k in 2..self.maps.len() {
            let prev = &self.maps[k - 1];
            for row in &self.maps[k] {
                let mut acc = Elem::zero();
                for (j, comp) in row.components(&ord, self.ranks[k - 1]).iter().enumerate() {
                    if comp.is_zero() {
                        continue;
                    }
                    acc = acc.add(&crate::weyl::mul(&alg, &ord, comp, &prev[j]), &ord);
                }
                if !acc.is_zero() {
                    return false;
                }
            }
        }
        true
    }

    /// Row entries as Weyl elements: `rows(k)[i][j]`.
    fn rows(&self, k: usize) -> Vec<Vec<WeylElement>> {
        let ord = Order::degrevlex(2 * self.n);
        self.maps[k]
            .iter()
            .map(|row| {
                row.components(&ord, self.ranks[k - 1])
                    .iter()
                    .map(|c| WeylElement::from_elem(self.n, c))
                    .collect()
            })
            .collect()
    }
}

fn module_order(nv: usize, n: usize, dsh: &[i32], m: &[i32]) -> Order {
    Order::new(nv, vec![vec![1; nv], wvec(n, true)]).with_shifts(vec![dsh.to_vec(), m.to_vec()])
}

/// Ṽ-strict free resolution of `D / J` computed in the homogenized Weyl
/// algebra, up to `A^{-levels}`.
pub fn v_strict_complex(
    relations: &[Elem],
    n: usize,
    levels: usize,
    opts: &GbOptions,
) -> Result<ShiftedFreeComplex, IntegrateError> {
    let alg = Algebra::weyl_h(n);
    let nv = alg.nv;
    let h = 2 * n;
    let w = wvec(n, true);
    let plain = Order::degrevlex(2 * n);
    let mut ranks = vec![1usize];
    let mut shifts = vec![vec![0i32]];
    let mut maps: Vec<Vec<Elem>> = vec![Vec::new()];
    let mut dsh = vec![0i32];
    let mut ord = module_order(nv, n, &dsh, &shifts[0]);
    let gens: Vec<Elem> = relations.iter().map(|g| homogenize(&ord, &g.resort(&ord), h, &[])).collect();
    let mut basis = groebner(&alg, &ord, &gens, None, opts)?.basis;
    let mut in_w = Vec::new();
    for level in 1..=levels {
        if basis.is_empty() {
            break;
        }
        let prev_m = shifts[level - 1].clone();
        let mut new_m = Vec::with_capacity(basis.len());
        let mut new_d = Vec::with_capacity(basis.len());
        for g in &basis {
            new_m.push(g.weight_degree(&w, &prev_m).unwrap() as i32);
            let (e, c, _) = g.lead().unwrap();
            let deg: i64 = (0..nv).map(|i| e[i] as i64).sum::<i64>() + dsh[*c as usize] as i64;
            new_d.push(deg as i32);
        }
        let rows: Vec<Elem> = basis.iter().map(|g| set_var_one(&plain, g, h)).collect();
        if level == 1 {
            for r in &rows {
                let top = r.terms.iter().map(|t| v_weight(&t.0, n)).max().unwrap();
                in_w.push(Elem::from_terms(
                    &plain,
                    r.terms.iter().filter(|t| v_weight(&t.0, n) == top).cloned().collect(),
                ));
            }
        }
        ranks.push(rows.len());
        shifts.push(new_m.clone());
        maps.push(rows);
        if level == levels {
            break;
        }
        let syz_ord = module_order(nv, n, &new_d, &new_m);
        let syz = schreyer_syzygies(&alg, &ord, &syz_ord, &basis);
        basis = if syz.is_empty() { Vec::new() } else { groebner(&alg, &syz_ord, &syz, None, opts)?.basis };
        ord = syz_ord;
        dsh = new_d;
    }
    let cx = ShiftedFreeComplex { n, ranks, shifts, maps, in_w };
    for k in 1..cx.maps.len() {
        let one = ShiftedFreeComplex {
            n,
            ranks: cx.ranks[k - 1..=k].to_vec(),
            shifts: cx.shifts[k - 1..=k].to_vec(),
            maps: vec![Vec::new(), cx.maps[k].clone()],
            in_w: Vec::new(),
        };
        if !one.is_strict() {
            return Err(IntegrateError::NotStrict(k));
        }
    }
    Ok(cx)
}

/// b-function for integration: the monic generator of
/// `(D[s] in(J) + D[s](s + E + n)) ∩ C[s]`.
pub fn integration_bfunction(cx: &ShiftedFreeComplex, opts: &GbOptions) -> Result<UniPoly, IntegrateError> {
    let n = cx.n;
    let alg = Algebra::weyl_s(n);
    let s = 2 * n;
    let elim: Vec<usize> = (0..2 * n).collect();
    let ord = Order::elimination(alg.nv, &elim);
    let mut gens: Vec<Elem> = cx.in_w.iter().map(|g| g.resort(&ord)).collect();
    let mut t: Vec<(Exp, u32, Z)> = vec![(crate::weyl::exp_of(&[(s, 1)]), 0, Z::one())];
    t.push(([0u16; crate::weyl::MAXV], 0, Z::from(n as i64)));
    for i in 0..n {
        t.push((crate::weyl::exp_of(&[(i, 1), (n + i, 1)]), 0, Z::one()));
    }
    gens.push(Elem::from_terms(&ord, t));
    let gb = groebner(&alg, &ord, &gens, None, opts)?;
    for g in &gb.basis {
        if g.terms.iter().all(|(e, _, _)| (0..2 * n).all(|i| e[i] == 0)) {
            let deg = g.terms.iter().map(|t| t.0[s] as usize).max().unwrap_or(0);
            let mut c = vec![Q::zero(); deg + 1];
            for (e, _, x) in &g.terms {
                c[e[s] as usize] += Q::from_integer(x.clone());
            }
            return Ok(UniPoly(c).monic());
        }
    }
    Err(IntegrateError::NoBFunction)
}

/// `F^k(Ω ⊗ A)`: basis `x^α e_j` with `|α| + m_j <= k` at every level, and
/// the induced linear maps `V_k -> V_{k-1}`.
#[derive(Clone, Debug)]
pub struct TruncatedComplex {
    pub n: usize,
    pub level: i64,
    pub bases: Vec<Vec<(usize, Vec<u32>)>>,
    pub maps: Vec<RatMatrix>,
}

fn monomials_upto(n: usize, deg: i64) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    if deg < 0 {
        return out;
    }
    for d in 0..=deg as u32 {
        let mut cur = vec![0u32; n];
        fn rec(pos: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
            if pos + 1 == cur.len() {
                cur[pos] = left;
                out.push(cur.clone());
                return;
            }
            for v in (0..=left).rev() {
                cur[pos] = v;
                rec(pos + 1, left - v, cur, out);
            }
        }
        if n == 0 {
            if d == 0 {
                out.push(Vec::new());
            }
            continue;
        }
        rec(0, d, &mut cur, &mut out);
    }
    out
}

/// Image of `x^α · P` in `Ω = D / ∂D ≅ C[x]`.
fn omega_image(alpha: &[u32], p: &WeylElement) -> BTreeMap<Vec<u32>, Q> {
    let mut out: BTreeMap<Vec<u32>, Q> = BTreeMap::new();
    for ((a, b), c) in &p.terms {
        let mut coef = c.clone();
        let mut mono = Vec::with_capacity(a.len());
        let mut ok = true;
        for i in 0..a.len() {
            let ai = a[i] as u32 + alpha[i];
            let bi = b[i] as u32;
            if bi > ai {
                ok = false;
                break;
            }
            coef *= Q::from_integer(factorial(ai) / factorial(ai - bi));
            if bi % 2 == 1 {
                coef = -coef;
            }
            mono.push(ai - bi);
        }
        if ok {
            *out.entry(mono).or_insert_with(Q::zero) += coef;
        }
    }
    out.retain(|_, v| !v.is_zero());
    out
}

pub fn truncate(cx: &ShiftedFreeComplex, level: i64) -> Result<TruncatedComplex, IntegrateError> {
    let n = cx.n;
    let mut bases = Vec::new();
    let mut index: Vec<BTreeMap<(usize, Vec<u32>), usize>> = Vec::new();
    for k in 0..cx.len() {
        let mut b = Vec::new();
        let mut idx = BTreeMap::new();
        for (j, &m) in cx.shifts[k].iter().enumerate() {
            for a in monomials_upto(n, level - m as i64) {
                idx.insert((j, a.clone()), b.len());
                b.push((j, a));
            }
        }
        bases.push(b);
        index.push(idx);
    }
    let mut maps = vec![RatMatrix::zeros(bases[0].len(), 0)];
    for k in 1..cx.len() {
        let rows = cx.rows(k);
        let mut cols = Vec::with_capacity(bases[k].len());
        for (i, alpha) in &bases[k] {
            let mut acc: BTreeMap<usize, Q> = BTreeMap::new();
            for (j, entry) in rows[*i].iter().enumerate() {
                for (mono, c) in omega_image(alpha, entry) {
                    let Some(&r) = index[k - 1].get(&(j, mono)) else {
                        return Err(IntegrateError::NotStrict(k));
                    };
                    *acc.entry(r).or_insert_with(Q::zero) += c;
                }
            }
            acc.retain(|_, v| !v.is_zero());
            cols.push(SparseVec::from_map(acc));
        }
        maps.push(RatMatrix::from_columns(bases[k - 1].len(), &cols));
    }
    Ok(TruncatedComplex { n, level, bases, maps })
}

impl TruncatedComplex {
    fn rank_at(&self, k: usize) -> usize {
        if k == 0 || k >= self.maps.len() {
            0
        } else {
            self.maps[k].rank()
        }
    }

    /// Dimensions indexed by de Rham degree `0..=n` (level `k` of the
    /// resolution contributes to degree `n - k`).
    pub fn de_rham_dims(&self) -> Vec<usize> {
        let mut out = vec![0; self.n + 1];
        for k in 0..=self.n {
            if k >= self.bases.len() {
                continue;
            }
            out[self.n - k] = self.bases[k].len() - self.rank_at(k) - self.rank_at(k + 1);
        }
        out
    }

    /// Cohomology representatives at resolution level `k`.
    pub fn representatives(&self, k: usize) -> Result<Vec<SparseVec>, IntegrateError> {
        if k >= self.bases.len() {
            return Ok(Vec::new());
        }
        let dim = self.bases[k].len();
        let cycles = if k == 0 {
            (0..dim).map(SparseVec::unit).collect()
        } else {
            rank_kernel(&self.maps[k]).1
        };
        let bnd = if k + 1 < self.maps.len() { self.maps[k + 1].columns() } else { Vec::new() };
        let sq = Subquotient::new(dim, &cycles, &bnd).map_err(|_| IntegrateError::NotStrict(k))?;
        Ok(sq.representatives)
    }
}

type Anti = BTreeMap<(Vec<u16>, Vec<u16>), Q>;

/// Rewrites normally ordered `x^a ∂^b` as a sum of `∂^β x^α`.
fn to_anti(p: &WeylElement) -> Anti {
    reorder(p.terms.iter().map(|((a, b), c)| ((b.clone(), a.clone()), c.clone())), true)
}

fn from_anti(p: &Anti, n: usize) -> WeylElement {
    let swapped = reorder(p.iter().map(|(k, c)| (k.clone(), c.clone())), false);
    let mut w = WeylElement::zero(n);
    for ((a, b), c) in swapped {
        w.terms.insert((a, b), c);
    }
    w
}

/// Input keys `(first, second)` describe `first`-type variables on the
/// right... both directions share the coefficient `k! C(a,k) C(b,k)`; only
/// the sign differs. Output keys swap roles: normal→anti gives `(β, α)`,
/// anti→normal gives `(α, β)`.
fn reorder(items: impl Iterator<Item = ((Vec<u16>, Vec<u16>), Q)>, to_anti: bool) -> Anti {
    let mut out: Anti = BTreeMap::new();
    for ((p1, p2), c) in items {
        // to_anti: p1 = β (∂ exps), p2 = α; source is x^α ∂^β.
        // from_anti: p1 = β, p2 = α; source is ∂^β x^α.
        let n = p1.len();
        let mut acc: Vec<(Vec<u16>, Vec<u16>, Q)> = vec![(p1.clone(), p2.clone(), c.clone())];
        for i in 0..n {
            let kmax = p1[i].min(p2[i]);
            if kmax == 0 {
                continue;
            }
            let mut next = Vec::with_capacity(acc.len() * (kmax as usize + 1));
            for (b, a, x) in &acc {
                for k in 0..=kmax {
                    let mut coef = Q::from_integer(
                        factorial(k as u32) * binomial(a[i] as u32, k as u32) * binomial(b[i] as u32, k as u32),
                    );
                    if to_anti && k % 2 == 1 {
                        coef = -coef;
                    }
                    let mut b2 = b.clone();
                    let mut a2 = a.clone();
                    b2[i] -= k;
                    a2[i] -= k;
                    next.push((b2, a2, x * coef));
                }
            }
            acc = next;
        }
        for (b, a, x) in acc {
            let key = if to_anti { (b, a) } else { (a, b) };
            *out.entry(key).or_insert_with(Q::zero) += x;
        }
    }
    out.retain(|_, v| !v.is_zero());
    out
}

/// Element of the double complex at a fixed bidegree: for each `dx_I` a
/// vector over the free module `A^q`.
type BiElem = BTreeMap<u32, Vec<WeylElement>>;

fn bi_add(acc: &mut BiElem, mask: u32, j: usize, rank: usize, n: usize, v: &WeylElement) {
    let e = acc.entry(mask).or_insert_with(|| vec![WeylElement::zero(n); rank]);
    e[j] = e[j].add(v);
}

/// `-(−1)^p · (b · M)`: the negated vertical differential.
fn neg_vertical(b: &BiElem, p: usize, rows: &[Vec<WeylElement>], rank_to: usize, n: usize) -> BiElem {
    let sign = if p.is_multiple_of(2) { -Q::one() } else { Q::one() };
    let mut out = BiElem::new();
    for (mask, vec) in b {
        for (i, coef) in vec.iter().enumerate() {
            if coef.is_zero() {
                continue;
            }
            for (j, entry) in rows[i].iter().enumerate() {
                if entry.is_zero() {
                    continue;
                }
                bi_add(&mut out, *mask, j, rank_to, n, &coef.mul(entry).scale(&sign));
            }
        }
    }
    out
}

/// Horizontal differential: left multiplication by `∂_i` with `dx_i ∧`.
fn horizontal(b: &BiElem, rank: usize, n: usize) -> BiElem {
    let mut out = BiElem::new();
    for (mask, vec) in b {
        for i in 0..n {
            let s = wedge_sign_one(i, *mask);
            if s == 0 {
                continue;
            }
            let di = WeylElement::d(n, i).scale(&Q::from(Z::from(s)));
            for (j, v) in vec.iter().enumerate() {
                if !v.is_zero() {
                    bi_add(&mut out, mask | (1 << i), j, rank, n, &di.mul(v));
                }
            }
        }
    }
    out
}

/// Contracting homotopy `h / N` for the horizontal differential.
fn homotopy(c: &BiElem, rank: usize, n: usize) -> BiElem {
    let mut out = BiElem::new();
    for (mask, vec) in c {
        let jn = mask.count_ones() as i64;
        for (j, v) in vec.iter().enumerate() {
            let anti = to_anti(v);
            let mut parts: BTreeMap<u32, Anti> = BTreeMap::new();
            for ((beta, alpha), x) in &anti {
                let bsum: i64 = beta.iter().map(|&b| b as i64).sum();
                let nn = bsum + n as i64 - jn;
                assert!(nn > 0, "homotopy applied outside the image of the Koszul differential");
                for i in 0..n {
                    if mask & (1 << i) == 0 || beta[i] == 0 {
                        continue;
                    }
                    let below = (mask & ((1u32 << i) - 1)).count_ones();
                    let mut coef = x * Q::from(Z::from(beta[i] as i64)) / Q::from(Z::from(nn));
                    if below % 2 == 1 {
                        coef = -coef;
                    }
                    let mut b2 = beta.clone();
                    b2[i] -= 1;
                    *parts.entry(mask & !(1 << i)).or_default().entry((b2, alpha.clone())).or_insert_with(Q::zero) +=
                        coef;
                }
            }
            for (m2, a) in parts {
                let w = from_anti(&a, n);
                if !w.is_zero() {
                    bi_add(&mut out, m2, j, rank, n, &w);
                }
            }
        }
    }
    out.retain(|_, v| v.iter().any(|w| !w.is_zero()));
    out
}

/// Converts a cocycle of `Ω ⊗ A^{-k}` (polynomial vector, given by the
/// truncated basis) into a closed differential form of degree `n - k` on
/// the complement of `F`, through the double complex with the Koszul
/// resolution of `Ω`.
pub fn to_de_rham_form(
    cx: &ShiftedFreeComplex,
    tc: &TruncatedComplex,
    k: usize,
    v: &SparseVec,
    module: &PresentedDModule,
) -> DiffForm {
    let n = cx.n;
    let all: u32 = if n == 0 { 0 } else { (1u32 << n) - 1 };
    let mut b = BiElem::new();
    for (idx, c) in &v.0 {
        let (j, alpha) = &tc.bases[k][*idx];
        let a16: Vec<u16> = alpha.iter().map(|&x| x as u16).collect();
        bi_add(&mut b, all, *j, cx.ranks[k], n, &WeylElement::monomial(&a16, &vec![0; n], c.clone()));
    }
    let mut p = n;
    for level in (1..=k).rev() {
        let rows = cx.rows(level);
        let c = neg_vertical(&b, p, &rows, cx.ranks[level - 1], n);
        let y = homotopy(&c, cx.ranks[level - 1], n);
        debug_assert!(bi_eq(&horizontal(&y, cx.ranks[level - 1], n), &c));
        b = y;
        p -= 1;
    }
    let base = Arc::new(module.f.clone());
    let mut form = DiffForm::zero(base.clone(), p);
    let ord = Order::degrevlex(2 * n);
    for (mask, vec) in b {
        let u = &vec[0];
        if u.is_zero() {
            continue;
        }
        let (e, sc) = u.to_elem(&ord);
        let lf: LocalFraction = crate::dmod::apply_weyl_to_fraction(&e, &module.f, module.a).scale(&sc.recip());
        form = form.add(&DiffForm::monomial(lf, mask));
    }
    form.degree = p;
    form
}

fn bi_eq(a: &BiElem, b: &BiElem) -> bool {
    let keys: alloc::collections::BTreeSet<u32> = a.keys().chain(b.keys()).copied().collect();
    keys.iter().all(|k| match (a.get(k), b.get(k)) {
        (Some(x), Some(y)) => x.iter().zip(y).all(|(p, q)| p.sub(q).is_zero()),
        (Some(x), None) | (None, Some(x)) => x.iter().all(|p| p.is_zero()),
        (None, None) => true,
    })
}

/// De Rham cohomology of `C^n \ Var(F)`.
#[derive(Clone, Debug)]
pub struct AffineCohomology {
    pub n: usize,
    pub module: PresentedDModule,
    pub bfunction: UniPoly,
    pub level: Option<i64>,
    /// Dimensions by de Rham degree `0..=n`.
    pub dims: Vec<usize>,
    /// Closed forms spanning cohomology, by degree.
    pub classes: Vec<Vec<DiffForm>>,
    pub complex: ShiftedFreeComplex,
}

pub fn integrate_cohomology(f: &Poly, opts: &IntegrateOptions) -> Result<AffineCohomology, IntegrateError> {
    let n = f.nvars;
    let module = localize_cyclic(f, &opts.gb)?;
    let cx = v_strict_complex(&module.relations, n, n + 1, &opts.gb)?;
    let bfunction = integration_bfunction(&cx, &opts.gb)?;
    let level = bfunction.integer_roots().last().map(|&r| r + opts.extra_levels);
    let mut dims = vec![0; n + 1];
    let mut classes = vec![Vec::new(); n + 1];
    if let Some(lv) = level {
        let tc = truncate(&cx, lv)?;
        dims = tc.de_rham_dims();
        if opts.forms {
            for k in 0..=n.min(tc.bases.len().saturating_sub(1)) {
                for v in tc.representatives(k)? {
                    classes[n - k].push(to_de_rham_form(&cx, &tc, k, &v, &module));
                }
            }
        }
    }
    Ok(AffineCohomology { n, module, bfunction, level, dims, classes, complex: cx })
}

/// Dimensions obtained when truncating at an explicit level.
pub fn dims_at_level(cx: &ShiftedFreeComplex, level: i64) -> Result<Vec<usize>, IntegrateError> {
    Ok(truncate(cx, level)?.de_rham_dims())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_poly;
    use alloc::string::{String, ToString};

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    fn run(vars: &[&str], f: &str) -> AffineCohomology {
        let f = parse_poly(f, &names(vars)).unwrap();
        integrate_cohomology(&f, &IntegrateOptions::default()).unwrap()
    }

    #[test]
    fn anti_normal_round_trip() {
        let n = 2;
        let p = WeylElement::monomial(&[2, 1], &[3, 2], Q::one())
            .add(&WeylElement::monomial(&[0, 1], &[1, 0], Q::from(Z::from(5))));
        assert_eq!(from_anti(&to_anti(&p), n), p);
        // x∂ = ∂x - 1
        let xd = WeylElement::monomial(&[1], &[1], Q::one());
        let a = to_anti(&xd);
        assert_eq!(a.get(&(vec![1], vec![1])), Some(&Q::one()));
        assert_eq!(a.get(&(vec![0], vec![0])), Some(&-Q::one()));
    }

    #[test]
    fn line_minus_point() {
        let r = run(&["x"], "x");
        assert_eq!(r.dims, vec![1, 1]);
        assert!(r.complex.is_strict());
        assert!(r.complex.d_squared_zero());
        assert_eq!(r.bfunction.integer_roots(), vec![0]);
        let b = Arc::new(Poly::var(1, 0));
        let dlog = DiffForm::monomial(LocalFraction::new(Poly::one(1), b.clone(), 1), 1);
        let w1 = &r.classes[1][0];
        assert!(w1.d().is_zero());
        // a nonzero multiple of dx/x
        let (m, _) = crate::forms::canonical_coordinates(&[w1.clone(), dlog]);
        assert_eq!(m.rank(), 1);
        assert!(!r.classes[0][0].is_zero());
        assert!(r.classes[0][0].d().is_zero());
    }

    #[test]
    fn affine_space() {
        let r = run(&["x", "y"], "1");
        assert_eq!(r.dims, vec![1, 0, 0]);
    }

    #[test]
    fn coordinate_cross() {
        let r = run(&["x", "y"], "x*y");
        assert_eq!(r.dims, vec![1, 2, 1]);
        for deg in &r.classes {
            for w in deg {
                assert!(w.d().is_zero());
            }
        }
    }

    #[test]
    fn parabola_complement() {
        let r = run(&["s", "t"], "s^2+t");
        assert_eq!(r.dims, vec![1, 1, 0]);
        assert!(r.classes[1][0].d().is_zero());
    }

    #[test]
    fn truncation_stable() {
        let f = parse_poly("x*y", &names(&["x", "y"])).unwrap();
        let r = integrate_cohomology(&f, &IntegrateOptions { forms: false, ..Default::default() }).unwrap();
        let k1 = r.level.unwrap();
        for extra in 0..3 {
            assert_eq!(dims_at_level(&r.complex, k1 + extra).unwrap(), r.dims);
        }
    }
}
