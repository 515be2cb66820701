//! Weyl-type algebras and noncommutative Gröbner bases.
//!
//! An [`Algebra`] is a polynomial ring on at most [`MAXV`] variables in which
//! some pairs of variables do not commute:
//!
//! * Weyl pairs `(x, d)` with `d x = x d + 1` (or `+ h^2` when a homogenizing
//!   variable `h` is present);
//! * at most one shift pair `(dt, s)` with `s dt = dt (s + 1)`.
//!
//! Monomials are normally ordered (`x^a d^b`, `dt^p s^q`). Elements are
//! vectors over the algebra (one component for ring elements) with integer
//! coefficients; rational scalars are handled by callers.

use alloc::collections::{BTreeMap, BinaryHeap};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::rat::{binomial, factorial, Q, Z};

pub const MAXV: usize = 12;
pub type Exp = [u16; MAXV];

pub fn exp_add(a: &Exp, b: &Exp) -> Exp {
    let mut r = [0u16; MAXV];
    for i in 0..MAXV {
        r[i] = a[i] + b[i];
    }
    r
}

pub fn exp_sub(a: &Exp, b: &Exp) -> Exp {
    let mut r = [0u16; MAXV];
    for i in 0..MAXV {
        r[i] = a[i] - b[i];
    }
    r
}

pub fn exp_divides(a: &Exp, b: &Exp) -> bool {
    (0..MAXV).all(|i| a[i] <= b[i])
}

pub fn exp_lcm(a: &Exp, b: &Exp) -> Exp {
    let mut r = [0u16; MAXV];
    for i in 0..MAXV {
        r[i] = a[i].max(b[i]);
    }
    r
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WeylError {
    #[error("Gröbner basis computation exceeded {0} reduction steps")]
    StepLimit(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Algebra {
    pub nv: usize,
    pub names: Vec<String>,
    /// `(x, d)` index pairs.
    pub weyl: Vec<(usize, usize)>,
    /// `(dt, s)` with `s dt = dt (s + 1)`.
    pub shift: Option<(usize, usize)>,
    pub h: Option<usize>,
}

fn names_xd(n: usize) -> Vec<String> {
    let mut v: Vec<String> = (1..=n).map(|i| alloc::format!("x{}", i)).collect();
    v.extend((1..=n).map(|i| alloc::format!("d{}", i)));
    v
}

impl Algebra {
    /// `D_n`: variables `x_1..x_n` (indices `0..n`) and `d_1..d_n`
    /// (indices `n..2n`).
    pub fn weyl(n: usize) -> Self {
        assert!(2 * n <= MAXV);
        Algebra {
            nv: 2 * n,
            names: names_xd(n),
            weyl: (0..n).map(|i| (i, n + i)).collect(),
            shift: None,
            h: None,
        }
    }

    /// Homogenized Weyl algebra; `h` has index `2n`.
    pub fn weyl_h(n: usize) -> Self {
        let mut a = Self::weyl(n);
        assert!(2 * n < MAXV);
        a.nv += 1;
        a.names.push("h".into());
        a.h = Some(2 * n);
        a
    }

    /// `D_n[s]` with `s` central at index `2n`.
    pub fn weyl_s(n: usize) -> Self {
        let mut a = Self::weyl(n);
        assert!(2 * n < MAXV);
        a.nv += 1;
        a.names.push("s".into());
        a
    }

    /// `D_n<dt, s>` with `s dt = dt (s+1)`; `dt` at `2n`, `s` at `2n+1`.
    pub fn bm(n: usize) -> Self {
        let mut a = Self::weyl(n);
        assert!(2 * n + 2 <= MAXV);
        a.nv += 2;
        a.names.push("dt".into());
        a.names.push("s".into());
        a.shift = Some((2 * n, 2 * n + 1));
        a
    }

    pub fn n(&self) -> usize {
        self.weyl.len()
    }

    /// Product of two normally ordered monomials. The first entry is always
    /// the leading one `x^{a+b}` with coefficient 1.
    pub fn mono_mul(&self, a: &Exp, b: &Exp) -> Vec<(Exp, Z)> {
        let base = exp_add(a, b);
        let mut out: Vec<(Exp, Z)> = vec![(base, Z::one())];
        for &(x, d) in &self.weyl {
            let kmax = a[d].min(b[x]);
            if kmax == 0 {
                continue;
            }
            let coef: Vec<Z> = (0..=kmax)
                .map(|k| {
                    factorial(k as u32)
                        * binomial(a[d] as u32, k as u32)
                        * binomial(b[x] as u32, k as u32)
                })
                .collect();
            let mut next = Vec::with_capacity(out.len() * (kmax as usize + 1));
            for (e, c) in &out {
                for k in 0..=kmax {
                    let mut e2 = *e;
                    e2[x] -= k;
                    e2[d] -= k;
                    if let Some(h) = self.h {
                        e2[h] += 2 * k;
                    }
                    next.push((e2, c * &coef[k as usize]));
                }
            }
            out = next;
        }
        if let Some((dt, s)) = self.shift {
            let q1 = a[s];
            let p2 = b[dt];
            if q1 > 0 && p2 > 0 {
                // s^q1 dt^p2 = dt^p2 (s + p2)^q1
                let coef: Vec<Z> = (0..=q1)
                    .map(|j| {
                        binomial(q1 as u32, j as u32) * num_traits::pow(Z::from(p2), (q1 - j) as usize)
                    })
                    .collect();
                let mut next = Vec::with_capacity(out.len() * (q1 as usize + 1));
                for (e, c) in &out {
                    for j in (0..=q1).rev() {
                        let mut e2 = *e;
                        e2[s] -= q1 - j;
                        next.push((e2, c * &coef[j as usize]));
                    }
                }
                out = next;
            }
        }
        out
    }

    pub fn fmt_mono(&self, e: &Exp) -> String {
        let mut s = String::new();
        for i in 0..self.nv {
            if e[i] == 0 {
                continue;
            }
            if !s.is_empty() {
                s.push('*');
            }
            s.push_str(&self.names[i]);
            if e[i] > 1 {
                s.push_str(&alloc::format!("^{}", e[i]));
            }
        }
        if s.is_empty() {
            s.push('1');
        }
        s
    }
}

/// Term order on module terms `(exponent, component)`: a sequence of integer
/// weight vectors (each with optional per-component shifts), then reverse
/// lexicographic order on the exponent, then position (lower index larger).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Order {
    pub weights: Vec<Vec<i32>>,
    pub shifts: Vec<Vec<i32>>,
    pub nv: usize,
}

impl Order {
    pub fn new(nv: usize, weights: Vec<Vec<i32>>) -> Self {
        let k = weights.len();
        Order { weights, shifts: vec![Vec::new(); k], nv }
    }

    /// Total degree then reverse lexicographic.
    pub fn degrevlex(nv: usize) -> Self {
        Self::new(nv, vec![vec![1; nv]])
    }

    /// Block elimination order: variables with `elim[i]` are larger than
    /// any monomial in the others.
    pub fn elimination(nv: usize, elim: &[usize]) -> Self {
        let mut w = vec![0; nv];
        for &i in elim {
            w[i] = 1;
        }
        Self::new(nv, vec![w, vec![1; nv]])
    }

    pub fn with_shifts(mut self, shifts: Vec<Vec<i32>>) -> Self {
        self.shifts = shifts;
        self
    }

    #[inline]
    fn wval(&self, k: usize, e: &Exp, c: u32) -> i64 {
        let w = &self.weights[k];
        let mut v: i64 = 0;
        for i in 0..self.nv {
            v += w[i] as i64 * e[i] as i64;
        }
        if let Some(sh) = self.shifts[k].get(c as usize) {
            v += *sh as i64;
        }
        v
    }

    pub fn cmp(&self, a: &Exp, ac: u32, b: &Exp, bc: u32) -> Ordering {
        for k in 0..self.weights.len() {
            let o = self.wval(k, a, ac).cmp(&self.wval(k, b, bc));
            if o != Ordering::Equal {
                return o;
            }
        }
        for i in (0..self.nv).rev() {
            if a[i] != b[i] {
                return b[i].cmp(&a[i]);
            }
        }
        bc.cmp(&ac)
    }

    /// Sort key consistent with [`Order::cmp`].
    pub fn key(&self, e: &Exp, c: u32) -> Vec<i64> {
        let mut k: Vec<i64> = (0..self.weights.len()).map(|i| self.wval(i, e, c)).collect();
        for i in (0..self.nv).rev() {
            k.push(-(e[i] as i64));
        }
        k.push(-(c as i64));
        k
    }
}

pub type Term = (Exp, u32, Z);

/// Element of a free module over an [`Algebra`] (ring elements use component
/// 0). Terms are sorted descending w.r.t. the order they were built with.
#[derive(Clone, Debug, PartialEq, Eq, Default, Hash)]
pub struct Elem {
    pub terms: Vec<Term>,
}

impl Elem {
    pub fn zero() -> Self {
        Elem { terms: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn from_terms(ord: &Order, mut raw: Vec<Term>) -> Self {
        raw.sort_by(|a, b| ord.cmp(&b.0, b.1, &a.0, a.1));
        let mut out: Vec<Term> = Vec::with_capacity(raw.len());
        for t in raw {
            if let Some(last) = out.last_mut() {
                if last.0 == t.0 && last.1 == t.1 {
                    last.2 += t.2;
                    if last.2.is_zero() {
                        out.pop();
                    }
                    continue;
                }
            }
            if !t.2.is_zero() {
                out.push(t);
            }
        }
        Elem { terms: out }
    }

    pub fn mono(e: Exp, comp: u32, c: Z) -> Self {
        if c.is_zero() {
            return Elem::zero();
        }
        Elem { terms: vec![(e, comp, c)] }
    }

    pub fn lead(&self) -> Option<&Term> {
        self.terms.first()
    }

    pub fn resort(&self, ord: &Order) -> Elem {
        Elem::from_terms(ord, self.terms.clone())
    }

    pub fn scale(&self, c: &Z) -> Elem {
        if c.is_zero() {
            return Elem::zero();
        }
        Elem { terms: self.terms.iter().map(|(e, p, x)| (*e, *p, x * c)).collect() }
    }

    pub fn neg(&self) -> Elem {
        Elem { terms: self.terms.iter().map(|(e, p, x)| (*e, *p, -x)).collect() }
    }

    /// `a*self - b*other`, both sorted w.r.t. `ord`.
    pub fn lin(&self, a: &Z, b: &Z, other: &Elem, ord: &Order) -> Elem {
        let x = &self.terms;
        let y = &other.terms;
        let mut out = Vec::with_capacity(x.len() + y.len());
        let (mut i, mut j) = (0, 0);
        let a_one = a.is_one();
        while i < x.len() || j < y.len() {
            let o = if i == x.len() {
                Ordering::Less
            } else if j == y.len() {
                Ordering::Greater
            } else {
                ord.cmp(&x[i].0, x[i].1, &y[j].0, y[j].1)
            };
            match o {
                Ordering::Greater => {
                    let c = if a_one { x[i].2.clone() } else { a * &x[i].2 };
                    out.push((x[i].0, x[i].1, c));
                    i += 1;
                }
                Ordering::Less => {
                    out.push((y[j].0, y[j].1, -(b * &y[j].2)));
                    j += 1;
                }
                Ordering::Equal => {
                    let c = a * &x[i].2 - b * &y[j].2;
                    if !c.is_zero() {
                        out.push((x[i].0, x[i].1, c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        Elem { terms: out }
    }

    pub fn add(&self, other: &Elem, ord: &Order) -> Elem {
        self.lin(&Z::one(), &Z::from(-1), other, ord)
    }

    pub fn sub(&self, other: &Elem, ord: &Order) -> Elem {
        self.lin(&Z::one(), &Z::one(), other, ord)
    }

    pub fn content(&self) -> Z {
        let mut g = Z::zero();
        for (_, _, c) in &self.terms {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    /// Divides by the content and makes the leading coefficient positive.
    pub fn primitive(&self) -> Elem {
        if self.is_zero() {
            return self.clone();
        }
        let mut g = self.content();
        if self.terms[0].2.is_negative() {
            g = -g;
        }
        if g.is_one() {
            return self.clone();
        }
        Elem { terms: self.terms.iter().map(|(e, p, x)| (*e, *p, x / &g)).collect() }
    }

    pub fn max_comp(&self) -> Option<u32> {
        self.terms.iter().map(|t| t.1).max()
    }

    /// Splits a module element into its ring-element components.
    pub fn components(&self, ord: &Order, rank: usize) -> Vec<Elem> {
        let mut out = vec![Vec::new(); rank];
        for (e, c, x) in &self.terms {
            out[*c as usize].push((*e, 0, x.clone()));
        }
        out.into_iter().map(|t| Elem::from_terms(ord, t)).collect()
    }

    /// Maximum of a weight (with per-component shifts) over all terms.
    pub fn weight_degree(&self, w: &[i32], shifts: &[i32]) -> Option<i64> {
        self.terms
            .iter()
            .map(|(e, c, _)| {
                let mut v: i64 = shifts.get(*c as usize).copied().unwrap_or(0) as i64;
                for (i, wi) in w.iter().enumerate() {
                    v += *wi as i64 * e[i] as i64;
                }
                v
            })
            .max()
    }

    /// Applies a map to exponents (e.g. `h -> 1`, variable renaming).
    pub fn map_exp(&self, ord: &Order, f: impl Fn(&Exp) -> Exp) -> Elem {
        Elem::from_terms(ord, self.terms.iter().map(|(e, c, x)| (f(e), *c, x.clone())).collect())
    }

    pub fn map_comp(&self, ord: &Order, f: impl Fn(u32) -> u32) -> Elem {
        Elem::from_terms(ord, self.terms.iter().map(|(e, c, x)| (*e, f(*c), x.clone())).collect())
    }

    pub fn fmt(&self, alg: &Algebra) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut s = String::new();
        for (k, (e, c, x)) in self.terms.iter().enumerate() {
            let neg = x.is_negative();
            if k > 0 || neg {
                s.push_str(if neg { "-" } else { "+" });
            }
            let a = x.abs();
            let m = alg.fmt_mono(e);
            if m == "1" {
                s.push_str(&alloc::format!("{}", a));
            } else if a.is_one() {
                s.push_str(&m);
            } else {
                s.push_str(&alloc::format!("{}*{}", a, m));
            }
            if self.terms.iter().any(|t| t.1 != 0) {
                s.push_str(&alloc::format!("*e{}", c));
            }
        }
        s
    }
}

/// Left multiplication `(c * x^m) * g`.
pub fn mul_mono_left(alg: &Algebra, ord: &Order, m: &Exp, c: &Z, g: &Elem) -> Elem {
    let mut raw: Vec<Term> = Vec::with_capacity(g.terms.len());
    let mut simple = true;
    for (e, p, x) in &g.terms {
        let prods = alg.mono_mul(m, e);
        if prods.len() > 1 {
            simple = false;
        }
        for (e2, k) in prods {
            raw.push((e2, *p, k * x * c));
        }
    }
    if simple {
        // multiplication by a monomial preserves the order when there are
        // no correction terms
        return Elem { terms: raw };
    }
    Elem::from_terms(ord, raw)
}

/// Product of a ring element (component 0) with a module element.
pub fn mul(alg: &Algebra, ord: &Order, a: &Elem, b: &Elem) -> Elem {
    let mut raw: Vec<Term> = Vec::new();
    for (ea, _, xa) in &a.terms {
        for (eb, pb, xb) in &b.terms {
            for (e, k) in alg.mono_mul(ea, eb) {
                raw.push((e, *pb, k * xa * xb));
            }
        }
    }
    Elem::from_terms(ord, raw)
}

/// Options for [`groebner`].
#[derive(Clone, Debug)]
pub struct GbOptions {
    pub max_steps: usize,
    /// Whether to tail-reduce the final basis.
    pub reduce_tails: bool,
}

impl Default for GbOptions {
    fn default() -> Self {
        GbOptions { max_steps: 5_000_000, reduce_tails: true }
    }
}

/// Gröbner basis with optional representation tracking: `reps[i]` is a
/// module element over `rep_order` expressing `basis[i]` through the input
/// generators that carried a representation (inputs with a zero
/// representation are treated as untracked).
#[derive(Clone, Debug)]
pub struct GbResult {
    pub basis: Vec<Elem>,
    pub reps: Option<Vec<Elem>>,
    pub steps: usize,
}

struct Reducer<'a> {
    alg: &'a Algebra,
    ord: &'a Order,
    rep_ord: &'a Order,
    steps: usize,
    max_steps: usize,
}

impl Reducer<'_> {
    fn find(&self, basis: &[Elem], lead: &Term) -> Option<usize> {
        let mut best: Option<usize> = None;
        for (k, g) in basis.iter().enumerate() {
            let (ge, gc, _) = g.lead().unwrap();
            if *gc == lead.1 && exp_divides(ge, &lead.0) {
                match best {
                    Some(b) if basis[b].terms.len() <= g.terms.len() => {}
                    _ => best = Some(k),
                }
            }
        }
        best
    }

    /// Reduces `f` by `basis`. Returns the remainder `r`, the accumulated
    /// scale `c`, and (if tracking) the updated representation, so that
    /// `c * f = r + sum q_k basis_k`, with `rep` transformed accordingly.
    /// With `quot`, the quotients `q` are returned as an element of the
    /// free module on the basis.
    #[allow(clippy::type_complexity)]
    fn reduce(
        &mut self,
        mut f: Elem,
        mut rep: Option<Elem>,
        basis: &[Elem],
        reps: Option<&[Elem]>,
        full: bool,
        mut quot: Option<Elem>,
    ) -> Result<(Elem, Z, Option<Elem>, Option<Elem>), WeylError> {
        let mut done: Vec<Term> = Vec::new();
        let mut scale = Z::one();
        loop {
            let Some(lead) = f.terms.first().cloned() else { break };
            let Some(k) = self.find(basis, &lead) else {
                if !full {
                    break;
                }
                done.push(f.terms.remove(0));
                continue;
            };
            self.steps += 1;
            if self.steps > self.max_steps {
                return Err(WeylError::StepLimit(self.max_steps));
            }
            let g = &basis[k];
            let (ge, _, gc) = g.lead().unwrap();
            let m = exp_sub(&lead.0, ge);
            let gg = gc.gcd(&lead.2);
            let mut a = gc / &gg;
            let mut b = &lead.2 / &gg;
            if a.is_negative() {
                a = -a;
                b = -b;
            }
            let mg = mul_mono_left(self.alg, self.ord, &m, &Z::one(), g);
            f = f.lin(&a, &b, &mg, self.ord);
            debug_assert!(f.lead().is_none_or(|t| self.ord.cmp(&t.0, t.1, &lead.0, lead.1) == Ordering::Less));
            if !a.is_one() {
                for t in done.iter_mut() {
                    t.2 *= &a;
                }
                scale *= &a;
            }
            if let (Some(r), Some(rs)) = (rep.as_mut(), reps) {
                if !rs[k].is_zero() {
                    let mr = mul_mono_left(self.alg, self.rep_ord, &m, &Z::one(), &rs[k]);
                    *r = r.lin(&a, &b, &mr, self.rep_ord);
                } else if !a.is_one() {
                    *r = r.scale(&a);
                }
            }
            if let Some(qv) = quot.as_mut() {
                let add = Elem::mono(m, k as u32, b.clone());
                let mut t = if a.is_one() { qv.clone() } else { qv.scale(&a) };
                t = t.add(&add, self.rep_ord);
                *qv = t;
            }
            // keep numbers small
            let mut g2 = f.content();
            for t in &done {
                if g2.is_one() {
                    break;
                }
                g2 = g2.gcd(&t.2);
            }
            if !g2.is_one() {
                if let Some(r) = &rep {
                    for t in &r.terms {
                        if g2.is_one() {
                            break;
                        }
                        g2 = g2.gcd(&t.2);
                    }
                }
                if let Some(qv) = &quot {
                    for t in &qv.terms {
                        if g2.is_one() {
                            break;
                        }
                        g2 = g2.gcd(&t.2);
                    }
                }
                g2 = g2.gcd(&scale);
                if !g2.is_zero() && !g2.is_one() {
                    f = Elem { terms: f.terms.into_iter().map(|(e, p, x)| (e, p, x / &g2)).collect() };
                    for t in done.iter_mut() {
                        t.2 = &t.2 / &g2;
                    }
                    if let Some(r) = rep.as_mut() {
                        *r = Elem { terms: r.terms.drain(..).map(|(e, p, x)| (e, p, x / &g2)).collect() };
                    }
                    if let Some(qv) = quot.as_mut() {
                        *qv = Elem { terms: qv.terms.drain(..).map(|(e, p, x)| (e, p, x / &g2)).collect() };
                    }
                    scale = &scale / &g2;
                }
            }
        }
        done.extend(f.terms);
        Ok((Elem { terms: done }, scale, rep, quot))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct PairKey {
    key: Vec<i64>,
    i: usize,
    j: usize,
}

impl Ord for PairKey {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on lcm degree, then the lcm key, then indices
        other.key.cmp(&self.key).then(other.j.cmp(&self.j)).then(other.i.cmp(&self.i))
    }
}

impl PartialOrd for PairKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn lcm_of(basis: &[Elem], i: usize, j: usize) -> Option<Exp> {
    let (a, ac, _) = basis[i].lead()?;
    let (b, bc, _) = basis[j].lead()?;
    if ac != bc {
        return None;
    }
    Some(exp_lcm(a, b))
}

/// Whether the pair `(i, j)` with lcm `l` is implied by pairs through some
/// `k` with strictly smaller lcms.
fn chain_skip(basis: &[Elem], alive: &[bool], i: usize, j: usize, l: &Exp, comp: u32) -> bool {
    for k in 0..basis.len() {
        if k == i || k == j || !alive[k] {
            continue;
        }
        let (ke, kc, _) = basis[k].lead().unwrap();
        if *kc != comp || !exp_divides(ke, l) {
            continue;
        }
        let lik = exp_lcm(&basis[i].lead().unwrap().0, ke);
        let ljk = exp_lcm(&basis[j].lead().unwrap().0, ke);
        if lik != *l && ljk != *l {
            return true;
        }
    }
    false
}

/// S-element of basis elements `i` and `j` (same lead component): returns
/// `(S, m_i, a_i, m_j, a_j)` with `S = a_i x^{m_i} g_i - a_j x^{m_j} g_j`.
fn spair(alg: &Algebra, ord: &Order, basis: &[Elem], i: usize, j: usize, l: &Exp) -> (Elem, Exp, Z, Exp, Z) {
    let (ie, _, ic) = basis[i].lead().unwrap();
    let (je, _, jc) = basis[j].lead().unwrap();
    let mi = exp_sub(l, ie);
    let mj = exp_sub(l, je);
    let g = ic.gcd(jc);
    let ai = jc / &g;
    let aj = ic / &g;
    let pi = mul_mono_left(alg, ord, &mi, &Z::one(), &basis[i]);
    let pj = mul_mono_left(alg, ord, &mj, &Z::one(), &basis[j]);
    (pi.lin(&ai, &aj, &pj, ord), mi, ai, mj, aj)
}

/// Buchberger's algorithm with the normal selection strategy.
pub fn groebner(
    alg: &Algebra,
    ord: &Order,
    gens: &[Elem],
    gen_reps: Option<(&[Elem], &Order)>,
    opts: &GbOptions,
) -> Result<GbResult, WeylError> {
    let default_rep_ord = Order::degrevlex(alg.nv);
    let rep_ord = gen_reps.map(|(_, o)| o).unwrap_or(&default_rep_ord);
    let tracking = gen_reps.is_some();
    let mut red = Reducer { alg, ord, rep_ord, steps: 0, max_steps: opts.max_steps };
    let mut basis: Vec<Elem> = Vec::new();
    let mut reps: Vec<Elem> = Vec::new();
    let mut alive: Vec<bool> = Vec::new();
    let mut heap: BinaryHeap<PairKey> = BinaryHeap::new();

    let add = |f: Elem,
                   r: Elem,
                   basis: &mut Vec<Elem>,
                   reps: &mut Vec<Elem>,
                   alive: &mut Vec<bool>,
                   heap: &mut BinaryHeap<PairKey>| {
        let idx = basis.len();
        let (fe, fc, _) = f.lead().unwrap().clone();
        basis.push(f);
        reps.push(r);
        alive.push(true);
        for i in 0..idx {
            if !alive[i] {
                continue;
            }
            if let Some(l) = lcm_of(basis, i, idx) {
                let mut key = vec![l.iter().map(|&x| x as i64).sum::<i64>()];
                key.extend(ord.key(&l, fc));
                heap.push(PairKey { key, i, j: idx });
            }
        }
        // retire elements whose lead is a multiple of the new one; their
        // pairs stay valid since the new element generates them
        for i in 0..idx {
            if alive[i] {
                let (ie, ic, _) = basis[i].lead().unwrap();
                if *ic == fc && exp_divides(&fe, ie) {
                    alive[i] = false;
                }
            }
        }
    };

    // inputs sorted by leading term ascending for a stable start
    let mut input: Vec<(Elem, Elem)> = gens
        .iter()
        .enumerate()
        .filter(|(_, g)| !g.is_zero())
        .map(|(k, g)| {
            let r = match gen_reps {
                Some((rs, ro)) => rs[k].resort(ro),
                None => Elem::zero(),
            };
            (g.resort(ord), r)
        })
        .collect();
    input.sort_by(|a, b| {
        let (ae, ac, _) = a.0.lead().unwrap();
        let (be, bc, _) = b.0.lead().unwrap();
        ord.cmp(ae, *ac, be, *bc)
    });
    for (g, r) in input {
        let live: Vec<Elem> = basis.iter().zip(&alive).filter(|(_, a)| **a).map(|(b, _)| b.clone()).collect();
        let live_reps: Vec<Elem> = reps.iter().zip(&alive).filter(|(_, a)| **a).map(|(b, _)| b.clone()).collect();
        let (rem, _, rep, _) = red.reduce(
            g,
            if tracking { Some(r) } else { None },
            &live,
            if tracking { Some(&live_reps) } else { None },
            false,
            None,
        )?;
        if !rem.is_zero() {
            let (rem, rep) = normalize_pair(rem, rep);
            add(rem, rep.unwrap_or_default(), &mut basis, &mut reps, &mut alive, &mut heap);
        }
    }

    while let Some(PairKey { i, j, .. }) = heap.pop() {
        let l = match lcm_of(&basis, i, j) {
            Some(l) => l,
            None => continue,
        };
        let comp = basis[i].lead().unwrap().1;
        if chain_skip(&basis, &alive_all(&basis), i, j, &l, comp) {
            continue;
        }
        let (s, mi, ai, mj, aj) = spair(alg, ord, &basis, i, j, &l);
        if s.is_zero() {
            continue;
        }
        let srep = if tracking {
            let ri = mul_mono_left(alg, rep_ord, &mi, &Z::one(), &reps[i]);
            let rj = mul_mono_left(alg, rep_ord, &mj, &Z::one(), &reps[j]);
            Some(ri.lin(&ai, &aj, &rj, rep_ord))
        } else {
            None
        };
        let (rem, _, rep, _) =
            red.reduce(s, srep, &basis, if tracking { Some(&reps) } else { None }, false, None)?;
        if !rem.is_zero() {
            let (rem, rep) = normalize_pair(rem, rep);
            add(rem, rep.unwrap_or_default(), &mut basis, &mut reps, &mut alive, &mut heap);
        }
    }

    // minimal basis
    let mut keep: Vec<usize> = Vec::new();
    for i in 0..basis.len() {
        let (ie, ic, _) = basis[i].lead().unwrap();
        let redundant = (0..basis.len()).any(|j| {
            if j == i {
                return false;
            }
            let (je, jc, _) = basis[j].lead().unwrap();
            jc == ic && exp_divides(je, ie) && (je != ie || j < i)
        });
        if !redundant {
            keep.push(i);
        }
    }
    let mut out: Vec<Elem> = keep.iter().map(|&i| basis[i].clone()).collect();
    let mut out_reps: Vec<Elem> = keep.iter().map(|&i| reps[i].clone()).collect();
    if opts.reduce_tails {
        for k in 0..out.len() {
            let f = out[k].clone();
            let lead = f.terms[0].clone();
            let tail = Elem { terms: f.terms[1..].to_vec() };
            let others: Vec<Elem> = out.clone();
            let (rem, sc, rep, _) = red.reduce(
                tail,
                if tracking { Some(out_reps[k].clone()) } else { None },
                &others,
                if tracking { Some(&out_reps) } else { None },
                true,
                None,
            )?;
            // c*tail = rem + ..., and the representation was scaled likewise
            let mut terms = vec![(lead.0, lead.1, lead.2 * &sc)];
            terms.extend(rem.terms);
            let (e, r) = normalize_pair(Elem { terms }, rep);
            out[k] = e;
            if let Some(r) = r {
                out_reps[k] = r;
            }
        }
    }
    let mut idx: Vec<usize> = (0..out.len()).collect();
    idx.sort_by(|&a, &b| {
        let (ae, ac, _) = out[a].lead().unwrap();
        let (be, bc, _) = out[b].lead().unwrap();
        ord.cmp(ae, *ac, be, *bc)
    });
    let basis: Vec<Elem> = idx.iter().map(|&i| out[i].clone()).collect();
    let reps = if tracking { Some(idx.iter().map(|&i| out_reps[i].clone()).collect()) } else { None };
    Ok(GbResult { basis, reps, steps: red.steps })
}

fn alive_all(basis: &[Elem]) -> Vec<bool> {
    vec![true; basis.len()]
}

fn normalize_pair(f: Elem, rep: Option<Elem>) -> (Elem, Option<Elem>) {
    let mut g = f.content();
    if let Some(r) = &rep {
        for t in &r.terms {
            if g.is_one() {
                break;
            }
            g = g.gcd(&t.2);
        }
    }
    if f.terms[0].2.is_negative() {
        g = -g;
    }
    if g.is_one() {
        return (f, rep);
    }
    let div = |e: Elem| Elem { terms: e.terms.into_iter().map(|(a, b, x)| (a, b, x / &g)).collect() };
    (div(f), rep.map(div))
}

/// Normal form of `f` modulo a Gröbner basis (full reduction). Returns the
/// remainder and the scale `c` with `c f = remainder + combination`.
pub fn normal_form(alg: &Algebra, ord: &Order, f: &Elem, basis: &[Elem]) -> (Elem, Z) {
    let default = Order::degrevlex(alg.nv);
    let mut red = Reducer { alg, ord, rep_ord: &default, steps: 0, max_steps: usize::MAX };
    let (r, c, _, _) = red.reduce(f.resort(ord), None, basis, None, true, None).unwrap();
    (r, c)
}

/// Reduction that also returns the quotients: `c f = r + sum q_k basis_k`
/// with `q` an element of the free module on the basis (component `k`).
pub fn divide(alg: &Algebra, ord: &Order, quot_ord: &Order, f: &Elem, basis: &[Elem]) -> (Elem, Z, Elem) {
    let mut red = Reducer { alg, ord, rep_ord: quot_ord, steps: 0, max_steps: usize::MAX };
    let (r, c, _, q) = red.reduce(f.resort(ord), None, basis, None, true, Some(Elem::zero())).unwrap();
    (r, c, q.unwrap())
}

/// Ideal membership test via a Gröbner basis.
pub fn reduces_to_zero(alg: &Algebra, ord: &Order, f: &Elem, basis: &[Elem]) -> bool {
    normal_form(alg, ord, f, basis).0.is_zero()
}

/// Syzygies of a Gröbner basis from its S-pairs: for each surviving pair
/// the relation `a_i x^{m_i} e_i - a_j x^{m_j} e_j - sum q_k e_k`.
/// Pairs implied by the chain criterion with strictly smaller lcms are
/// omitted; the remaining ones still generate the syzygy module.
pub fn schreyer_syzygies(alg: &Algebra, ord: &Order, syz_ord: &Order, basis: &[Elem]) -> Vec<Elem> {
    let alive = alive_all(basis);
    let mut out = Vec::new();
    for j in 0..basis.len() {
        for i in 0..j {
            let Some(l) = lcm_of(basis, i, j) else { continue };
            let comp = basis[i].lead().unwrap().1;
            if chain_skip(basis, &alive, i, j, &l, comp) {
                continue;
            }
            let (s, mi, ai, mj, aj) = spair(alg, ord, basis, i, j, &l);
            let (r, c, q) = divide(alg, ord, syz_ord, &s, basis);
            debug_assert!(r.is_zero(), "input is not a Gröbner basis");
            // c*S = q  =>  c*ai*m_i e_i - c*aj*m_j e_j - q = 0
            let lead = Elem::from_terms(
                syz_ord,
                vec![(mi, i as u32, &c * &ai), (mj, j as u32, -(&c * &aj))],
            );
            let syz = lead.sub(&q, syz_ord);
            if !syz.is_zero() {
                out.push(syz.primitive());
            }
        }
    }
    out
}

/// Substitutes `h = 1` (or any variable by 1) and re-sorts.
pub fn set_var_one(ord: &Order, f: &Elem, var: usize) -> Elem {
    f.map_exp(ord, |e| {
        let mut e2 = *e;
        e2[var] = 0;
        e2
    })
}

/// Homogenizes with respect to total degree in the first `nv_body`
/// variables using variable `h` (components get per-component degree
/// shifts `shifts`).
pub fn homogenize(ord: &Order, f: &Elem, h: usize, shifts: &[i32]) -> Elem {
    let deg = |e: &Exp, c: u32| -> i64 {
        let mut d: i64 = shifts.get(c as usize).copied().unwrap_or(0) as i64;
        for i in 0..MAXV {
            if i != h {
                d += e[i] as i64;
            }
        }
        d
    };
    let top = f.terms.iter().map(|(e, c, _)| deg(e, *c)).max().unwrap_or(0);
    f.map_exp_comp(ord, |e, c| {
        let mut e2 = *e;
        e2[h] += (top - deg(e, c)) as u16;
        e2
    })
}

impl Elem {
    fn map_exp_comp(&self, ord: &Order, f: impl Fn(&Exp, u32) -> Exp) -> Elem {
        Elem::from_terms(ord, self.terms.iter().map(|(e, c, x)| (f(e, *c), *c, x.clone())).collect())
    }
}

/// Weyl-algebra element with rational coefficients (ring elements only),
/// convenient for specification-level arithmetic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeylElement {
    pub n: usize,
    pub terms: BTreeMap<(Vec<u16>, Vec<u16>), Q>,
}

impl WeylElement {
    pub fn zero(n: usize) -> Self {
        WeylElement { n, terms: BTreeMap::new() }
    }

    pub fn monomial(alpha: &[u16], beta: &[u16], c: Q) -> Self {
        let mut w = Self::zero(alpha.len());
        if !c.is_zero() {
            w.terms.insert((alpha.to_vec(), beta.to_vec()), c);
        }
        w
    }

    pub fn x(n: usize, i: usize) -> Self {
        let mut a = vec![0; n];
        a[i] = 1;
        Self::monomial(&a, &vec![0; n], Q::one())
    }

    pub fn d(n: usize, i: usize) -> Self {
        let mut b = vec![0; n];
        b[i] = 1;
        Self::monomial(&vec![0; n], &b, Q::one())
    }

    pub fn constant(n: usize, c: Q) -> Self {
        Self::monomial(&vec![0; n], &vec![0; n], c)
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (k, v) in &o.terms {
            let e = out.terms.entry(k.clone()).or_insert_with(Q::zero);
            *e += v;
            if e.is_zero() {
                out.terms.remove(k);
            }
        }
        out
    }

    pub fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            return Self::zero(self.n);
        }
        WeylElement { n: self.n, terms: self.terms.iter().map(|(k, v)| (k.clone(), v * c)).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(&-Q::one()))
    }

    pub fn mul(&self, o: &Self) -> Self {
        let n = self.n;
        let alg = Algebra::weyl(n);
        let mut out = Self::zero(n);
        for ((a1, b1), c1) in &self.terms {
            for ((a2, b2), c2) in &o.terms {
                let e1 = to_exp(a1, b1);
                let e2 = to_exp(a2, b2);
                for (e, k) in alg.mono_mul(&e1, &e2) {
                    let key = from_exp(&e, n);
                    *out.terms.entry(key).or_insert_with(Q::zero) += c1 * c2 * Q::from_integer(k);
                }
            }
        }
        out.terms.retain(|_, v| !v.is_zero());
        out
    }

    /// Ṽ-degree: max of |α| - |β|; `None` for zero.
    pub fn v_degree(&self) -> Option<i64> {
        self.terms
            .keys()
            .map(|(a, b)| a.iter().map(|&x| x as i64).sum::<i64>() - b.iter().map(|&x| x as i64).sum::<i64>())
            .max()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Integer element (denominators cleared) in [`Algebra::weyl`].
    pub fn to_elem(&self, ord: &Order) -> (Elem, Q) {
        let (ints, sc) = crate::rat::primitive_ints(self.terms.values());
        let raw = self.terms.keys().zip(ints).map(|((a, b), c)| (to_exp(a, b), 0u32, c)).collect();
        (Elem::from_terms(ord, raw), sc)
    }

    pub fn from_elem(n: usize, e: &Elem) -> Self {
        let mut w = Self::zero(n);
        for (ex, _, c) in &e.terms {
            let (a, b) = from_exp(ex, n);
            w = w.add(&Self::monomial(&a, &b, Q::from_integer(c.clone())));
        }
        w
    }
}

fn to_exp(a: &[u16], b: &[u16]) -> Exp {
    let n = a.len();
    let mut e = [0u16; MAXV];
    e[..n].copy_from_slice(a);
    e[n..2 * n].copy_from_slice(b);
    e
}

fn from_exp(e: &Exp, n: usize) -> (Vec<u16>, Vec<u16>) {
    (e[..n].to_vec(), e[n..2 * n].to_vec())
}

/// Helper for tests and callers: exponent from a list of `(var, power)`.
pub fn exp_of(pairs: &[(usize, u16)]) -> Exp {
    let mut e = [0u16; MAXV];
    for &(i, k) in pairs {
        e[i] += k;
    }
    e
}

/// Ring element from `(coefficient, [(var, power)])` terms.
pub fn elem_of(ord: &Order, terms: &[(i64, &[(usize, u16)])]) -> Elem {
    Elem::from_terms(ord, terms.iter().map(|(c, p)| (exp_of(p), 0, Z::from(*c))).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::q;

    #[test]
    fn defining_relation() {
        let x = WeylElement::x(1, 0);
        let d = WeylElement::d(1, 0);
        let xd = WeylElement::monomial(&[1], &[1], q(1));
        assert_eq!(d.mul(&x), xd.add(&WeylElement::constant(1, q(1))));
        assert_eq!(x.mul(&d), xd);
        // d^2 x = x d^2 + 2 d
        let d2 = d.mul(&d);
        let want = WeylElement::monomial(&[1], &[2], q(1)).add(&d.scale(&q(2)));
        assert_eq!(d2.mul(&x), want);
    }

    #[test]
    fn v_degrees() {
        assert_eq!(WeylElement::monomial(&[1], &[1], q(1)).v_degree(), Some(0));
        assert_eq!(WeylElement::d(2, 0).v_degree(), Some(-1));
        let f = WeylElement::monomial(&[2], &[1], q(1)).add(&WeylElement::x(1, 0));
        assert_eq!(f.v_degree(), Some(1));
        assert_eq!(WeylElement::zero(1).v_degree(), None);
    }

    #[test]
    fn homogenized_relation() {
        let alg = Algebra::weyl_h(1);
        let ord = Order::degrevlex(alg.nv);
        let x = elem_of(&ord, &[(1, &[(0, 1)])]);
        let d = elem_of(&ord, &[(1, &[(1, 1)])]);
        let p = mul(&alg, &ord, &d, &x);
        let want = elem_of(&ord, &[(1, &[(0, 1), (1, 1)]), (1, &[(2, 2)])]);
        assert_eq!(p, want);
    }

    #[test]
    fn shift_relation() {
        // s dt = dt (s + 1)
        let alg = Algebra::bm(0);
        let ord = Order::degrevlex(alg.nv);
        let s = elem_of(&ord, &[(1, &[(1, 1)])]);
        let dt = elem_of(&ord, &[(1, &[(0, 1)])]);
        let p = mul(&alg, &ord, &s, &dt);
        let want = elem_of(&ord, &[(1, &[(0, 1), (1, 1)]), (1, &[(0, 1)])]);
        assert_eq!(p, want);
        // s^2 dt^2 = dt^2 (s+2)^2
        let s2 = mul(&alg, &ord, &s, &s);
        let dt2 = mul(&alg, &ord, &dt, &dt);
        let p = mul(&alg, &ord, &s2, &dt2);
        let want = elem_of(&ord, &[(1, &[(0, 2), (1, 2)]), (4, &[(0, 2), (1, 1)]), (4, &[(0, 2)])]);
        assert_eq!(p, want);
    }

    #[test]
    fn gb_single_monomial() {
        let alg = Algebra::weyl(1);
        let ord = Order::degrevlex(2);
        let x = elem_of(&ord, &[(1, &[(0, 1)])]);
        let g = groebner(&alg, &ord, std::slice::from_ref(&x), None, &GbOptions::default()).unwrap();
        assert_eq!(g.basis, vec![x]);
    }

    #[test]
    fn gb_two_derivatives() {
        let alg = Algebra::weyl(2);
        let ord = Order::degrevlex(4);
        let d1 = elem_of(&ord, &[(1, &[(2, 1)])]);
        let d2 = elem_of(&ord, &[(1, &[(3, 1)])]);
        let g = groebner(&alg, &ord, &[d1.clone(), d2.clone()], None, &GbOptions::default()).unwrap();
        assert_eq!(g.basis.len(), 2);
        assert!(g.basis.contains(&d1) && g.basis.contains(&d2));
    }

    #[test]
    fn gb_xd_plus_one_and_x_squared() {
        // By hand: d*x^2 = x^2 d + 2x and x*(xd+1) = x^2 d + x, so x lies in
        // the ideal; xd + 1 = d*x, hence the ideal is D*x.
        let alg = Algebra::weyl(1);
        let ord = Order::degrevlex(2);
        let a = elem_of(&ord, &[(1, &[(0, 1), (1, 1)]), (1, &[])]);
        let b = elem_of(&ord, &[(1, &[(0, 2)])]);
        let g = groebner(&alg, &ord, &[a, b], None, &GbOptions::default()).unwrap();
        assert_eq!(g.basis, vec![elem_of(&ord, &[(1, &[(0, 1)])])]);
    }

    #[test]
    fn gb_tracks_representations() {
        let alg = Algebra::weyl(1);
        let ord = Order::degrevlex(2);
        let rep_ord = Order::degrevlex(2);
        let a = elem_of(&ord, &[(1, &[(0, 1), (1, 1)]), (1, &[])]);
        let b = elem_of(&ord, &[(1, &[(0, 2)])]);
        let reps = [Elem::mono([0; MAXV], 0, Z::one()), Elem::mono([0; MAXV], 1, Z::one())];
        let g = groebner(&alg, &ord, &[a.clone(), b.clone()], Some((&reps, &rep_ord)), &GbOptions::default())
            .unwrap();
        let r = &g.reps.unwrap()[0];
        let comps = r.components(&ord, 2);
        let lhs = mul(&alg, &ord, &comps[0], &a).add(&mul(&alg, &ord, &comps[1], &b), &ord);
        assert_eq!(lhs, g.basis[0]);
    }

    #[test]
    fn syzygies_vanish() {
        let alg = Algebra::weyl(2);
        let ord = Order::degrevlex(4);
        // x1 d1 + 1, x2 d2 + 1, plus d1 d2 x1 x2 type relation
        let a = elem_of(&ord, &[(1, &[(0, 1), (2, 1)]), (1, &[])]);
        let b = elem_of(&ord, &[(1, &[(1, 1), (3, 1)]), (1, &[])]);
        let g = groebner(&alg, &ord, &[a, b], None, &GbOptions::default()).unwrap();
        let syz_ord = Order::degrevlex(4);
        let syz = schreyer_syzygies(&alg, &ord, &syz_ord, &g.basis);
        assert!(!syz.is_empty());
        for s in &syz {
            let comps = s.components(&ord, g.basis.len());
            let mut acc = Elem::zero();
            for (c, gb) in comps.iter().zip(&g.basis) {
                acc = acc.add(&mul(&alg, &ord, c, gb), &ord);
            }
            assert!(acc.is_zero());
        }
    }

    #[test]
    fn generators_reduce_to_zero() {
        let alg = Algebra::weyl(2);
        let ord = Order::degrevlex(4);
        let gens = [
            elem_of(&ord, &[(1, &[(0, 1), (3, 1)]), (-1, &[(1, 1), (2, 1)])]),
            elem_of(&ord, &[(1, &[(0, 1), (2, 1)]), (1, &[(1, 1), (3, 1)]), (4, &[])]),
        ];
        let g = groebner(&alg, &ord, &gens, None, &GbOptions::default()).unwrap();
        for f in &gens {
            assert!(reduces_to_zero(&alg, &ord, f, &g.basis));
        }
    }
}
