//! Commutative polynomials over Q, a small parser, chart dehomogenization and
//! localized fractions `g / F^k`.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::rat::{fmt_q, primitive_ints, q, Q};

pub type Mono = Vec<u32>;

/// Polynomial in `nvars` variables. Terms are kept in a lex-ordered map.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Poly {
    pub nvars: usize,
    pub terms: BTreeMap<Mono, Q>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Q) -> Self {
        let mut p = Poly::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Q::one())
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(e, Q::one())
    }

    pub fn monomial(e: Mono, c: Q) -> Self {
        let mut p = Poly::zero(e.len());
        if !c.is_zero() {
            p.terms.insert(e, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&x| x == 0))
    }

    pub fn constant_value(&self) -> Option<Q> {
        if self.is_zero() {
            return Some(Q::zero());
        }
        if self.is_constant() {
            return self.terms.values().next().cloned();
        }
        None
    }

    pub fn is_one(&self) -> bool {
        self.constant_value().is_some_and(|c| c.is_one())
    }

    pub fn coeff(&self, e: &[u32]) -> Q {
        self.terms.get(e).cloned().unwrap_or_else(Q::zero)
    }

    fn add_term(&mut self, e: Mono, c: Q) {
        if c.is_zero() {
            return;
        }
        use alloc::collections::btree_map::Entry;
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), -c.clone());
        }
        out
    }

    pub fn neg(&self) -> Poly {
        self.scale(&q(-1))
    }

    pub fn scale(&self, c: &Q) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, x)| (e.clone(), x * c)).collect(),
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Mono = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }

    pub fn mul_mono(&self, m: &[u32], c: &Q) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, x)| (e.iter().zip(m).map(|(a, b)| a + b).collect(), x * c))
                .collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut acc = Poly::one(self.nvars);
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut it = self.terms.keys().map(|e| e.iter().sum::<u32>());
        match it.next() {
            None => true,
            Some(d) => it.all(|x| x == d),
        }
    }

    pub fn derivative(&self, i: usize) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[i] > 0 {
                let mut e2 = e.clone();
                e2[i] -= 1;
                out.add_term(e2, c * Q::from_integer(e[i].into()));
            }
        }
        out
    }

    /// Lex-leading term (last key of the map).
    pub fn leading(&self) -> Option<(&Mono, &Q)> {
        self.terms.iter().next_back()
    }

    /// Exact quotient `self / d`, or `None` when `d` does not divide.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        let (ld, lc) = d.leading()?;
        let (ld, lc) = (ld.clone(), lc.clone());
        let mut r = self.clone();
        let mut quo = Poly::zero(self.nvars);
        while let Some((lr, cr)) = r.leading() {
            if !lr.iter().zip(&ld).all(|(a, b)| a >= b) {
                return None;
            }
            let m: Mono = lr.iter().zip(&ld).map(|(a, b)| a - b).collect();
            let c = cr / &lc;
            r = r.sub(&d.mul_mono(&m, &c));
            quo.add_term(m, c);
        }
        Some(quo)
    }

    /// Primitive integral multiple with positive lex-leading coefficient.
    pub fn primitive(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let (ints, _) = primitive_ints(self.terms.values());
        let mut out = Poly {
            nvars: self.nvars,
            terms: self.terms.keys().cloned().zip(ints.into_iter().map(Q::from_integer)).collect(),
        };
        if out.leading().is_some_and(|(_, c)| c.is_negative()) {
            out = out.neg();
        }
        out
    }

    /// Evaluates with each variable replaced by a polynomial (all in the same
    /// target ring).
    pub fn compose(&self, images: &[Poly], target_n: usize) -> Poly {
        let mut out = Poly::zero(target_n);
        let mut cache: BTreeMap<(usize, u32), Poly> = BTreeMap::new();
        for (e, c) in &self.terms {
            let mut t = Poly::constant(target_n, c.clone());
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    let p = cache.entry((i, k)).or_insert_with(|| images[i].pow(k)).clone();
                    t = t.mul(&p);
                }
            }
            out = out.add(&t);
        }
        out
    }

    /// Substitutes each variable by a Laurent monomial `z^{images[i]}` in
    /// `target_n` variables. Returns `(num, m)` with result `num / z^m`.
    pub fn map_laurent(&self, images: &[Vec<i32>], target_n: usize) -> (Poly, Mono) {
        let mut raw: Vec<(Vec<i64>, Q)> = Vec::new();
        for (e, c) in &self.terms {
            let mut v = vec![0i64; target_n];
            for (i, &k) in e.iter().enumerate() {
                for l in 0..target_n {
                    v[l] += k as i64 * images[i][l] as i64;
                }
            }
            raw.push((v, c.clone()));
        }
        let mut m = vec![0u32; target_n];
        for (v, _) in &raw {
            for l in 0..target_n {
                if v[l] < 0 {
                    m[l] = m[l].max((-v[l]) as u32);
                }
            }
        }
        let mut out = Poly::zero(target_n);
        for (v, c) in raw {
            let e: Mono = v.iter().zip(&m).map(|(a, b)| (a + *b as i64) as u32).collect();
            out.add_term(e, c);
        }
        (out, m)
    }

    /// Embeds into a ring with more variables, variable `i` going to `slots[i]`.
    pub fn embed(&self, target_n: usize, slots: &[usize]) -> Poly {
        let mut out = Poly::zero(target_n);
        for (e, c) in &self.terms {
            let mut e2 = vec![0; target_n];
            for (i, &k) in e.iter().enumerate() {
                e2[slots[i]] += k;
            }
            out.add_term(e2, c.clone());
        }
        out
    }

    pub fn fmt_with(&self, names: &[String]) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut s = String::new();
        // print in descending degree, then descending lex
        let mut terms: Vec<(&Mono, &Q)> = self.terms.iter().collect();
        terms.sort_by(|a, b| {
            let da: u32 = a.0.iter().sum();
            let db: u32 = b.0.iter().sum();
            db.cmp(&da).then(b.0.cmp(a.0))
        });
        for (k, (e, c)) in terms.into_iter().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if k == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { "-" } else { "+" });
            }
            let mono = fmt_mono(e, names);
            if mono.is_empty() {
                s.push_str(&fmt_q(&a));
            } else {
                if !a.is_one() {
                    s.push_str(&fmt_q(&a));
                    s.push('*');
                }
                s.push_str(&mono);
            }
        }
        s
    }
}

fn fmt_mono(e: &[u32], names: &[String]) -> String {
    let mut s = String::new();
    for (i, &k) in e.iter().enumerate() {
        if k == 0 {
            continue;
        }
        if !s.is_empty() {
            s.push('*');
        }
        s.push_str(&names[i]);
        if k > 1 {
            let _ = write!(s, "^{}", k);
        }
    }
    s
}

/// Default variable names `x0, x1, ...`.
pub fn default_names(n: usize) -> Vec<String> {
    (0..n).map(|i| alloc::format!("x{}", i)).collect()
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("polynomial is not homogeneous")]
    NotHomogeneous,
    #[error("chart index {0} out of range")]
    BadChart(usize),
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    names: &'a [String],
}

impl Parser<'_> {
    fn err<T>(&self, msg: &str) -> Result<T, PolyError> {
        Err(PolyError::Parse { pos: self.pos, msg: msg.to_string() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && (self.src[self.pos] as char).is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Poly, PolyError> {
        let n = self.names.len();
        let mut acc = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                self.term()?.neg()
            }
            Some(b'+') => {
                self.pos += 1;
                self.term()?
            }
            _ => self.term()?,
        };
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?);
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = acc.sub(&self.term()?);
                }
                _ => break,
            }
        }
        debug_assert_eq!(acc.nvars, n);
        Ok(acc)
    }

    fn term(&mut self) -> Result<Poly, PolyError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    acc = acc.mul(&self.factor()?);
                }
                Some(b'/') => {
                    self.pos += 1;
                    let at = self.pos;
                    let d = self.factor()?;
                    match d.constant_value() {
                        Some(c) if !c.is_zero() => acc = acc.scale(&(Q::one() / c)),
                        _ => {
                            return Err(PolyError::Parse {
                                pos: at,
                                msg: "division only by nonzero constants".to_string(),
                            })
                        }
                    }
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Poly, PolyError> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if start == self.pos {
                return self.err("expected exponent");
            }
            let s = core::str::from_utf8(&self.src[start..self.pos]).unwrap();
            let k: u32 = match s.parse() {
                Ok(k) => k,
                Err(_) => {
                    self.pos = start;
                    return self.err("exponent too large");
                }
            };
            return Ok(base.pow(k));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Poly, PolyError> {
        let n = self.names.len();
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return self.err("expected ')'");
                }
                self.pos += 1;
                Ok(e)
            }
            Some(b'-') => {
                self.pos += 1;
                Ok(self.factor()?.neg())
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let s = core::str::from_utf8(&self.src[start..self.pos]).unwrap();
                let v: num_bigint::BigInt = s.parse().unwrap();
                Ok(Poly::constant(n, Q::from_integer(v)))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let s = core::str::from_utf8(&self.src[start..self.pos]).unwrap();
                match self.names.iter().position(|v| v == s) {
                    Some(i) => Ok(Poly::var(n, i)),
                    None => {
                        self.pos = start;
                        self.err(&alloc::format!("unknown variable '{}'", s))
                    }
                }
            }
            Some(_) => self.err("unexpected character"),
            None => self.err("unexpected end of input"),
        }
    }
}

/// Parses a polynomial over the declared variable names.
pub fn parse_poly(src: &str, names: &[String]) -> Result<Poly, PolyError> {
    let mut p = Parser { src: src.as_bytes(), pos: 0, names };
    let out = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return p.err("trailing input");
    }
    Ok(out)
}

/// `f(x_0/x_j, ..., 1, ..., x_n/x_j)` as a polynomial in the `n` remaining
/// variables (in increasing index order).
pub fn dehomogenize(f: &Poly, j: usize) -> Result<Poly, PolyError> {
    if !f.is_homogeneous() {
        return Err(PolyError::NotHomogeneous);
    }
    if j >= f.nvars {
        return Err(PolyError::BadChart(j));
    }
    let n = f.nvars - 1;
    let mut out = Poly::zero(n);
    for (e, c) in &f.terms {
        let e2: Mono = e.iter().enumerate().filter(|(i, _)| *i != j).map(|(_, &k)| k).collect();
        out.add_term(e2, c.clone());
    }
    Ok(out)
}

/// Inverse of [`dehomogenize`] up to a power of `x_j`: returns the
/// homogenization of degree `deg` (must be at least the total degree).
pub fn rehomogenize(g: &Poly, j: usize, deg: u32) -> Poly {
    let n = g.nvars + 1;
    let mut out = Poly::zero(n);
    for (e, c) in &g.terms {
        let d: u32 = e.iter().sum();
        let mut e2 = Vec::with_capacity(n);
        let mut it = e.iter();
        for i in 0..n {
            if i == j {
                e2.push(deg - d);
            } else {
                e2.push(*it.next().unwrap());
            }
        }
        out.add_term(e2, c.clone());
    }
    out
}

/// Element `num / base^power` of `R[base^{-1}]`.
#[derive(Clone, Debug)]
pub struct LocalFraction {
    pub num: Poly,
    pub base: Arc<Poly>,
    pub power: u32,
}

impl PartialEq for LocalFraction {
    fn eq(&self, other: &Self) -> bool {
        let k = self.power.max(other.power);
        let a = self.num.mul(&self.base.pow(k - self.power));
        let b = other.num.mul(&other.base.pow(k - other.power));
        a == b
    }
}

impl LocalFraction {
    pub fn new(num: Poly, base: Arc<Poly>, power: u32) -> Self {
        let mut f = LocalFraction { num, base, power };
        f.canonicalize();
        f
    }

    pub fn poly(num: Poly, base: Arc<Poly>) -> Self {
        Self::new(num, base, 0)
    }

    pub fn zero(base: Arc<Poly>) -> Self {
        let n = base.nvars;
        LocalFraction { num: Poly::zero(n), base, power: 0 }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn canonicalize(&mut self) {
        if self.num.is_zero() {
            self.power = 0;
            return;
        }
        if self.base.is_constant() && self.power > 0 {
            let c = self.base.constant_value().unwrap();
            let mut s = Q::one();
            for _ in 0..self.power {
                s /= &c;
            }
            self.num = self.num.scale(&s);
            self.power = 0;
            return;
        }
        while self.power > 0 {
            match self.num.div_exact(&self.base) {
                Some(qt) => {
                    self.num = qt;
                    self.power -= 1;
                }
                None => break,
            }
        }
    }

    fn lift(&self, k: u32) -> Poly {
        self.num.mul(&self.base.pow(k - self.power))
    }

    pub fn add(&self, other: &LocalFraction) -> LocalFraction {
        debug_assert!(self.base == other.base);
        let k = self.power.max(other.power);
        LocalFraction::new(self.lift(k).add(&other.lift(k)), self.base.clone(), k)
    }

    pub fn sub(&self, other: &LocalFraction) -> LocalFraction {
        let k = self.power.max(other.power);
        LocalFraction::new(self.lift(k).sub(&other.lift(k)), self.base.clone(), k)
    }

    pub fn neg(&self) -> LocalFraction {
        LocalFraction { num: self.num.neg(), base: self.base.clone(), power: self.power }
    }

    pub fn scale(&self, c: &Q) -> LocalFraction {
        let mut out =
            LocalFraction { num: self.num.scale(c), base: self.base.clone(), power: self.power };
        if out.num.is_zero() {
            out.power = 0;
        }
        out
    }

    pub fn mul(&self, other: &LocalFraction) -> LocalFraction {
        LocalFraction::new(self.num.mul(&other.num), self.base.clone(), self.power + other.power)
    }

    pub fn mul_poly(&self, p: &Poly) -> LocalFraction {
        LocalFraction::new(self.num.mul(p), self.base.clone(), self.power)
    }

    /// Partial derivative with respect to variable `i`.
    pub fn derivative(&self, i: usize) -> LocalFraction {
        if self.power == 0 {
            return LocalFraction::new(self.num.derivative(i), self.base.clone(), 0);
        }
        // (g' F - k g F') / F^{k+1}
        let k = Q::from_integer(self.power.into());
        let t1 = self.num.derivative(i).mul(&self.base);
        let t2 = self.num.mul(&self.base.derivative(i)).scale(&k);
        LocalFraction::new(t1.sub(&t2), self.base.clone(), self.power + 1)
    }

    /// Re-expresses over a base that is a multiple of the current one.
    pub fn rebase(&self, new_base: Arc<Poly>) -> Option<LocalFraction> {
        if self.power == 0 {
            return Some(LocalFraction::new(self.num.clone(), new_base, 0));
        }
        let cof = new_base.div_exact(&self.base)?;
        Some(LocalFraction::new(
            self.num.mul(&cof.pow(self.power)),
            new_base,
            self.power,
        ))
    }

    pub fn fmt_with(&self, names: &[String]) -> String {
        if self.power == 0 {
            return self.num.fmt_with(names);
        }
        let d = if self.power == 1 {
            alloc::format!("({})", self.base.fmt_with(names))
        } else {
            alloc::format!("({})^{}", self.base.fmt_with(names), self.power)
        };
        alloc::format!("({})/{}", self.num.fmt_with(names), d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::qf;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn parse_and_print() {
        let n = names(&["x", "y", "z"]);
        let f = parse_poly("x^2 + y*z", &n).unwrap();
        assert_eq!(f.fmt_with(&n), "x^2+y*z");
        let g = parse_poly(" (x - 1)*(x+1) - 3/2*y", &n).unwrap();
        assert_eq!(g.fmt_with(&n), "x^2-3/2*y-1");
        assert!(matches!(parse_poly("x + w", &n), Err(PolyError::Parse { pos: 4, .. })));
        assert!(parse_poly("x +", &n).is_err());
        assert!(parse_poly("x/y", &n).is_err());
    }

    #[test]
    fn dehomogenize_quadric() {
        let n = names(&["x", "y", "z"]);
        let f = parse_poly("x^2+y*z", &n).unwrap();
        let s = names(&["s", "t"]);
        assert_eq!(dehomogenize(&f, 2).unwrap(), parse_poly("s^2+t", &s).unwrap());
        // chart x: variables y/x, z/x
        let yz = names(&["u", "v"]);
        assert_eq!(dehomogenize(&f, 0).unwrap(), parse_poly("1+u*v", &yz).unwrap());
        let x0 = Poly::var(3, 0);
        assert!(dehomogenize(&x0, 0).unwrap().is_one());
        assert_eq!(dehomogenize(&parse_poly("x+y^2", &n).unwrap(), 0), Err(PolyError::NotHomogeneous));
    }

    #[test]
    fn rehomogenize_roundtrip() {
        let n = names(&["x", "y", "z"]);
        let f = parse_poly("x^2*y+y^2*z+z^2*x", &n).unwrap();
        for j in 0..3 {
            let g = dehomogenize(&f, j).unwrap();
            assert_eq!(rehomogenize(&g, j, 3), f);
        }
    }

    #[test]
    fn fractions() {
        let x = Arc::new(Poly::var(1, 0));
        let a = LocalFraction::new(Poly::one(1), x.clone(), 1);
        let b = LocalFraction::new(Poly::var(1, 0).sub(&Poly::one(1)), x.clone(), 1);
        let s = a.add(&b);
        assert_eq!(s.power, 0);
        assert!(s.num.is_one());
        let p = a.mul(&a);
        assert_eq!(p.power, 2);
        let g = LocalFraction::poly(Poly::var(1, 0), x.clone());
        assert_eq!(g.power, 0);
        // d(1/x^2) = -2/x^3
        let inv2 = LocalFraction::new(Poly::one(1), x.clone(), 2);
        let d = inv2.derivative(0);
        assert_eq!(d.power, 3);
        assert_eq!(d.num, Poly::constant(1, q(-2)));
    }

    #[test]
    fn exact_division() {
        let n = names(&["x", "y"]);
        let f = parse_poly("x^2-y^2", &n).unwrap();
        let d = parse_poly("x+y", &n).unwrap();
        assert_eq!(f.div_exact(&d).unwrap(), parse_poly("x-y", &n).unwrap());
        assert!(f.div_exact(&parse_poly("x+2*y", &n).unwrap()).is_none());
        assert_eq!(
            parse_poly("x/2", &n).unwrap().scale(&q(2)),
            parse_poly("x", &n).unwrap()
        );
        let _ = qf(1, 2);
    }

    #[test]
    fn laurent_map() {
        // s -> a/b, t -> b : s^2 t + 1 = a^2/b + 1 = (a^2 + b)/b
        let n = names(&["s", "t"]);
        let f = parse_poly("s^2*t+1", &n).unwrap();
        let (num, m) = f.map_laurent(&[vec![1, -1], vec![0, 1]], 2);
        assert_eq!(m, vec![0, 1]);
        assert_eq!(num, parse_poly("s^2+t", &n).unwrap());
    }
}
