//! Gluing affine pieces into cohomology of open subsets of smooth complete
//! toric varieties (projective space included).
//!
//! A variety is described by a smooth fan in Cox coordinates; the open set
//! `U = X \ Var(f_0, ..., f_r)` is covered by `U_σ ∩ D(f_k)`. The Čech
//! complex of this cover is modelled by nodes `(I, K)` with `I` a set of
//! maximal cones and `K` a set of divisor labels, both nonempty.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::exactla::{rank_kernel, RatMatrix, SparseVec, Subquotient};
use crate::forms::{
    enlarge_subcomplex, masks_of_size, translate_chart, ChartMap, DiffForm, FormError, Subcomplex,
};
use crate::integrate::{integrate_cohomology, IntegrateError, IntegrateOptions};
use crate::poly::{LocalFraction, Mono, Poly};
use crate::rat::{binomial, Q};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GlueError {
    #[error("cone {0} is not smooth")]
    NotSmooth(usize),
    #[error("cone {0} does not have exactly as many rays as the dimension")]
    BadCone(usize),
    #[error("polynomial {0} is not homogeneous for the fan grading")]
    NotHomogeneous(usize),
    #[error("polynomial {0} is zero")]
    ZeroDivisor(usize),
    #[error("polynomial {0} has the wrong number of variables")]
    WrongArity(usize),
    #[error("at node {node}: {source}")]
    Integrate { node: String, source: IntegrateError },
    #[error("at node {node}: {source}")]
    Form { node: String, source: FormError },
    #[error("restriction from {from} to {to} leaves the target subcomplex")]
    NotNested { from: String, to: String },
    #[error("cochain is not a cocycle")]
    NotCocycle,
    #[error("Chern cocycles are only defined on projective space")]
    NotProjective,
}

/// Smooth fan with maximal cones listed as ordered ray tuples. Chart
/// coordinate `l` on cone `c` is the character dual to ray `cones[c][l]`.
#[derive(Clone, Debug)]
pub struct ChartAtlas {
    pub dim: usize,
    pub rays: Vec<Vec<i64>>,
    pub cones: Vec<Vec<usize>>,
    pub cone_names: Vec<String>,
    pub cox_names: Vec<String>,
    pub projective: bool,
    duals: Vec<Vec<Vec<i64>>>,
}

/// Inverse of a square integer matrix, if it is unimodular.
fn unimodular_inverse(m: &[Vec<i64>]) -> Option<Vec<Vec<i64>>> {
    let n = m.len();
    let mut a: Vec<Vec<Q>> = m
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row: Vec<Q> = r.iter().map(|&x| Q::from_integer(x.into())).collect();
            row.extend((0..n).map(|j| if i == j { Q::one() } else { Q::zero() }));
            row
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        let inv = a[col][col].recip();
        for x in a[col].iter_mut() {
            *x *= &inv;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for k in 0..2 * n {
                    let t = &a[col][k] * &f;
                    a[r][k] -= t;
                }
            }
        }
    }
    let mut out = vec![vec![0i64; n]; n];
    for i in 0..n {
        for j in 0..n {
            let v = &a[i][n + j];
            if !v.is_integer() {
                return None;
            }
            out[i][j] = i64::try_from(v.to_integer()).ok()?;
        }
    }
    Some(out)
}

impl ChartAtlas {
    pub fn new(
        rays: Vec<Vec<i64>>,
        cones: Vec<Vec<usize>>,
        cone_names: Vec<String>,
        cox_names: Vec<String>,
    ) -> Result<Self, GlueError> {
        let dim = rays.first().map_or(0, |r| r.len());
        let mut duals = Vec::new();
        for (c, cone) in cones.iter().enumerate() {
            if cone.len() != dim || cone.iter().any(|&r| r >= rays.len()) {
                return Err(GlueError::BadCone(c));
            }
            let m: Vec<Vec<i64>> = cone.iter().map(|&r| rays[r].clone()).collect();
            // rows of the inverse's transpose pair to the identity with the rays
            let inv = unimodular_inverse(&m).ok_or(GlueError::NotSmooth(c))?;
            let dual: Vec<Vec<i64>> = (0..dim).map(|l| (0..dim).map(|k| inv[k][l]).collect()).collect();
            duals.push(dual);
        }
        Ok(ChartAtlas { dim, rays, cones, cone_names, cox_names, projective: false, duals })
    }

    /// Projective `n`-space; ray `i` corresponds to the homogeneous
    /// coordinate `x_i` and cone `j` to the chart `x_j ≠ 0`.
    pub fn projective(n: usize, names: &[String]) -> Self {
        let mut rays = vec![vec![-1i64; n]];
        for i in 0..n {
            let mut e = vec![0i64; n];
            e[i] = 1;
            rays.push(e);
        }
        let cones = (0..=n).map(|j| (0..=n).filter(|&i| i != j).collect()).collect();
        let cone_names = (0..=n).map(|j| j.to_string()).collect();
        let mut a = Self::new(rays, cones, cone_names, names.to_vec()).expect("projective fan is smooth");
        a.projective = true;
        a
    }

    pub fn num_charts(&self) -> usize {
        self.cones.len()
    }

    /// `<m^c_l, v_τ>`: exponent of Cox variable `τ` in chart coordinate `l`.
    pub fn pairing(&self, c: usize, l: usize, tau: usize) -> i64 {
        self.duals[c][l].iter().zip(&self.rays[tau]).map(|(a, b)| a * b).sum()
    }

    /// Chart coordinates of `c` written in those of `c2`.
    pub fn transition(&self, c: usize, c2: usize) -> ChartMap {
        let images = (0..self.dim)
            .map(|l| self.cones[c2].iter().map(|&tau| self.pairing(c, l, tau) as i32).collect())
            .collect();
        ChartMap { src_n: self.dim, dst_n: self.dim, images }
    }

    /// Sets Cox variables outside the cone to one.
    pub fn dehomogenize(&self, f: &Poly, c: usize) -> Poly {
        let mut out = Poly::zero(self.dim);
        for (e, coef) in &f.terms {
            let e2: Mono = self.cones[c].iter().map(|&tau| e[tau]).collect();
            out = out.add(&Poly::monomial(e2, coef.clone()));
        }
        out
    }

    /// Whether all monomials of `f` differ by characters.
    pub fn is_homogeneous(&self, f: &Poly) -> bool {
        let mut it = f.terms.keys();
        let Some(first) = it.next() else { return true };
        for e in it {
            let d: Vec<i64> = e.iter().zip(first).map(|(a, b)| *a as i64 - *b as i64).collect();
            let m: Vec<i64> = (0..self.dim)
                .map(|k| (0..self.dim).map(|l| d[self.cones[0][l]] * self.duals[0][l][k]).sum())
                .collect();
            for (tau, v) in self.rays.iter().enumerate() {
                let p: i64 = m.iter().zip(v).map(|(a, b)| a * b).sum();
                if p != d[tau] {
                    return false;
                }
            }
        }
        true
    }

    /// Positions of chart coordinates of `cones[0]` that must be inverted to
    /// cut out the intersection of the given cones.
    pub fn inverted(&self, cones: &[usize]) -> Vec<usize> {
        let c0 = cones[0];
        let face: BTreeSet<usize> = self.cones[c0]
            .iter()
            .copied()
            .filter(|r| cones.iter().all(|&c| self.cones[c].contains(r)))
            .collect();
        (0..self.dim).filter(|&l| !face.contains(&self.cones[c0][l])).collect()
    }

    /// Display names of the chart coordinates as Cox Laurent monomials.
    pub fn chart_names(&self, c: usize) -> Vec<String> {
        (0..self.dim)
            .map(|l| {
                let mut num = String::new();
                let mut den = String::new();
                for tau in 0..self.rays.len() {
                    let p = self.pairing(c, l, tau);
                    let s = if p.abs() == 1 {
                        self.cox_names[tau].clone()
                    } else {
                        format!("{}^{}", self.cox_names[tau], p.abs())
                    };
                    let tgt = if p > 0 { &mut num } else if p < 0 { &mut den } else { continue };
                    if !tgt.is_empty() {
                        tgt.push('*');
                    }
                    tgt.push_str(&s);
                }
                if num.is_empty() {
                    num.push('1');
                }
                if den.is_empty() {
                    num
                } else if den.contains('*') {
                    format!("{num}/({den})")
                } else {
                    format!("{num}/{den}")
                }
            })
            .collect()
    }
}

/// Index of an open set `∩_{σ∈outer} U_σ ∩ ∩_{k∈inner} D(f_k)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Node {
    pub outer: Vec<usize>,
    pub inner: Vec<usize>,
}

impl Node {
    pub fn cech_degree(&self) -> usize {
        self.outer.len() + self.inner.len() - 2
    }

    fn size(&self) -> usize {
        self.outer.len() + self.inner.len()
    }
}

/// Sign of the Čech restriction from `from` to `to`, which has one more label.
fn insertion_sign(from: &Node, to: &Node) -> i32 {
    let pos = if to.outer.len() > from.outer.len() {
        to.outer.iter().position(|x| !from.outer.contains(x)).unwrap()
    } else {
        to.outer.len() + to.inner.iter().position(|x| !from.inner.contains(x)).unwrap()
    };
    // positions counted from one
    if pos % 2 == 0 {
        -1
    } else {
        1
    }
}

/// Affine input for one node: the cohomology dimensions of the chart, the
/// exponent of the cyclic generator and closed forms spanning cohomology.
#[derive(Clone, Debug, PartialEq)]
pub struct NodeSeed {
    pub targets: Vec<usize>,
    pub power: u32,
    pub classes: Vec<DiffForm>,
}

/// Identifies a node for a [`SeedStore`]: its name, the defining
/// polynomial in chart coordinates and those coordinates written in Cox
/// variables.
#[derive(Clone, Copy, Debug)]
pub struct SeedKey<'a> {
    pub name: &'a str,
    pub base: &'a Poly,
    pub coords: &'a [String],
}

/// External storage for node seeds, consulted before integrating a chart.
pub trait SeedStore: Send + Sync {
    fn load(&self, key: &SeedKey<'_>) -> Option<NodeSeed>;
    fn store(&self, key: &SeedKey<'_>, seed: &NodeSeed);
}

#[derive(Clone)]
pub struct GlueOptions {
    pub integrate: IntegrateOptions,
    /// Highest exhaustion level tried when enlarging a chart subcomplex.
    pub max_level: u32,
    /// Integrate charts on a thread pool (needs the `parallel` feature).
    pub parallel: bool,
    pub store: Option<Arc<dyn SeedStore>>,
}

impl core::fmt::Debug for GlueOptions {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("GlueOptions")
            .field("integrate", &self.integrate)
            .field("max_level", &self.max_level)
            .field("parallel", &self.parallel)
            .field("store", &self.store.is_some())
            .finish()
    }
}

impl Default for GlueOptions {
    fn default() -> Self {
        GlueOptions { integrate: IntegrateOptions::default(), max_level: 12, parallel: false, store: None }
    }
}

/// Per-node data: chart, defining polynomial and finite subcomplex.
#[derive(Clone, Debug)]
pub struct NodeData {
    pub node: Node,
    pub chart: usize,
    pub base: Arc<Poly>,
    pub targets: Vec<usize>,
    pub sub: Subcomplex,
    pub seed: NodeSeed,
    /// Largest exhaustion level used when enlarging, if any.
    pub level: Option<u32>,
}

/// Cochain in the Čech–de Rham total complex: one form per node.
#[derive(Clone, Debug)]
pub struct Cochain {
    pub degree: usize,
    pub comps: BTreeMap<Node, DiffForm>,
}

impl Cochain {
    pub fn zero(degree: usize) -> Self {
        Cochain { degree, comps: BTreeMap::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.comps.values().all(|w| w.is_zero())
    }

    pub fn add(&self, other: &Cochain) -> Cochain {
        let mut out = self.clone();
        for (k, w) in &other.comps {
            let e = match out.comps.remove(k) {
                Some(prev) => prev.add(w),
                None => w.clone(),
            };
            out.comps.insert(k.clone(), e);
        }
        out.comps.retain(|_, w| !w.is_zero());
        out
    }

    pub fn scale(&self, c: &Q) -> Cochain {
        let mut out = Cochain::zero(self.degree);
        if c.is_zero() {
            return out;
        }
        for (k, w) in &self.comps {
            out.comps.insert(k.clone(), w.scale(c));
        }
        out
    }

    pub fn sub(&self, other: &Cochain) -> Cochain {
        self.add(&other.scale(&-Q::one()))
    }
}

/// Total complex over the nodes whose inner labels lie in a given set.
#[derive(Clone, Debug)]
pub struct TotalComplex {
    pub inner: Vec<usize>,
    pub nodes: Vec<usize>,
    /// Basis of each total degree: `(node index, form degree, basis index)`.
    pub cells: Vec<Vec<(usize, usize, usize)>>,
    /// `diffs[t]: C^t -> C^{t+1}`.
    pub diffs: Vec<RatMatrix>,
    offsets: BTreeMap<(usize, usize), (usize, usize)>,
}

impl TotalComplex {
    pub fn dims(&self) -> Vec<usize> {
        self.cells.iter().map(|c| c.len()).collect()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.cells.iter().enumerate().map(|(t, c)| if t % 2 == 0 { c.len() as i64 } else { -(c.len() as i64) }).sum()
    }

    pub fn d_squared_zero(&self) -> bool {
        self.diffs.windows(2).all(|w| w[1].mul(&w[0]).is_zero())
    }
}

/// Cohomology of a total complex with chosen representatives.
#[derive(Clone, Debug)]
pub struct BettiReport {
    pub betti: Vec<usize>,
    pub generators: Vec<Vec<Cochain>>,
    pub quotients: Vec<Subquotient>,
}

/// All chart data for an open subset of a smooth complete toric variety.
#[derive(Clone, Debug)]
pub struct Glued {
    pub atlas: ChartAtlas,
    pub divisors: Vec<Poly>,
    pub data: Vec<NodeData>,
    index: BTreeMap<Node, usize>,
    opts: GlueOptions,
}

fn single_term(p: &Poly) -> Option<Mono> {
    if p.terms.len() == 1 {
        p.terms.keys().next().cloned()
    } else {
        None
    }
}

fn subsets(n: usize) -> Vec<Vec<usize>> {
    (1u32..(1 << n)).map(|m| (0..n).filter(|i| m & (1 << i) != 0).collect()).collect()
}

impl Glued {
    /// Builds every node and propagates subcomplexes so that restriction
    /// maps land in the target subcomplexes. An empty divisor list means the
    /// whole variety.
    pub fn new(atlas: ChartAtlas, divisors: Vec<Poly>, opts: GlueOptions) -> Result<Self, GlueError> {
        let ncox = atlas.rays.len();
        for (k, f) in divisors.iter().enumerate() {
            if f.nvars != ncox {
                return Err(GlueError::WrongArity(k));
            }
            if f.is_zero() {
                return Err(GlueError::ZeroDivisor(k));
            }
            if !atlas.is_homogeneous(f) {
                return Err(GlueError::NotHomogeneous(k));
            }
        }
        let divisors = if divisors.is_empty() { vec![Poly::one(ncox)] } else { divisors };
        let mut nodes = Vec::new();
        for outer in subsets(atlas.num_charts()) {
            for inner in subsets(divisors.len()) {
                nodes.push(Node { outer: outer.clone(), inner });
            }
        }
        nodes.sort_by(|a, b| (a.size(), a).cmp(&(b.size(), b)));
        let mut g = Glued { atlas, divisors, data: Vec::new(), index: BTreeMap::new(), opts };
        for d in g.init_nodes(nodes)? {
            g.index.insert(d.node.clone(), g.data.len());
            g.data.push(d);
        }
        g.propagate()?;
        Ok(g)
    }

    pub fn dim(&self) -> usize {
        self.atlas.dim
    }

    pub fn node_name(&self, node: &Node) -> String {
        let mut s: String = node.outer.iter().map(|&c| self.atlas.cone_names[c].clone()).collect::<Vec<_>>().join(",");
        if self.divisors.len() > 1 {
            s.push('|');
            s.push_str(&node.inner.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(","));
        }
        s
    }

    pub fn node_index(&self, node: &Node) -> Option<usize> {
        self.index.get(node).copied()
    }

    fn node_base(&self, node: &Node) -> (usize, Poly, Vec<usize>) {
        let c = node.outer[0];
        let (base, inv) = self.base_parts(node, c);
        (c, base, inv)
    }

    /// Defining polynomial of a node's open set in the coordinates of one of
    /// its cones.
    pub fn base_in_chart(&self, node: &Node, c: usize) -> Poly {
        self.base_parts(node, c).0
    }

    fn base_parts(&self, node: &Node, c: usize) -> (Poly, Vec<usize>) {
        let n = self.dim();
        let mut order = vec![c];
        order.extend(node.outer.iter().copied().filter(|&o| o != c));
        let inv = self.atlas.inverted(&order);
        let factors = node
            .inner
            .iter()
            .map(|&k| self.atlas.dehomogenize(&self.divisors[k], c))
            .chain(inv.iter().map(|&l| Poly::var(n, l)));
        // factors already dividing the product do not change the open set
        let mut base = Poly::one(n);
        for h in factors {
            if h.is_constant() || base.div_exact(&h).is_some() {
                continue;
            }
            base = base.mul(&h);
        }
        (base, inv)
    }

    #[cfg(feature = "parallel")]
    fn init_nodes(&self, nodes: Vec<Node>) -> Result<Vec<NodeData>, GlueError> {
        if self.opts.parallel {
            use rayon::prelude::*;
            return nodes.into_par_iter().map(|n| self.init_node(n)).collect();
        }
        nodes.into_iter().map(|n| self.init_node(n)).collect()
    }

    #[cfg(not(feature = "parallel"))]
    fn init_nodes(&self, nodes: Vec<Node>) -> Result<Vec<NodeData>, GlueError> {
        nodes.into_iter().map(|n| self.init_node(n)).collect()
    }

    fn compute_seed(&self, name: &str, base: &Arc<Poly>) -> Result<NodeSeed, GlueError> {
        let n = self.dim();
        if let Some(mono) = single_term(base) {
            let vars: Vec<usize> = (0..n).filter(|&l| mono[l] > 0).collect();
            let targets: Vec<usize> = (0..=n)
                .map(|d| u32::try_from(binomial(vars.len() as u32, d as u32)).unwrap_or(0) as usize)
                .collect();
            let power = if vars.is_empty() { 0 } else { 1 };
            let mut classes = Vec::new();
            for d in 0..=vars.len() {
                for sel in masks_of_size(vars.len(), d) {
                    let mut mask = 0u32;
                    let mut den = vec![0u32; n];
                    for (i, &l) in vars.iter().enumerate() {
                        if sel & (1 << i) != 0 {
                            mask |= 1 << l;
                            den[l] = 1;
                        }
                    }
                    let num = base.div_exact(&Poly::monomial(den, Q::one())).unwrap();
                    classes.push(DiffForm::monomial(LocalFraction::new(num, base.clone(), 1), mask));
                }
            }
            return Ok(NodeSeed { targets, power, classes });
        }
        let ac = integrate_cohomology(base, &self.opts.integrate)
            .map_err(|e| GlueError::Integrate { node: name.to_string(), source: e })?;
        let mut classes = Vec::new();
        for cls in ac.classes.iter().flatten() {
            let w = cls
                .rebase(base.clone())
                .ok_or(GlueError::NotNested { from: name.to_string(), to: name.to_string() })?;
            classes.push(w);
        }
        Ok(NodeSeed { targets: ac.dims, power: ac.module.a, classes })
    }

    fn init_node(&self, node: Node) -> Result<NodeData, GlueError> {
        let n = self.dim();
        let (chart, base, _) = self.node_base(&node);
        let name = self.node_name(&node);
        let base = Arc::new(base);
        let coords = self.atlas.chart_names(chart);
        let key = SeedKey { name: &name, base: &base, coords: &coords };
        let cached = self.opts.store.as_ref().and_then(|st| st.load(&key));
        let seed = match cached {
            Some(seed) => seed,
            None => {
                let seed = self.compute_seed(&name, &base)?;
                if let Some(st) = &self.opts.store {
                    st.store(&key, &seed);
                }
                seed
            }
        };
        let gen = LocalFraction::new(Poly::one(n), base.clone(), seed.power);
        let mut sub = Subcomplex::new(base.clone(), gen);
        for w in &seed.classes {
            sub.add(w);
        }
        Ok(NodeData { node, chart, base, targets: seed.targets.clone(), sub, seed, level: None })
    }

    /// Transports a form from node `from` to the smaller open set `to`.
    pub fn restrict(&self, from: usize, to: usize, w: &DiffForm) -> Result<DiffForm, GlueError> {
        let (a, b) = (&self.data[from], &self.data[to]);
        let err = || GlueError::NotNested { from: self.node_name(&a.node), to: self.node_name(&b.node) };
        if a.chart == b.chart {
            if let Some(r) = w.rebase(b.base.clone()) {
                return Ok(r);
            }
            let id = ChartMap { src_n: self.dim(), dst_n: self.dim(), images: self.atlas.transition(a.chart, a.chart).images };
            translate_chart(w, &id, &b.base).map_err(|_| err())
        } else {
            let map = self.atlas.transition(a.chart, b.chart);
            translate_chart(w, &map, &b.base).map_err(|_| err())
        }
    }

    fn predecessors(&self, i: usize) -> Vec<usize> {
        let node = &self.data[i].node;
        let mut out = Vec::new();
        for k in 0..node.outer.len() {
            let mut m = node.clone();
            m.outer.remove(k);
            if let Some(&j) = self.index.get(&m) {
                out.push(j);
            }
        }
        for k in 0..node.inner.len() {
            let mut m = node.clone();
            m.inner.remove(k);
            if let Some(&j) = self.index.get(&m) {
                out.push(j);
            }
        }
        out
    }

    fn successors(&self, i: usize, inner: &[usize]) -> Vec<usize> {
        let node = &self.data[i].node;
        let mut out = Vec::new();
        for c in 0..self.atlas.num_charts() {
            if !node.outer.contains(&c) {
                let mut m = node.clone();
                m.outer.push(c);
                m.outer.sort();
                out.push(self.index[&m]);
            }
        }
        for &k in inner {
            if !node.inner.contains(&k) {
                let mut m = node.clone();
                m.inner.push(k);
                m.inner.sort();
                out.push(self.index[&m]);
            }
        }
        out
    }

    /// Restores the nesting invariant and the per-node cohomology targets,
    /// visiting nodes by increasing size.
    pub fn propagate(&mut self) -> Result<(), GlueError> {
        for i in 0..self.data.len() {
            for p in self.predecessors(i) {
                let forms: Vec<DiffForm> = self.data[p].sub.spaces.iter().flat_map(|s| s.forms.clone()).collect();
                for w in forms {
                    let r = self.restrict(p, i, &w)?;
                    if !self.data[i].sub.contains(&r) {
                        self.data[i].sub.add(&r);
                    }
                }
            }
            let name = self.node_name(&self.data[i].node);
            let d = &mut self.data[i];
            let rep = enlarge_subcomplex(&mut d.sub, &d.targets, self.opts.max_level)
                .map_err(|e| GlueError::Form { node: name, source: e })?;
            if let Some(l) = rep.max_level {
                d.level = Some(d.level.map_or(l, |m| m.max(l)));
            }
        }
        Ok(())
    }

    /// Adds the components of `c` to the node subcomplexes and propagates.
    pub fn absorb(&mut self, cochains: &[Cochain]) -> Result<(), GlueError> {
        for c in cochains {
            for (node, w) in &c.comps {
                let i = self.index[node];
                if !self.data[i].sub.contains(w) {
                    self.data[i].sub.add(w);
                }
            }
        }
        self.propagate()
    }

    /// Inner label sets available: all labels.
    pub fn all_inner(&self) -> Vec<usize> {
        (0..self.divisors.len()).collect()
    }

    /// Total complex over the nodes whose inner labels lie in `inner`.
    pub fn total_complex(&mut self, inner: &[usize]) -> Result<TotalComplex, GlueError> {
        let n = self.dim();
        let nodes: Vec<usize> =
            (0..self.data.len()).filter(|&i| self.data[i].node.inner.iter().all(|k| inner.contains(k))).collect();
        let maxp = nodes.iter().map(|&i| self.data[i].node.cech_degree()).max().unwrap_or(0);
        let top = maxp + n;
        let mut cells: Vec<Vec<(usize, usize, usize)>> = vec![Vec::new(); top + 1];
        let mut offsets = BTreeMap::new();
        for &i in &nodes {
            let p = self.data[i].node.cech_degree();
            for q in 0..=n {
                let t = p + q;
                let dim = self.data[i].sub.spaces[q].dim();
                offsets.insert((i, q), (t, cells[t].len()));
                for b in 0..dim {
                    cells[t].push((i, q, b));
                }
            }
        }
        let mut diffs = Vec::with_capacity(top);
        for t in 0..top {
            let mut cols = Vec::with_capacity(cells[t].len());
            for &(i, q, b) in &cells[t] {
                let w = self.data[i].sub.spaces[q].forms[b].clone();
                let mut col: BTreeMap<usize, Q> = BTreeMap::new();
                self.differential_into(i, q, &w, inner, &offsets, &mut col)?;
                cols.push(SparseVec::from_map(col));
            }
            diffs.push(RatMatrix::from_columns(cells[t + 1].len(), &cols));
        }
        Ok(TotalComplex { inner: inner.to_vec(), nodes, cells, diffs, offsets })
    }

    fn express_into(
        &mut self,
        i: usize,
        w: &DiffForm,
        sign: &Q,
        offsets: &BTreeMap<(usize, usize), (usize, usize)>,
        out: &mut BTreeMap<usize, Q>,
        from: usize,
    ) -> Result<(), GlueError> {
        if w.is_zero() {
            return Ok(());
        }
        let q = w.degree;
        let coeffs = self.data[i].sub.spaces[q].express(w).ok_or_else(|| GlueError::NotNested {
            from: self.node_name(&self.data[from].node),
            to: self.node_name(&self.data[i].node),
        })?;
        let (_, off) = offsets[&(i, q)];
        for (b, c) in coeffs.into_iter().enumerate() {
            if !c.is_zero() {
                let e = out.entry(off + b).or_insert_with(Q::zero);
                *e += c * sign;
            }
        }
        out.retain(|_, v| !v.is_zero());
        Ok(())
    }

    /// Coordinates of the total differential of `w` at node `i`.
    fn differential_into(
        &mut self,
        i: usize,
        q: usize,
        w: &DiffForm,
        inner: &[usize],
        offsets: &BTreeMap<(usize, usize), (usize, usize)>,
        out: &mut BTreeMap<usize, Q>,
    ) -> Result<(), GlueError> {
        let p = self.data[i].node.cech_degree();
        if q < self.dim() {
            let s = if p.is_multiple_of(2) { Q::one() } else { -Q::one() };
            let dw = w.d();
            self.express_into(i, &dw, &s, offsets, out, i)?;
        }
        for j in self.successors(i, inner) {
            let s = Q::from_integer(insertion_sign(&self.data[i].node, &self.data[j].node).into());
            let r = self.restrict(i, j, w)?;
            self.express_into(j, &r, &s, offsets, out, i)?;
        }
        Ok(())
    }

    /// Total differential of a cochain, computed on forms.
    pub fn apply_d(&self, c: &Cochain, inner: &[usize]) -> Result<Cochain, GlueError> {
        let mut out = Cochain::zero(c.degree + 1);
        for (node, w) in &c.comps {
            let i = self.index[node];
            let p = node.cech_degree();
            let mut part = Cochain::zero(c.degree + 1);
            if w.degree < self.dim() {
                let dw = w.d();
                let dw = if p % 2 == 0 { dw } else { dw.scale(&-Q::one()) };
                part.comps.insert(node.clone(), dw);
            }
            for j in self.successors(i, inner) {
                let s = Q::from_integer(insertion_sign(node, &self.data[j].node).into());
                let r = self.restrict(i, j, w)?.scale(&s);
                part.comps.insert(self.data[j].node.clone(), r);
            }
            out = out.add(&part);
        }
        Ok(out)
    }

    /// Coordinates of a cochain in the basis of `tc`.
    pub fn vector(&mut self, tc: &TotalComplex, c: &Cochain) -> Result<SparseVec, GlueError> {
        let mut out = BTreeMap::new();
        for (node, w) in &c.comps {
            let i = self.index[node];
            let (t, _) = tc.offsets[&(i, w.degree)];
            debug_assert_eq!(t, c.degree);
            self.express_into(i, w, &Q::one(), &tc.offsets, &mut out, i)?;
        }
        Ok(SparseVec::from_map(out))
    }

    /// Cochain with the given coordinates in degree `t` of `tc`.
    pub fn cochain(&self, tc: &TotalComplex, t: usize, v: &SparseVec) -> Cochain {
        let mut out = Cochain::zero(t);
        for (k, c) in &v.0 {
            let (i, q, b) = tc.cells[t][*k];
            let w = self.data[i].sub.spaces[q].forms[b].scale(c);
            let node = self.data[i].node.clone();
            let e = match out.comps.remove(&node) {
                Some(prev) => prev.add(&w),
                None => w,
            };
            out.comps.insert(node, e);
        }
        out.comps.retain(|_, w| !w.is_zero());
        out
    }

    /// Betti numbers and representative cocycles of `tc`.
    pub fn cohomology(&self, tc: &TotalComplex) -> BettiReport {
        let top = tc.cells.len();
        let mut betti = Vec::with_capacity(top);
        let mut generators = Vec::with_capacity(top);
        let mut quotients = Vec::with_capacity(top);
        for t in 0..top {
            let dim = tc.cells[t].len();
            let cycles = if t < tc.diffs.len() {
                rank_kernel(&tc.diffs[t]).1
            } else {
                (0..dim).map(SparseVec::unit).collect()
            };
            let bnd = if t > 0 { tc.diffs[t - 1].columns() } else { Vec::new() };
            let sq = Subquotient::new(dim, &cycles, &bnd).expect("boundaries are cycles when d^2 = 0");
            betti.push(sq.dim());
            generators.push(sq.representatives.iter().map(|v| self.cochain(tc, t, v)).collect());
            quotients.push(sq);
        }
        BettiReport { betti, generators, quotients }
    }

    /// Class of a cocycle in terms of the report's generators, computed in
    /// `tc` (which must be the complex the report came from).
    pub fn reduce(&mut self, tc: &TotalComplex, rep: &BettiReport, c: &Cochain) -> Result<Vec<Q>, GlueError> {
        let v = self.vector(tc, c)?;
        rep.quotients[c.degree].reduce(&v).ok_or(GlueError::NotCocycle)
    }

    /// Whether a cocycle is a coboundary in `tc`.
    pub fn is_exact(&mut self, tc: &TotalComplex, c: &Cochain) -> Result<bool, GlueError> {
        let v = self.vector(tc, c)?;
        if c.degree == 0 {
            return Ok(v.is_zero());
        }
        Ok(crate::exactla::solve_columns(&tc.diffs[c.degree - 1].columns(), &v).is_some())
    }

    /// The restriction of the Chern cocycle `c_k` of projective space:
    /// on `I = {i_0 < ... < i_k}` the wedge of `d(x_i/x_{i_0})/(x_i/x_{i_0})`.
    pub fn chern_cocycle(&self, k: usize) -> Result<Cochain, GlueError> {
        if !self.atlas.projective {
            return Err(GlueError::NotProjective);
        }
        let n = self.dim();
        let mut out = Cochain::zero(2 * k);
        for d in &self.data {
            if d.node.outer.len() != k + 1 || d.node.inner.len() != 1 {
                continue;
            }
            let inv = self.atlas.inverted(&d.node.outer);
            let mut den = vec![0u32; n];
            let mut mask = 0u32;
            for &l in &inv {
                den[l] = 1;
                mask |= 1 << l;
            }
            let num = d.base.div_exact(&Poly::monomial(den, Q::one())).unwrap();
            out.comps.insert(d.node.clone(), DiffForm::monomial(LocalFraction::new(num, d.base.clone(), 1), mask));
        }
        Ok(out)
    }

    /// Cup product of cochains: front face of `a` against back face of `b`
    /// in both label directions, with Koszul signs.
    pub fn cup(&self, a: &Cochain, b: &Cochain) -> Result<Cochain, GlueError> {
        let mut out = Cochain::zero(a.degree + b.degree);
        for (na, wa) in &a.comps {
            for (nb, wb) in &b.comps {
                if na.outer.last() != nb.outer.first() || na.inner.last() != nb.inner.first() {
                    continue;
                }
                let mut outer = na.outer.clone();
                outer.extend_from_slice(&nb.outer[1..]);
                let mut inner = na.inner.clone();
                inner.extend_from_slice(&nb.inner[1..]);
                if outer.windows(2).any(|w| w[0] >= w[1]) || inner.windows(2).any(|w| w[0] >= w[1]) {
                    continue;
                }
                let node = Node { outer, inner };
                let Some(&j) = self.index.get(&node) else { continue };
                let ra = self.restrict(self.index[na], j, wa)?;
                let rb = self.restrict(self.index[nb], j, wb)?;
                let (a2, b1) = (na.inner.len() - 1, nb.outer.len() - 1);
                let sgn = (wa.degree * nb.cech_degree() + a2 * b1) % 2;
                let mut w = ra.wedge(&rb);
                if sgn == 1 {
                    w = w.scale(&-Q::one());
                }
                let mut part = Cochain::zero(out.degree);
                part.comps.insert(node, w);
                out = out.add(&part);
            }
        }
        Ok(out)
    }
}

/// First page of the Čech spectral sequence in form degree `q`: per Čech
/// degree the summed dimensions of `H^q` of the nodes and the ranks of the
/// induced Čech maps.
pub fn first_page_row(g: &mut Glued, q: usize) -> Result<(Vec<usize>, Vec<usize>), GlueError> {
    let inner = g.all_inner();
    let mut quots: BTreeMap<usize, Subquotient> = BTreeMap::new();
    for i in 0..g.data.len() {
        let sub = &mut g.data[i].sub;
        let dim = sub.spaces[q].dim();
        let cycles = if q < sub.n {
            let ds: Vec<DiffForm> = sub.spaces[q].forms.iter().map(|w| w.d()).collect();
            let (m, _) = crate::forms::canonical_coordinates(&ds);
            rank_kernel(&m).1
        } else {
            (0..dim).map(SparseVec::unit).collect()
        };
        let mut bnd = Vec::new();
        if q > 0 {
            let ds: Vec<DiffForm> = sub.spaces[q - 1].forms.iter().map(|w| w.d()).collect();
            for dw in ds {
                let c = sub.spaces[q].express(&dw).expect("subcomplex is closed under d");
                bnd.push(SparseVec::from_dense(&c));
            }
        }
        quots.insert(i, Subquotient::new(dim, &cycles, &bnd).expect("d^2 = 0"));
    }
    let maxp = g.data.iter().map(|d| d.node.cech_degree()).max().unwrap_or(0);
    let mut offs: Vec<BTreeMap<usize, usize>> = vec![BTreeMap::new(); maxp + 1];
    let mut dims = vec![0usize; maxp + 1];
    for (i, d) in g.data.iter().enumerate() {
        let p = d.node.cech_degree();
        offs[p].insert(i, dims[p]);
        dims[p] += quots[&i].dim();
    }
    let mut ranks = Vec::with_capacity(maxp);
    for p in 0..maxp {
        let mut cols = Vec::new();
        let nodes: Vec<usize> = offs[p].keys().copied().collect();
        for i in nodes {
            let reps = quots[&i].representatives.clone();
            for r in reps {
                let w = r.0.iter().fold(DiffForm::zero(g.data[i].base.clone(), q), |acc, (k, c)| {
                    acc.add(&g.data[i].sub.spaces[q].forms[*k].scale(c))
                });
                let mut col = BTreeMap::new();
                for j in g.successors(i, &inner) {
                    let s = Q::from_integer(insertion_sign(&g.data[i].node, &g.data[j].node).into());
                    let rw = g.restrict(i, j, &w)?;
                    let c = g.data[j].sub.spaces[q].express(&rw).ok_or(GlueError::NotNested {
                        from: g.node_name(&g.data[i].node),
                        to: g.node_name(&g.data[j].node),
                    })?;
                    let red = quots[&j].reduce(&SparseVec::from_dense(&c)).ok_or(GlueError::NotCocycle)?;
                    for (k, v) in red.into_iter().enumerate() {
                        if !v.is_zero() {
                            col.insert(offs[p + 1][&j] + k, v * &s);
                        }
                    }
                }
                cols.push(SparseVec::from_map(col));
            }
        }
        ranks.push(RatMatrix::from_columns(dims[p + 1], &cols).rank());
    }
    Ok((dims, ranks))
}

/// Cup product table on the cohomology of a glued open set.
#[derive(Clone, Debug)]
pub struct CupTable {
    pub betti: Vec<usize>,
    /// `products[(i, a, j, b)]` = coordinates of `g_{i,a} ∪ g_{j,b}` in the
    /// generators of degree `i + j`.
    pub products: BTreeMap<(usize, usize, usize, usize), Vec<Q>>,
}

/// Computes generators and all pairwise products. The node subcomplexes are
/// enlarged to contain the product cochains before reducing them.
pub fn cup_products(g: &mut Glued) -> Result<(BettiReport, CupTable), GlueError> {
    let inner = g.all_inner();
    let tc = g.total_complex(&inner)?;
    let rep = g.cohomology(&tc);
    let top = 2 * g.dim();
    let mut prods: BTreeMap<(usize, usize, usize, usize), Cochain> = BTreeMap::new();
    for i in 0..=top.min(rep.betti.len() - 1) {
        for j in 0..=(top - i).min(rep.betti.len() - 1) {
            for (a, ga) in rep.generators[i].iter().enumerate() {
                for (b, gb) in rep.generators[j].iter().enumerate() {
                    prods.insert((i, a, j, b), g.cup(ga, gb)?);
                }
            }
        }
    }
    let all: Vec<Cochain> = prods.values().cloned().collect();
    g.absorb(&all)?;
    let tc2 = g.total_complex(&inner)?;
    let rep2 = g.cohomology(&tc2);
    // change of basis from the new representatives to the old generators
    let mut to_old: Vec<Vec<Vec<Q>>> = Vec::new();
    for t in 0..rep.betti.len() {
        let mut cols = Vec::new();
        for gen in &rep.generators[t] {
            cols.push(SparseVec::from_dense(&g.reduce(&tc2, &rep2, gen)?));
        }
        to_old.push(cols.iter().map(|c| c.to_dense(rep2.betti[t])).collect());
    }
    let mut products = BTreeMap::new();
    for (key, c) in prods {
        let t = key.0 + key.2;
        let v = SparseVec::from_dense(&g.reduce(&tc2, &rep2, &c)?);
        let cols: Vec<SparseVec> = to_old[t].iter().map(|c| SparseVec::from_dense(c)).collect();
        let coords = if v.is_zero() {
            vec![Q::zero(); rep.betti[t]]
        } else {
            crate::exactla::solve_columns(&cols, &v).ok_or(GlueError::NotCocycle)?
        };
        products.insert(key, coords);
    }
    Ok((rep.clone(), CupTable { betti: rep.betti, products }))
}

/// Betti numbers of an open subset of projective space or of a toric
/// variety, truncated to degrees `0..=2n`.
pub fn open_set_cohomology(atlas: ChartAtlas, divisors: Vec<Poly>, opts: GlueOptions) -> Result<(Glued, BettiReport), GlueError> {
    let mut g = Glued::new(atlas, divisors, opts)?;
    let inner = g.all_inner();
    let tc = g.total_complex(&inner)?;
    let mut rep = g.cohomology(&tc);
    let top = 2 * g.dim();
    debug_assert!(rep.betti.iter().skip(top + 1).all(|&b| b == 0));
    rep.betti.truncate(top + 1);
    rep.generators.truncate(top + 1);
    rep.quotients.truncate(top + 1);
    Ok((g, rep))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{default_names, parse_poly};

    fn proj(n: usize, fs: &[&str]) -> (Glued, BettiReport) {
        let names = default_names(n + 1);
        let divs = fs.iter().map(|f| parse_poly(f, &names).unwrap()).collect();
        open_set_cohomology(ChartAtlas::projective(n, &names), divs, GlueOptions::default()).unwrap()
    }

    #[test]
    fn projective_line() {
        let (g, rep) = proj(1, &[]);
        assert_eq!(rep.betti, vec![1, 0, 1]);
        let n01 = g.node_index(&Node { outer: vec![0, 1], inner: vec![0] }).unwrap();
        assert_eq!(g.data[n01].sub.spaces[0].dim(), 1);
        assert_eq!(g.data[n01].sub.spaces[1].dim(), 1);
    }

    #[test]
    fn projective_plane() {
        let (mut g, rep) = proj(2, &[]);
        assert_eq!(rep.betti, vec![1, 0, 1, 0, 1]);
        let tc = g.total_complex(&[0]).unwrap();
        assert!(tc.d_squared_zero());
        for k in 0..=2 {
            let c = g.chern_cocycle(k).unwrap();
            assert!(g.apply_d(&c, &[0]).unwrap().is_zero());
            assert!(!g.is_exact(&tc, &c).unwrap());
        }
    }

    #[test]
    fn restriction_signs_match_the_line() {
        let a = Node { outer: vec![0], inner: vec![0] };
        let b = Node { outer: vec![1], inner: vec![0] };
        let ab = Node { outer: vec![0, 1], inner: vec![0] };
        assert_eq!(insertion_sign(&a, &ab), 1);
        assert_eq!(insertion_sign(&b, &ab), -1);
    }

    #[test]
    fn plane_minus_conic() {
        let (_, rep) = proj(2, &["x0^2+x1*x2"]);
        assert_eq!(rep.betti, vec![1, 0, 0, 0, 0]);
    }

    #[test]
    fn plane_minus_cubic() {
        let (_, rep) = proj(2, &["x0^2*x1+x1^2*x2+x2^2*x0"]);
        assert_eq!(rep.betti, vec![1, 0, 2, 0, 0]);
    }

    #[test]
    fn cubic_first_page() {
        let (mut g, _) = proj(2, &["x0^2*x1+x1^2*x2+x2^2*x0"]);
        assert_eq!(first_page_row(&mut g, 1).unwrap(), (vec![3, 6, 3], vec![3, 3]));
        assert_eq!(first_page_row(&mut g, 2).unwrap(), (vec![9, 12, 5], vec![7, 5]));
    }

    #[test]
    fn projective_three_space_chern_classes() {
        let (mut g, rep) = proj(3, &[]);
        assert_eq!(rep.betti, vec![1, 0, 1, 0, 1, 0, 1]);
        let tc = g.total_complex(&[0]).unwrap();
        for k in 0..=3 {
            let c = g.chern_cocycle(k).unwrap();
            assert_eq!(c.comps.len(), binomial(4, k as u32 + 1).try_into().unwrap());
            assert!(!g.is_exact(&tc, &c).unwrap());
        }
    }

    #[test]
    fn chern_square_on_the_plane() {
        let (mut g, _) = proj(2, &[]);
        let c1 = g.chern_cocycle(1).unwrap();
        let c2 = g.chern_cocycle(2).unwrap();
        let sq = g.cup(&c1, &c1).unwrap();
        assert!(g.apply_d(&sq, &[0]).unwrap().is_zero());
        g.absorb(std::slice::from_ref(&sq)).unwrap();
        let tc = g.total_complex(&[0]).unwrap();
        let rep = g.cohomology(&tc);
        let a = g.reduce(&tc, &rep, &sq).unwrap();
        let b = g.reduce(&tc, &rep, &c2).unwrap();
        assert!(!b[0].is_zero() && !a[0].is_zero());
    }

    #[test]
    fn cup_table_laws() {
        let (mut g, _) = proj(2, &[]);
        let (rep, table) = cup_products(&mut g).unwrap();
        assert_eq!(table.betti, vec![1, 0, 1, 0, 1]);
        for ((i, a, j, b), v) in &table.products {
            if *i == 0 {
                let mut e = vec![Q::zero(); rep.betti[*j]];
                e[*b] = Q::one();
                // the unit generator is a multiple of the constant cocycle
                assert!(v.iter().zip(&e).all(|(x, y)| (x.is_zero()) == (y.is_zero())));
            }
            let sw = &table.products[&(*j, *b, *i, *a)];
            let sgn = if (i * j) % 2 == 0 { Q::one() } else { -Q::one() };
            assert_eq!(v, &sw.iter().map(|x| x * &sgn).collect::<Vec<_>>());
        }
        assert!(table.products[&(2, 0, 2, 0)][0] != Q::zero());
    }
}
