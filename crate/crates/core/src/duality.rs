//! Cohomology of closed and locally closed sets through Alexander duality.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero;

use crate::exactla::{RatMatrix, SparseVec};
use crate::glue::{open_set_cohomology, ChartAtlas, Cochain, GlueError, GlueOptions, Glued};
use crate::poly::{default_names, Poly};

/// Dimensions of an exact sequence of vector spaces, in order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactSequence {
    pub label: &'static str,
    pub dims: Vec<usize>,
}

impl ExactSequence {
    /// Alternating sum of dimensions; zero for an exact sequence that
    /// starts and ends with zero.
    pub fn alternating_sum(&self) -> i64 {
        self.dims.iter().enumerate().map(|(i, &d)| if i % 2 == 0 { d as i64 } else { -(d as i64) }).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualityLedger {
    pub betti_u: Vec<usize>,
    /// `chern_vanishing[k]`: whether `c_k` is zero in `H^{2k}(U)`.
    pub chern_vanishing: Vec<bool>,
    pub sequences: Vec<ExactSequence>,
}

impl DualityLedger {
    pub fn all_exact(&self) -> bool {
        self.sequences.iter().all(|s| s.alternating_sum() == 0)
    }
}

#[derive(Clone, Debug)]
pub struct ClosedReport {
    /// Betti numbers of `Y` in degrees `0..=2n-2`.
    pub betti: Vec<usize>,
    pub ledger: DualityLedger,
}

/// Whether each Chern cocycle `c_0..c_n` is exact on the glued open set,
/// using only nodes with inner labels in `inner`. Enlarges `g` to contain
/// the cocycles first.
pub fn chern_vanishing(g: &mut Glued, inner: &[usize]) -> Result<Vec<bool>, GlueError> {
    let n = g.dim();
    let cs: Vec<Cochain> = (0..=n).map(|k| g.chern_cocycle(k)).collect::<Result<_, _>>()?;
    g.absorb(&cs)?;
    let tc = g.total_complex(inner)?;
    cs.iter().map(|c| g.is_exact(&tc, &project(c, inner))).collect()
}

/// Components of `c` on nodes whose inner labels lie in `inner`.
pub fn project(c: &Cochain, inner: &[usize]) -> Cochain {
    let mut out = c.clone();
    out.comps.retain(|node, _| node.inner.iter().all(|k| inner.contains(k)));
    out
}

/// Betti numbers of `Y = Var(f_0, ..., f_r) ⊂ P^n` from those of the
/// complement and the vanishing of the Chern classes there.
pub fn closed_variety_cohomology(n: usize, fs: Vec<Poly>, opts: GlueOptions) -> Result<ClosedReport, GlueError> {
    let names = default_names(n + 1);
    let (mut g, rep) = open_set_cohomology(ChartAtlas::projective(n, &names), fs, opts)?;
    let hu = rep.betti;
    let vanish = {
        let inner = g.all_inner();
        chern_vanishing(&mut g, &inner)?
    };
    let mut betti = vec![0usize; 2 * n + 1];
    let mut seqs = Vec::new();
    let h = |i: i64| if i < 0 { 0 } else { hu[i as usize] };
    for k in 0..=n {
        let nz = usize::from(!vanish[k]);
        let top = h(2 * k as i64 - 1) + usize::from(vanish[k]);
        betti[2 * n - 2 * k] = top;
        let low = if 2 * n > 2 * k { hu[2 * k] - nz } else { 0 };
        if 2 * n > 2 * k {
            betti[2 * n - 2 * k - 1] = low;
        }
        let mut dims = vec![0, h(2 * k as i64 - 1), top, 1, hu[2 * k]];
        if 2 * n > 2 * k {
            dims.push(low);
        }
        dims.push(0);
        seqs.push(ExactSequence { label: "H(U) -> H(Y)* -> H(P) -> H(U) -> H(Y)*", dims });
    }
    debug_assert!(betti[2 * n] == 0 && betti[2 * n - 1] == 0);
    betti.truncate(2 * n - 1);
    Ok(ClosedReport { betti, ledger: DualityLedger { betti_u: hu, chern_vanishing: vanish, sequences: seqs } })
}

/// The affine space `A^n` as a one-cone fan with coordinate names `names`.
pub fn affine_atlas(names: &[alloc::string::String]) -> ChartAtlas {
    let n = names.len();
    let rays = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
    ChartAtlas::new(rays, vec![(0..n).collect()], vec!["A".into()], names.to_vec()).expect("orthant is smooth")
}

/// Dimensions of `H^i_c(Y)` for `Y = Var(f_0, ..., f_r) ⊂ A^n`, `i = 0..=2n`.
pub fn compact_support_affine(betti_u: &[usize]) -> Vec<usize> {
    let n2 = betti_u.len().saturating_sub(1) * 2;
    let h = |i: usize| betti_u.get(i).copied().unwrap_or(0);
    (0..=n2)
        .map(|i| match n2 - i {
            0 => 0,
            1 => h(0).saturating_sub(1),
            d => h(d - 1),
        })
        .collect()
}

/// Full dimension table for `Y \ Z` with `Y = Var(f)` smooth in `P^n` and
/// `Z = Y ∩ Var(g)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocallyClosedReport {
    pub h_p: Vec<usize>,
    pub h_v: Vec<usize>,
    pub h_u: Vec<usize>,
    pub h_z_supp: Vec<usize>,
    pub h_z: Vec<usize>,
    pub h_y_supp: Vec<usize>,
    pub h_y: Vec<usize>,
    pub ker_vu: Vec<usize>,
    pub im_pv: Vec<usize>,
    pub betti: Vec<usize>,
    pub sequences: Vec<ExactSequence>,
}

/// Rank of a list of coordinate vectors.
fn rank(vs: &[Vec<num_rational::BigRational>], dim: usize) -> usize {
    let cols: Vec<SparseVec> = vs.iter().map(|v| SparseVec::from_dense(v)).collect();
    RatMatrix::from_columns(dim, &cols).rank()
}

/// Cohomology of `Y \ Z` where `Y = Var(f)` is a smooth hypersurface
/// (smoothness is the caller's responsibility) and `Z = Y ∩ Var(g)`.
pub fn locally_closed_cohomology(
    n: usize,
    f: Poly,
    g: Poly,
    opts: GlueOptions,
) -> Result<LocallyClosedReport, GlueError> {
    let names = default_names(n + 1);
    let mut gl = Glued::new(ChartAtlas::projective(n, &names), vec![f, g], opts)?;
    let cs: Vec<Cochain> = (0..=n).map(|k| gl.chern_cocycle(k)).collect::<Result<_, _>>()?;
    gl.absorb(&cs)?;
    let tv = gl.total_complex(&[0, 1])?;
    let tu = gl.total_complex(&[0])?;
    let rv = gl.cohomology(&tv);
    let ru = gl.cohomology(&tu);
    let top = 2 * n;
    let h_v: Vec<usize> = (0..=top).map(|k| rv.betti.get(k).copied().unwrap_or(0)).collect();
    let h_u: Vec<usize> = (0..=top).map(|k| ru.betti.get(k).copied().unwrap_or(0)).collect();
    let h_p: Vec<usize> = (0..=top).map(|k| usize::from(k % 2 == 0)).collect();
    let mut ker_vu = vec![0; top + 1];
    let mut im_pv = vec![0; top + 1];
    let mut im_pu = vec![0; top + 1];
    let mut im_ker = vec![0; top + 1];
    for k in 0..=top {
        let mut images = Vec::new();
        for gen in &rv.generators[k] {
            images.push(gl.reduce(&tu, &ru, &project(gen, &[0]))?);
        }
        ker_vu[k] = h_v[k] - rank(&images, h_u[k]);
        if k % 2 == 0 {
            let c = &cs[k / 2];
            let in_v = gl.reduce(&tv, &rv, c)?;
            let in_u = gl.reduce(&tu, &ru, &project(c, &[0]))?;
            let nz_v = in_v.iter().any(|x| !x.is_zero());
            let nz_u = in_u.iter().any(|x| !x.is_zero());
            im_pv[k] = usize::from(nz_v);
            im_pu[k] = usize::from(nz_u);
            im_ker[k] = usize::from(nz_v && !nz_u);
        }
    }
    // local cohomology from H(P) -> H(open) -> H_closed(P)[1]
    let supp = |h: &[usize], im: &[usize]| -> Vec<usize> {
        (0..=top)
            .map(|k| {
                let coker = if k > 0 { h[k - 1] - im[k - 1] } else { 0 };
                coker + h_p[k] - im[k]
            })
            .collect()
    };
    let h_z_supp = supp(&h_v, &im_pv);
    let h_y_supp = supp(&h_u, &im_pu);
    let h_z: Vec<usize> = (0..=top).map(|k| h_z_supp[top - k]).collect();
    let h_y: Vec<usize> = (0..=top).map(|k| h_y_supp[top - k]).collect();
    let mut sequences = Vec::new();
    for (label, h, s) in [("P -> V -> Z", &h_v, &h_z_supp), ("P -> U -> Y", &h_u, &h_y_supp)] {
        let mut dims = vec![0, s[0]];
        for k in 0..=top {
            dims.extend([h_p[k], h[k], s.get(k + 1).copied().unwrap_or(0)]);
        }
        dims.push(0);
        sequences.push(ExactSequence { label, dims });
    }
    // H^{2d-k}(Z)^* -> H^k(Y) is H^{2+k}_Z -> H^{2+k}_Y; its kernel is
    // ker(V -> U) modulo the image of P in degree k + 1
    let d = 2 * (n - 1);
    let ker_phi = |k: usize| if k < top { ker_vu[k + 1] - im_ker[k + 1] } else { 0 };
    let coker_phi = |k: usize| h_y[k] + ker_phi(k) - h_z[d - k];
    let betti: Vec<usize> =
        (0..=d).map(|k| coker_phi(k) + if k < d { ker_phi(k + 1) } else { 0 }).collect();
    let mut pair = vec![0];
    for k in 0..=d {
        pair.extend([h_z[d - k], h_y[k], betti[k]]);
    }
    pair.push(0);
    sequences.push(ExactSequence { label: "Z* -> Y -> Y\\Z", dims: pair });
    Ok(LocallyClosedReport { h_p, h_v, h_u, h_z_supp, h_z, h_y_supp, h_y, ker_vu, im_pv, betti, sequences })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_poly;

    fn p(s: &str, n: usize) -> Poly {
        parse_poly(s, &default_names(n + 1)).unwrap()
    }

    #[test]
    fn conic() {
        let r = closed_variety_cohomology(2, vec![p("x0^2+x1*x2", 2)], GlueOptions::default()).unwrap();
        assert_eq!(r.betti, vec![1, 0, 1]);
        assert!(r.ledger.all_exact());
    }

    #[test]
    fn hyperplane() {
        let r = closed_variety_cohomology(2, vec![p("x0", 2)], GlueOptions::default()).unwrap();
        assert_eq!(r.betti, vec![1, 0, 1]);
        assert_eq!(r.ledger.chern_vanishing, vec![false, true, true]);
    }

    #[test]
    fn compact_support_bookkeeping() {
        assert_eq!(compact_support_affine(&[1, 1, 2, 2]), vec![0, 0, 2, 2, 1, 0, 0]);
        assert_eq!(compact_support_affine(&[1, 1]), vec![1, 0, 0]);
        assert_eq!(compact_support_affine(&[1, 0, 0]), vec![0; 5]);
    }

    #[test]
    fn conic_minus_two_points() {
        let r = locally_closed_cohomology(2, p("x0^2+x1*x2", 2), p("x0", 2), GlueOptions::default()).unwrap();
        assert_eq!(r.h_v, vec![1, 0, 1, 1, 0]);
        assert_eq!(r.h_u, vec![1, 0, 0, 0, 0]);
        assert_eq!(r.h_z_supp, vec![0, 0, 0, 0, 2]);
        assert_eq!(r.h_z, vec![2, 0, 0, 0, 0]);
        assert_eq!(r.h_y_supp, vec![0, 0, 1, 0, 1]);
        assert_eq!(r.ker_vu, vec![0, 0, 1, 1, 0]);
        assert_eq!(r.im_pv, vec![1, 0, 1, 0, 0]);
        assert_eq!(r.betti, vec![1, 1, 0]);
        for s in &r.sequences {
            assert_eq!(s.alternating_sum(), 0, "{}", s.label);
        }
    }

    #[test]
    fn plane_cubic() {
        let f = p("x0^2*x1+x1^2*x2+x2^2*x0", 2);
        let r = closed_variety_cohomology(2, vec![f], GlueOptions::default()).unwrap();
        assert_eq!(r.betti, vec![1, 2, 1]);
        assert_eq!(r.ledger.chern_vanishing, vec![false, true, true]);
    }

    #[test]
    fn cubic_minus_two_points() {
        let f = p("x0^2*x1+x1^2*x2+x2^2*x0", 2);
        let r = locally_closed_cohomology(2, f, p("x2", 2), GlueOptions::default()).unwrap();
        assert_eq!(r.betti, vec![1, 3, 0]);
        assert_eq!(r.h_y, vec![1, 2, 1, 0, 0]);
        assert_eq!(r.h_z, vec![2, 0, 0, 0, 0]);
    }
}
