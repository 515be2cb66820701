//! Smooth complete fans in the plane and their chart atlases.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::glue::{open_set_cohomology, BettiReport, ChartAtlas, GlueError, GlueOptions, Glued};
use crate::poly::{Mono, Poly};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FanError {
    #[error("a fan needs at least three rays in the plane")]
    TooFewRays,
    #[error("ray {0} is zero or not primitive")]
    NotPrimitive(usize),
    #[error("rays {0} and {1} are not in strictly counterclockwise order")]
    NotCyclic(usize, usize),
    #[error("rays do not wind once around the origin")]
    NotComplete,
    #[error("cone {0} is not smooth")]
    NotSmooth(usize),
    #[error("cone {0} is not a pair of adjacent rays")]
    NotAdjacent(usize),
    #[error("exponent of ray {0} would be negative")]
    NegativeExponent(usize),
    #[error(transparent)]
    Glue(#[from] GlueError),
}

/// Complete smooth fan in the plane. `cones[c]` is an ordered pair of
/// adjacent ray indices; the order fixes which chart coordinate comes
/// first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fan2D {
    pub rays: Vec<[i64; 2]>,
    pub cones: Vec<[usize; 2]>,
    pub names: Vec<String>,
    pub ray_names: Vec<String>,
}

fn det(a: [i64; 2], b: [i64; 2]) -> i64 {
    a[0] * b[1] - a[1] * b[0]
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

impl Fan2D {
    /// Validates rays given in counterclockwise order and the cone list.
    pub fn new(
        rays: Vec<[i64; 2]>,
        cones: Vec<[usize; 2]>,
        names: Vec<String>,
        ray_names: Vec<String>,
    ) -> Result<Self, FanError> {
        let r = rays.len();
        if r < 3 {
            return Err(FanError::TooFewRays);
        }
        for (i, v) in rays.iter().enumerate() {
            if gcd(v[0], v[1]) != 1 {
                return Err(FanError::NotPrimitive(i));
            }
        }
        // consecutive rays turn left by less than a half-turn; count wraps past angle zero
        let half = |v: [i64; 2]| u8::from(!(v[1] > 0 || (v[1] == 0 && v[0] > 0)));
        let mut wraps = 0;
        for i in 0..r {
            let (a, b) = (rays[i], rays[(i + 1) % r]);
            if det(a, b) <= 0 {
                return Err(FanError::NotCyclic(i, (i + 1) % r));
            }
            if half(b) < half(a) || (half(a) == half(b) && det(b, a) > 0) {
                wraps += 1;
            }
        }
        if wraps != 1 {
            return Err(FanError::NotComplete);
        }
        let mut seen = vec![false; r];
        for (c, pair) in cones.iter().enumerate() {
            let (a, b) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
            let adjacent = b < r && (b == a + 1 || (a == 0 && b == r - 1));
            if !adjacent {
                return Err(FanError::NotAdjacent(c));
            }
            let lower = if b == a + 1 { a } else { b };
            if seen[lower] {
                return Err(FanError::NotAdjacent(c));
            }
            seen[lower] = true;
            if det(rays[pair[0]], rays[pair[1]]).abs() != 1 {
                return Err(FanError::NotSmooth(c));
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(FanError::NotComplete);
        }
        Ok(Fan2D { rays, cones, names, ray_names })
    }

    /// Fan with cones `(v_i, v_{i+1})`, named `A, B, ...`, Cox variables `x1, x2, ...`.
    pub fn from_rays(rays: Vec<[i64; 2]>) -> Result<Self, FanError> {
        let r = rays.len();
        let cones = (0..r).map(|i| [i, (i + 1) % r]).collect();
        let names = (0..r).map(cone_label).collect();
        let ray_names = (0..r).map(|i| alloc::format!("x{}", i + 1)).collect();
        Self::new(rays, cones, names, ray_names)
    }

    /// The Hirzebruch surface `F_2` with rays `(1,0), (0,1), (-1,2), (0,-1)`
    /// and Cox variables `x, y, z, w`. Cone coordinates: `A: (x/z, yz^2/w)`,
    /// `B: (z/x, yx^2/w)`, `C: (z/x, w/(yx^2))`, `D: (x/z, w/(yz^2))`.
    pub fn hirzebruch2() -> Self {
        Self::new(
            vec![[1, 0], [0, 1], [-1, 2], [0, -1]],
            vec![[0, 1], [2, 1], [2, 3], [0, 3]],
            ["A", "B", "C", "D"].iter().map(|s| s.to_string()).collect(),
            ["x", "y", "z", "w"].iter().map(|s| s.to_string()).collect(),
        )
        .expect("F2 fan is smooth and complete")
    }

    /// The projective plane with rays `e_1, e_2, -e_1-e_2`.
    pub fn projective_plane() -> Self {
        Self::from_rays(vec![[1, 0], [0, 1], [-1, -1]]).expect("P2 fan is smooth and complete")
    }

    pub fn atlas(&self) -> ChartAtlas {
        let rays = self.rays.iter().map(|v| v.to_vec()).collect();
        let cones = self.cones.iter().map(|c| c.to_vec()).collect();
        ChartAtlas::new(rays, cones, self.names.clone(), self.ray_names.clone()).expect("validated fan")
    }

    /// Cox polynomial `x^{twist} * Σ c_m χ^m` from a polynomial in the two
    /// torus characters `χ^{(1,0)}, χ^{(0,1)}`.
    pub fn from_characters(&self, laurent: &Poly, twist: &[i64]) -> Result<Poly, FanError> {
        let r = self.rays.len();
        let mut out = Poly::zero(r);
        for (m, c) in &laurent.terms {
            let mut e: Mono = Vec::with_capacity(r);
            for (rho, v) in self.rays.iter().enumerate() {
                let p = m[0] as i64 * v[0] + m[1] as i64 * v[1] + twist[rho];
                if p < 0 {
                    return Err(FanError::NegativeExponent(rho));
                }
                e.push(p as u32);
            }
            out = out.add(&Poly::monomial(e, c.clone()));
        }
        Ok(out)
    }
}

fn cone_label(i: usize) -> String {
    let c = (b'A' + (i % 26) as u8) as char;
    if i < 26 {
        c.to_string()
    } else {
        alloc::format!("{c}{}", i / 26)
    }
}

/// Cohomology of the toric surface, or of the complement of a divisor given
/// as a Cox polynomial.
pub fn toric_open_cohomology(
    fan: &Fan2D,
    divisor: Option<Poly>,
    opts: GlueOptions,
) -> Result<(Glued, BettiReport), FanError> {
    let divs = divisor.into_iter().collect();
    Ok(open_set_cohomology(fan.atlas(), divs, opts)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::{translate_chart, DiffForm};
    use crate::glue::{Cochain, Node};
    use crate::poly::{parse_poly, LocalFraction};
    use crate::rat::q;
    use alloc::sync::Arc;
    use alloc::collections::BTreeMap;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn hirzebruch_charts() {
        let a = Fan2D::hirzebruch2().atlas();
        let cn: Vec<Vec<String>> = (0..4).map(|c| a.chart_names(c)).collect();
        assert_eq!(cn[0], names(&["x/z", "y*z^2/w"]));
        assert_eq!(cn[1], names(&["z/x", "x^2*y/w"]));
        assert_eq!(cn[2], names(&["z/x", "w/(x^2*y)"]));
        assert_eq!(cn[3], names(&["x/z", "w/(y*z^2)"]));
        let f = parse_poly("w-x^2*y+z^2*y", &names(&["x", "y", "z", "w"])).unwrap();
        assert!(a.is_homogeneous(&f));
        let st = names(&["s", "t"]);
        let want = ["1-s^2*t+t", "1-t+s^2*t", "t-1+s^2", "t-s^2+1"];
        for (c, w) in want.iter().enumerate() {
            assert_eq!(a.dehomogenize(&f, c), parse_poly(w, &st).unwrap());
        }
    }

    #[test]
    fn rejects_bad_fans() {
        assert_eq!(Fan2D::from_rays(vec![[1, 0], [0, 1]]), Err(FanError::TooFewRays));
        assert_eq!(Fan2D::from_rays(vec![[1, 0], [1, 2], [-1, -1]]), Err(FanError::NotSmooth(0)));
        assert_eq!(Fan2D::from_rays(vec![[2, 0], [0, 1], [-1, -1]]), Err(FanError::NotPrimitive(0)));
        assert!(matches!(Fan2D::from_rays(vec![[1, 0], [0, 1], [-1, 0]]), Err(FanError::NotCyclic(..))));
        assert!(Fan2D::from_rays(vec![[1, 0], [0, 1], [-1, -1]]).is_ok());
    }

    #[test]
    fn transitions_compose_around_the_fan() {
        let a = Fan2D::hirzebruch2().atlas();
        for c in 0..4 {
            let mut m = vec![vec![1i64, 0], vec![0, 1]];
            for k in 0..4 {
                let t = a.transition((c + k) % 4, (c + k + 1) % 4);
                let mm: Vec<Vec<i64>> = (0..2)
                    .map(|i| (0..2).map(|j| (0..2).map(|l| m[i][l] * t.images[l][j] as i64).sum()).collect())
                    .collect();
                m = mm;
            }
            assert_eq!(m, vec![vec![1, 0], vec![0, 1]]);
        }
    }

    #[test]
    fn characters_to_cox() {
        let fan = Fan2D::hirzebruch2();
        let lp = parse_poly("1-s^2*t+t", &names(&["s", "t"])).unwrap();
        let f = fan.from_characters(&lp, &[0, 0, 0, 1]).unwrap();
        assert_eq!(f, parse_poly("w-x^2*y+z^2*y", &names(&["x", "y", "z", "w"])).unwrap());
        assert_eq!(fan.from_characters(&lp, &[0, 0, 0, 0]), Err(FanError::NegativeExponent(3)));
    }

    #[test]
    fn hirzebruch_betti() {
        let (_, rep) = toric_open_cohomology(&Fan2D::hirzebruch2(), None, GlueOptions::default()).unwrap();
        assert_eq!(rep.betti, vec![1, 0, 2, 0, 1]);
        let (_, rep) = toric_open_cohomology(&Fan2D::projective_plane(), None, GlueOptions::default()).unwrap();
        assert_eq!(rep.betti, vec![1, 0, 1, 0, 1]);
    }

    /// Form `Σ coeffs` given in the coordinates of chart `c`, over the open
    /// set of `node`, moved into the node's own chart.
    fn form_in_chart(g: &Glued, node: &Node, c: usize, comps: &[(&str, u32)], den: &str) -> DiffForm {
        let st = names(&["s", "t"]);
        let mut cones = vec![c];
        cones.extend(node.outer.iter().copied());
        let inv = g.atlas.inverted(&cones);
        let mut base = Poly::one(2);
        for &k in &node.inner {
            base = base.mul(&g.atlas.dehomogenize(&g.divisors[k], c));
        }
        for l in inv {
            base = base.mul(&Poly::var(2, l));
        }
        let base = Arc::new(base);
        let den = parse_poly(den, &st).unwrap();
        let cof = base.div_exact(&den).expect("denominator divides the base");
        let mut w = DiffForm::zero(base.clone(), comps[0].1.count_ones() as usize);
        for (num, mask) in comps {
            let u = LocalFraction::new(parse_poly(num, &st).unwrap().mul(&cof), base.clone(), 1);
            w = w.add(&DiffForm::monomial(u, *mask));
        }
        let i = g.node_index(node).unwrap();
        let d = &g.data[i];
        if d.chart == c {
            w.rebase(d.base.clone()).unwrap()
        } else {
            translate_chart(&w, &g.atlas.transition(c, d.chart), &d.base).unwrap()
        }
    }

    #[test]
    fn two_alpha_minus_beta_is_exact() {
        let fan = Fan2D::hirzebruch2();
        let f = parse_poly("w-x^2*y+z^2*y", &names(&["x", "y", "z", "w"])).unwrap();
        let (mut g, rep) = toric_open_cohomology(&fan, Some(f), GlueOptions::default()).unwrap();
        assert_eq!(rep.betti, vec![1, 0, 1, 0, 0]);
        let node = |o: &[usize]| Node { outer: o.to_vec(), inner: vec![0] };
        let (a, b, c, d) = (0, 1, 2, 3);
        let dlog_s = [("1", 1u32)];
        let dlog_t = [("1", 2u32)];
        // α and β on the pairwise intersections, in the coordinates of A or C
        let pairs: [(&[usize], usize); 6] =
            [(&[a, b], a), (&[a, c], a), (&[a, d], a), (&[b, c], c), (&[b, d], c), (&[c, d], c)];
        let alpha_coef = [1, 1, 0, 0, 1, 1];
        let beta_s = [2, 0, 0, 0, 0, 0];
        // the AC entry is -dt/t; -2dt/t fails the cocycle condition on ABC
        let beta_t = [0, -1, -1, 1, 1, 0];
        let mut alpha = Cochain::zero(2);
        let mut beta = Cochain::zero(2);
        for (k, (o, ch)) in pairs.iter().enumerate() {
            let nd = node(o);
            let i = g.node_index(&nd).unwrap();
            let zero = DiffForm::zero(g.data[i].base.clone(), 1);
            let used_s = alpha_coef[k] != 0 || beta_s[k] != 0;
            let ws = if used_s { form_in_chart(&g, &nd, *ch, &dlog_s, "s") } else { zero.clone() };
            let wt = if beta_t[k] != 0 { form_in_chart(&g, &nd, *ch, &dlog_t, "t") } else { zero };
            alpha.comps.insert(nd.clone(), ws.scale(&q(alpha_coef[k])));
            beta.comps.insert(nd, ws.scale(&q(beta_s[k])).add(&wt.scale(&q(beta_t[k]))));
        }
        alpha.comps.retain(|_, w| !w.is_zero());
        beta.comps.retain(|_, w| !w.is_zero());
        // -A_{1,1} + B_{1,1} + C_{1,1} + D_{1,1}
        let singles: [(usize, [(&str, u32); 2], i64); 4] = [
            (a, [("2*s*t", 1), ("s^2-1", 2)], -1),
            (b, [("2*s*t", 1), ("s^2-1", 2)], 1),
            (c, [("2*s", 1), ("1", 2)], 1),
            (d, [("-2*s", 1), ("1", 2)], 1),
        ];
        let mut cobound = Cochain::zero(1);
        let mut comps = BTreeMap::new();
        for (cone, forms, sgn) in singles {
            let nd = node(&[cone]);
            let den = g.atlas.dehomogenize(&g.divisors[0], cone).fmt_with(&names(&["s", "t"]));
            let w = form_in_chart(&g, &nd, cone, &forms, &den).scale(&q(sgn));
            comps.insert(nd, w);
        }
        cobound.comps = comps;
        let lhs = alpha.scale(&q(2)).sub(&beta);
        let rhs = g.apply_d(&cobound, &[0]).unwrap();
        assert!(lhs.sub(&rhs).is_zero());
        // α survives on the complement; α and β span H^2 of the surface
        assert!(g.apply_d(&alpha, &[0]).unwrap().is_zero());
        assert!(g.apply_d(&beta, &[0]).unwrap().is_zero());
        g.absorb(&[alpha.clone(), beta.clone(), cobound.clone()]).unwrap();
        let tc = g.total_complex(&[0]).unwrap();
        assert!(!g.is_exact(&tc, &alpha).unwrap());
        assert!(g.is_exact(&tc, &lhs).unwrap());
    }
}
