#![allow(dead_code)]

use derham_core::duality::affine_atlas;
use derham_core::glue::{open_set_cohomology, BettiReport, ChartAtlas, GlueOptions, Glued};
use derham_core::poly::{parse_poly, Poly};
use derham_core::toricfan::{toric_open_cohomology, Fan2D};

pub fn names(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

pub fn poly(src: &str, vars: &[&str]) -> Poly {
    parse_poly(src, &names(vars)).unwrap()
}

pub const XYZ: [&str; 3] = ["x", "y", "z"];
pub const CONIC: &str = "x^2+y*z";
pub const CUBIC: &str = "x^2*y+y^2*z+z^2*x";
pub const FERMAT: &str = "x^3+y^3+z^3";
pub const F2_DIVISOR: &str = "w-x^2*y+z^2*y";

pub fn projective(n: usize, fs: &[&str]) -> (Glued, BettiReport) {
    let vars: Vec<String> = if n == 2 { names(&XYZ) } else { (0..=n).map(|i| format!("x{i}")).collect() };
    let divs = fs.iter().map(|f| parse_poly(f, &vars).unwrap()).collect();
    open_set_cohomology(ChartAtlas::projective(n, &vars), divs, GlueOptions::default()).unwrap()
}

pub fn affine(vars: &[&str], f: &str) -> (Glued, BettiReport) {
    let p = poly(f, vars);
    let (g, mut rep) = open_set_cohomology(affine_atlas(&names(vars)), vec![p], GlueOptions::default()).unwrap();
    rep.betti.truncate(vars.len() + 1);
    rep.generators.truncate(vars.len() + 1);
    (g, rep)
}

pub fn hirzebruch(divisor: bool) -> (Glued, BettiReport) {
    let f = divisor.then(|| poly(F2_DIVISOR, &["x", "y", "z", "w"]));
    toric_open_cohomology(&Fan2D::hirzebruch2(), f, GlueOptions::default()).unwrap()
}

/// Every glued fixture of the acceptance list, with a label.
pub fn glued_fixtures() -> Vec<(&'static str, Glued, BettiReport)> {
    let mut out = Vec::new();
    let (g, r) = affine(&["x"], "x");
    out.push(("A1 minus a point", g, r));
    let (g, r) = affine(&XYZ, FERMAT);
    out.push(("A3 minus the Fermat cubic", g, r));
    for n in 1..=3 {
        let (g, r) = projective(n, &[]);
        out.push((["P1", "P2", "P3"][n - 1], g, r));
    }
    let (g, r) = projective(2, &[CONIC]);
    out.push(("P2 minus the conic", g, r));
    let (g, r) = projective(2, &[CUBIC]);
    out.push(("P2 minus the cubic", g, r));
    let (g, r) = projective(2, &[CONIC, "x"]);
    out.push(("P2 minus the points where the conic meets x = 0", g, r));
    let (g, r) = hirzebruch(false);
    out.push(("F2", g, r));
    let (g, r) = hirzebruch(true);
    out.push(("F2 minus a curve", g, r));
    out
}
