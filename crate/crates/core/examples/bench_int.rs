use derham_core::integrate::{integrate_cohomology, IntegrateOptions};
use derham_core::poly::parse_poly;
use std::time::Instant;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let names: Vec<String> = args[1].split(',').map(|s| s.to_string()).collect();
    let f = parse_poly(&args[2], &names).unwrap();
    let forms = args.get(3).map(|s| s == "forms").unwrap_or(false);
    let t = Instant::now();
    let r = integrate_cohomology(&f, &IntegrateOptions { forms, ..Default::default() }).unwrap();
    println!("a={} b~={} level={:?}", r.module.a, r.bfunction.fmt(), r.level);
    println!("ranks {:?} shifts {:?}", r.complex.ranks, r.complex.shifts);
    println!("dims {:?} in {:?}", r.dims, t.elapsed());
    for (d, c) in r.classes.iter().enumerate() {
        for w in c {
            println!("H{}: {}", d, w.fmt_with(&names));
        }
    }
}
