use derham_core::dmod::localize_cyclic;
use derham_core::poly::parse_poly;
use derham_core::weyl::GbOptions;
use std::time::Instant;

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let vars: Vec<String> = args[0].split(',').map(|s| s.to_string()).collect();
    let f = parse_poly(&args[1], &vars).unwrap();
    let t = Instant::now();
    let m = localize_cyclic(&f, &GbOptions::default()).unwrap();
    let bs = m.bs.as_ref().unwrap();
    println!("b = {}  a = {}  rels = {}  {:?}", bs.b.fmt(), m.a, m.relations.len(), t.elapsed());
    println!("verify {}", bs.verify(&f));
}
