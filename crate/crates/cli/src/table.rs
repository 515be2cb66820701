//! Chart tables: the per-chart affine input of the gluing step, stored as
//! line-oriented UTF-8 text.
//!
//! ```text
//! hash <hex digest of the command input>
//! chart <node name>
//! coord u0 = <chart coordinate in Cox variables>
//! divisor <polynomial in u0, u1, ...>
//! dims <d0> <d1> ...
//! power <exponent of the cyclic generator>
//! gen <degree> <form-expression>
//! ```
//!
//! A form expression is a `;`-separated list of terms `<dx> : <numerator> /
//! D^<power>`, where `<dx>` is `1` or a wedge such as `du0^du1` and `D` is
//! the divisor line.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use derham_core::forms::DiffForm;
use derham_core::glue::{NodeSeed, SeedKey, SeedStore};
use derham_core::poly::{parse_poly, LocalFraction, Poly, PolyError};
use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TableError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: {source}")]
    Poly { line: usize, source: PolyError },
    #[error("generator {0} is not closed")]
    NotClosed(usize),
    #[error("generator {0} has the wrong degree")]
    WrongDegree(usize),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChartTable {
    pub hash: String,
    pub chart: String,
    pub coords: Vec<String>,
    pub divisor: Poly,
    pub dims: Vec<usize>,
    pub power: u32,
    pub gens: Vec<DiffForm>,
}

pub fn chart_vars(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("u{i}")).collect()
}

fn fmt_form(w: &DiffForm, vars: &[String]) -> String {
    if w.is_zero() {
        return "0".into();
    }
    let mut terms = Vec::new();
    for (mask, u) in &w.comps {
        let dx: Vec<String> = (0..w.n).filter(|i| mask & (1 << i) != 0).map(|i| format!("d{}", vars[i])).collect();
        let dx = if dx.is_empty() { "1".to_string() } else { dx.join("^") };
        terms.push(format!("{dx} : {} / D^{}", u.num.fmt_with(vars), u.power));
    }
    terms.join("; ")
}

fn parse_form(src: &str, degree: usize, base: &Arc<Poly>, vars: &[String], line: usize) -> Result<DiffForm, TableError> {
    let syntax = |msg: &str| TableError::Syntax { line, msg: msg.to_string() };
    let mut w = DiffForm::zero(base.clone(), degree);
    if src.trim() == "0" {
        return Ok(w);
    }
    for term in src.split(';') {
        let (dx, rest) = term.split_once(':').ok_or_else(|| syntax("term without ':'"))?;
        let (num, pow) = rest.rsplit_once("/ D^").ok_or_else(|| syntax("term without '/ D^'"))?;
        let power: u32 = pow.trim().parse().map_err(|_| syntax("bad power"))?;
        let num = parse_poly(num.trim(), vars).map_err(|source| TableError::Poly { line, source })?;
        let mut mask = 0u32;
        let dx = dx.trim();
        if dx != "1" {
            for d in dx.split('^') {
                let v = d.strip_prefix('d').ok_or_else(|| syntax("differential must start with 'd'"))?;
                let i = vars.iter().position(|x| x == v).ok_or_else(|| syntax("unknown differential"))?;
                mask |= 1 << i;
            }
        }
        if mask.count_ones() as usize != degree {
            return Err(TableError::WrongDegree(degree));
        }
        w = w.add(&DiffForm::monomial(LocalFraction::new(num, base.clone(), power), mask));
    }
    Ok(w)
}

impl ChartTable {
    pub fn from_seed(hash: &str, key: &SeedKey<'_>, seed: &NodeSeed) -> Self {
        ChartTable {
            hash: hash.to_string(),
            chart: key.name.to_string(),
            coords: key.coords.to_vec(),
            divisor: key.base.clone(),
            dims: seed.targets.clone(),
            power: seed.power,
            gens: seed.classes.clone(),
        }
    }

    pub fn seed(&self) -> NodeSeed {
        NodeSeed { targets: self.dims.clone(), power: self.power, classes: self.gens.clone() }
    }

    pub fn serialize(&self) -> String {
        let vars = chart_vars(self.divisor.nvars);
        let mut s = String::new();
        let _ = writeln!(s, "hash {}", self.hash);
        let _ = writeln!(s, "chart {}", self.chart);
        for (v, c) in vars.iter().zip(&self.coords) {
            let _ = writeln!(s, "coord {v} = {c}");
        }
        let _ = writeln!(s, "divisor {}", self.divisor.fmt_with(&vars));
        let dims: Vec<String> = self.dims.iter().map(|d| d.to_string()).collect();
        let _ = writeln!(s, "dims {}", dims.join(" "));
        let _ = writeln!(s, "power {}", self.power);
        for w in &self.gens {
            let _ = writeln!(s, "gen {} {}", w.degree, fmt_form(w, &vars));
        }
        s
    }

    /// Parses a table and checks that every generator is a closed form.
    pub fn parse(src: &str, nvars: usize) -> Result<Self, TableError> {
        let vars = chart_vars(nvars);
        let mut hash = None;
        let mut chart = None;
        let mut coords = Vec::new();
        let mut divisor: Option<Arc<Poly>> = None;
        let mut dims = Vec::new();
        let mut power = 0;
        let mut gens = Vec::new();
        for (i, raw) in src.lines().enumerate() {
            let line = i + 1;
            let syntax = |msg: &str| TableError::Syntax { line, msg: msg.to_string() };
            if raw.trim().is_empty() {
                continue;
            }
            let (key, rest) = raw.split_once(' ').unwrap_or((raw, ""));
            match key {
                "hash" => hash = Some(rest.to_string()),
                "chart" => chart = Some(rest.to_string()),
                "coord" => {
                    let (_, c) = rest.split_once(" = ").ok_or_else(|| syntax("coord without '='"))?;
                    coords.push(c.to_string());
                }
                "divisor" => {
                    let p = parse_poly(rest, &vars).map_err(|source| TableError::Poly { line, source })?;
                    divisor = Some(Arc::new(p));
                }
                "dims" => {
                    dims = rest
                        .split_whitespace()
                        .map(|t| t.parse::<usize>().map_err(|_| syntax("bad dimension")))
                        .collect::<Result<_, _>>()?;
                }
                "power" => power = rest.trim().parse().map_err(|_| syntax("bad power"))?,
                "gen" => {
                    let base = divisor.as_ref().ok_or_else(|| syntax("gen before divisor"))?;
                    let (deg, form) = rest.split_once(' ').ok_or_else(|| syntax("gen without form"))?;
                    let deg: usize = deg.parse().map_err(|_| syntax("bad degree"))?;
                    gens.push(parse_form(form, deg, base, &vars, line)?);
                }
                _ => return Err(syntax("unknown keyword")),
            }
        }
        let missing = |what: &str| TableError::Syntax { line: 0, msg: format!("missing {what}") };
        let table = ChartTable {
            hash: hash.ok_or_else(|| missing("hash"))?,
            chart: chart.ok_or_else(|| missing("chart"))?,
            coords,
            divisor: divisor.ok_or_else(|| missing("divisor"))?.as_ref().clone(),
            dims,
            power,
            gens,
        };
        for (k, w) in table.gens.iter().enumerate() {
            if !w.d().is_zero() {
                return Err(TableError::NotClosed(k));
            }
        }
        Ok(table)
    }

    pub fn file_name(&self) -> String {
        let tag: String = self
            .chart
            .chars()
            .map(|c| match c {
                ',' => '_',
                '|' => '-',
                c if c.is_ascii_alphanumeric() => c,
                _ => 'x',
            })
            .collect();
        let digest = hex::encode(Sha256::digest(self.divisor.fmt_with(&chart_vars(self.divisor.nvars))));
        format!("{tag}.{}.chart", &digest[..12])
    }
}

/// Writes `contents` to `path` through a temporary file in the same
/// directory, so readers never see a partial file.
pub fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let dir = path.parent().unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

/// Chart tables kept under `<workspace>/<input hash>/`.
pub struct DirStore {
    pub dir: Option<PathBuf>,
    pub hash: String,
    used: Mutex<BTreeMap<String, ChartTable>>,
    pub hits: Mutex<usize>,
    pub warnings: Mutex<Vec<String>>,
}

impl DirStore {
    pub fn new(workspace: Option<&Path>, hash: &str) -> Self {
        DirStore {
            dir: workspace.map(|w| w.join(hash)),
            hash: hash.to_string(),
            used: Mutex::new(BTreeMap::new()),
            hits: Mutex::new(0),
            warnings: Mutex::new(Vec::new()),
        }
    }

    pub fn tables(&self) -> Vec<ChartTable> {
        self.used.lock().unwrap().values().cloned().collect()
    }

    fn remember(&self, t: ChartTable) {
        self.used.lock().unwrap().insert(t.file_name(), t);
    }
}

impl SeedStore for DirStore {
    fn load(&self, key: &SeedKey<'_>) -> Option<NodeSeed> {
        let probe = ChartTable {
            hash: self.hash.clone(),
            chart: key.name.to_string(),
            coords: Vec::new(),
            divisor: key.base.clone(),
            dims: Vec::new(),
            power: 0,
            gens: Vec::new(),
        };
        let path = self.dir.as_ref()?.join(probe.file_name());
        let src = fs::read_to_string(&path).ok()?;
        match ChartTable::parse(&src, key.base.nvars) {
            Ok(t) if t.divisor == *key.base && t.chart == key.name && t.hash == self.hash => {
                *self.hits.lock().unwrap() += 1;
                let seed = t.seed();
                self.remember(t);
                Some(seed)
            }
            Ok(_) => None,
            Err(e) => {
                self.warnings.lock().unwrap().push(format!("ignoring {}: {e}", path.display()));
                None
            }
        }
    }

    fn store(&self, key: &SeedKey<'_>, seed: &NodeSeed) {
        let t = ChartTable::from_seed(&self.hash, key, seed);
        if let Some(dir) = &self.dir {
            if let Err(e) = write_atomic(&dir.join(t.file_name()), &t.serialize()) {
                self.warnings.lock().unwrap().push(format!("cache write failed: {e}"));
            }
        }
        self.remember(t);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use derham_core::poly::Poly;
    use derham_core::rat::Q;

    fn sample() -> ChartTable {
        let vars = chart_vars(2);
        let base = Arc::new(parse_poly("u0*u1*(u0^2*u1-u1-1)", &vars).unwrap());
        let f = |s: &str, p: u32| LocalFraction::new(parse_poly(s, &vars).unwrap(), base.clone(), p);
        let one = DiffForm::function(LocalFraction::poly(Poly::one(2), base.clone()));
        let ds = DiffForm::monomial(f("u1*(u0^2*u1-u1-1)", 1), 1);
        let half = ds.scale(&Q::new(1.into(), 2.into()));
        let top = DiffForm::monomial(f("u0^2*u1-u1-1", 1), 3);
        ChartTable {
            hash: "ab12".into(),
            chart: "A,C|0".into(),
            coords: vec!["x/z".into(), "y*z^2/w".into()],
            divisor: base.as_ref().clone(),
            dims: vec![1, 2, 1],
            power: 1,
            gens: vec![one, ds, half, top],
        }
    }

    #[test]
    fn round_trip() {
        let t = sample();
        let s = t.serialize();
        let back = ChartTable::parse(&s, 2).unwrap();
        assert_eq!(back, t);
        assert_eq!(back.serialize(), s);
    }

    #[test]
    fn rejects_open_forms() {
        let s = sample().serialize().replace("gen 0 1 : 1 / D^0", "gen 0 1 : u0 / D^0");
        assert!(matches!(ChartTable::parse(&s, 2), Err(TableError::NotClosed(0))));
    }

    #[test]
    fn reports_syntax_line() {
        let s = sample().serialize().replace("power 1", "power x");
        assert!(matches!(ChartTable::parse(&s, 2), Err(TableError::Syntax { line: 7, .. })));
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a").join("t.chart");
        write_atomic(&p, "one").unwrap();
        write_atomic(&p, "two").unwrap();
        assert_eq!(fs::read_to_string(&p).unwrap(), "two");
        assert_eq!(fs::read_dir(p.parent().unwrap()).unwrap().count(), 1);
    }
}
