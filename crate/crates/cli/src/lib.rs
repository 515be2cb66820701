//! Command-line front end for the de Rham cohomology engine.

pub mod table;

use std::fmt::Write as _;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use derham_core::duality::{
    affine_atlas, closed_variety_cohomology, compact_support_affine, locally_closed_cohomology,
};
use derham_core::glue::{cup_products, open_set_cohomology, BettiReport, ChartAtlas, Glued, GlueOptions};
use derham_core::poly::{parse_poly, Poly};
use derham_core::rat::Q;
use derham_core::toricfan::{toric_open_cohomology, Fan2D};
use num_traits::Zero;
use sha2::{Digest, Sha256};

use table::{write_atomic, DirStore};

/// Environment variable naming the chart-table workspace.
pub const WORKSPACE_ENV: &str = "DERHAM_WORKSPACE";

#[derive(Parser, Debug)]
#[command(name = "derham", version, about = "Exact algebraic de Rham cohomology of hypersurface complements")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Step cap for each Gröbner basis computation.
    #[arg(long, global = true, default_value_t = 5_000_000)]
    pub max_gb_steps: usize,
    /// Highest exhaustion level when enlarging chart subcomplexes.
    #[arg(long, global = true, default_value_t = 12)]
    pub max_level: u32,
    /// Also write the chart tables used by this run into DIR.
    #[arg(long, global = true, value_name = "DIR")]
    pub table: Option<PathBuf>,
    /// Chart-table cache directory (defaults to $DERHAM_WORKSPACE).
    #[arg(long, global = true, value_name = "DIR")]
    pub workspace: Option<PathBuf>,
    /// Disable the chart-table cache.
    #[arg(long, global = true)]
    pub no_cache: bool,
    /// Integrate charts in parallel.
    #[arg(long, global = true)]
    pub parallel: bool,
}

#[derive(Args, Debug, Clone)]
pub struct Input {
    /// Comma-separated variable names.
    #[arg(long, value_delimiter = ',', required = true)]
    pub vars: Vec<String>,
    /// Polynomial; repeat for several divisors.
    #[arg(long, required = true)]
    pub poly: Vec<String>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// De Rham cohomology of affine space minus Var(f).
    Affine(Input),
    /// Projective space minus Var(f_0, ..., f_r); homogeneous variables.
    Open(Input),
    /// Closed subvariety Var(f_0, ..., f_r) of projective space.
    Closed(Input),
    /// Compactly supported cohomology of Var(f) in affine space.
    Compact(Input),
    /// Var(f) minus Var(g) inside projective space.
    LocallyClosed {
        #[command(flatten)]
        input: Input,
        /// The polynomial g cutting out the removed points.
        #[arg(long)]
        minus: String,
    },
    /// Cup product table of projective space minus Var(f_0, ..., f_r).
    Cup {
        #[arg(long, value_delimiter = ',', required = true)]
        vars: Vec<String>,
        /// Polynomial; repeat for several divisors, omit for the whole space.
        #[arg(long)]
        poly: Vec<String>,
    },
    /// A smooth complete toric surface, optionally minus a divisor.
    Toric {
        /// Rays in counterclockwise order, e.g. "1,0;0,1;-1,2;0,-1".
        #[arg(long)]
        rays: String,
        /// Cox variable names, one per ray.
        #[arg(long, value_delimiter = ',')]
        cox: Option<Vec<String>>,
        /// Divisor as a Cox polynomial.
        #[arg(long, conflicts_with = "characters")]
        poly: Option<String>,
        /// Divisor as a polynomial in the torus characters s, t.
        #[arg(long)]
        characters: Option<String>,
        /// Line-bundle twist per ray for --characters.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        twist: Option<Vec<i64>>,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{flag}: {source}")]
    Parse { flag: &'static str, source: derham_core::poly::PolyError },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Glue(#[from] derham_core::glue::GlueError),
    #[error(transparent)]
    Fan(#[from] derham_core::toricfan::FanError),
    #[error(transparent)]
    Integrate(#[from] derham_core::integrate::IntegrateError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Output of one command: the text report and any warnings.
#[derive(Debug, Default)]
pub struct Outcome {
    pub report: String,
    pub warnings: Vec<String>,
    pub cache_hits: usize,
    pub tables_written: usize,
}

fn polys(flag: &'static str, srcs: &[String], names: &[String]) -> Result<Vec<Poly>, CliError> {
    srcs.iter().map(|s| parse_poly(s, names).map_err(|source| CliError::Parse { flag, source })).collect()
}

fn input_hash(cmd: &Command) -> String {
    let mut h = Sha256::new();
    h.update(env!("CARGO_PKG_VERSION"));
    h.update(format!("{cmd:?}"));
    hex::encode(h.finalize())
}

fn betti_header(out: &mut String, label: &str, betti: &[usize]) {
    let line: Vec<String> = betti.iter().map(|b| b.to_string()).collect();
    let _ = writeln!(out, "{label} {}", line.join(" "));
}

fn degree_lines(out: &mut String, betti: &[usize]) {
    for (k, d) in betti.iter().enumerate() {
        let _ = writeln!(out, "H{k} dim={d}");
    }
}

fn chart_legend(out: &mut String, g: &Glued) {
    for c in 0..g.atlas.num_charts() {
        let coords: Vec<String> =
            g.atlas.chart_names(c).iter().enumerate().map(|(i, s)| format!("u{i} = {s}")).collect();
        let _ = writeln!(out, "chart {}: {}", g.atlas.cone_names[c], coords.join(", "));
    }
}

/// Degree lines, each followed by its generator cocycles node by node.
fn generator_listing(out: &mut String, g: &Glued, rep: &BettiReport) {
    let vars = table::chart_vars(g.dim());
    for (k, d) in rep.betti.iter().enumerate() {
        let _ = writeln!(out, "H{k} dim={d}");
        for (a, gen) in rep.generators[k].iter().enumerate() {
            let _ = writeln!(out, "  gen {k}.{a}");
            for (node, w) in &gen.comps {
                if !w.is_zero() {
                    let _ = writeln!(out, "    [{}] {}", g.node_name(node), w.fmt_with(&vars));
                }
            }
        }
    }
}

fn fmt_coords(v: &[Q]) -> String {
    let parts: Vec<String> = v.iter().map(|c| c.to_string()).collect();
    format!("({})", parts.join(", "))
}

fn fan_from_rays(src: &str) -> Result<Fan2D, CliError> {
    let mut rays = Vec::new();
    for item in src.split(';') {
        let xy: Vec<i64> = item
            .split(',')
            .map(|t| t.trim().parse::<i64>())
            .collect::<Result<_, _>>()
            .map_err(|_| CliError::Usage(format!("--rays: bad ray '{item}'")))?;
        if xy.len() != 2 {
            return Err(CliError::Usage(format!("--rays: ray '{item}' must have two entries")));
        }
        rays.push([xy[0], xy[1]]);
    }
    Ok(Fan2D::from_rays(rays)?)
}

/// Runs one parsed command and returns its report.
pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let c = &cli.common;
    let hash = input_hash(&cli.command);
    let workspace = if c.no_cache {
        None
    } else {
        c.workspace.clone().or_else(|| std::env::var_os(WORKSPACE_ENV).map(PathBuf::from))
    };
    let store = Arc::new(DirStore::new(workspace.as_deref(), &hash));
    let mut opts = GlueOptions { max_level: c.max_level, parallel: c.parallel, store: Some(store.clone()), ..Default::default() };
    opts.integrate.gb.max_steps = c.max_gb_steps;
    let mut out = String::new();
    match &cli.command {
        Command::Affine(inp) => {
            let fs = polys("--poly", &inp.poly, &inp.vars)?;
            let (g, mut rep) = open_set_cohomology(affine_atlas(&inp.vars), fs, opts)?;
            let n = inp.vars.len();
            rep.betti.truncate(n + 1);
            rep.generators.truncate(n + 1);
            betti_header(&mut out, "betti", &rep.betti);
            let _ = writeln!(out, "chart A: {}", coords_identity(&inp.vars));
            generator_listing(&mut out, &g, &rep);
        }
        Command::Open(inp) => {
            let (fs, n) = projective_input(inp)?;
            let (g, rep) = open_set_cohomology(ChartAtlas::projective(n, &inp.vars), fs, opts)?;
            betti_header(&mut out, "betti", &rep.betti);
            chart_legend(&mut out, &g);
            generator_listing(&mut out, &g, &rep);
        }
        Command::Closed(inp) => {
            let (fs, n) = projective_input(inp)?;
            let r = closed_variety_cohomology(n, fs, opts)?;
            betti_header(&mut out, "betti", &r.betti);
            degree_lines(&mut out, &r.betti);
            betti_header(&mut out, "complement", &r.ledger.betti_u);
            for (k, v) in r.ledger.chern_vanishing.iter().enumerate() {
                let _ = writeln!(out, "c{k} {}", if *v { "vanishes" } else { "nonzero" });
            }
            sequences(&mut out, &r.ledger.sequences);
        }
        Command::Compact(inp) => {
            let fs = polys("--poly", &inp.poly, &inp.vars)?;
            let (_, rep) = open_set_cohomology(affine_atlas(&inp.vars), fs, opts)?;
            let hu = &rep.betti[..inp.vars.len() + 1];
            let hc = compact_support_affine(hu);
            betti_header(&mut out, "betti", &hc);
            degree_lines(&mut out, &hc);
            betti_header(&mut out, "complement", hu);
        }
        Command::LocallyClosed { input, minus } => {
            let (fs, n) = projective_input(input)?;
            if fs.len() != 1 {
                return Err(CliError::Usage("locally-closed takes exactly one --poly".into()));
            }
            let g = polys("--minus", std::slice::from_ref(minus), &input.vars)?.remove(0);
            let r = locally_closed_cohomology(n, fs.into_iter().next().unwrap(), g, opts)?;
            betti_header(&mut out, "betti", &r.betti);
            degree_lines(&mut out, &r.betti);
            for (label, row) in [
                ("H(P)", &r.h_p),
                ("H(V)", &r.h_v),
                ("H(U)", &r.h_u),
                ("H_Z(P)", &r.h_z_supp),
                ("H(Z)", &r.h_z),
                ("H_Y(P)", &r.h_y_supp),
                ("H(Y)", &r.h_y),
                ("ker(V->U)", &r.ker_vu),
                ("im(P->V)", &r.im_pv),
            ] {
                betti_header(&mut out, &format!("row {label}"), row);
            }
            sequences(&mut out, &r.sequences);
        }
        Command::Cup { vars, poly } => {
            let n = vars.len().checked_sub(1).ok_or_else(|| CliError::Usage("--vars is empty".into()))?;
            let fs = polys("--poly", poly, vars)?;
            let mut g = Glued::new(ChartAtlas::projective(n, vars), fs, opts)?;
            let (rep, table) = cup_products(&mut g)?;
            let top = 2 * n + 1;
            betti_header(&mut out, "betti", &rep.betti[..top.min(rep.betti.len())]);
            chart_legend(&mut out, &g);
            let mut trimmed = rep.clone();
            trimmed.betti.truncate(top);
            trimmed.generators.truncate(top);
            generator_listing(&mut out, &g, &trimmed);
            for ((i, a, j, b), coords) in &table.products {
                if coords.iter().any(|x| !x.is_zero()) || (i + j < top && rep.betti[i + j] > 0) {
                    let _ = writeln!(out, "cup {i}.{a} * {j}.{b} = {}", fmt_coords(coords));
                }
            }
        }
        Command::Toric { rays, cox, poly, characters, twist } => {
            let mut fan = fan_from_rays(rays)?;
            if let Some(names) = cox {
                if names.len() != fan.rays.len() {
                    return Err(CliError::Usage("--cox needs one name per ray".into()));
                }
                fan.ray_names = names.clone();
            }
            let divisor = match (poly, characters) {
                (Some(p), _) => Some(polys("--poly", std::slice::from_ref(p), &fan.ray_names)?.remove(0)),
                (None, Some(ch)) => {
                    let st = vec!["s".to_string(), "t".to_string()];
                    let lp = polys("--characters", std::slice::from_ref(ch), &st)?.remove(0);
                    let tw = twist.clone().unwrap_or_else(|| vec![0; fan.rays.len()]);
                    if tw.len() != fan.rays.len() {
                        return Err(CliError::Usage("--twist needs one entry per ray".into()));
                    }
                    Some(fan.from_characters(&lp, &tw)?)
                }
                (None, None) => None,
            };
            if let Some(f) = &divisor {
                let _ = writeln!(out, "divisor {}", f.fmt_with(&fan.ray_names));
            }
            let (g, rep) = toric_open_cohomology(&fan, divisor, opts)?;
            betti_header(&mut out, "betti", &rep.betti);
            chart_legend(&mut out, &g);
            generator_listing(&mut out, &g, &rep);
        }
    }
    let mut outcome = Outcome { report: out, ..Default::default() };
    if let Some(dir) = &c.table {
        for t in store.tables() {
            write_atomic(&dir.join(t.file_name()), &t.serialize())?;
            outcome.tables_written += 1;
        }
    }
    outcome.cache_hits = *store.hits.lock().unwrap();
    outcome.warnings = store.warnings.lock().unwrap().clone();
    Ok(outcome)
}

fn coords_identity(vars: &[String]) -> String {
    vars.iter().enumerate().map(|(i, v)| format!("u{i} = {v}")).collect::<Vec<_>>().join(", ")
}

fn projective_input(inp: &Input) -> Result<(Vec<Poly>, usize), CliError> {
    let n = inp.vars.len().checked_sub(1).ok_or_else(|| CliError::Usage("--vars is empty".into()))?;
    Ok((polys("--poly", &inp.poly, &inp.vars)?, n))
}

fn sequences(out: &mut String, seqs: &[derham_core::duality::ExactSequence]) {
    for s in seqs {
        let dims: Vec<String> = s.dims.iter().map(|d| d.to_string()).collect();
        let _ = writeln!(out, "sequence {}: {} (alternating sum {})", s.label, dims.join(" "), s.alternating_sum());
    }
}
