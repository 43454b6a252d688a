use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use gcx::biweight::{fw_basis, q_basis, FwGC, FwPart, QPart, WeightCap, QGC};
use gcx::chainmaps::{verify_named, ChainWindow, MapName};
use gcx::exactla::Field;
use gcx::gcomplex::{d_squared_failures, degree_bound_check, Base, Flavor, GraphComplex};
use gcx::graphcore::Subcomplex;
use gcx::grtwitness::{derivation, lift, mixed_basis, tetrahedron_witnesses, MixedGC, Witness};
use gcx::homology::{basis_at, cohomology_dims, Window};

#[derive(Parser)]
#[command(name = "gcx", version, about = "Graph complex computations")]
struct Cli {
    /// Worker threads (GCX_THREADS overrides).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// List the nonzero classes in one bidegree.
    Enumerate {
        #[command(flatten)]
        cx: ComplexArgs,
        #[arg(long)]
        v: usize,
        #[arg(long)]
        e: usize,
        /// Also write one graph per line to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cohomology dimensions at a fixed loop order.
    Cohomology {
        #[command(flatten)]
        cx: ComplexArgs,
        /// Loop order.
        #[arg(short = 'b', long)]
        loops: Option<i64>,
        /// Loop graphs with 1..=N edges (b2GC only).
        #[arg(long)]
        i_max: Option<usize>,
        #[arg(long, allow_hyphen_values = true)]
        lo: Option<i64>,
        #[arg(long, allow_hyphen_values = true)]
        hi: Option<i64>,
        /// Largest vertex count; defaults to 2b-2.
        #[arg(long)]
        v_max: Option<usize>,
        #[arg(long, default_value = "rational", value_parser = parse_field)]
        field: Field,
        /// Write the differentials as SMS files into this directory.
        #[arg(long)]
        sms_dir: Option<PathBuf>,
    },
    /// Check an identity on a window.
    Verify {
        #[command(subcommand)]
        what: Verify,
    },
    /// Tetrahedron-class witnesses in the sourced-and-targeted complex.
    Grt {
        #[arg(long, default_value = "rational", value_parser = parse_field)]
        field: Field,
        #[arg(long)]
        emit_derivations: bool,
        #[arg(long, default_value_t = 1)]
        m: usize,
        #[arg(long, default_value_t = 1)]
        n: usize,
    },
}

#[derive(Subcommand)]
enum Verify {
    /// d∘d = 0 on every class with at most --v vertices and --e edges.
    D2 {
        #[command(flatten)]
        cx: ComplexArgs,
        #[arg(long, default_value_t = 4)]
        v: usize,
        #[arg(long, default_value_t = 6)]
        e: usize,
    },
    /// A named map commutes with the differentials.
    Chainmap {
        /// f, b, fs, ft, a, aplusb, b-corrupted, a-swapped
        name: String,
        #[command(flatten)]
        k: Degree,
        #[arg(long, default_value_t = 3)]
        v: usize,
        #[arg(long, default_value_t = 5)]
        e: usize,
    },
    /// No GC_k generator above degree (3-k)b-3.
    DegreeBound {
        #[command(flatten)]
        k: Degree,
        #[arg(short = 'b', long)]
        loops: i64,
    },
}

#[derive(Args)]
struct Degree {
    #[arg(short = 'k')]
    k: Option<i64>,
    /// With --q, sets k = p+q+1.
    #[arg(long, requires = "q")]
    p: Option<i64>,
    #[arg(long, requires = "p")]
    q: Option<i64>,
}

#[derive(Args)]
struct ComplexArgs {
    /// cfGC, GC, b2GC, cfdGC, dGC, dGC/<s|t|st|s+t|or|wh>, wheeled,
    /// mixed[/st][/zd], qGC, qGC+, tGC+, tGC*, fwGC, fwGC+
    #[arg(long, default_value = "cfGC")]
    flavor: String,
    #[command(flatten)]
    k: Degree,
    /// Per-vertex weight cap W for fwGC.
    #[arg(long, default_value_t = 3)]
    cap: u32,
}

fn parse_field(s: &str) -> Result<Field, String> {
    match s {
        "rational" | "q" => Ok(Field::Rational),
        _ => s
            .strip_prefix("gf")
            .and_then(|p| p.parse().ok())
            .filter(|&p: &u64| p > 1)
            .map(Field::Prime)
            .ok_or_else(|| format!("unknown field {s}; use rational or gf<p>")),
    }
}

struct Usage(String);

impl Degree {
    fn resolve(&self, default: i64) -> Result<i64, Usage> {
        match (self.k, self.p.zip(self.q)) {
            (Some(k), Some((p, q))) if k != p + q + 1 => Err(Usage(format!("k={k} but p+q+1={}", p + q + 1))),
            (_, Some((p, q))) => Ok(p + q + 1),
            (Some(k), None) => Ok(k),
            (None, None) => Ok(default),
        }
    }
}

enum Complex {
    Plain(Flavor),
    Mixed(MixedGC),
    Decorated(QGC),
    Weighted(FwGC),
}

impl Complex {
    fn parse(a: &ComplexArgs) -> Result<Self, Usage> {
        let k = a.k.resolve(2)?;
        let base = |b| Ok(Complex::Plain(Flavor::new(b, k)));
        let sub = |s: &str| {
            Some(match s {
                "s" => Subcomplex::Sourced,
                "t" => Subcomplex::Targeted,
                "st" => Subcomplex::St,
                "s+t" => Subcomplex::SPlusT,
                "or" => Subcomplex::Oriented,
                "wh" => Subcomplex::WheeledOnly,
                _ => return None,
            })
        };
        match a.flavor.as_str() {
            "cfGC" => base(Base::UndirectedFull),
            "GC" => base(Base::UndirectedGC),
            "b2GC" => base(Base::LoopGraphs),
            "cfdGC" => base(Base::DirectedFull),
            "dGC" => base(Base::DirectedDGC),
            "wheeled" => Ok(Complex::Plain(Flavor::wheeled(k))),
            "mixed" | "mixed/st" | "mixed/zd" | "mixed/st/zd" => {
                if k != 3 {
                    return Err(Usage("the mixed complex is defined for k=3".into()));
                }
                Ok(Complex::Mixed(MixedGC::new(a.flavor.contains("st"), a.flavor.contains("zd"))))
            }
            "qGC" => Ok(Complex::Decorated(QGC::new(k, QPart::All))),
            "qGC+" => Ok(Complex::Decorated(QGC::new(k, QPart::Plus))),
            "tGC+" => Ok(Complex::Decorated(QGC::new(k, QPart::TPlus))),
            "tGC*" => Ok(Complex::Decorated(QGC::new(k, QPart::TStar))),
            "fwGC" | "fwGC+" => {
                if a.cap < 2 {
                    return Err(Usage("weight cap must be at least 2".into()));
                }
                let part = if a.flavor == "fwGC" { FwPart::All } else { FwPart::Plus };
                Ok(Complex::Weighted(FwGC::new(k, WeightCap::component(a.cap), part)))
            }
            other => match other.strip_prefix("dGC/").and_then(sub) {
                Some(q) => Ok(Complex::Plain(Flavor::quotient(Base::DirectedDGC, k, q))),
                None => Err(Usage(format!("unknown flavor {other}"))),
            },
        }
    }

    fn as_dyn(&self) -> &dyn GraphComplex {
        match self {
            Complex::Plain(f) => f,
            Complex::Mixed(m) => m,
            Complex::Decorated(q) => q,
            Complex::Weighted(w) => w,
        }
    }

    fn basis(&self, v: usize, e: usize) -> Result<Vec<String>, gcx::Error> {
        match self {
            Complex::Plain(f) => basis_at(f, v, e),
            Complex::Mixed(m) => mixed_basis(m, v, e),
            Complex::Decorated(q) => q_basis(q, v, e),
            Complex::Weighted(w) => fw_basis(w, v, e),
        }
    }

    fn k(&self) -> i64 {
        match self {
            Complex::Plain(f) => f.k,
            Complex::Mixed(_) => 3,
            Complex::Decorated(q) => q.k,
            Complex::Weighted(w) => w.k,
        }
    }

    fn name(&self) -> String {
        match self {
            Complex::Plain(f) => f.name(),
            Complex::Mixed(m) => m.name(),
            Complex::Decorated(q) => format!("{:?}", q.part),
            Complex::Weighted(w) => format!("fwGC/{:?}", w.part),
        }
    }
}

enum Failure {
    Usage(String),
    Run(String),
}

impl From<Usage> for Failure {
    fn from(u: Usage) -> Self {
        Failure::Usage(u.0)
    }
}

impl From<gcx::Error> for Failure {
    fn from(e: gcx::Error) -> Self {
        match e {
            gcx::Error::Window(_) | gcx::Error::EmptyDomain => Failure::Usage(e.to_string()),
            _ => Failure::Run(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Run(e.to_string())
    }
}

fn field_name(f: Field) -> String {
    match f {
        Field::Rational => "rational".into(),
        Field::Prime(p) => format!("gf{p}"),
    }
}

/// Returns the JSON report and whether every assertion held.
fn run(cmd: Cmd) -> Result<(Value, bool), Failure> {
    match cmd {
        Cmd::Enumerate { cx, v, e, out } => {
            let c = Complex::parse(&cx)?;
            let graphs = c.basis(v, e)?;
            if let Some(path) = &out {
                let mut text = graphs.join("\n");
                if !text.is_empty() {
                    text.push('\n');
                }
                std::fs::write(path, text)?;
            }
            Ok((
                json!({"flavor": c.name(), "k": c.k(),
                       "v": v, "e": e, "count": graphs.len(), "graphs": graphs, "out": out}),
                true,
            ))
        }
        Cmd::Cohomology { cx, loops, i_max, lo, hi, v_max, field, sms_dir } => {
            let Complex::Plain(f) = Complex::parse(&cx)? else {
                return Err(Failure::Usage("cohomology supports the undecorated flavors".into()));
            };
            let (b, lo, hi, v_max) = if f.base == Base::LoopGraphs {
                let n = i_max.unwrap_or(9).max(1);
                (1, lo.unwrap_or(1 - f.k), hi.unwrap_or(n as i64 - f.k), v_max.unwrap_or(n))
            } else {
                let b = loops.ok_or_else(|| Failure::Usage("-b is required".into()))?;
                if b < 1 {
                    return Err(Failure::Usage("loop order must be positive".into()));
                }
                let v_max = v_max.unwrap_or((2 * b as usize).saturating_sub(2).max(1));
                let base = (1 - f.k) * b;
                (b, lo.unwrap_or(base), hi.unwrap_or(base + v_max as i64 - 1), v_max)
            };
            if lo > hi {
                return Err(Failure::Usage(format!("empty degree range {lo}..{hi}")));
            }
            // the differential out of the top degree needs one more vertex
            let r = cohomology_dims(&f, b, lo, hi, Window { v_max: v_max + 1 }, field, sms_dir.is_some())?;
            let mut files = Vec::new();
            if let Some(dir) = &sms_dir {
                std::fs::create_dir_all(dir)?;
                for (name, text) in &r.matrices {
                    let path = dir.join(name);
                    std::fs::write(&path, text)?;
                    files.push(path);
                }
            }
            let mut out = serde_json::to_value(&r).map_err(|e| Failure::Run(e.to_string()))?;
            out["sms_files"] = json!(files);
            Ok((out, true))
        }
        Cmd::Verify { what: Verify::D2 { cx, v, e } } => {
            let c = Complex::parse(&cx)?;
            let mut keys = Vec::new();
            for vv in 1..=v {
                for ee in 0..=e {
                    keys.extend(c.basis(vv, ee)?);
                }
            }
            let bad = d_squared_failures(c.as_dyn(), &keys);
            let examples: Vec<&String> = bad.iter().take(5).map(|(k, _)| k).collect();
            let pass = bad.is_empty();
            Ok((
                json!({"check": "d2", "flavor": c.name(), "v_max": v, "e_max": e,
                       "checked": keys.len(), "failures": bad.len(), "examples": examples, "pass": pass}),
                pass,
            ))
        }
        Cmd::Verify { what: Verify::Chainmap { name, k, v, e } } => {
            let map = MapName::parse(&name).ok_or_else(|| Failure::Usage(format!("unknown map {name}")))?;
            let r = verify_named(map, k.resolve(3)?, ChainWindow { v_max: v, e_max: e })?;
            let pass = r.pass;
            Ok((serde_json::to_value(&r).map_err(|e| Failure::Run(e.to_string()))?, pass))
        }
        Cmd::Verify { what: Verify::DegreeBound { k, loops } } => {
            let k = k.resolve(2)?;
            let r = degree_bound_check(k, loops)?;
            let pass = r.verified_empty_above;
            Ok((
                json!({"check": "degree-bound", "k": k, "b": loops, "bound": (3 - k) * loops - 3,
                       "max_degree": r.max_degree, "pass": pass}),
                pass,
            ))
        }
        Cmd::Grt { field, emit_derivations, m, n } => {
            let r = tetrahedron_witnesses(field)?;
            let lifts = [lift(Witness::S), lift(Witness::T)];
            let mut out = json!({
                "field": field_name(field),
                "report": r,
                "alpha_closed": r.s.alpha_closed && r.t.alpha_closed,
                "alpha_s_in_image": r.s.alpha_in_span,
                "alpha_t_in_image": r.t.alpha_in_span,
                "difference_in_image": r.difference_in_span,
                "lifts": lifts,
            });
            if emit_derivations {
                out["derivations"] = json!([derivation(Witness::S, m, n)?, derivation(Witness::T, m, n)?]);
            }
            let pass = r.pass && lifts.iter().all(|l| l.pass);
            out["pass"] = json!(pass);
            Ok((out, pass))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = std::env::var("GCX_THREADS").ok().and_then(|s| s.parse().ok()).or(cli.threads);
    if let Some(t) = threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("gcx: {e}");
        }
    }
    let (value, code) = match run(cli.cmd) {
        Ok((v, pass)) => (v, if pass { 0 } else { 1 }),
        Err(Failure::Usage(msg)) => (json!({"error": msg, "kind": "usage"}), 2),
        Err(Failure::Run(msg)) => (json!({"error": msg}), 1),
    };
    println!("{}", serde_json::to_string_pretty(&value).expect("reports serialize"));
    ExitCode::from(code)
}
