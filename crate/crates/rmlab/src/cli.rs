//! Command-line surface: reproducible batch runs with CSV/JSON output.
//!
//! Exit codes: 0 success, 2 invalid parameters, 3 unsupported
//! configuration (e.g. geometry in characteristic 2), 4 inconclusive
//! equivalence decision.

use std::io::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::codes::{self, BiGeneratedCode, ClassSelector, Family, ScanMode, Side, Verdict};
use crate::equiv;
use crate::error::{Error, Result};
use crate::fields::FieldContext;
use crate::geometry::{self, BoundSign, CurveParams};
use crate::linpoly::FqBasis;

#[derive(Parser)]
#[command(name = "rmlab", version, about = "rank-metric code laboratory")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct FieldArgs {
    /// field size q = p^e (alternative to --p/--e)
    #[arg(long)]
    q: Option<u64>,
    /// characteristic (overrides the factorization of --q)
    #[arg(long)]
    p: Option<u64>,
    /// extension degree of F_q over F_p
    #[arg(long)]
    e: Option<usize>,
    /// top extension degree: the tower ends at F_{q^n}
    #[arg(long)]
    n: usize,
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// output path; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
    /// worker threads for parallel scans
    #[arg(long)]
    threads: Option<usize>,
    /// seed for deterministic sampling
    #[arg(long, default_value = "0")]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Print tower parameters (modulus, sizes, distinguished elements)
    Field {
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Per-norm-class minimum distance table for C_{δ,s}
    Scan {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, default_value = "1")]
        s: usize,
        /// all | sample:<K> | alpha:<encoding>
        #[arg(long, default_value = "all")]
        classes: String,
        /// early-exit MRD decision instead of the exact scan
        #[arg(long)]
        decision: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Affine points of the obstruction curve over F_{q^{n/2}}
    Curve {
        #[command(flatten)]
        field: FieldArgs,
        /// norm class α = N_{q^n/q^{n/2}}(δ), as an encoding
        #[arg(long)]
        alpha: u64,
        #[arg(long, default_value = "1")]
        s: usize,
        /// use ε = -1 instead of +1
        #[arg(long)]
        negative_epsilon: bool,
        /// dump points instead of the summary row
        #[arg(long)]
        points: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// F_q-points of the quadric system W, with lift and V-correspondence
    Variety {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        alpha: u64,
        #[arg(long, default_value = "1")]
        s: usize,
        #[arg(long)]
        negative_epsilon: bool,
        /// run the 3-space disjointness check instead of enumerating W
        #[arg(long)]
        dimension_witness: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Left/right idealiser of a code
    Idealiser {
        #[command(flatten)]
        field: FieldArgs,
        /// delta_s:<delta>:<s> | gab:<r> | twisted:<eps>:<r> | quad:<h>:<r>
        #[arg(long)]
        family: String,
        #[arg(long, value_parser = ["left", "right"], default_value = "left")]
        side: String,
        /// also dump a basis of the idealiser
        #[arg(long)]
        basis: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Decide equivalence of two codes
    Equiv {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Certified Cafure-Matera lower bound q^m - (d-1)(d-2)q^{m-1/2} - 5d^{13/3}q^{m-1}
    Bound {
        #[arg(long)]
        m: u32,
        #[arg(long)]
        d: u64,
        #[arg(long)]
        q: Option<u64>,
        /// also report the least q with a certified-positive bound
        #[arg(long)]
        solve_min_q: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
}

/// Rows with a fixed column set; serializes to CSV or JSON with the same
/// keys and values.
struct Table {
    columns: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn new(columns: Vec<&'static str>) -> Table {
        Table { columns, rows: Vec::new() }
    }

    fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => {
                let mut out = String::new();
                out.push_str(&self.columns.join(","));
                out.push('\n');
                for row in &self.rows {
                    out.push_str(&row.join(","));
                    out.push('\n');
                }
                out
            }
            Format::Json => {
                let arr: Vec<serde_json::Value> = self
                    .rows
                    .iter()
                    .map(|row| {
                        let map: serde_json::Map<String, serde_json::Value> = self
                            .columns
                            .iter()
                            .zip(row)
                            .map(|(k, v)| (k.to_string(), serde_json::Value::String(v.clone())))
                            .collect();
                        serde_json::Value::Object(map)
                    })
                    .collect();
                let mut s = serde_json::to_string_pretty(&arr).expect("serializable");
                s.push('\n');
                s
            }
        }
    }
}

fn emit(table: &Table, output: &OutputArgs) -> Result<()> {
    let text = table.render(output.format);
    match &output.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Error::InvalidParameter(format!("cannot write output: {e}")))?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| Error::InvalidParameter(format!("cannot write output: {e}")))?;
        }
    }
    Ok(())
}

fn configure_threads(output: &OutputArgs) {
    if let Some(t) = output.threads {
        // ignore failure: the global pool can only be set once per process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
}

fn factor_prime_power(q: u64) -> Result<(u64, usize)> {
    if q < 2 {
        return Err(Error::InvalidParameter(format!("{q} is not a prime power")));
    }
    let mut p = 2;
    while p * p <= q {
        if q % p == 0 {
            break;
        }
        p += 1;
    }
    if p * p > q {
        return Ok((q, 1));
    }
    let mut e = 0;
    let mut rest = q;
    while rest % p == 0 {
        rest /= p;
        e += 1;
    }
    if rest != 1 {
        return Err(Error::InvalidParameter(format!("{q} is not a prime power")));
    }
    Ok((p, e))
}

fn build_context(args: &FieldArgs) -> Result<FieldContext> {
    let (p, e) = match (args.p, args.e, args.q) {
        (Some(p), e, _) => (p, e.unwrap_or(1)),
        (None, _, Some(q)) => factor_prime_power(q)?,
        _ => {
            return Err(Error::InvalidParameter(
                "field size required: give --q or --p/--e".into(),
            ))
        }
    };
    FieldContext::build_tower(p, e, args.n)
}

fn parse_classes(spec: &str, seed: u64) -> Result<ClassSelector> {
    if spec == "all" {
        return Ok(ClassSelector::All);
    }
    if let Some(k) = spec.strip_prefix("sample:") {
        let count: usize = k
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("bad sample count {k}")))?;
        return Ok(ClassSelector::Sample { count, seed });
    }
    if let Some(a) = spec.strip_prefix("alpha:") {
        let alpha: u64 = a
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("bad alpha encoding {a}")))?;
        return Ok(ClassSelector::Alpha(alpha));
    }
    Err(Error::InvalidParameter(format!(
        "class selector {spec} is not all | sample:K | alpha:<enc>"
    )))
}

fn parse_family(spec: &str) -> Result<Family> {
    let parts: Vec<&str> = spec.split(':').collect();
    let num = |s: &str| -> Result<u64> {
        s.parse()
            .map_err(|_| Error::InvalidParameter(format!("bad number {s} in family {spec}")))
    };
    match parts.as_slice() {
        ["delta_s", d, s] => Ok(Family::DeltaS { delta: num(d)?, s: num(s)? as usize }),
        ["gab", r] => Ok(Family::Gabidulin { r: num(r)? as usize }),
        ["twisted", eps, r] => Ok(Family::Twisted { eps: num(eps)?, r: num(r)? as usize }),
        ["quad", h, r] => Ok(Family::Quadrinomial { h: num(h)?, r: num(r)? as usize }),
        _ => Err(Error::InvalidParameter(format!(
            "family {spec} is not delta_s:<delta>:<s> | gab:<r> | twisted:<eps>:<r> | quad:<h>:<r>"
        ))),
    }
}

fn verdict_str(v: Verdict) -> String {
    match v {
        Verdict::Mrd => "MRD".into(),
        Verdict::AlmostMrd => "AlmostMRD".into(),
        Verdict::Other(d) => format!("Other({d})"),
    }
}

pub fn run() -> Result<()> {
    let cli = Cli::parse();
    dispatch(cli)
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Field { field, output } => {
            let ctx = build_context(&field)?;
            let mut table = Table::new(vec!["p", "e", "n", "size", "modulus"]);
            let modulus: Vec<String> = ctx.modulus().iter().map(|c| c.to_string()).collect();
            table.push(vec![
                ctx.p().to_string(),
                ctx.e().to_string(),
                ctx.n().to_string(),
                ctx.size().to_string(),
                modulus.join(":"),
            ]);
            emit(&table, &output)
        }
        Command::Scan { field, s, classes, decision, output } => {
            configure_threads(&output);
            let ctx = build_context(&field)?;
            let selector = parse_classes(&classes, output.seed)?;
            let mode = if decision { ScanMode::Decision } else { ScanMode::Exact };
            let rows = codes::norm_class_scan(&ctx, s, &selector, mode)?;
            let mut table = Table::new(vec![
                "alpha_encoding",
                "delta_representative_encoding",
                "min_distance",
                "verdict",
            ]);
            for r in rows {
                table.push(vec![
                    r.alpha.to_string(),
                    r.delta_representative.to_string(),
                    r.min_distance.to_string(),
                    verdict_str(r.verdict),
                ]);
            }
            emit(&table, &output)
        }
        Command::Curve { field, alpha, s, negative_epsilon, points, output } => {
            let ctx = build_context(&field)?;
            let params = CurveParams::from_alpha(&ctx, alpha, s, !negative_epsilon)?;
            let pts = geometry::curve_points(&ctx, &params, false)?;
            if points {
                let mut table = Table::new(vec!["s_encoding", "z_encoding"]);
                for (sv, zv) in pts {
                    table.push(vec![sv.to_string(), zv.to_string()]);
                }
                emit(&table, &output)
            } else {
                let z_nonzero = pts.iter().filter(|&&(_, z)| z != 0).count();
                let mut table = Table::new(vec![
                    "alpha",
                    "beta",
                    "eta",
                    "points",
                    "points_z_nonzero",
                ]);
                table.push(vec![
                    alpha.to_string(),
                    params.beta.to_string(),
                    params.eta.to_string(),
                    pts.len().to_string(),
                    z_nonzero.to_string(),
                ]);
                emit(&table, &output)
            }
        }
        Command::Variety { field, alpha, s, negative_epsilon, dimension_witness, output } => {
            let ctx = build_context(&field)?;
            let params = CurveParams::from_alpha(&ctx, alpha, s, !negative_epsilon)?;
            if dimension_witness {
                let dw = geometry::dimension_witness_check(&ctx, &params)?;
                let mut table = Table::new(vec![
                    "discriminant",
                    "points_checked",
                    "points_on_v",
                    "disjoint",
                ]);
                table.push(vec![
                    dw.discriminant.to_string(),
                    dw.points_checked.to_string(),
                    dw.points_on_v.to_string(),
                    dw.disjoint().to_string(),
                ]);
                return emit(&table, &output);
            }
            let basis = FqBasis::normal_at(&ctx, ctx.n() / 2)?;
            let w = geometry::build_variety_w(&ctx, &params, &basis)?;
            let v = geometry::build_variety_v(&ctx, &params)?;
            let pts = geometry::enumerate_w(&ctx, &w)?;
            let mut table = Table::new(vec![
                "s0", "s1", "s2", "s3", "z0", "z1", "z2", "z3",
                "z3_nonzero", "on_curve", "v_correspondence",
            ]);
            for p in pts {
                let (sv, zv) = geometry::lift_point(&ctx, &basis, &p.coords);
                let on_curve = params.eval(&ctx, sv, zv) == 0;
                let corr = geometry::correspondence_check(&ctx, &basis, &v, &p.coords);
                let mut row: Vec<String> = p.coords.iter().map(|c| c.to_string()).collect();
                row.push(p.z3_nonzero.to_string());
                row.push(on_curve.to_string());
                row.push(corr.to_string());
                table.push(row);
            }
            emit(&table, &output)
        }
        Command::Idealiser { field, family, side, basis, output } => {
            let ctx = build_context(&field)?;
            let fam = parse_family(&family)?;
            let code = BiGeneratedCode::make(&ctx, fam)?;
            let side = if side == "left" { Side::Left } else { Side::Right };
            let report = codes::idealiser(&ctx, &code, side)?;
            if basis {
                let mut table = Table::new(vec!["basis_coefficients"]);
                for b in &report.basis {
                    let cs: Vec<String> = b.coeffs().iter().map(|c| c.to_string()).collect();
                    table.push(vec![cs.join(":")]);
                }
                emit(&table, &output)
            } else {
                let mut table =
                    Table::new(vec!["family", "side", "dimension", "is_field", "exhaustive"]);
                table.push(vec![
                    family.clone(),
                    format!("{:?}", report.side).to_lowercase(),
                    report.dimension.to_string(),
                    report.is_field.to_string(),
                    report.exhaustive.to_string(),
                ]);
                emit(&table, &output)
            }
        }
        Command::Equiv { field, left, right, output } => {
            let ctx = build_context(&field)?;
            let lf = parse_family(&left)?;
            let rf = parse_family(&right)?;
            let lcode = BiGeneratedCode::make(&ctx, lf.clone())?;
            let rcode = BiGeneratedCode::make(&ctx, rf.clone())?;
            let dec = equiv::u_equiv_decide(&ctx, &lcode.f, &rcode.f)?;
            // cross-check against the closed-form criterion when possible
            let predicate = match (&lf, &rf) {
                (Family::DeltaS { delta: d1, s: s1 }, Family::DeltaS { delta: d2, s: s2 }) => {
                    equiv::delta_s_equivalent(&ctx, *d1, *s1, *d2, *s2)
                        .map(|b| b.to_string())
                        .unwrap_or_else(|_| "n/a".into())
                }
                _ => "n/a".into(),
            };
            let witness = dec
                .witness
                .map(|w| format!("{}:{}:{}:{}:{}", w.a, w.b, w.c, w.d, w.aut_p_exp))
                .unwrap_or_default();
            let mut table = Table::new(vec![
                "family_left",
                "family_right",
                "equivalent",
                "witness",
                "predicate",
            ]);
            table.push(vec![left, right, dec.equivalent.to_string(), witness, predicate]);
            emit(&table, &output)
        }
        Command::Bound { m, d, q, solve_min_q, output } => {
            let mut table = Table::new(vec![
                "q", "m", "d", "lower", "upper", "sign", "hypothesis_ok",
            ]);
            if let Some(q) = q {
                let rep = geometry::cafure_matera(q, m, d);
                let sign = match rep.sign {
                    BoundSign::Positive => "positive",
                    BoundSign::NonPositive => "non-positive",
                    BoundSign::Undetermined => "undetermined",
                };
                table.push(vec![
                    q.to_string(),
                    m.to_string(),
                    d.to_string(),
                    format!("{:.6e}", rep.interval.lo),
                    format!("{:.6e}", rep.interval.hi),
                    sign.to_string(),
                    rep.hypothesis_ok.to_string(),
                ]);
            }
            if solve_min_q {
                let qmin = geometry::min_q(m, d);
                table.push(vec![
                    qmin.to_string(),
                    m.to_string(),
                    d.to_string(),
                    String::new(),
                    String::new(),
                    "crossover".to_string(),
                    "true".to_string(),
                ]);
            }
            if table.rows.is_empty() {
                return Err(Error::InvalidParameter(
                    "bound needs --q and/or --solve-min-q".into(),
                ));
            }
            emit(&table, &output)
        }
    }
}

/// Maps an error to the documented process exit code.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::EvenCharacteristic | Error::FieldTooLarge(..) | Error::NoTables(..) => 3,
        Error::Inconclusive(..) => 4,
        _ => 2,
    }
}
