//! Command dispatcher for the `feynkit` binary and the acceptance runner it
//! shares with the test suite.

pub mod acceptance;

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use feynkit_core::graph::{self, symanzik_pair, FeynmanGraph, MandelstamDictionary, SubdivisionSpec};
use feynkit_core::integrand::{self, feynman_integrand, subdivision_pullback, sunrise_catalog};
use feynkit_core::motive_sunrise::{boundary_points, coaction_table, table_sweep, Basis};
use feynkit_core::periods::{
    self, eichler_integral, elliptic_periods, parse_complex, simplex_quadrature, sv_elliptic_matrix,
    sv_from_period_matrix, to_weierstrass, PeriodError, QExpansion, DEFAULT_PREC,
};
use feynkit_core::{parse_rat, KinematicPoint, ProjForm};
use rug::Complex;
use serde_json::{json, Value};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "feynkit", version, about = "Sunrise periods, residues and single-valued checks")]
pub struct CommandRequest {
    #[command(subcommand)]
    pub command: Command,
    /// Write the JSON document here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Working precision in bits (overrides FEYNKIT_PREC).
    #[arg(long, global = true)]
    pub prec: Option<u32>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// First and second Symanzik polynomials of a graph file.
    Symanzik {
        graph: PathBuf,
        /// Specialize the kinematic symbols.
        #[arg(long)]
        kin: Option<PathBuf>,
    },
    /// Subdivide edges and pull the subdivided integrand back to the graph.
    Subdivide {
        graph: PathBuf,
        /// Number of new vertices per edge, e.g. `1,0,0`.
        #[arg(long, value_delimiter = ',', required = true)]
        counts: Vec<u32>,
        /// Dimension of the subdivided graph.
        #[arg(long, default_value_t = 2)]
        dim: i64,
        /// Dimension of the original graph.
        #[arg(long, default_value_t = 2)]
        base_dim: i64,
    },
    /// Feynman integrand of a graph, or a named sunrise form.
    Integrand {
        graph: Option<PathBuf>,
        #[arg(long, default_value_t = 2)]
        dim: i64,
        /// omega_G, eta_G, nu1..nu3, omega0, mu1..mu3
        #[arg(long, conflicts_with = "graph")]
        form: Option<String>,
    },
    /// Coaction table of the sunrise at a kinematic point.
    Coaction {
        #[arg(long)]
        kin: PathBuf,
        #[arg(long, default_value = "nu")]
        basis: String,
    },
    /// Compare computed residue coordinates with the published table.
    VerifyAppendix {
        #[arg(long, default_value_t = 20)]
        samples: usize,
    },
    /// Weierstrass model and periods of the sunrise curve, or of y^2 = x^3 + a x + b.
    Periods {
        #[arg(long, required_unless_present = "curve")]
        kin: Option<PathBuf>,
        /// `a,b` (rational or complex).
        #[arg(long, conflicts_with = "kin", allow_hyphen_values = true)]
        curve: Option<String>,
    },
    /// Single-valued period matrix of an elliptic curve.
    SvMatrix {
        #[arg(long, required_unless_present = "curve", allow_hyphen_values = true)]
        tau: Option<String>,
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        lambda: String,
        /// `a,b`: use the curve's own tau and lambda and compare with conj(P)^-1 P.
        #[arg(long, conflicts_with = "tau", allow_hyphen_values = true)]
        curve: Option<String>,
    },
    /// Simplex quadrature of a sunrise form or of a form file.
    Quadrature {
        #[arg(long, required_unless_present = "form_file")]
        form: Option<String>,
        #[arg(long, conflicts_with = "form")]
        form_file: Option<PathBuf>,
        #[arg(long)]
        kin: PathBuf,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Eichler integral of a q-expansion.
    Eichler {
        #[arg(long, required_unless_present = "delta")]
        qexp: Option<PathBuf>,
        /// Use the discriminant form truncated at this order.
        #[arg(long, conflicts_with = "qexp")]
        delta: Option<usize>,
        #[arg(long, allow_hyphen_values = true)]
        tau: String,
        #[arg(long, default_value_t = 0)]
        j: u32,
    },
    /// Run the acceptance criteria.
    Selftest(SelftestArgs),
}

#[derive(Debug, Args)]
pub struct SelftestArgs {
    /// Run only these criteria (1-based).
    #[arg(long, value_delimiter = ',')]
    pub only: Vec<usize>,
}

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Verification(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Verification(_) => EXIT_VERIFY,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::Verification(m) => m,
        }
    }
}

fn input<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Input(e.to_string())
}

fn period_err(e: PeriodError) -> CliError {
    match e {
        PeriodError::Quadrature(_) | PeriodError::Precision(_) => CliError::Verification(e.to_string()),
        _ => CliError::Input(e.to_string()),
    }
}

/// Exit code plus the JSON document for stdout.
#[derive(Debug)]
pub struct Outcome {
    pub code: i32,
    pub json: Value,
}

pub fn resolve_precision(flag: Option<u32>) -> Result<u32, CliError> {
    let p = match flag {
        Some(p) => p,
        None => match std::env::var("FEYNKIT_PREC") {
            Ok(s) => s.trim().parse().map_err(|_| CliError::Input(format!("FEYNKIT_PREC: not a bit count: `{s}`")))?,
            Err(_) => DEFAULT_PREC,
        },
    };
    if !(53..=4096).contains(&p) {
        return Err(CliError::Input(format!("precision {p} outside 53..=4096 bits")));
    }
    Ok(p)
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn read_json(path: &Path) -> Result<Value, CliError> {
    serde_json::from_str(&read(path)?).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn read_graph(path: &Path) -> Result<(FeynmanGraph, MandelstamDictionary), CliError> {
    graph::parse_graph_json(&read(path)?).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn read_kin(path: &Path) -> Result<KinematicPoint, CliError> {
    KinematicPoint::from_json(&read_json(path)?).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn named_form(name: &str) -> Result<ProjForm, CliError> {
    sunrise_catalog()
        .remove(name)
        .ok_or_else(|| CliError::Input(format!("unknown form `{name}`")))
}

fn complex_arg(s: &str, prec: u32) -> Result<Complex, CliError> {
    parse_complex(s, prec).ok_or_else(|| CliError::Input(format!("not a complex number: `{s}`")))
}

fn curve_arg(s: &str, prec: u32) -> Result<(Complex, Complex), CliError> {
    let (a, b) = s.split_once(',').ok_or_else(|| CliError::Input("curve must be `a,b`".into()))?;
    let one = |t: &str| match parse_rat(t) {
        Some(r) => Ok(periods::rat_to_complex(&r, prec)),
        None => complex_arg(t.trim(), prec),
    };
    Ok((one(a)?, one(b)?))
}

pub fn execute_command(req: &CommandRequest) -> Result<Value, CliError> {
    let prec = resolve_precision(req.prec)?;
    match &req.command {
        Command::Symanzik { graph, kin } => {
            let (g, m) = read_graph(graph)?;
            let (psi, xi) = symanzik_pair(&g, &m).map_err(input)?;
            let xi = match kin {
                Some(k) => xi.specialize(&read_kin(k)?),
                None => xi,
            };
            Ok(json!({
                "psi": psi.to_canonical(),
                "xi": xi.to_canonical(),
                "edges": g.num_edges(),
                "loops": g.loop_number(),
            }))
        }
        Command::Subdivide { graph, counts, dim, base_dim } => {
            let (g, m) = read_graph(graph)?;
            let spec = SubdivisionSpec::new(counts.clone());
            let gs = graph::subdivide(&g, &spec).map_err(input)?;
            let (psi, xi) = symanzik_pair(&gs, &m).map_err(input)?;
            let pullback = subdivision_pullback(&g, &spec, *dim, *base_dim, &m).map_err(input)?;
            let lemma = (0..g.num_edges())
                .map(|e| integrand::lemma_substitution_holds(&g, e, &m).map_err(input))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(json!({
                "graph": graph::graph_to_json(&gs, &m),
                "psi": psi.to_canonical(),
                "xi": xi.to_canonical(),
                "pullback": pullback.to_json(),
                "lemma_substitution": lemma,
            }))
        }
        Command::Integrand { graph, dim, form } => {
            let f = match (graph, form) {
                (_, Some(name)) => named_form(name)?,
                (Some(path), None) => {
                    let (g, m) = read_graph(path)?;
                    feynman_integrand(&g, *dim, &m).map_err(input)?
                }
                (None, None) => return Err(CliError::Input("need a graph file or --form".into())),
            };
            Ok(f.to_json())
        }
        Command::Coaction { kin, basis } => {
            let b = Basis::parse(basis).ok_or_else(|| CliError::Input(format!("basis must be mu or nu, got `{basis}`")))?;
            let k = read_kin(kin)?;
            let t = coaction_table(&k, b).map_err(input)?;
            let doc = json!({"point": k.to_json(), "table": t.to_json()});
            if !t.duality.certificate {
                return Err(CliError::Verification(format!("duality certificate failed: {doc}")));
            }
            Ok(doc)
        }
        Command::VerifyAppendix { samples } => {
            if *samples == 0 {
                return Err(CliError::Input("--samples must be positive".into()));
            }
            let results = table_sweep(req.seed, *samples);
            let mut points = Vec::with_capacity(results.len());
            let mut per_component = [[true; 7]; 3];
            for r in results {
                let c = r.map_err(input)?;
                for (i, row) in c.component_match.iter().enumerate() {
                    for (j, &ok) in row.iter().enumerate() {
                        per_component[i][j] &= ok;
                    }
                }
                points.push(c.to_json());
            }
            let all_match = per_component.iter().all(|r| r.iter().all(|&b| b));
            let doc = json!({
                "all_match": all_match,
                "samples": samples,
                "seed": req.seed,
                "component_match": per_component.to_vec(),
                "points": points,
            });
            if all_match {
                Ok(doc)
            } else {
                Err(CliError::Verification(doc.to_string()))
            }
        }
        Command::Periods { kin, curve } => {
            if let Some(c) = curve {
                let (a, b) = curve_arg(c, prec)?;
                let ed = elliptic_periods(&a, &b, prec).map_err(period_err)?;
                return Ok(json!({"periods": ed.to_json(), "fricke_residual": fricke(&ed)}));
            }
            let k = read_kin(kin.as_ref().expect("clap enforces --kin or --curve"))?;
            let xi = graph::symanzik_second(&FeynmanGraph::sunrise(), &MandelstamDictionary::sunrise())
                .map_err(input)?
                .specialize(&k);
            let pts = boundary_points(&k).map_err(input)?;
            let base = pts.first().ok_or_else(|| CliError::Input("no rational boundary point".into()))?;
            let model = to_weierstrass(&xi, &base.projective).map_err(period_err)?;
            let ed = elliptic_periods(
                &periods::rat_to_complex(&model.a, prec),
                &periods::rat_to_complex(&model.b, prec),
                prec,
            )
            .map_err(period_err)?;
            let images: Vec<Value> = pts
                .iter()
                .map(|p| match model.push_forward(&p.projective) {
                    Some((x, y)) => json!({"label": p.label, "x": feynkit_core::fmt_rat(&x), "y": feynkit_core::fmt_rat(&y)}),
                    None => json!({"label": p.label, "x": null, "y": null}),
                })
                .collect();
            Ok(json!({
                "point": k.to_json(),
                "base_point": base.label,
                "model": model.to_json(),
                "boundary_images": images,
                "periods": ed.to_json(),
                "fricke_residual": fricke(&ed),
            }))
        }
        Command::SvMatrix { tau, lambda, curve } => {
            if let Some(c) = curve {
                let (a, b) = curve_arg(c, prec)?;
                let ed = elliptic_periods(&a, &b, prec).map_err(period_err)?;
                let f = sv_elliptic_matrix(&ed.tau, &ed.lambda, prec).map_err(period_err)?;
                let s = sv_from_period_matrix(&ed.period_matrix()).map_err(period_err)?;
                let f: Vec<Vec<Complex>> = f.iter().map(|r| r.to_vec()).collect();
                let diff = (0..2)
                    .flat_map(|i| (0..2).map(move |j| (i, j)))
                    .map(|(i, j)| periods::abs_f64(&Complex::with_val(prec, &f[i][j] - &s[i][j])))
                    .fold(0.0, f64::max);
                return Ok(json!({
                    "tau": periods::complex_json(&ed.tau),
                    "lambda": periods::complex_json(&ed.lambda),
                    "matrix": periods::matrix_json(&f),
                    "from_period_matrix": periods::matrix_json(&s),
                    "max_difference": format!("{diff:e}"),
                }));
            }
            let t = complex_arg(tau.as_deref().expect("clap enforces --tau or --curve"), prec)?;
            let l = complex_arg(lambda, prec)?;
            if *t.imag() <= 0 {
                return Err(CliError::Input("Im tau must be positive".into()));
            }
            let f = sv_elliptic_matrix(&t, &l, prec).map_err(period_err)?;
            let f: Vec<Vec<Complex>> = f.iter().map(|r| r.to_vec()).collect();
            Ok(json!({"tau": periods::complex_json(&t), "lambda": periods::complex_json(&l), "matrix": periods::matrix_json(&f)}))
        }
        Command::Quadrature { form, form_file, kin, tol } => {
            let f = match (form, form_file) {
                (Some(name), _) => named_form(name)?,
                (None, Some(path)) => ProjForm::from_json(&read_json(path)?).map_err(input)?,
                (None, None) => unreachable!("clap enforces --form or --form-file"),
            };
            let k = read_kin(kin)?;
            let r = simplex_quadrature(&f, &k, *tol).map_err(period_err)?;
            Ok(json!({
                "form": form.clone().unwrap_or_else(|| "file".into()),
                "point": k.to_json(),
                "value": r.value,
                "error": r.error,
                "evaluations": r.evaluations,
                "target_tol": tol,
            }))
        }
        Command::Eichler { qexp, delta, tau, j } => {
            let f = match (qexp, delta) {
                (_, Some(n)) => QExpansion::ramanujan_delta(*n, prec),
                (Some(path), None) => QExpansion::from_json(&read_json(path)?, prec).map_err(period_err)?,
                (None, None) => unreachable!("clap enforces --qexp or --delta"),
            };
            let t = complex_arg(tau, prec)?;
            let v = eichler_integral(&f, &t, *j, prec).map_err(period_err)?;
            Ok(json!({"tau": periods::complex_json(&t), "j": j, "weight": f.weight, "result": v.to_json()}))
        }
        Command::Selftest(args) => {
            let results = acceptance::run(&args.only, req.seed);
            for r in &results {
                eprintln!("{}", r.line());
            }
            let passed = results.iter().filter(|r| r.passed).count();
            let doc = json!({
                "passed": passed,
                "total": results.len(),
                "criteria": results.iter().map(acceptance::CriterionResult::to_json).collect::<Vec<_>>(),
            });
            if passed == results.len() {
                Ok(doc)
            } else {
                Err(CliError::Verification(doc.to_string()))
            }
        }
    }
}

fn fricke(ed: &periods::EllipticData) -> Value {
    match ed.fricke_residual() {
        Ok(r) => Value::String(periods::float_string(&r)),
        Err(_) => Value::Null,
    }
}

/// Run a request and produce the exit code and the stdout document. Failed
/// verifications keep their report; other errors become `{"error": ...}`.
pub fn run(req: &CommandRequest) -> Outcome {
    match execute_command(req) {
        Ok(json) => Outcome { code: EXIT_OK, json },
        Err(CliError::Verification(m)) => {
            let json = serde_json::from_str::<Value>(&m).unwrap_or_else(|_| json!({"error": m, "kind": "verification"}));
            Outcome { code: EXIT_VERIFY, json }
        }
        Err(e) => Outcome { code: e.code(), json: json!({"error": e.message(), "kind": "input"}) },
    }
}

/// Kinematic point as written by [`KinematicPoint::to_json`], for the sunrise.
pub fn sunrise_kin_json(m: [i64; 3], q: i64) -> Value {
    KinematicPoint::sunrise_int(m[0], m[1], m[2], q).to_json()
}
