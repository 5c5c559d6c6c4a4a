mod input;
mod report;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use killing_web::ckt::conditions::tsn_report_f64;
use killing_web::ckt::verdict::sample_points;
use killing_web::ckt::{is_ckt, is_ckt_f64, tsn_report, CktOptions};
use killing_web::frames::{
    frame_from_ricci, match_tensor, match_tensor_f64, ricci, ricci_frame, MatchOptions, WebClass,
};
use killing_web::mat::to_f64_4;
use killing_web::separation::{
    compatibility_constraints, first_integral_check, pipeline, IntegralOptions, PipelineOptions, PipelineStatus,
    Potential, RationalPotential,
};
use killing_web::symmetry::{classify_kv, symmetry_algebra, symmetry_algebra_f64, web_category};
use killing_web::tensor::{covariants, invariants, Act};
use killing_web::{Error, Rational};
use serde_json::{json, Value};

use input::{InputDocument, InputError, Kind};

#[derive(Parser, Debug)]
#[command(name = "killing-web", version, about = "Characteristic Killing tensors and separable webs on S^3")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// CKT verdict with the TSN and Haantjes conditions
    Verify(Args),
    /// The fourteen SO(4) invariants and the pointwise covariants
    Invariants(Args),
    /// Symmetry algebra and web category of a tensor, or the class of a Killing vector
    Classify(Args),
    /// Ricci frame, canonical match and essential parameters
    Frame(Args),
    /// Compatible Killing tensors of a potential; checks a given tensor against it
    Separate(Args),
    /// Full separation algorithm from a potential
    Pipeline(Args),
    /// Print the canonical-form database
    Forms {
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Mode {
    Exact,
    Float,
}

#[derive(clap::Args, Debug)]
struct Args {
    /// TOML input document
    file: PathBuf,
    /// Sample points for the float checks and the compatibility system
    #[arg(long)]
    samples: Option<usize>,
    /// Tolerance of the float checks and of canonical matching
    #[arg(long)]
    tol: Option<f64>,
    /// Seed for sample points and random starts; overrides KILLING_WEB_SEED
    #[arg(long)]
    seed: Option<u64>,
    /// Exact rational arithmetic or floating point
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    /// Also write the report to this file
    #[arg(long)]
    json: Option<PathBuf>,
}

const EXIT_PARSE: u8 = 1;
const EXIT_INVARIANT: u8 = 2;
const EXIT_NOT_CKT: u8 = 3;
const EXIT_NO_MATCH: u8 = 4;
const EXIT_UNSUPPORTED: u8 = 5;

struct Settings {
    samples: usize,
    tol: Option<f64>,
    seed: u64,
    mode: Mode,
}

impl Settings {
    fn resolve(args: &Args, doc: &InputDocument) -> Result<Self, Failure> {
        let env_seed = match std::env::var("KILLING_WEB_SEED") {
            Ok(s) => Some(
                s.trim()
                    .parse::<u64>()
                    .map_err(|_| Failure::parse(format!("KILLING_WEB_SEED={s:?} is not an integer")))?,
            ),
            Err(_) => None,
        };
        let mode = match (args.mode, doc.options.mode.as_deref()) {
            (Some(m), _) => m,
            (None, None | Some("exact")) => Mode::Exact,
            (None, Some("float")) => Mode::Float,
            (None, Some(other)) => return Err(Failure::parse(format!("unknown mode {other:?}"))),
        };
        Ok(Self {
            samples: args.samples.or(doc.options.samples).unwrap_or(64),
            tol: args.tol.or(doc.options.tol),
            seed: args.seed.or(env_seed).or(doc.options.seed).unwrap_or(0),
            mode,
        })
    }

    fn provenance(&self, command: &str, file: &Path) -> Value {
        json!({
            "command": command,
            "input": file.file_name().map(|f| f.to_string_lossy().to_string()),
            "samples": self.samples,
            "tol": self.tol,
            "seed": self.seed,
            "mode": match self.mode { Mode::Exact => "exact", Mode::Float => "float" },
            "version": env!("CARGO_PKG_VERSION"),
        })
    }

    fn ckt(&self) -> CktOptions {
        CktOptions { samples: self.samples, seed: self.seed, tol: self.tol.unwrap_or(1e-10), ..CktOptions::default() }
    }

    fn matching(&self) -> MatchOptions {
        MatchOptions { tol: self.tol.unwrap_or(1e-8), ..MatchOptions::default() }
    }
}

struct Failure {
    code: u8,
    status: &'static str,
    message: String,
    partial: Option<Value>,
}

impl Failure {
    fn parse(message: String) -> Self {
        Self { code: EXIT_PARSE, status: "ParseError", message, partial: None }
    }

    fn from_error(e: &Error) -> Self {
        let (code, status) = match e {
            Error::InvalidPotential(_) => (EXIT_PARSE, "ParseError"),
            Error::IndexOutOfRange(_)
            | Error::ConflictingEntry(_)
            | Error::BianchiViolation(_)
            | Error::NotSpecialOrthogonal
            | Error::NotOnSphere
            | Error::RadialEigenvalueNonzero(_)
            | Error::DegenerateInput(_)
            | Error::ZeroVector
            | Error::ZeroMatrix => (EXIT_INVARIANT, "InvariantViolation"),
            Error::UnsupportedWeb(_) => (EXIT_UNSUPPORTED, "UnsupportedWeb"),
            _ => (EXIT_NO_MATCH, "NoCanonicalMatch"),
        };
        Self { code, status, message: e.to_string(), partial: None }
    }

    fn with(mut self, partial: Value) -> Self {
        self.partial = Some(partial);
        self
    }
}

impl From<InputError> for Failure {
    fn from(e: InputError) -> Self {
        match e {
            InputError::Parse(s) => Failure::parse(s),
            InputError::Invariant(err) => Failure::from_error(&err),
        }
    }
}

fn load(path: &Path) -> Result<InputDocument, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::parse(format!("{}: {e}", path.display())))?;
    Ok(InputDocument::parse(&text)?)
}

fn require_act(doc: &InputDocument) -> Result<Act<Rational>, Failure> {
    match (doc.kind, doc.act()?) {
        (Kind::Act, Some(c)) => Ok(c),
        _ => Err(Failure::parse("this command needs a document of kind \"act\"".into())),
    }
}

fn require_potential(doc: &InputDocument) -> Result<RationalPotential, Failure> {
    match (&doc.kind, &doc.potential) {
        (Kind::Potential | Kind::Pipeline, Some(p)) => RationalPotential::parse(p).map_err(|e| Failure::from_error(&e)),
        _ => Err(Failure::parse("this command needs a document of kind \"potential\" or \"pipeline\"".into())),
    }
}

fn cmd_verify(doc: &InputDocument, s: &Settings) -> Result<Value, Failure> {
    let c = require_act(doc)?;
    let (verdict, tsn) = match s.mode {
        Mode::Exact => {
            let v = is_ckt(&c, &s.ckt());
            let t = v.tsn_report.unwrap_or_else(|| tsn_report(&c));
            (v, t)
        }
        Mode::Float => {
            let cf = c.to_f64();
            let opts = s.ckt();
            let v = is_ckt_f64(&cf, &opts);
            (v, tsn_report_f64(&cf, &sample_points(opts.samples, opts.seed), opts.tol))
        }
    };
    let body = json!({ "tensor": report::act_exact(&c), "verdict": report::verdict(&verdict), "conditions": report::tsn(&tsn) });
    if verdict.is_ckt {
        Ok(body)
    } else {
        Err(Failure {
            code: EXIT_NOT_CKT,
            status: "NotCkt",
            message: "the tensor is not characteristic".into(),
            partial: Some(body),
        })
    }
}

fn cmd_invariants(doc: &InputDocument, s: &Settings) -> Result<Value, Failure> {
    let c = require_act(doc)?;
    let points = doc.points()?;
    for x in &points {
        let n: Rational = x.iter().map(|v| v * v).sum();
        if n != Rational::from_integer(1.into()) {
            return Err(Failure::from_error(&Error::NotOnSphere));
        }
    }
    let body = match s.mode {
        Mode::Exact => json!({
            "invariants": invariants(&c).iter().map(report::rat).collect::<Vec<_>>(),
            "covariants": points.iter().map(|x| json!({
                "point": x.iter().map(report::rat).collect::<Vec<_>>(),
                "values": covariants(&c, x).iter().map(report::rat).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        }),
        Mode::Float => {
            let cf = c.to_f64();
            json!({
                "invariants": invariants(&cf),
                "covariants": points.iter().map(|x| {
                    let xf = x.clone().map(|v| killing_web::scalar::rational_to_f64(&v));
                    json!({ "point": xf, "values": covariants(&cf, &xf) })
                }).collect::<Vec<_>>(),
            })
        }
    };
    Ok(body)
}

fn cmd_classify(doc: &InputDocument, s: &Settings) -> Result<Value, Failure> {
    if doc.kind == Kind::KillingVector {
        let kv = doc.killing_vector()?.expect("checked by the parser");
        let class = classify_kv(&kv).map_err(|e| Failure::from_error(&e))?;
        return Ok(json!({
            "vector": report::kv_label_exact(&kv),
            "kind": class.kind,
            "i1": report::rat(&class.i1),
            "a_norm": report::rat(&class.a_norm),
            "eps_bb": class.eps_bb.as_ref().map(report::rat),
        }));
    }
    let c = require_act(doc)?;
    let (sig, counts) = match s.mode {
        Mode::Exact => {
            let sig = symmetry_algebra(&c).map_err(|e| Failure::from_error(&e))?;
            let counts = sig.counts();
            (report::signature_exact(&sig), counts)
        }
        Mode::Float => {
            let sig = symmetry_algebra_f64(&c.to_f64(), s.tol.unwrap_or(1e-9)).map_err(|e| Failure::from_error(&e))?;
            let counts = sig.counts();
            (report::signature_float(&sig), counts)
        }
    };
    let (category, webs) = web_category(counts.0, counts.1)
        .map_err(|e| Failure::from_error(&e).with(json!({ "signature": sig.clone() })))?;
    Ok(json!({
        "signature": sig,
        "category": category.to_string(),
        "webs": webs.iter().map(|w| w.name()).collect::<Vec<_>>(),
    }))
}

fn cmd_frame(doc: &InputDocument, s: &Settings) -> Result<Value, Failure> {
    let c = require_act(doc)?;
    let (r, rf, matched) = match s.mode {
        Mode::Exact => {
            let r = ricci(&c);
            (to_f64_4(&r), ricci_frame(&c), match_tensor(&c, None, &s.matching()))
        }
        Mode::Float => {
            let cf = c.to_f64();
            let r = ricci(&cf);
            (r, frame_from_ricci(&r), match_tensor_f64(&cf, None, &s.matching()))
        }
    };
    let partial = json!({
        "ricci": match s.mode { Mode::Exact => report::mat_exact(&ricci(&c)), Mode::Float => report::mat_f64(&r) },
        "ricci_eigenvalues": rf.eigenvalues,
        "ricci_frame": report::mat_f64(rf.frame.matrix()),
        "multiplicities": rf.multiplicities,
    });
    match matched {
        Ok(fr) => {
            let mut body = partial;
            body["match"] = report::frame(&fr);
            Ok(body)
        }
        Err(e) => Err(Failure::from_error(&e).with(partial)),
    }
}

fn cmd_separate(doc: &InputDocument, s: &Settings) -> Result<Value, Failure> {
    let v = require_potential(doc)?;
    let space =
        compatibility_constraints(&v, s.samples, s.seed, s.mode == Mode::Exact).map_err(|e| Failure::from_error(&e))?;
    let mut body = json!({ "potential": v.describe(), "compatible_space": report::space(&space) });
    if let Some(c) = doc.act()? {
        let inside = match space.contains_exact(&c) {
            Some(b) => b,
            None => {
                let q = space.orthonormal();
                let p = killing_web::separation::compat::pair_vector(&c.to_f64());
                let r = &p - &q * (q.transpose() * &p);
                r.norm() <= 1e-8 * p.norm().max(1e-300)
            }
        };
        let check =
            first_integral_check(&c.to_f64(), &v, &IntegralOptions { seed: s.seed, ..IntegralOptions::default() });
        body["tensor"] = report::act_exact(&c);
        body["compatible"] = json!(inside);
        body["first_integral"] = json!(check);
    }
    Ok(body)
}

fn cmd_pipeline(doc: &InputDocument, s: &Settings) -> Result<Value, Failure> {
    let v = require_potential(doc)?;
    let mut opts = PipelineOptions {
        samples: s.samples,
        seed: s.seed,
        exact: s.mode == Mode::Exact,
        relations: doc.relations.clone(),
        others_zero: doc.others_zero.unwrap_or(false),
        ..PipelineOptions::default()
    };
    opts.matching = s.matching();
    if let Some(t) = s.tol {
        opts.symmetry_tol = t;
    }
    let r = pipeline(&v, &opts);
    let body = report::separation(&r);
    let failure = |code, status| Failure {
        code,
        status,
        message: r.message.clone().unwrap_or_default(),
        partial: Some(body.clone()),
    };
    match r.status {
        PipelineStatus::Ok | PipelineStatus::MultipleWebs => Ok(body),
        PipelineStatus::NotCkt => Err(failure(EXIT_NOT_CKT, "NotCkt")),
        PipelineStatus::NotFound => Err(failure(EXIT_NO_MATCH, "NotFound")),
        PipelineStatus::NoCanonicalMatch => Err(failure(EXIT_NO_MATCH, "NoCanonicalMatch")),
        PipelineStatus::UnsupportedWeb => Err(failure(EXIT_UNSUPPORTED, "UnsupportedWeb")),
    }
}

fn forms() -> Value {
    Value::Array(
        WebClass::ALL
            .iter()
            .map(|w| {
                let f = w.form();
                json!({
                    "web": w.name(),
                    "category": w.category().to_string(),
                    "form": f.form_number,
                    "terms": f.terms.iter().map(|t| t.iter().map(|(a, b)| format!("R{a}{b}")).collect::<Vec<_>>()).collect::<Vec<_>>(),
                    "includes_casimir": f.includes_casimir,
                    "ricci": f.ricci.iter().map(|r| r.to_vec()).collect::<Vec<_>>(),
                    "essential": f.essential,
                    "generators": f.generators,
                })
            })
            .collect(),
    )
}

fn emit(value: &Value, out: Option<&Path>) -> Result<(), String> {
    let text = serde_json::to_string_pretty(value).map_err(|e| e.to_string())?;
    if let Some(p) = out {
        std::fs::write(p, format!("{text}\n")).map_err(|e| format!("{}: {e}", p.display()))?;
    }
    match writeln!(std::io::stdout().lock(), "{text}") {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.to_string()),
        _ => Ok(()),
    }
}

fn run(name: &str, args: &Args, f: fn(&InputDocument, &Settings) -> Result<Value, Failure>) -> ExitCode {
    let outcome = load(&args.file).and_then(|doc| {
        let s = Settings::resolve(args, &doc)?;
        let prov = s.provenance(name, &args.file);
        Ok((f(&doc, &s), prov))
    });
    let (value, code) = match outcome {
        Ok((Ok(body), prov)) => (json!({ "status": "Ok", "provenance": prov, "result": body }), 0),
        Ok((Err(fail), prov)) => (
            json!({ "status": fail.status, "error": fail.message, "provenance": prov, "result": fail.partial }),
            fail.code,
        ),
        Err(fail) => (json!({ "status": fail.status, "error": fail.message }), fail.code),
    };
    if code != 0 {
        if let Some(msg) = value["error"].as_str() {
            eprintln!("killing-web {name}: {msg}");
        }
    }
    if let Err(e) = emit(&value, args.json.as_deref()) {
        eprintln!("killing-web: {e}");
        return ExitCode::from(EXIT_PARSE);
    }
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match &cli.command {
        Command::Verify(a) => run("verify", a, cmd_verify),
        Command::Invariants(a) => run("invariants", a, cmd_invariants),
        Command::Classify(a) => run("classify", a, cmd_classify),
        Command::Frame(a) => run("frame", a, cmd_frame),
        Command::Separate(a) => run("separate", a, cmd_separate),
        Command::Pipeline(a) => run("pipeline", a, cmd_pipeline),
        Command::Forms { json } => match emit(&json!({ "status": "Ok", "forms": forms() }), json.as_deref()) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("killing-web: {e}");
                ExitCode::from(EXIT_PARSE)
            }
        },
    }
}
