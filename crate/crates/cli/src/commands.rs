use std::fs::{self, File};
use std::hash::{DefaultHasher, Hash, Hasher};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use ugl_core::blocks::{named_family, BlockPartition, BlockWord, FamilyKind};
use ugl_core::comm::{comm_named_family, CommPoly, CommRing};
use ugl_core::factor::{factor_trace_word, validate_factorization};
use ugl_core::hopf::{apply_p_iter, coproduct};
use ugl_core::ito::{closure_check, ClosureTarget};
use ugl_core::mc::{
    markov_diagnostic, mean_and_se, minor_spectra, read_ensemble_binary, sample_hbm_with, write_ensemble_binary,
    write_ensemble_csv, write_spectra_csv, DiagnosticConfig, Normalization, PathEnsemble, Statistic,
};
use ugl_core::rep::Representation;
use ugl_core::span::{build_span, verify_certificate, MembershipResult, SpanRing, Verdict};
use ugl_core::{AlgebraError, Algebra, Result, UeaElement};

use crate::expr::{parse_comm, parse_uea, Mode};
use crate::json::{comm_from_json, comm_to_json, tensor_to_json, uea_from_json, uea_to_json, ElementJson};

#[derive(Parser, Debug)]
#[command(name = "ugl", version, about = "Exact computations in U(gl_d) and Hermitian Brownian motion experiments")]
pub struct Cli {
    /// Rank d of gl_d.
    #[arg(long, global = true, default_value_t = 2)]
    pub d: usize,
    /// Block parameter p of the session partition.
    #[arg(long, global = true)]
    pub p: Option<usize>,
    /// Algebra for expressions.
    #[arg(long, global = true, value_enum, default_value_t = ModeArg::Uea)]
    pub mode: ModeArg,
    /// Also write the result (or exported data) to this file.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub cmd: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ModeArg {
    Uea,
    Comm,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Expect {
    InSpan,
    NotInSpan,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Via {
    Tensor,
    #[value(name = "P", alias = "p")]
    P,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ExportFormat {
    Csv,
    Bin,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum NormArg {
    Trace,
    Unit,
}

#[derive(clap::Args, Debug, Clone)]
pub struct SampleArgs {
    /// Number of paths.
    #[arg(long, default_value_t = 1000)]
    pub paths: usize,
    /// Master seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Project onto traceless matrices.
    #[arg(long)]
    pub traceless: bool,
    /// Increment normalization.
    #[arg(long, value_enum, default_value_t = NormArg::Trace)]
    pub normalization: NormArg,
    /// Read a binary ensemble instead of sampling.
    #[arg(long)]
    pub input: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Parse an expression and print its normal form.
    Normalize { expr: String },
    /// Coproduct of an element.
    Coproduct { expr: String },
    /// Apply the transition operator P, optionally iterated.
    ApplyP {
        expr: String,
        #[arg(long, default_value_t = 1)]
        iter: usize,
    },
    /// Invariance under the block subgroup for --p.
    Invariant { expr: String },
    /// Membership of a target in the span of products of generators.
    Member {
        target: String,
        /// Generators: a JSON array of expressions or elements, or one expression per line.
        #[arg(long, conflicts_with = "family")]
        gens: Option<PathBuf>,
        /// Named family: casimir, p1, p2_nested, klink.
        #[arg(long, requires = "kmax")]
        family: Option<String>,
        #[arg(long)]
        kmax: Option<usize>,
        /// Degree bound D.
        #[arg(long)]
        bound: u32,
        #[arg(long, value_enum)]
        expect: Option<Expect>,
    },
    /// Moment omega(j_n(u)) through the tensor representation or through P.
    Moment {
        expr: String,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = Via::Both)]
        via: Via,
    },
    /// Scaled quantum walk moment against the Brownian limit.
    WalkClt {
        /// Index pairs such as "1,2;2,1".
        #[arg(long)]
        word: String,
        #[arg(long)]
        n: usize,
    },
    /// Sample Hermitian Brownian motion paths.
    McRun {
        /// Comma-separated increasing grid times.
        #[arg(long)]
        times: String,
        #[command(flatten)]
        sample: SampleArgs,
        /// Export format for --out (default from the file extension).
        #[arg(long, value_enum)]
        format: Option<ExportFormat>,
    },
    /// Eigenvalues of leading principal minors with an interlacing check.
    Spectra {
        #[arg(long)]
        sizes: String,
        #[arg(long, default_value = "1")]
        times: String,
        #[command(flatten)]
        sample: SampleArgs,
    },
    /// Ito drift and covariation closure of a commutative family.
    ItoClosure {
        #[arg(long)]
        bound: u32,
        #[arg(long, default_value = "p1")]
        family: String,
        #[arg(long, default_value_t = 3)]
        kmax: usize,
    },
    /// Factor a block trace word.
    FactorWord {
        /// Block indices such as "1,3,2".
        #[arg(long)]
        word: String,
        /// Random Hermitian samples used for numeric validation.
        #[arg(long, default_value_t = 100)]
        validate: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Exploratory Markov-property diagnostic for minor eigenvalues.
    MarkovDiag {
        /// Three times t1,t2,t3.
        #[arg(long)]
        times: String,
        #[arg(long)]
        sizes: String,
        #[arg(long, default_value = "top")]
        stat: String,
        #[arg(long, default_value_t = 4)]
        bins: usize,
        #[arg(long, default_value_t = 200)]
        bootstrap: usize,
        #[command(flatten)]
        sample: SampleArgs,
    },
}

/// Result of one invocation: JSON for stdout and the exit code.
#[derive(Debug)]
pub struct Outcome {
    pub value: Value,
    pub code: i32,
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_EXPECTATION: i32 = 3;

pub fn error_value(e: &AlgebraError) -> Value {
    json!({"error": {"code": e.code(), "message": e.to_string()}})
}

pub fn exit_code(e: &AlgebraError) -> i32 {
    match e {
        AlgebraError::Io(_) => EXIT_IO,
        _ => EXIT_INVALID,
    }
}

pub fn run(cli: &Cli) -> Outcome {
    match dispatch(cli) {
        Ok(o) => o,
        Err(e) => Outcome { value: error_value(&e), code: exit_code(&e) },
    }
}

fn ok(value: Value) -> Result<Outcome> {
    Ok(Outcome { value, code: EXIT_OK })
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> AlgebraError {
    AlgebraError::Io(format!("{}: {e}", path.display()))
}

struct Session {
    d: usize,
    part: Option<BlockPartition>,
    mode: Mode,
}

impl Session {
    fn new(cli: &Cli) -> Result<Self> {
        if cli.d == 0 {
            return Err(AlgebraError::InvalidArgument("--d must be at least 1".into()));
        }
        let part = cli.p.map(|p| BlockPartition::new(cli.d, p)).transpose()?;
        let mode = match cli.mode {
            ModeArg::Uea => Mode::Uea,
            ModeArg::Comm => Mode::Comm,
        };
        Ok(Session { d: cli.d, part, mode })
    }

    fn partition(&self) -> Result<&BlockPartition> {
        self.part.as_ref().ok_or_else(|| AlgebraError::InvalidArgument("this command needs --p".into()))
    }

    fn uea(&self, alg: &Algebra, text: &str) -> Result<UeaElement> {
        parse_uea(text, alg, self.part.as_ref())
    }

    fn comm(&self, text: &str) -> Result<CommPoly> {
        parse_comm(text, self.d, self.part.as_ref())
    }

    fn require_uea(&self, what: &str) -> Result<()> {
        if self.mode == Mode::Comm {
            return Err(AlgebraError::InvalidArgument(format!("{what} is only defined in uea mode")));
        }
        Ok(())
    }
}

fn write_json_out(cli: &Cli, value: &Value) -> Result<()> {
    if let Some(path) = &cli.out {
        let text = serde_json::to_string_pretty(value).map_err(|e| io_err(path, e))?;
        fs::write(path, text + "\n").map_err(|e| io_err(path, e))?;
    }
    Ok(())
}

fn parse_list<T: std::str::FromStr>(text: &str, what: &str) -> Result<Vec<T>> {
    text.split(',')
        .map(|s| s.trim().parse().map_err(|_| AlgebraError::InvalidArgument(format!("bad {what} `{}`", s.trim()))))
        .collect()
}

fn parse_pairs(text: &str) -> Result<Vec<(usize, usize)>> {
    text.split(|c: char| c == ';' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| match parse_list::<usize>(s, "index pair")?[..] {
            [i, j] => Ok((i, j)),
            _ => Err(AlgebraError::InvalidArgument(format!("bad index pair `{s}`"))),
        })
        .collect()
}

fn element_value(u: &UeaElement) -> Value {
    json!({"d": u.rank(), "text": u.to_string(), "degree": u.degree(), "element": uea_to_json(u)})
}

fn comm_value(p: &CommPoly) -> Value {
    json!({"d": p.rank(), "text": p.to_string(), "degree": p.degree(), "element": comm_to_json(p)})
}

fn dispatch(cli: &Cli) -> Result<Outcome> {
    let s = Session::new(cli)?;
    let out = match &cli.cmd {
        Command::Normalize { expr } => match s.mode {
            Mode::Uea => element_value(&s.uea(&Algebra::new(s.d), expr)?),
            Mode::Comm => comm_value(&s.comm(expr)?),
        },
        Command::Coproduct { expr } => {
            s.require_uea("coproduct")?;
            let t = coproduct(&s.uea(&Algebra::new(s.d), expr)?);
            json!({"text": t.to_string(), "tensor": tensor_to_json(&t)})
        }
        Command::ApplyP { expr, iter } => {
            s.require_uea("apply-p")?;
            let alg = Algebra::new(s.d);
            let u = apply_p_iter(&alg, &s.uea(&alg, expr)?, *iter)?;
            let mut v = element_value(&u);
            v["iter"] = json!(iter);
            v
        }
        Command::Invariant { expr } => {
            s.require_uea("invariant")?;
            let p = s.partition()?.p();
            let alg = Algebra::new(s.d);
            json!({"p": p, "invariant": alg.is_invariant(&s.uea(&alg, expr)?, p)?})
        }
        Command::Member { target, gens, family, kmax, bound, expect } => {
            let source = match (gens, family) {
                (Some(path), None) => GenSource::File(path),
                (None, Some(kind)) => GenSource::Family(kind.parse()?, kmax.unwrap_or(1)),
                _ => return Err(AlgebraError::InvalidArgument("member needs exactly one of --gens or --family".into())),
            };
            let (v, verdict) = match s.mode {
                Mode::Uea => {
                    let alg = Algebra::new(s.d);
                    let (labels, elems) = uea_generators(&s, &alg, &source)?;
                    member_report(&alg, &labels, &elems, &s.uea(&alg, target)?, *bound)?
                }
                Mode::Comm => {
                    let ring = CommRing::new(s.d);
                    let (labels, elems) = comm_generators(&s, &source)?;
                    member_report(&ring, &labels, &elems, &s.comm(target)?, *bound)?
                }
            };
            write_json_out(cli, &v)?;
            let code = match expect {
                Some(Expect::InSpan) if verdict != Verdict::InSpan => EXIT_EXPECTATION,
                Some(Expect::NotInSpan) if verdict != Verdict::NotInSpanUpToBound => EXIT_EXPECTATION,
                _ => EXIT_OK,
            };
            return Ok(Outcome { value: v, code });
        }
        Command::Moment { expr, n, via } => {
            s.require_uea("moment")?;
            let alg = Algebra::new(s.d);
            let u = s.uea(&alg, expr)?;
            let rep = Representation::new(&alg);
            match via {
                Via::Tensor => json!({"tensor": rep.omega_moment(&u, *n)?.to_string()}),
                Via::P => json!({"viaP": rep.moment_via_p(&u, *n)?.to_string()}),
                Via::Both => {
                    let a = rep.omega_moment(&u, *n)?;
                    let b = rep.moment_via_p(&u, *n)?;
                    json!({"tensor": a.to_string(), "viaP": b.to_string(), "equal": a == b})
                }
            }
        }
        Command::WalkClt { word, n } => {
            let alg = Algebra::new(s.d);
            let w = parse_pairs(word)?;
            let m = Representation::new(&alg).scaled_walk_moment(&w, *n)?;
            let mut v = serde_json::to_value(&m).map_err(|e| AlgebraError::Io(e.to_string()))?;
            v["equal"] = json!(m.scaled.as_ref().map(|x| *x == m.limit));
            v["n"] = json!(n);
            v["d"] = json!(s.d);
            v
        }
        Command::McRun { times, sample, format } => {
            let ens = ensemble(&s, sample, &parse_list(times, "time")?)?;
            if let Some(path) = &cli.out {
                let fmt = format.unwrap_or(if path.extension().is_some_and(|e| e == "bin") {
                    ExportFormat::Bin
                } else {
                    ExportFormat::Csv
                });
                let f = BufWriter::new(File::create(path).map_err(|e| io_err(path, e))?);
                match fmt {
                    ExportFormat::Csv => write_ensemble_csv(&ens, f)?,
                    ExportFormat::Bin => write_ensemble_binary(&ens, f)?,
                }
            }
            ensemble_summary(&ens)
        }
        Command::Spectra { sizes, times, sample } => {
            let ens = ensemble(&s, sample, &parse_list(times, "time")?)?;
            let sp = minor_spectra(&ens, &parse_list(sizes, "size")?)?;
            if let Some(path) = &cli.out {
                let f = BufWriter::new(File::create(path).map_err(|e| io_err(path, e))?);
                write_spectra_csv(&sp, ens.times(), f)?;
            }
            let mut means = Vec::new();
            for (ti, t) in ens.times().iter().enumerate() {
                for (si, k) in sp.sizes().iter().enumerate() {
                    let mut m = vec![0.0; *k];
                    for p in 0..sp.n_paths() {
                        for (a, v) in m.iter_mut().zip(sp.eigenvalues(p, ti, si)) {
                            *a += v / sp.n_paths() as f64;
                        }
                    }
                    means.push(json!({"t": t, "size": k, "mean_eigenvalues": m}));
                }
            }
            json!({"d": ens.d(), "n_paths": ens.n_paths(), "sizes": sp.sizes(), "interlacing": sp.interlacing,
                   "pass_rate": sp.interlacing.pass_rate(), "means": means})
        }
        Command::ItoClosure { bound, family, kmax } => {
            let part = s.partition()?;
            let fam = comm_named_family(part, family.parse()?, *kmax)?;
            let polys: Vec<CommPoly> = fam.iter().map(|m| m.poly.clone()).collect();
            let report = closure_check(&polys, *bound)?;
            let entries: Vec<Value> = report
                .entries
                .iter()
                .map(|e| {
                    let label = match e.target {
                        ClosureTarget::Drift { f } => format!("drift({})", fam[f].label),
                        ClosureTarget::Covar { f, h } => format!("covar({}, {})", fam[f].label, fam[h].label),
                    };
                    json!({"target": label, "verdict": e.result.verdict, "certificate_terms": e.result.certificate.len()})
                })
                .collect();
            json!({"d": s.d, "p": part.p(), "bound": bound, "dimension": report.dimension,
                   "all_in_span": report.all_in_span(), "entries": entries})
        }
        Command::FactorWord { word, validate, seed } => {
            let part = s.partition()?;
            let w = BlockWord::new(parse_list(word, "block index")?)?;
            let fw = factor_trace_word(part, &w)?;
            let check = validate_factorization(part, &fw, *validate, *seed)?;
            json!({"word": w.indices(), "text": fw.to_string(),
                   "factors": fw.factors.iter().map(ToString::to_string).collect::<Vec<_>>(), "validation": check})
        }
        Command::MarkovDiag { times, sizes, stat, bins, bootstrap, sample } => {
            let ts: Vec<f64> = parse_list(times, "time")?;
            let [t1, t2, t3] = ts[..] else {
                return Err(AlgebraError::InvalidArgument("--times needs exactly three values".into()));
            };
            let ens = ensemble(&s, sample, &ts)?;
            let cfg = DiagnosticConfig {
                statistic: stat.parse::<Statistic>()?,
                bins: *bins,
                bootstrap: *bootstrap,
                seed: sample.seed,
                ..DiagnosticConfig::default()
            };
            let r = markov_diagnostic(&ens, &parse_list(sizes, "size")?, [t1, t2, t3], &cfg)?;
            let mut v = serde_json::to_value(&r).map_err(|e| AlgebraError::Io(e.to_string()))?;
            v["consistent_with_zero"] = json!(r.consistent_with_zero());
            v
        }
    };
    if !matches!(cli.cmd, Command::McRun { .. } | Command::Spectra { .. }) {
        write_json_out(cli, &out)?;
    }
    ok(out)
}

enum GenSource<'a> {
    File(&'a PathBuf),
    Family(FamilyKind, usize),
}

/// Generator file entries: expression strings or element objects.
enum GenEntry {
    Text(String),
    Element(Box<ElementJson>),
}

fn read_gen_file(path: &Path) -> Result<Vec<(String, GenEntry)>> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    if let Ok(Value::Array(items)) = serde_json::from_str::<Value>(&text) {
        return items
            .into_iter()
            .enumerate()
            .map(|(k, item)| match item {
                Value::String(s) => Ok((s.clone(), GenEntry::Text(s))),
                other => {
                    let el: ElementJson = serde_json::from_value(other)
                        .map_err(|e| AlgebraError::InvalidArgument(format!("generator {k}: {e}")))?;
                    Ok((format!("g{k}"), GenEntry::Element(Box::new(el))))
                }
            })
            .collect();
    }
    Ok(text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| (l.to_string(), GenEntry::Text(l.to_string())))
        .collect())
}

fn uea_generators(s: &Session, alg: &Algebra, src: &GenSource) -> Result<(Vec<String>, Vec<UeaElement>)> {
    match src {
        GenSource::Family(kind, kmax) => {
            let part = match s.part {
                Some(p) => p,
                None => BlockPartition::new(s.d, 0)?,
            };
            Ok(named_family(alg, &part, *kind, *kmax)?.into_iter().map(|m| (m.label, m.element)).unzip())
        }
        GenSource::File(path) => read_gen_file(path)?
            .into_iter()
            .map(|(label, e)| {
                let el = match e {
                    GenEntry::Text(t) => s.uea(alg, &t)?,
                    GenEntry::Element(j) => uea_from_json(&j)?,
                };
                if el.rank() != s.d {
                    return Err(AlgebraError::RankMismatch(s.d, el.rank()));
                }
                Ok((label, el))
            })
            .collect::<Result<Vec<_>>>()
            .map(|v| v.into_iter().unzip()),
    }
}

fn comm_generators(s: &Session, src: &GenSource) -> Result<(Vec<String>, Vec<CommPoly>)> {
    match src {
        GenSource::Family(kind, kmax) => {
            let part = match s.part {
                Some(p) => p,
                None => BlockPartition::new(s.d, 0)?,
            };
            Ok(comm_named_family(&part, *kind, *kmax)?.into_iter().map(|m| (m.label, m.poly)).unzip())
        }
        GenSource::File(path) => read_gen_file(path)?
            .into_iter()
            .map(|(label, e)| {
                let p = match e {
                    GenEntry::Text(t) => s.comm(&t)?,
                    GenEntry::Element(j) => comm_from_json(&j)?,
                };
                if p.rank() != s.d {
                    return Err(AlgebraError::RankMismatch(s.d, p.rank()));
                }
                Ok((label, p))
            })
            .collect::<Result<Vec<_>>>()
            .map(|v| v.into_iter().unzip()),
    }
}

fn member_report<R: SpanRing>(
    ring: &R,
    labels: &[String],
    gens: &[R::Elem],
    target: &R::Elem,
    bound: u32,
) -> Result<(Value, Verdict)> {
    let basis = build_span(ring, gens, bound)?;
    let MembershipResult { verdict, certificate, bound } = basis.membership(target)?;
    let verified = if verdict == Verdict::InSpan { Some(verify_certificate(ring, gens, target, &certificate)?) } else { None };
    let cert: Vec<Value> = certificate
        .iter()
        .map(|t| json!({"word": t.word.iter().map(|&k| labels[k].as_str()).collect::<Vec<_>>(), "coeff": t.coeff}))
        .collect();
    let v = json!({
        "verdict": verdict,
        "bound": bound,
        "dimension": basis.dimension(),
        "generators": labels,
        "retained": basis.retained().iter().map(|&k| labels[k].as_str()).collect::<Vec<_>>(),
        "certificate": cert,
        "certificate_verified": verified,
    });
    Ok((v, verdict))
}

fn ensemble(s: &Session, a: &SampleArgs, times: &[f64]) -> Result<PathEnsemble> {
    if let Some(path) = &a.input {
        let f = File::open(path).map_err(|e| io_err(path, e))?;
        return read_ensemble_binary(std::io::BufReader::new(f));
    }
    let norm = match a.normalization {
        NormArg::Trace => Normalization::TraceForm,
        NormArg::Unit => Normalization::UnitComponents,
    };
    sample_hbm_with(s.d, times, a.paths, a.seed, a.traceless, norm)
}

fn ensemble_summary(ens: &PathEnsemble) -> Value {
    let d = ens.d();
    let last = ens.times().len() - 1;
    let t = ens.times()[last];
    let traces: Vec<f64> = (0..ens.n_paths()).map(|p| ens.sample(p, last).trace()).collect();
    let sq: Vec<f64> = traces.iter().map(|x| x * x).collect();
    let (m2, se2) = mean_and_se(&sq);
    let mut v = json!({
        "d": d,
        "n_paths": ens.n_paths(),
        "times": ens.times(),
        "seed": ens.seed(),
        "traceless": ens.traceless(),
        "normalization": ens.normalization(),
        "t": t,
        "second_moment_trace": {"mean": m2, "se": se2},
    });
    if d >= 2 {
        let off: Vec<f64> = (0..ens.n_paths()).map(|p| ens.entries(p, last)[1].norm_sqr()).collect();
        let (m, se) = mean_and_se(&off);
        v["b12_b21"] = json!({"mean": m, "se": se});
    }
    let mut h = DefaultHasher::new();
    for p in 0..ens.n_paths() {
        for ti in 0..ens.times().len() {
            for z in ens.entries(p, ti) {
                z.re.to_bits().hash(&mut h);
                z.im.to_bits().hash(&mut h);
            }
        }
    }
    v["checksum"] = json!(format!("{:016x}", h.finish()));
    v
}
