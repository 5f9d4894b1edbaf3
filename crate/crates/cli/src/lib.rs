//! Command dispatch and report rendering behind the `limitrank` binary.
//!
//! Every command produces a [`Report`]: a JSON value (schema 1) and a text
//! digest of the same record, plus a flag for theorem or audit violations.

use std::fmt::Write as _;
use std::path::Path;

use clap::ValueEnum;
use serde::Serialize;

use limitrank_core::abelian::{is_prime, rational_rank};
use limitrank_core::cases::{case_rank_audit, classify_bass_serre_case, AuditRecord, CaseError, CaseLabel};
use limitrank_core::expr::LevelBound;
use limitrank_core::fixtures::{self, CATALOG_VERSION};
use limitrank_core::rank::{structural_rank, verify_theorem_a, RankError};
use limitrank_core::selftest::{run_selftest, Context, Scale};
use limitrank_core::subgroup::SubgroupError;
use limitrank_core::{
    abelian_invariants, enumerate_index_p_kernels, parse_dsl, subgroup_presentation, AbelianInvariants,
    GroupExpr, HomToZp, Presentation, Session,
};

pub const SCHEMA: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Present,
    Abelianize,
    Chi,
    Rank,
    Homs,
    Subgroup,
    VerifyThmA,
    AuditCases,
    Selftest,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Present => "present",
            Command::Abelianize => "abelianize",
            Command::Chi => "chi",
            Command::Rank => "rank",
            Command::Homs => "homs",
            Command::Subgroup => "subgroup",
            Command::VerifyThmA => "verify-thm-a",
            Command::AuditCases => "audit-cases",
            Command::Selftest => "selftest",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Clone)]
pub struct Options {
    /// Primes to work at; empty means `[2]`.
    pub primes: Vec<u64>,
    pub hom: Option<usize>,
    pub seed: u64,
}

impl Default for Options {
    fn default() -> Self {
        Self {
            primes: Vec::new(),
            hom: None,
            seed: limitrank_core::selftest::DEFAULT_SEED,
        }
    }
}

impl Options {
    fn primes(&self) -> Result<Vec<u64>, CliError> {
        let ps = if self.primes.is_empty() { vec![2] } else { self.primes.clone() };
        match ps.iter().find(|&&p| !is_prime(p)) {
            Some(p) => Err(CliError::Usage(format!("{p} is not prime"))),
            None => Ok(ps),
        }
    }
}

/// Bad input: unknown name, non-prime `p`, unreadable file. Exit code 2.
/// Failed checks are not errors; they set [`Report::violation`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CliError {
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        2
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let CliError::Usage(m) = self;
        write!(f, "usage error: {m}")
    }
}

impl From<SubgroupError> for CliError {
    fn from(e: SubgroupError) -> Self {
        CliError::Usage(e.to_string())
    }
}

/// A resolved group: either a catalog fixture or a DSL binding.
#[derive(Debug, Clone)]
pub struct Target {
    pub name: String,
    pub expr: GroupExpr,
    pub warnings: Vec<String>,
}

/// Reads a `.lg` file.
pub fn load_session(path: &Path) -> Result<Session, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    let mut session =
        parse_dsl(&text).map_err(|e| CliError::Usage(format!("{}:{e}", path.display())))?;
    session.source = Some(path.to_path_buf());
    Ok(session)
}

/// Looks `name` up in the session when there is one, otherwise in the
/// fixture catalog. With a session and no name the last binding is used.
pub fn resolve_target(session: Option<&Session>, name: Option<&str>) -> Result<Target, CliError> {
    match (session, name) {
        (Some(s), name) => {
            let (name, expr) = match name {
                Some(n) => (n, s.get(n).ok_or_else(|| CliError::Usage(format!("no binding named {n}")))?),
                None => s.last().ok_or_else(|| CliError::Usage("the file has no bindings".into()))?,
            };
            let warnings = s.diagnostics.iter().map(|d| d.to_string()).collect();
            Ok(Target {
                name: name.to_string(),
                expr: expr.clone(),
                warnings,
            })
        }
        (None, Some(n)) => {
            let fx = fixtures::find(n).ok_or_else(|| {
                let names: Vec<&str> = fixtures::catalog().iter().map(|f| f.name).collect();
                CliError::Usage(format!("unknown group {n}; catalog: {}", names.join(", ")))
            })?;
            Ok(Target {
                name: fx.name.to_string(),
                expr: fx.expr,
                warnings: Vec::new(),
            })
        }
        (None, None) => Err(CliError::Usage("a target group or -f FILE is required".into())),
    }
}

#[derive(Debug, Clone)]
pub struct Report {
    pub json: serde_json::Value,
    pub text: String,
    /// Set when a check inside the report failed; maps to exit code 1.
    pub violation: bool,
}

impl Report {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.json).expect("report serializes");
                s.push('\n');
                s
            }
            Format::Text => self.text.clone(),
        }
    }

    pub fn exit_code(&self) -> u8 {
        u8::from(self.violation)
    }
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    schema: u32,
    command: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    target: Option<&'a str>,
    #[serde(flatten)]
    body: T,
    warnings: &'a [String],
}

fn envelope<T: Serialize>(cmd: Command, target: Option<&Target>, warnings: &[String], body: T) -> serde_json::Value {
    serde_json::to_value(Envelope {
        schema: SCHEMA,
        command: cmd.name(),
        target: target.map(|t| t.name.as_str()),
        body,
        warnings,
    })
    .expect("report serializes")
}

#[derive(Serialize)]
struct PresentationJson {
    generators: Vec<String>,
    relators: Vec<String>,
}

fn presentation_json(p: &Presentation) -> PresentationJson {
    PresentationJson {
        generators: p.alphabet().names().to_vec(),
        relators: p
            .relators()
            .iter()
            .map(|r| r.display(p.alphabet()).to_string())
            .collect(),
    }
}

#[derive(Serialize)]
struct SubgroupSummary {
    generators: usize,
    relators: usize,
    abelianization: AbelianInvariants,
}

#[derive(Serialize)]
struct KernelJson {
    label: usize,
    hom: Vec<u64>,
    subgroup: SubgroupSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    margin: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    case: Option<CaseLabel>,
    #[serde(skip_serializing_if = "Option::is_none")]
    audit: Option<AuditRecord>,
}

fn kernel_json(g: &Presentation, h: &HomToZp) -> Result<KernelJson, CliError> {
    let s = subgroup_presentation(g, h)?;
    Ok(KernelJson {
        label: h.label,
        hom: h.images.clone(),
        subgroup: SubgroupSummary {
            generators: s.presentation.generator_count(),
            relators: s.presentation.relator_count(),
            abelianization: s.abelian_invariants(),
        },
        margin: None,
        case: None,
        audit: None,
    })
}

fn images(h: &HomToZp) -> String {
    let parts: Vec<String> = h.images.iter().map(u64::to_string).collect();
    format!("({})", parts.join(", "))
}

/// Runs one command. The target is ignored by `selftest`.
pub fn run_command(cmd: Command, target: Option<&Target>, opts: &Options) -> Result<Report, CliError> {
    if cmd == Command::Selftest {
        return selftest(opts);
    }
    let t = target.ok_or_else(|| CliError::Usage(format!("{} needs a target group", cmd.name())))?;
    let e = &t.expr;
    let g = e.presentation();
    let mut warnings = t.warnings.clone();
    warnings.extend(limitrank_core::rank::premise_warnings(e));
    let mut text = String::new();
    let json = match cmd {
        Command::Present => {
            writeln!(text, "{}: {}", t.name, e).unwrap();
            writeln!(text, "{g}").unwrap();
            #[derive(Serialize)]
            struct Body {
                expression: String,
                presentation: PresentationJson,
            }
            envelope(cmd, Some(t), &warnings, Body {
                expression: e.to_string(),
                presentation: presentation_json(g),
            })
        }
        Command::Abelianize => {
            let inv = abelian_invariants(g);
            writeln!(text, "{}^ab = {inv}", t.name).unwrap();
            #[derive(Serialize)]
            struct Body {
                abelianization: AbelianInvariants,
            }
            envelope(cmd, Some(t), &warnings, Body { abelianization: inv })
        }
        Command::Chi => {
            let chi = e.euler_characteristic();
            writeln!(text, "chi({}) = {chi}", t.name).unwrap();
            let value = if *chi.denom() == 1 {
                serde_json::Value::from(*chi.numer())
            } else {
                serde_json::Value::from(chi.to_string())
            };
            #[derive(Serialize)]
            struct Body {
                chi: serde_json::Value,
            }
            envelope(cmd, Some(t), &warnings, Body { chi: value })
        }
        Command::Rank => {
            let structural = structural_rank(e);
            let oracle = rational_rank(g);
            let level = match e.level_upper_bound() {
                LevelBound::AtMost(l) => Some(l),
                LevelBound::Unknown => None,
            };
            writeln!(text, "rk_Q({}) = {structural}", t.name).unwrap();
            if structural != oracle {
                writeln!(text, "MISMATCH: Smith form rank {oracle}").unwrap();
            }
            if let Some(l) = level {
                writeln!(text, "level <= {l}").unwrap();
            }
            #[derive(Serialize)]
            struct Body {
                rank: usize,
                oracle: usize,
                #[serde(skip_serializing_if = "Option::is_none")]
                level_upper_bound: Option<usize>,
            }
            let json = envelope(cmd, Some(t), &warnings, Body {
                rank: structural,
                oracle,
                level_upper_bound: level,
            });
            return Ok(finish(json, text, warnings.as_slice(), structural != oracle));
        }
        Command::Homs => {
            #[derive(Serialize)]
            struct HomJson {
                label: usize,
                hom: Vec<u64>,
            }
            #[derive(Serialize)]
            struct PerPrime {
                p: u64,
                count: usize,
                homs: Vec<HomJson>,
            }
            let mut results = Vec::new();
            for p in opts.primes()? {
                let homs = enumerate_index_p_kernels(g, p)?;
                writeln!(text, "p = {p}: {} kernel(s)", homs.len()).unwrap();
                for h in &homs {
                    writeln!(text, "  #{} {}", h.label, images(h)).unwrap();
                }
                results.push(PerPrime {
                    p,
                    count: homs.len(),
                    homs: homs
                        .into_iter()
                        .map(|h| HomJson {
                            label: h.label,
                            hom: h.images,
                        })
                        .collect(),
                });
            }
            #[derive(Serialize)]
            struct Body {
                results: Vec<PerPrime>,
            }
            envelope(cmd, Some(t), &warnings, Body { results })
        }
        Command::Subgroup => {
            let p = opts.primes()?[0];
            let homs = enumerate_index_p_kernels(g, p)?;
            let k = opts.hom.unwrap_or(0);
            let h = homs.get(k).ok_or_else(|| {
                CliError::Usage(format!("--hom {k} out of range: {} kernel(s) at p = {p}", homs.len()))
            })?;
            let kernel = kernel_json(g, h)?;
            let s = subgroup_presentation(g, h)?;
            writeln!(text, "kernel #{} of {} at p = {p}, hom {}", h.label, t.name, images(h)).unwrap();
            writeln!(text, "{}", s.presentation).unwrap();
            writeln!(text, "U^ab = {}", kernel.subgroup.abelianization).unwrap();
            #[derive(Serialize)]
            struct Body {
                p: u64,
                #[serde(flatten)]
                kernel: KernelJson,
                presentation: PresentationJson,
            }
            envelope(cmd, Some(t), &warnings, Body {
                p,
                kernel,
                presentation: presentation_json(&s.presentation),
            })
        }
        Command::VerifyThmA => return verify(cmd, t, opts, warnings),
        Command::AuditCases => return audit(cmd, t, opts, warnings),
        Command::Selftest => unreachable!("handled above"),
    };
    Ok(finish(json, text, &warnings, false))
}

fn finish(json: serde_json::Value, mut text: String, warnings: &[String], violation: bool) -> Report {
    for w in warnings {
        writeln!(text, "warning: {w}").unwrap();
    }
    Report { json, text, violation }
}

#[derive(Serialize)]
struct VerifyPerPrime {
    p: u64,
    exempt: bool,
    kernel_count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    min_subgroup_rank: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    min_margin: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    generators_lower_bound: Option<usize>,
    passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
    kernels: Vec<KernelJson>,
}

fn verify(cmd: Command, t: &Target, opts: &Options, warnings: Vec<String>) -> Result<Report, CliError> {
    let e = &t.expr;
    let g = e.presentation();
    let mut text = String::new();
    let mut results = Vec::new();
    let mut violation = false;
    let group_rank = structural_rank(e);
    writeln!(text, "{}: rk_Q(G) = {group_rank}", t.name).unwrap();
    for p in opts.primes()? {
        let entry = match verify_theorem_a(e, p) {
            Ok(r) => {
                let mut kernels = Vec::new();
                for k in &r.kernels {
                    let mut j = kernel_json(g, &k.hom)?;
                    j.margin = Some(k.margin);
                    j.case = k.case.clone();
                    j.audit = k.audit.clone();
                    kernels.push(j);
                }
                let min = r.min_subgroup_rank();
                write!(text, "p = {p}: {} kernel(s)", r.kernels.len()).unwrap();
                if let (Some(m), Some(d)) = (min, r.min_margin()) {
                    write!(text, ", min rk_Q(U) = {m}, min margin = {d}").unwrap();
                }
                if r.exempt {
                    write!(text, " (abelian, exempt)").unwrap();
                }
                writeln!(text).unwrap();
                if let Some(b) = &r.generator_bound {
                    writeln!(text, "  d(U) >= {} > {} = d(G)", b.min_subgroup_rank, b.generators_of_group).unwrap();
                }
                VerifyPerPrime {
                    p,
                    exempt: r.exempt,
                    kernel_count: r.kernels.len(),
                    min_subgroup_rank: min,
                    min_margin: r.min_margin(),
                    generators_lower_bound: r.generator_bound.map(|b| b.min_subgroup_rank),
                    passed: true,
                    error: None,
                    kernels,
                }
            }
            Err(RankError::Subgroup(SubgroupError::NotPrime(p))) => {
                return Err(CliError::Usage(format!("{p} is not prime")));
            }
            Err(err) => {
                violation = true;
                writeln!(text, "p = {p}: FAILED: {err}").unwrap();
                VerifyPerPrime {
                    p,
                    exempt: e.is_abelian(),
                    kernel_count: 0,
                    min_subgroup_rank: None,
                    min_margin: None,
                    generators_lower_bound: None,
                    passed: false,
                    error: Some(err.to_string()),
                    kernels: Vec::new(),
                }
            }
        };
        results.push(entry);
    }
    #[derive(Serialize)]
    struct Body {
        group_rank: usize,
        passed: bool,
        results: Vec<VerifyPerPrime>,
    }
    let json = envelope(cmd, Some(t), &warnings, Body {
        group_rank,
        passed: !violation,
        results,
    });
    Ok(finish(json, text, &warnings, violation))
}

fn audit(cmd: Command, t: &Target, opts: &Options, warnings: Vec<String>) -> Result<Report, CliError> {
    let e = &t.expr;
    if !e.is_one_edge_splitting() {
        return Err(CliError::Usage(format!(
            "{} is not an amalgam, HNN extension or free product",
            t.name
        )));
    }
    let g = e.presentation();
    #[derive(Serialize)]
    struct Entry {
        label: usize,
        hom: Vec<u64>,
        case: CaseLabel,
        audit: AuditRecord,
    }
    #[derive(Serialize)]
    struct PerPrime {
        p: u64,
        audits: Vec<Entry>,
    }
    let mut text = String::new();
    let mut results = Vec::new();
    let mut violation = false;
    for p in opts.primes()? {
        let mut audits = Vec::new();
        writeln!(text, "p = {p}:").unwrap();
        for h in enumerate_index_p_kernels(g, p)? {
            let label = classify_bass_serre_case(e, &h).map_err(|err| CliError::Usage(err.to_string()))?;
            let record = match case_rank_audit(e, &h) {
                Ok(r) => r,
                Err(CaseError::AuditFailure(r)) => {
                    violation = true;
                    *r
                }
                Err(err) => return Err(CliError::Usage(err.to_string())),
            };
            writeln!(text, "  #{} {} {record}", h.label, images(&h)).unwrap();
            audits.push(Entry {
                label: h.label,
                hom: h.images.clone(),
                case: label,
                audit: record,
            });
        }
        results.push(PerPrime { p, audits });
    }
    #[derive(Serialize)]
    struct Body {
        passed: bool,
        results: Vec<PerPrime>,
    }
    let json = envelope(cmd, Some(t), &warnings, Body {
        passed: !violation,
        results,
    });
    Ok(finish(json, text, &warnings, violation))
}

fn selftest(opts: &Options) -> Result<Report, CliError> {
    let ctx = Context::new(opts.seed, Scale::REDUCED);
    let summary = run_selftest(&fixtures::catalog(), &ctx).map_err(|e| CliError::Usage(e.to_string()))?;
    let mut text = String::new();
    #[derive(Serialize)]
    struct Check {
        name: &'static str,
        passed: bool,
        instances: usize,
        failed: usize,
        failures: Vec<String>,
        detail: String,
    }
    let mut checks = Vec::new();
    for c in &summary.checks {
        writeln!(
            text,
            "{} {} ({} instances, {:.2}s) {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.instances,
            c.elapsed.as_secs_f64(),
            c.detail
        )
        .unwrap();
        for f in &c.failures {
            writeln!(text, "    {f}").unwrap();
        }
        checks.push(Check {
            name: c.name,
            passed: c.passed,
            instances: c.instances,
            failed: c.failed,
            failures: c.failures.clone(),
            detail: c.detail.clone(),
        });
    }
    let passed = summary.passed();
    writeln!(
        text,
        "selftest: {} of {} checks passed (seed {})",
        checks.iter().filter(|c| c.passed).count(),
        checks.len(),
        summary.seed
    )
    .unwrap();
    #[derive(Serialize)]
    struct Body {
        seed: u64,
        catalog_version: u32,
        passed: bool,
        checks: Vec<Check>,
    }
    let json = envelope(Command::Selftest, None, &[], Body {
        seed: summary.seed,
        catalog_version: CATALOG_VERSION,
        passed,
        checks,
    });
    Ok(Report {
        json,
        text,
        violation: !passed,
    })
}
