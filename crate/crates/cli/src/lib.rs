//! The `nc` command line: region catalogs, capacities, code verification,
//! achievability checks, rank-inequality searches, the Vámos transfer and a
//! generic polytope tool.
//!
//! Exit codes: 0 on success, 1 when a verification or search contradicts
//! what was asserted, 2 on usage or input errors.

use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use nc_core::codes::file::{load_code, save_linear, save_table, CodeFile};
use nc_core::codes::{
    achieve, builtin_code, builtin_codes, verify_solution, verify_solution_exhaustive_with_guard,
    AchieveReport, VerificationReport, DEFAULT_GUARD,
};
use nc_core::ff::PrimeField;
use nc_core::netmodel::{builtin_network, NetworkId};
use nc_core::rankineq::{
    builtin_inequality, claimed_valid, search_violation, EntropyExpression, InequalityId, SearchMode,
    SearchOutcome, DEFAULT_BUDGET,
};
use nc_core::rateregion::{
    average_capacity, builtin_region, enumerate_vertices, format_point, format_rational, parse_rational,
    transfer_vamos, uniform_capacity, HRep, Rational, RegionClass, TransferCoefficients,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CapacityKind {
    Uniform,
    Average,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Catalog,
    Exhaustive,
    Sample,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    Ingleton,
    Zy,
    ZySwapped,
}

#[derive(Debug, Parser)]
#[command(name = "nc", version, about = "Rate regions, network codes and rank inequalities")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value = "text", global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print a cataloged region and its enumerated vertices.
    Regions {
        network: NetworkId,
        #[arg(long)]
        class: RegionClass,
    },
    /// Exact uniform or average capacity of a cataloged region.
    Capacity {
        network: NetworkId,
        #[arg(long)]
        class: RegionClass,
        #[arg(long, value_enum, default_value = "uniform")]
        kind: CapacityKind,
    },
    /// Verify a code file.
    Verify {
        file: PathBuf,
        /// Check every message assignment instead of the rank test.
        #[arg(long)]
        exhaustive: bool,
        /// Largest number of assignments an exhaustive check may visit.
        #[arg(long)]
        guard: Option<u64>,
    },
    /// Verify the bundled codes for a class and the vertices they reach.
    Achieve {
        network: NetworkId,
        #[arg(long)]
        class: RegionClass,
    },
    /// List the bundled codes of a network.
    Codes { network: NetworkId },
    /// Write a bundled code as a code file.
    Export {
        network: NetworkId,
        label: String,
        #[arg(long)]
        field: u32,
        /// Read the matrices over another prime field (drops decoders).
        #[arg(long)]
        reinterpret: Option<u32>,
        /// Emit lookup tables instead of matrices.
        #[arg(long)]
        table: bool,
        #[arg(long)]
        no_decoders: bool,
    },
    /// Search for subspace assignments violating a rank inequality.
    Rank {
        /// Built-in inequality name or path to an expression file.
        inequality: String,
        #[arg(long)]
        field: u32,
        #[arg(long)]
        dim: usize,
        #[arg(long, value_enum, default_value = "catalog")]
        mode: Mode,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Apply the Vámos transfer to a four-variable inequality.
    Transfer {
        /// Ten coefficients a1..a10, comma separated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, conflicts_with = "preset")]
        coeffs: Vec<String>,
        #[arg(long, value_enum)]
        preset: Option<Preset>,
    },
    /// Vertex enumeration and membership for an H-representation file.
    Polytope {
        #[arg(long)]
        hrep: PathBuf,
        #[command(subcommand)]
        action: PolytopeAction,
    },
}

#[derive(Debug, Subcommand)]
enum PolytopeAction {
    Vertices,
    Contains {
        #[arg(required = true, allow_hyphen_values = true)]
        point: Vec<String>,
    },
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome {
            code: EXIT_OK,
            stdout,
            stderr: String::new(),
        }
    }

    fn with_status(passed: bool, stdout: String) -> Self {
        Outcome {
            code: if passed { EXIT_OK } else { EXIT_FAILED },
            stdout,
            stderr: String::new(),
        }
    }
}

/// Runs the command line given as `args` (program name first).
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            return if code == EXIT_OK {
                Outcome::ok(text)
            } else {
                Outcome {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            };
        }
    };
    match dispatch(&cli) {
        Ok(o) => o,
        Err(e) => Outcome {
            code: EXIT_USAGE,
            stdout: String::new(),
            stderr: format!("error: {e:#}\n"),
        },
    }
}

fn render(format: Format, value: &impl Serialize, text: impl FnOnce() -> String) -> Result<String> {
    match format {
        Format::Json => render_json(&serde_json::to_value(value)?),
        Format::Text => Ok(text()),
    }
}

/// Canonical JSON text: sorted keys, two-space indent, trailing newline.
pub fn render_json(v: &Value) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

fn dispatch(cli: &Cli) -> Result<Outcome> {
    let f = cli.format;
    match &cli.command {
        Command::Regions { network, class } => cmd_regions(f, *network, *class),
        Command::Capacity { network, class, kind } => cmd_capacity(f, *network, *class, *kind),
        Command::Verify {
            file,
            exhaustive,
            guard,
        } => cmd_verify(f, file, *exhaustive, *guard),
        Command::Achieve { network, class } => cmd_achieve(f, *network, *class),
        Command::Codes { network } => cmd_codes(f, *network),
        Command::Export {
            network,
            label,
            field,
            reinterpret,
            table,
            no_decoders,
        } => cmd_export(*network, label, *field, *reinterpret, *table, *no_decoders),
        Command::Rank {
            inequality,
            field,
            dim,
            mode,
            seed,
            samples,
            budget,
        } => cmd_rank(f, inequality, *field, *dim, *mode, *seed, *samples, *budget),
        Command::Transfer { coeffs, preset } => cmd_transfer(f, coeffs, *preset),
        Command::Polytope { hrep, action } => cmd_polytope(f, hrep, action),
    }
}

fn cmd_regions(f: Format, id: NetworkId, class: RegionClass) -> Result<Outcome> {
    let region = builtin_region(id, class)?;
    let vertices = enumerate_vertices(&region.hrep)?;
    let matches = (!region.expected.is_empty()).then(|| region.expected == vertices);
    let planes: Vec<String> = region
        .hrep
        .halfspaces()
        .iter()
        .map(|h| h.render(&region.variables))
        .collect();
    let points: Vec<String> = vertices.vertices.iter().map(|v| format_point(v)).collect();
    let report = json!({
        "network": id,
        "class": region.class,
        "variables": region.variables,
        "inequalities": planes,
        "vertices": points,
        "matches_expected": matches,
    });
    let text = || {
        let mut s = format!("{id} {} region over ({})\n", region.class, region.variables.join(", "));
        for p in &planes {
            s.push_str(&format!("  {p}\n"));
        }
        s.push_str(&format!("{} vertices:\n", points.len()));
        for p in &points {
            s.push_str(&format!("  {p}\n"));
        }
        match matches {
            Some(true) => s.push_str("vertex list matches the cataloged list\n"),
            Some(false) => s.push_str("MISMATCH with the cataloged vertex list\n"),
            None => s.push_str("no cataloged vertex list to compare\n"),
        }
        s
    };
    Ok(Outcome::with_status(matches != Some(false), render(f, &report, text)?))
}

fn cmd_capacity(f: Format, id: NetworkId, class: RegionClass, kind: CapacityKind) -> Result<Outcome> {
    let region = builtin_region(id, class)?;
    let (name, value) = match kind {
        CapacityKind::Uniform => ("uniform", uniform_capacity(&region.hrep)?),
        CapacityKind::Average => ("average", average_capacity(&region.hrep)?),
    };
    let value = format_rational(&value);
    let report = json!({
        "network": id,
        "class": region.class,
        "kind": name,
        "capacity": value,
    });
    let text = || format!("{id} {} {name} capacity: {value}\n", region.class);
    Ok(Outcome::ok(render(f, &report, text)?))
}

fn read(path: &PathBuf) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn cmd_verify(f: Format, path: &PathBuf, exhaustive: bool, guard: Option<u64>) -> Result<Outcome> {
    let code = load_code(&read(path)?).with_context(|| format!("{}", path.display()))?;
    let net = builtin_network(code.network());
    let guard = guard.unwrap_or(DEFAULT_GUARD);
    let report = match (&code, exhaustive) {
        (CodeFile::Linear(c), false) => verify_solution(&net, c)?,
        (CodeFile::Linear(c), true) => verify_solution_exhaustive_with_guard(&net, c, guard)?,
        (CodeFile::Table(c), _) => verify_solution_exhaustive_with_guard(&net, c, guard)?,
    };
    let text = || verification_text(&report);
    Ok(Outcome::with_status(report.valid, render(f, &report, text)?))
}

fn assignment_text(a: &BTreeMap<String, Vec<u32>>) -> String {
    a.iter()
        .map(|(m, v)| {
            let parts: Vec<String> = v.iter().map(u32::to_string).collect();
            format!("{m}=({})", parts.join(","))
        })
        .collect::<Vec<_>>()
        .join(" ")
}

fn verification_text(r: &VerificationReport) -> String {
    let mut s = format!(
        "{} ({} check), rate vector {}\n",
        if r.valid { "VALID" } else { "INVALID" },
        r.method,
        r.rate_vector
    );
    if let Some(n) = r.assignments_checked {
        s.push_str(&format!("assignments checked: {n}\n"));
    }
    for d in &r.demands {
        s.push_str(&format!(
            "  {}:{} {}",
            d.receiver,
            d.message,
            if d.passed { "ok" } else { "FAILS" }
        ));
        if let Some(detail) = &d.detail {
            s.push_str(&format!(" ({detail})"));
        }
        s.push('\n');
    }
    if let Some(w) = &r.witness {
        s.push_str(&format!(
            "witness for {}:{}: {}\n",
            w.receiver,
            w.message,
            assignment_text(&w.assignment)
        ));
        if let Some(o) = &w.other {
            s.push_str(&format!("  indistinguishable from: {}\n", assignment_text(o)));
        }
        if let Some(d) = &w.decoded {
            let parts: Vec<String> = d.iter().map(u32::to_string).collect();
            s.push_str(&format!("  decoder output: ({})\n", parts.join(",")));
        }
    }
    s
}

fn cmd_achieve(f: Format, id: NetworkId, class: RegionClass) -> Result<Outcome> {
    let report: AchieveReport = achieve(id, class)?;
    let text = || {
        let mut s = format!("{id} {} codes over GF({}):\n", report.class, report.field);
        for c in &report.codes {
            s.push_str(&format!(
                "  {:<28} rate {:<22} {}{}{}\n",
                c.label,
                c.rate_vector.to_string(),
                if c.valid { "valid" } else { "INVALID" },
                if c.in_region { ", in region" } else { ", OUTSIDE region" },
                if c.routing { ", routing" } else { "" },
            ));
        }
        s.push_str("vertices:\n");
        for v in &report.vertices {
            match (&v.code, v.valid) {
                (Some(c), true) => s.push_str(&format!("  {:<28} reached from {c}\n", v.vertex)),
                (Some(c), false) => s.push_str(&format!("  {:<28} FAILED from {c}\n", v.vertex)),
                (None, _) => s.push_str(&format!("  {:<28} not reached\n", v.vertex)),
            }
        }
        s.push_str(if report.ok { "all checks passed\n" } else { "some checks FAILED\n" });
        s
    };
    Ok(Outcome::with_status(report.ok, render(f, &report, text)?))
}

fn cmd_codes(f: Format, id: NetworkId) -> Result<Outcome> {
    let rows: Vec<Value> = builtin_codes(id)
        .iter()
        .map(|c| {
            json!({
                "label": c.label,
                "claim": c.claim,
                "n": c.n,
                "formulas": c.edge_formulas(),
            })
        })
        .collect();
    let text = || {
        let mut s = String::new();
        for c in builtin_codes(id) {
            let parts: Vec<String> = c.edge_formulas().iter().map(|(e, t)| format!("{e}={t}")).collect();
            s.push_str(&format!(
                "{:<28} {:<4} n={} {}\n",
                c.label,
                serde_json::to_value(c.claim).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default(),
                c.n,
                parts.join(" ")
            ));
        }
        s
    };
    Ok(Outcome::ok(render(f, &rows, text)?))
}

fn cmd_export(
    id: NetworkId,
    label: &str,
    p: u32,
    reinterpret: Option<u32>,
    table: bool,
    no_decoders: bool,
) -> Result<Outcome> {
    let cc = builtin_code(id, label).ok_or_else(|| anyhow!("{id} has no bundled code `{label}`"))?;
    let mut code = cc.build(PrimeField::new(p)?)?;
    if let Some(q) = reinterpret {
        code = code.reinterpret(PrimeField::new(q)?);
    }
    if no_decoders {
        code.decoders.clear();
    }
    let text = if table {
        save_table(&code.to_table(&builtin_network(id))?)?
    } else {
        save_linear(&code)?
    };
    Ok(Outcome::ok(text))
}

#[derive(Debug, Serialize)]
struct RankReport {
    inequality: String,
    field: u32,
    dim: usize,
    mode: String,
    checked: u64,
    claimed_valid: bool,
    violation: Option<RankViolation>,
    consistent: bool,
}

#[derive(Debug, Serialize)]
struct RankViolation {
    slack: String,
    assignment: BTreeMap<String, String>,
}

#[allow(clippy::too_many_arguments)]
fn cmd_rank(
    f: Format,
    name: &str,
    q: u32,
    d: usize,
    mode: Mode,
    seed: u64,
    samples: u64,
    budget: u64,
) -> Result<Outcome> {
    PrimeField::new(q)?;
    let (label, expr, valid): (String, EntropyExpression, bool) = match name.parse::<InequalityId>() {
        Ok(id) => (id.to_string(), builtin_inequality(id), claimed_valid(id, q, d)),
        Err(_) => {
            let path = PathBuf::from(name);
            if !path.exists() {
                bail!("`{name}` is neither a built-in inequality nor a file");
            }
            let e = EntropyExpression::parse(&read(&path)?).with_context(|| path.display().to_string())?;
            (name.to_string(), e, true)
        }
    };
    let (mode_name, search_mode) = match mode {
        Mode::Catalog => ("catalog", SearchMode::Catalog),
        Mode::Exhaustive => ("exhaustive", SearchMode::Exhaustive { budget }),
        Mode::Sample => ("sample", SearchMode::Sample { seed, samples }),
    };
    let out: SearchOutcome = search_violation(&expr, q, d, search_mode)?;
    let violation = out.violation.as_ref().map(|v| RankViolation {
        slack: format_rational(&v.slack),
        assignment: v
            .assignment
            .iter()
            .map(|(n, s)| (n.to_string(), s.to_string()))
            .collect(),
    });
    // a violation is expected exactly when validity is not claimed; other
    // searches are inconclusive and pass
    let consistent = !(valid && violation.is_some());
    let report = RankReport {
        inequality: label,
        field: q,
        dim: d,
        mode: mode_name.into(),
        checked: out.checked,
        claimed_valid: valid,
        violation,
        consistent,
    };
    let text = || {
        let mut s = format!(
            "{} over GF({q})^{d}, {} mode: {} assignments checked\n",
            report.inequality, report.mode, report.checked
        );
        s.push_str(&format!(
            "claimed {} for this field and dimension\n",
            if valid { "valid" } else { "not valid" }
        ));
        match &report.violation {
            Some(v) => {
                s.push_str(&format!("violation with slack {}:\n", v.slack));
                for (n, sub) in &v.assignment {
                    s.push_str(&format!("  {n} = {sub}\n"));
                }
            }
            None => s.push_str("no violation found (minimum slack >= 0 on all checked assignments)\n"),
        }
        if !consistent {
            s.push_str("this contradicts the validity claim\n");
        }
        s
    };
    Ok(Outcome::with_status(consistent, render(f, &report, text)?))
}

fn cmd_transfer(f: Format, coeffs: &[String], preset: Option<Preset>) -> Result<Outcome> {
    let c = match preset {
        Some(Preset::Ingleton) => TransferCoefficients::ingleton(),
        Some(Preset::Zy) => TransferCoefficients::zhang_yeung(),
        Some(Preset::ZySwapped) => TransferCoefficients::zhang_yeung_swapped(),
        None => {
            if coeffs.len() != 10 {
                bail!("expected 10 coefficients a1..a10, got {}", coeffs.len());
            }
            let v: Vec<Rational> = coeffs
                .iter()
                .map(|t| parse_rational(t).ok_or_else(|| anyhow!("bad coefficient `{t}`")))
                .collect::<Result<_>>()?;
            TransferCoefficients(v.try_into().map_err(|_| anyhow!("expected 10 coefficients"))?)
        }
    };
    let b = transfer_vamos(&c);
    let vars: Vec<String> = ["r_a", "r_b", "r_c", "r_d"].iter().map(|s| s.to_string()).collect();
    let rate = b.rate_bound.as_ref().map(|r| r.halfspace().render(&vars));
    let strs = |v: &[Rational]| v.iter().map(format_rational).collect::<Vec<_>>();
    let report = json!({
        "coefficients": strs(&c.0),
        "bound": b.to_string(),
        "message_coefficients": strs(&b.lhs_messages),
        "i_cy": format_rational(&b.lhs_i_cy),
        "i_bx": format_rational(&b.lhs_i_bx),
        "edge_coefficients": strs(&b.rhs_edges),
        "reducible": b.reducible,
        "rate_bound": rate,
    });
    let text = || {
        let mut s = format!("{b}\n");
        match &rate {
            Some(r) => s.push_str(&format!("rate bound: {r}\n")),
            None => s.push_str("not reducible to a rate bound\n"),
        }
        s
    };
    Ok(Outcome::ok(render(f, &report, text)?))
}

fn cmd_polytope(f: Format, path: &PathBuf, action: &PolytopeAction) -> Result<Outcome> {
    let h = HRep::parse(&read(path)?).with_context(|| path.display().to_string())?;
    match action {
        PolytopeAction::Vertices => {
            let v = match enumerate_vertices(&h) {
                Ok(v) => v,
                Err(e) => {
                    let report = json!({ "error": e.to_string() });
                    let text = || format!("{e}\n");
                    return Ok(Outcome::with_status(false, render(f, &report, text)?));
                }
            };
            let points: Vec<String> = v.vertices.iter().map(|p| format_point(p)).collect();
            let report = json!({ "dim": h.dim(), "vertices": points });
            let text = || {
                let mut s = format!("{} vertices\n", points.len());
                for p in &points {
                    s.push_str(&format!("  {p}\n"));
                }
                s
            };
            Ok(Outcome::ok(render(f, &report, text)?))
        }
        PolytopeAction::Contains { point } => {
            let x: Vec<Rational> = point
                .iter()
                .map(|t| parse_rational(t).ok_or_else(|| anyhow!("bad coordinate `{t}`")))
                .collect::<Result<_>>()?;
            let inside = h.contains(&x)?;
            let report = json!({ "point": format_point(&x), "contains": inside });
            let text = || format!("{inside}\n");
            Ok(Outcome::ok(render(f, &report, text)?))
        }
    }
}
