//! Drivers behind the `quatlat` binary. Every command produces a [`Report`]
//! that is printed as TSV with a fixed header row.

use std::fmt;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use quatlat::catalog;
use quatlat::enumerate::{count_representations, counts_up_to, orbit_profile, units1, EnumError};
use quatlat::formulas::{formula_for, predict, FormulaError};
use quatlat::lattice::{index_ideal, parse_order_file, LatticeError, Order};
use quatlat::numbers::{totally_positive_up_to_trace, BaseField, NumberError, RingInteger};
use quatlat::perceptive::{
    conductor_chain, intermediate_orders, is_perceptive_bruteforce, kind_of, quotient_shape, search_perceptive,
    PerceptiveError,
};

pub const FACTOR_LIMIT_VAR: &str = "QUATLAT_FACTOR_LIMIT";

#[derive(Debug, Parser)]
#[command(name = "quatlat", version, about = "Representation counts and perceptive suborders of quaternion orders")]
pub struct Cli {
    /// Worker threads for lattice enumeration (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct OrderArg {
    /// Catalog name or path to an order file.
    #[arg(long)]
    pub order: String,
}

#[derive(Debug, Args)]
pub struct PairArgs {
    /// Catalog name or path to an order file.
    #[arg(long)]
    pub order: String,
    /// Superorder; defaults to the catalog superorder, or the order itself when maximal.
    #[arg(long)]
    pub against: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Size of the norm-one unit group.
    Units(OrderArg),
    /// Number of elements of a given reduced norm.
    Count {
        #[command(flatten)]
        order: OrderArg,
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
    },
    /// Closed-form prediction of the count, falling back to enumeration.
    Predict {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
    },
    /// Compare predictions with enumeration over a range of norms.
    Verify {
        #[command(flatten)]
        pair: PairArgs,
        /// Over Q: check n = 1..=N.
        #[arg(long, conflicts_with = "max_trace")]
        max: Option<i64>,
        /// Check every totally positive α with tr(α) ≤ T.
        #[arg(long)]
        max_trace: Option<i64>,
    },
    /// List the perceptive suborders of an order.
    Search(OrderArg),
    /// Conductors along the chain of intermediate orders.
    Conductors(PairArgs),
    /// Kind, quotient shape and perceptivity of a pair.
    Kind(PairArgs),
    /// Orbit intersection sizes at a given norm.
    Profile {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
    },
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Capacity(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Capacity(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(s) | CliError::Capacity(s) => f.write_str(s),
        }
    }
}

trait Capacity {
    fn is_capacity(&self) -> bool;
}

impl Capacity for NumberError {
    fn is_capacity(&self) -> bool {
        matches!(self, NumberError::FactorLimitExceeded(..))
    }
}

impl Capacity for LatticeError {
    fn is_capacity(&self) -> bool {
        false
    }
}

impl Capacity for EnumError {
    fn is_capacity(&self) -> bool {
        matches!(self, EnumError::Number(e) if e.is_capacity())
    }
}

impl Capacity for PerceptiveError {
    fn is_capacity(&self) -> bool {
        match self {
            PerceptiveError::Capacity(_) => true,
            PerceptiveError::Enum(e) => e.is_capacity(),
            PerceptiveError::Number(e) => e.is_capacity(),
            _ => false,
        }
    }
}

impl Capacity for FormulaError {
    fn is_capacity(&self) -> bool {
        match self {
            FormulaError::Number(e) => e.is_capacity(),
            FormulaError::Enum(e) => e.is_capacity(),
            FormulaError::Perceptive(e) => e.is_capacity(),
            _ => false,
        }
    }
}

macro_rules! into_cli_error {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                if e.is_capacity() {
                    CliError::Capacity(e.to_string())
                } else {
                    CliError::Usage(e.to_string())
                }
            }
        }
    )*};
}

into_cli_error!(NumberError, LatticeError, EnumError, PerceptiveError, FormulaError);

type Result<T> = std::result::Result<T, CliError>;

/// Rows of a TSV table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Report {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Report {
    pub fn new(header: &[&'static str]) -> Self {
        Report { header: header.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write_tsv(&self, out: &mut impl Write) -> io::Result<()> {
        writeln!(out, "{}", self.header.join("\t"))?;
        for r in &self.rows {
            writeln!(out, "{}", r.join("\t"))?;
        }
        Ok(())
    }
}

/// Outcome of a command: its table and whether any check failed.
#[derive(Debug)]
pub struct Outcome {
    pub report: Report,
    pub mismatches: usize,
}

impl From<Report> for Outcome {
    fn from(report: Report) -> Self {
        Outcome { report, mismatches: 0 }
    }
}

/// A catalog name or an order-file path.
pub fn load_order(spec: &str) -> Result<Order> {
    if catalog::entry(spec).is_some() {
        return Ok(catalog::order(spec)?);
    }
    let path = PathBuf::from(spec);
    let text = std::fs::read_to_string(&path)
        .map_err(|e| CliError::Usage(format!("'{spec}' is neither a catalog order nor a readable file: {e}")))?;
    parse_order_file(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

pub fn parse_alpha(field: BaseField, s: &str) -> Result<RingInteger> {
    RingInteger::parse(field, s).map_err(|e| CliError::Usage(format!("alpha '{s}': {e}")))
}

fn resolve_pair(p: &PairArgs) -> Result<(Order, Order)> {
    let g = load_order(&p.order)?;
    let h = match &p.against {
        Some(h) => load_order(h)?,
        None => match catalog::entry(&p.order) {
            Some(e) if e.maximal => g.clone(),
            Some(e) if e.superorder.is_some() => catalog::order(e.superorder.unwrap())?,
            _ => return Err(CliError::Usage(format!("--against is required for '{}'", p.order))),
        },
    };
    if !h.contains_lattice(&g) {
        return Err(CliError::Usage(format!("'{}' is not contained in its superorder", p.order)));
    }
    Ok((g, h))
}

fn label(o: &Order) -> String {
    catalog::name_of(o).map_or_else(|| o.to_string(), str::to_string)
}

/// Recomputes the catalog metadata: unit counts and superorder containment.
pub fn self_check() -> std::result::Result<(), String> {
    for e in catalog::CATALOG {
        let o = catalog::order(e.name).map_err(|err| format!("{}: {err}", e.name))?;
        if let Some(n) = e.expected_units {
            let got = units1(&o).map_err(|err| format!("{}: {err}", e.name))?.len();
            if got != n {
                return Err(format!("{}: expected {n} units, found {got}", e.name));
            }
        }
        if let Some(s) = e.superorder {
            let h = catalog::order(s).map_err(|err| format!("{s}: {err}"))?;
            if !h.contains_lattice(&o) {
                return Err(format!("{} is not contained in {s}", e.name));
            }
        }
    }
    Ok(())
}

pub fn cmd_units(order: &str) -> Result<Report> {
    let o = load_order(order)?;
    let mut r = Report::new(&["order", "units"]);
    r.push(vec![order.to_string(), units1(&o)?.len().to_string()]);
    Ok(r)
}

pub fn cmd_count(order: &str, alpha: &str) -> Result<Report> {
    let o = load_order(order)?;
    let a = parse_alpha(o.field(), alpha)?;
    if !a.is_totally_positive() {
        return Err(CliError::Usage(format!("alpha {a} is not totally positive")));
    }
    let mut r = Report::new(&["order", "alpha", "count"]);
    r.push(vec![order.to_string(), a.to_string(), count_representations(&o, &a)?.to_string()]);
    Ok(r)
}

pub fn cmd_predict(p: &PairArgs, alpha: &str) -> Result<Report> {
    let (g, h) = resolve_pair(p)?;
    let a = parse_alpha(g.field(), alpha)?;
    if !a.is_totally_positive() {
        return Err(CliError::Usage(format!("alpha {a} is not totally positive")));
    }
    let mut r = Report::new(&["order", "against", "formula", "alpha", "predicted"]);
    let (formula, value) = match formula_for(&g, &h) {
        Ok(d) => (d.kind.to_string(), predict(&d, &a)?),
        Err(FormulaError::NoFormula(_)) => ("enumeration".to_string(), BigInt::from(count_representations(&g, &a)?)),
        Err(e) => return Err(e.into()),
    };
    r.push(vec![p.order.clone(), label(&h), formula, a.to_string(), value.to_string()]);
    Ok(r)
}

pub fn cmd_verify(p: &PairArgs, max: Option<i64>, max_trace: Option<i64>) -> Result<Outcome> {
    let (g, h) = resolve_pair(p)?;
    let field = g.field();
    let bound = match (max, max_trace) {
        (Some(n), None) if field == BaseField::Q => n,
        (Some(_), None) => return Err(CliError::Usage("--max is only for orders over Q; use --max-trace".into())),
        (None, Some(t)) => t,
        _ => return Err(CliError::Usage("give exactly one of --max or --max-trace".into())),
    };
    let desc = formula_for(&g, &h)?;
    let mut report = Report::new(&["alpha", "formula", "predicted", "counted", "verdict"]);
    let mut mismatches = 0;
    let counts = counts_up_to(&g, bound)?;
    debug_assert_eq!(counts.len(), totally_positive_up_to_trace(field, bound).len());
    for (alpha, count) in counts {
        let predicted = predict(&desc, &alpha)?;
        let ok = predicted == BigInt::from(count);
        mismatches += usize::from(!ok);
        report.push(vec![
            alpha.to_string(),
            desc.kind.to_string(),
            predicted.to_string(),
            count.to_string(),
            if ok { "OK" } else { "MISMATCH" }.to_string(),
        ]);
    }
    Ok(Outcome { report, mismatches })
}

pub fn cmd_search(order: &str) -> Result<Report> {
    let h = load_order(order)?;
    let mut r = Report::new(&["index", "kind", "units", "catalog", "basis"]);
    for g in search_perceptive(&h)? {
        let idx = index_ideal(&h, &g)?;
        let name = catalog::name_of(&g).unwrap_or("-");
        let basis: Vec<String> = g.ok_basis()?.iter().map(|q| q.to_string()).collect();
        r.push(vec![
            idx.to_string(),
            kind_of(&g, &h)?.to_string(),
            units1(&g)?.len().to_string(),
            name.to_string(),
            basis.join("; "),
        ]);
    }
    Ok(r)
}

pub fn cmd_conductors(p: &PairArgs) -> Result<Report> {
    let (g, h) = resolve_pair(p)?;
    let poset = intermediate_orders(&g, &h)?;
    let mut r = Report::new(&["order", "index", "conductor", "generator"]);
    for link in conductor_chain(&g, &h, &poset)? {
        let gen = match &link.generator {
            Ok(q) => q.to_string(),
            Err(e) => format!("none ({e})"),
        };
        r.push(vec![label(&link.order), index_ideal(&link.order, &g)?.to_string(), link.conductor.to_string(), gen]);
    }
    Ok(r)
}

pub fn cmd_kind(p: &PairArgs) -> Result<Report> {
    let (g, h) = resolve_pair(p)?;
    let mut r = Report::new(&["order", "against", "kind", "shape", "perceptive"]);
    let perceptive = match is_perceptive_bruteforce(&g, &h) {
        Ok(b) => b.to_string(),
        Err(e @ PerceptiveError::Capacity(_)) => format!("unknown ({e})"),
        Err(e) => return Err(e.into()),
    };
    r.push(vec![
        p.order.clone(),
        label(&h),
        kind_of(&g, &h)?.to_string(),
        quotient_shape(&g, &h)?.to_string(),
        perceptive,
    ]);
    Ok(r)
}

pub fn cmd_profile(p: &PairArgs, alpha: &str) -> Result<Report> {
    let (g, h) = resolve_pair(p)?;
    let a = parse_alpha(g.field(), alpha)?;
    if !a.is_totally_positive() {
        return Err(CliError::Usage(format!("alpha {a} is not totally positive")));
    }
    let mut r = Report::new(&["orbit", "intersection"]);
    for (i, s) in orbit_profile(&g, &h, &a)?.into_iter().enumerate() {
        r.push(vec![i.to_string(), s.to_string()]);
    }
    Ok(r)
}

/// Reads the factor bound override from the environment.
pub fn apply_env() -> Result<()> {
    if let Ok(v) = std::env::var(FACTOR_LIMIT_VAR) {
        let n: u64 =
            v.trim().parse().map_err(|_| CliError::Usage(format!("{FACTOR_LIMIT_VAR}='{v}' is not a number")))?;
        quatlat::numbers::set_factor_limit(n);
    }
    Ok(())
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    Ok(match &cli.command {
        Command::Units(o) => cmd_units(&o.order)?.into(),
        Command::Count { order, alpha } => cmd_count(&order.order, alpha)?.into(),
        Command::Predict { pair, alpha } => cmd_predict(pair, alpha)?.into(),
        Command::Verify { pair, max, max_trace } => cmd_verify(pair, *max, *max_trace)?,
        Command::Search(o) => cmd_search(&o.order)?.into(),
        Command::Conductors(p) => cmd_conductors(p)?.into(),
        Command::Kind(p) => cmd_kind(p)?.into(),
        Command::Profile { pair, alpha } => cmd_profile(pair, alpha)?.into(),
    })
}
