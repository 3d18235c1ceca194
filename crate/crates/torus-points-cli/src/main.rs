//! `torus-points`: command-line front door for the torus-points library.
//!
//! Every subcommand reads its inputs from flags, runs one library operation,
//! and prints a single JSON object (JSON-lines for streams) on stdout. All
//! outputs carry `"schema": "torus-points/1"`; integers are serialized as
//! decimal strings so values never truncate at 64 bits; heights and other
//! measurements are fixed at 12 significant digits. Output bytes depend only
//! on the arguments, the configuration file and the seed — never on the
//! worker count.
//!
//! Exit codes: 0 on success, 2 when an input fails to parse, 3 when a
//! domain-level precondition refuses the computation (unfactorable value,
//! unsupported variety shape, classification gate, ...).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use num_rational::BigRational;

use torus_points::cyclo::{parse_cyclo, parse_point, CycloRational, DEFAULT_TRIAL_DIVISION_BOUND};
use torus_points::dynamics::{
    canonical_height_capped, chebyshev_or_monomial, commuting_polys, curve_periodic_intersection,
    is_periodic_capped, PolyMap, DEFAULT_DIGIT_CAP_BITS,
};
use torus_points::laurent::{LaurentSystem, ParamCurve};
use torus_points::relations::{
    dependence_report, group_decomposition, group_decomposition_mod_gamma,
    is_multiplicatively_dependent, relation_lattice, schlickewei_ratio, GammaGroup,
};
use torus_points::sieve::{
    abelian_point_sieve, coset_containment, find_primitive_characters, gamma_enlarged_sieve,
    SieveConfig,
};
use torus_points::subgroup::{
    enumerate_all_subgroups, enumerate_connected_subgroups, AlgebraicSubgroup,
};
use torus_points::witness::witness_subgroup;
use torus_points::{fmt_sig, Error, IntMatrix, Lattice, Result};

/// Version tag stamped on every JSON output.
const SCHEMA: &str = "torus-points/1";

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

// ---------------------------------------------------------------------------
// command line grammar
// ---------------------------------------------------------------------------

#[derive(Parser)]
#[command(
    name = "torus-points",
    version,
    about = "Exact lattice, subgroup, sieve and dynamics computations on the algebraic torus"
)]
struct Cli {
    /// Configuration file with `key = value` lines (trial_division_bound,
    /// height_bound, bogomolov_constant, bound, gamma_bound, seed).
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Worker threads for parallel scans (default: one per CPU). The output
    /// is byte-identical regardless of this setting.
    #[arg(long, global = true, value_name = "N")]
    workers: Option<usize>,

    /// Trial-division bound for factoring rationals into prime exponents;
    /// overrides the configuration file.
    #[arg(long, global = true, value_name = "B")]
    trial_bound: Option<u64>,

    /// Seed for sampled measurements; overrides the configuration file.
    #[arg(long, global = true, value_name = "S")]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integer lattice computations on an explicit basis.
    Lat {
        #[command(subcommand)]
        op: LatOp,
    },
    /// Algebraic subgroups of the torus via their character lattices.
    Grp {
        #[command(subcommand)]
        op: GrpOp,
    },
    /// Multiplicative dependence and group decompositions of points.
    Deps {
        #[command(subcommand)]
        op: DepsOp,
    },
    /// Search for a connected subgroup of given codimension containing a point.
    Witness(WitnessArgs),
    /// Sieve a plane curve against algebraic subgroups (and variants).
    Sieve(SieveArgs),
    /// Polynomial dynamics: canonical heights, commuting maps, classification.
    #[command(name = "dyn")]
    Dyn {
        #[command(subcommand)]
        op: DynOp,
    },
}

#[derive(Subcommand)]
enum LatOp {
    /// Canonical row Hermite normal form and its unimodular transform.
    Hnf(BasisArg),
    /// Smith normal form U*A*V = D with both transforms.
    Snf(BasisArg),
    /// Saturation: intersection of the rational span with the integer lattice.
    Saturate(BasisArg),
    /// Primitivity test (saturated ⟺ gcd of maximal minors is 1).
    Primitive(BasisArg),
    /// Orthogonal complement lattice.
    Orthogonal(BasisArg),
    /// Size-reduced short basis and its orthogonality defect.
    Reduce(BasisArg),
    /// Gram determinant (squared covolume).
    Gram(BasisArg),
}

#[derive(Args)]
struct BasisArg {
    /// Lattice generators as a JSON array of integer rows, e.g. "[[2,4]]".
    /// Entries may be numbers or decimal strings of any size.
    #[arg(long)]
    basis: String,
}

#[derive(Subcommand)]
enum GrpOp {
    /// The subgroup defined by a character lattice, with its invariants.
    Build(BasisArg),
    /// Connectedness test (defining lattice primitive).
    Connected(BasisArg),
    /// Number of connected components, optionally with representatives.
    Components {
        #[command(flatten)]
        basis: BasisArg,
        /// Also list one torsion representative per component.
        #[arg(long)]
        reps: bool,
    },
    /// Monomial parametrization of the identity component.
    Param(BasisArg),
    /// Exact membership test for a point.
    Member {
        #[command(flatten)]
        basis: BasisArg,
        /// Point such as "(2, -1)" or "(zeta(6,1), 1/2)".
        #[arg(long, allow_hyphen_values = true)]
        point: String,
    },
    /// Enumerate subgroups of bounded defining basis as JSON-lines.
    Enum {
        /// Ambient torus dimension.
        #[arg(long)]
        ambient: usize,
        /// Minimum codimension to include.
        #[arg(long, default_value_t = 1)]
        codim: usize,
        /// Bound on the entries of the canonical defining basis.
        #[arg(long)]
        bound: Option<i64>,
        /// Only connected subgroups.
        #[arg(long)]
        connected: bool,
    },
}

#[derive(Subcommand)]
enum DepsOp {
    /// Lattice of all integer relations k with x^k = 1.
    Relations(PointArg),
    /// Multiplicative dependence test.
    Dependent(PointArg),
    /// Dependence report with the primitivity verdict and witnesses.
    PrimitiveDependent(PointArg),
    /// Decompose the coordinates over a finitely generated group.
    Decompose {
        #[command(flatten)]
        point: PointArg,
        /// Also measure the minimum height-sum/height ratio over this many
        /// sampled exponent vectors (uses the seed).
        #[arg(long, value_name = "N")]
        ratio_samples: Option<usize>,
    },
    /// Decompose relative to a finitely generated enlargement group.
    DecomposeGamma {
        #[command(flatten)]
        point: PointArg,
        /// Enlargement generators: coordinates separated by ';', generators
        /// within a coordinate by ',', e.g. "2;3" or "2,3;".
        #[arg(long, allow_hyphen_values = true)]
        gamma: String,
    },
}

#[derive(Args)]
struct PointArg {
    /// Point such as "(-1, 2)"; coordinates are root-of-unity × rational.
    #[arg(long, allow_hyphen_values = true)]
    point: String,
}

#[derive(Args)]
struct WitnessArgs {
    /// Point such as "(4, 8)".
    #[arg(long, allow_hyphen_values = true)]
    point: String,
    /// Required codimension of the witness subgroup.
    #[arg(long)]
    codim: usize,
    /// Entry bound for the relation-vector search (flag or config `bound`).
    #[arg(long)]
    bound: Option<i64>,
}

#[derive(Args)]
#[command(args_conflicts_with_subcommands = true)]
struct SieveArgs {
    #[command(subcommand)]
    op: Option<SieveOp>,

    #[command(flatten)]
    plain: PlainSieveArgs,
}

#[derive(Args)]
struct PlainSieveArgs {
    /// Defining equations of the curve, ';'-separated Laurent polynomials in
    /// x, y (aliases x1, x2), e.g. "x+y-1".
    #[arg(long, allow_hyphen_values = true)]
    variety: Option<String>,
    /// Minimum codimension of the subgroups to intersect with.
    #[arg(long)]
    codim: Option<usize>,
    /// Entry bound for the enumerated defining bases (flag or config `bound`).
    #[arg(long)]
    bound: Option<i64>,
    /// Reference height bound to compare the found points against.
    #[arg(long)]
    height_bound: Option<f64>,
    /// Reference height floor for non-torsion points.
    #[arg(long)]
    bogomolov: Option<f64>,
}

#[derive(Subcommand)]
enum SieveOp {
    /// Sieve cosets translated by a finitely generated group.
    Gamma {
        /// Defining equations, as for the plain sieve.
        #[arg(long, allow_hyphen_values = true)]
        variety: String,
        /// Minimum codimension of the subgroups to intersect with.
        #[arg(long)]
        codim: Option<usize>,
        /// Entry bound for the enumerated defining bases.
        #[arg(long)]
        bound: Option<i64>,
        /// Group generators per coordinate, e.g. "2;3".
        #[arg(long, allow_hyphen_values = true)]
        gamma: String,
        /// Exponent bound for the enumerated group elements.
        #[arg(long)]
        gamma_bound: Option<i64>,
        /// Reference height bound to compare the found points against.
        #[arg(long)]
        height_bound: Option<f64>,
        /// Reference height floor for non-torsion points.
        #[arg(long)]
        bogomolov: Option<f64>,
    },
    /// Primitive characters with two-point divisors along a parametrized curve.
    Characters {
        /// Coordinate functions of t, comma-separated, e.g. "t, 1-t".
        #[arg(long, allow_hyphen_values = true)]
        curve: String,
    },
    /// Decide whether a parametrized curve lies in a coset of a proper subgroup.
    Coset {
        /// Coordinate functions of t, comma-separated, e.g. "2t, 3t".
        #[arg(long, allow_hyphen_values = true)]
        curve: String,
    },
}

#[derive(Subcommand)]
enum DynOp {
    /// Canonical height of a rational point under a polynomial map.
    Height {
        #[command(flatten)]
        map: MapArg,
        /// Starting rational value, e.g. "2" or "-1/3".
        #[arg(long, allow_hyphen_values = true)]
        at: String,
        /// Certified error bound to iterate down to.
        #[arg(long, default_value_t = 1e-6)]
        target_err: f64,
        /// Abort when an orbit value exceeds this many bits.
        #[arg(long, default_value_t = DEFAULT_DIGIT_CAP_BITS)]
        cap_bits: u64,
    },
    /// Exact preperiodicity test by orbit walking.
    Periodic {
        #[command(flatten)]
        map: MapArg,
        /// Starting rational value.
        #[arg(long, allow_hyphen_values = true)]
        at: String,
        /// Maximum number of exact iterations.
        #[arg(long, default_value_t = 64)]
        max_iter: usize,
        /// Abort when an orbit value exceeds this many bits.
        #[arg(long, default_value_t = DEFAULT_DIGIT_CAP_BITS)]
        cap_bits: u64,
    },
    /// All polynomials of bounded degree commuting with an iterate of the map.
    Commute {
        #[command(flatten)]
        map: MapArg,
        /// Largest degree to search.
        #[arg(long)]
        deg_bound: usize,
        /// Iterates f, f², ..., f^m to commute against.
        #[arg(long, default_value_t = 2)]
        iterate_bound: u32,
    },
    /// Decide affine conjugacy to a monomial or Chebyshev polynomial.
    Classify {
        #[command(flatten)]
        map: MapArg,
    },
    /// Intersect a plane curve with the periodic curves of a map.
    Intersect {
        /// Defining equations of the curve, ';'-separated polynomials in x, y.
        #[arg(long, allow_hyphen_values = true)]
        curve: String,
        #[command(flatten)]
        map: MapArg,
        /// Degree bound for the commuting-graph families.
        #[arg(long)]
        deg_bound: usize,
    },
}

#[derive(Args)]
struct MapArg {
    /// Polynomial in x of degree at least 2, e.g. "x^2-1".
    #[arg(long, allow_hyphen_values = true)]
    map: String,
}

// ---------------------------------------------------------------------------
// configuration
// ---------------------------------------------------------------------------

/// Effective settings: defaults, overridden by the configuration file,
/// overridden by flags.
struct Settings {
    trial_division_bound: u64,
    height_bound: Option<f64>,
    bogomolov_constant: Option<f64>,
    bound: Option<i64>,
    gamma_bound: Option<i64>,
    seed: u64,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            trial_division_bound: DEFAULT_TRIAL_DIVISION_BOUND,
            height_bound: None,
            bogomolov_constant: None,
            bound: None,
            gamma_bound: None,
            seed: 0,
        }
    }
}

impl Settings {
    fn load(cli: &Cli) -> Result<Settings> {
        let mut s = Settings::default();
        if let Some(path) = &cli.config {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
            s.apply_file(&text)?;
        }
        if let Some(b) = cli.trial_bound {
            s.trial_division_bound = b;
        }
        if let Some(seed) = cli.seed {
            s.seed = seed;
        }
        if s.trial_division_bound < 2 {
            return Err(Error::Parse("trial_division_bound must be at least 2".into()));
        }
        Ok(s)
    }

    fn apply_file(&mut self, text: &str) -> Result<()> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Parse(format!(
                    "config line {}: expected `key = value`, got {raw:?}",
                    lineno + 1
                )));
            };
            let (key, value) = (key.trim(), value.trim());
            match key {
                "trial_division_bound" => self.trial_division_bound = parse_config(key, value)?,
                "height_bound" => {
                    self.height_bound = Some(parse_positive_f64(key, value)?);
                }
                "bogomolov_constant" => {
                    self.bogomolov_constant = Some(parse_positive_f64(key, value)?);
                }
                "bound" => {
                    let b: i64 = parse_config(key, value)?;
                    if b < 1 {
                        return Err(Error::Parse("config bound must be at least 1".into()));
                    }
                    self.bound = Some(b);
                }
                "gamma_bound" => {
                    let b: i64 = parse_config(key, value)?;
                    if b < 0 {
                        return Err(Error::Parse("config gamma_bound must be at least 0".into()));
                    }
                    self.gamma_bound = Some(b);
                }
                "seed" => self.seed = parse_config(key, value)?,
                other => {
                    return Err(Error::Parse(format!("unknown config key {other:?}")));
                }
            }
        }
        Ok(())
    }

    fn sieve_config(&self) -> SieveConfig {
        SieveConfig {
            trial_division_bound: self.trial_division_bound,
            height_bound: self.height_bound,
            bogomolov_constant: self.bogomolov_constant,
        }
    }

    /// A bound that must come from a flag or the config file.
    fn require_bound(&self, flag: Option<i64>, what: &str) -> Result<i64> {
        flag.or(self.bound)
            .ok_or_else(|| Error::Parse(format!("{what} requires --bound (or config `bound`)")))
    }
}

fn parse_config<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Parse(format!("config {key}: cannot parse {value:?}")))
}

fn parse_positive_f64(key: &str, value: &str) -> Result<f64> {
    let x: f64 = parse_config(key, value)?;
    if !(x > 0.0) {
        return Err(Error::Parse(format!("config {key} must be positive")));
    }
    Ok(x)
}

// ---------------------------------------------------------------------------
// input parsing helpers
// ---------------------------------------------------------------------------

/// Parses a JSON array of integer rows; entries may be numbers or decimal
/// strings (for values beyond 64 bits).
fn parse_basis(text: &str) -> Result<Vec<Vec<BigInt>>> {
    let v: serde_json::Value = serde_json::from_str(text)
        .map_err(|e| Error::Parse(format!("basis is not valid JSON: {e}")))?;
    let rows = v
        .as_array()
        .ok_or_else(|| Error::Parse("basis must be a JSON array of rows".into()))?;
    if rows.is_empty() {
        return Err(Error::Parse("basis needs at least one row".into()));
    }
    let mut out = Vec::with_capacity(rows.len());
    for row in rows {
        let entries = row
            .as_array()
            .ok_or_else(|| Error::Parse("each basis row must be an array".into()))?;
        out.push(entries.iter().map(parse_big).collect::<Result<Vec<BigInt>>>()?);
    }
    let n = out[0].len();
    if n == 0 || out.iter().any(|r| r.len() != n) {
        return Err(Error::Parse("basis rows must be nonempty and of equal length".into()));
    }
    Ok(out)
}

fn parse_big(v: &serde_json::Value) -> Result<BigInt> {
    match v {
        serde_json::Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(BigInt::from(i))
            } else if let Some(u) = n.as_u64() {
                Ok(BigInt::from(u))
            } else {
                Err(Error::Parse(format!("not an integer: {n}")))
            }
        }
        serde_json::Value::String(s) => s
            .trim()
            .parse::<BigInt>()
            .map_err(|_| Error::Parse(format!("not an integer: {s:?}"))),
        other => Err(Error::Parse(format!("not an integer: {other}"))),
    }
}

fn parse_lattice(text: &str) -> Result<Lattice> {
    let rows = parse_basis(text)?;
    Ok(Lattice::from_generators(rows[0].len(), &rows))
}

fn parse_rational(text: &str) -> Result<BigRational> {
    text.trim()
        .parse::<BigRational>()
        .map_err(|_| Error::Parse(format!("not a rational number: {text:?}")))
}

/// Parses enlargement generators: coordinates separated by ';', generators
/// within a coordinate by ',', blanks allowed for empty coordinates.
fn parse_gamma(text: &str, trial_bound: u64) -> Result<GammaGroup> {
    let per_coordinate = text
        .split(';')
        .map(|coord| {
            coord
                .split(',')
                .map(str::trim)
                .filter(|g| !g.is_empty())
                .map(|g| parse_cyclo(g, trial_bound))
                .collect::<Result<Vec<CycloRational>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    GammaGroup::new(per_coordinate)
}

/// Removes one pair of outer parentheses when it encloses the whole curve
/// description, so both "t, 1-t" and "(t, 1-t)" are accepted.
fn strip_outer_parens(s: &str) -> &str {
    let t = s.trim();
    let Some(inner) = t.strip_prefix('(').and_then(|r| r.strip_suffix(')')) else {
        return t;
    };
    let mut depth = 0i32;
    for b in inner.bytes() {
        match b {
            b'(' => depth += 1,
            b')' => depth -= 1,
            _ => {}
        }
        if depth < 0 {
            return t; // the outer parens close separately
        }
    }
    inner
}

// ---------------------------------------------------------------------------
// JSON output helpers
// ---------------------------------------------------------------------------

/// Prints one JSON object, stamped with the schema version, as a single
/// line. Keys are emitted in sorted order, so output is byte-stable.
fn emit(mut v: serde_json::Value) {
    v["schema"] = SCHEMA.into();
    println!("{v}");
}

fn mat_json(m: &IntMatrix) -> serde_json::Value {
    (0..m.rows())
        .map(|i| m.row(i).iter().map(BigInt::to_string).collect::<Vec<_>>())
        .collect::<Vec<_>>()
        .into()
}

fn vec_json(v: &[BigInt]) -> serde_json::Value {
    v.iter().map(BigInt::to_string).collect::<Vec<_>>().into()
}

fn rows_json(rows: &[Vec<BigInt>]) -> serde_json::Value {
    rows.iter().map(|r| vec_json(r)).collect::<Vec<_>>().into()
}

// ---------------------------------------------------------------------------
// dispatch
// ---------------------------------------------------------------------------

fn run(cli: Cli) -> Result<()> {
    if let Some(n) = cli.workers {
        if n == 0 {
            return Err(Error::Parse("--workers must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::InvalidArgument(format!("cannot size worker pool: {e}")))?;
    }
    let settings = Settings::load(&cli)?;
    match cli.command {
        Command::Lat { op } => run_lat(op),
        Command::Grp { op } => run_grp(op, &settings),
        Command::Deps { op } => run_deps(op, &settings),
        Command::Witness(args) => run_witness(args, &settings),
        Command::Sieve(args) => run_sieve(args, &settings),
        Command::Dyn { op } => run_dyn(op),
    }
}

fn run_lat(op: LatOp) -> Result<()> {
    match op {
        LatOp::Hnf(b) => {
            let rows = parse_basis(&b.basis)?;
            let (h, u) = IntMatrix::from_rows(&rows).hnf();
            emit(serde_json::json!({ "hnf": mat_json(&h), "transform": mat_json(&u) }));
        }
        LatOp::Snf(b) => {
            let rows = parse_basis(&b.basis)?;
            let m = IntMatrix::from_rows(&rows);
            let (u, d, v) = m.snf();
            emit(serde_json::json!({
                "snf": mat_json(&d),
                "left": mat_json(&u),
                "right": mat_json(&v),
                "invariant_factors": m
                    .invariant_factors()
                    .iter()
                    .map(BigInt::to_string)
                    .collect::<Vec<_>>(),
            }));
        }
        LatOp::Saturate(b) => emit(parse_lattice(&b.basis)?.saturate().to_json()),
        LatOp::Primitive(b) => {
            emit(serde_json::json!({ "primitive": parse_lattice(&b.basis)?.is_primitive() }));
        }
        LatOp::Orthogonal(b) => emit(parse_lattice(&b.basis)?.orthogonal().to_json()),
        LatOp::Reduce(b) => {
            let (basis, defect) = parse_lattice(&b.basis)?.reduced_basis();
            emit(serde_json::json!({
                "basis": rows_json(&basis),
                "orthogonality_defect": fmt_sig(defect, 12),
            }));
        }
        LatOp::Gram(b) => {
            emit(serde_json::json!({
                "gram_det": parse_lattice(&b.basis)?.gram_det().to_string(),
            }));
        }
    }
    Ok(())
}

fn run_grp(op: GrpOp, settings: &Settings) -> Result<()> {
    match op {
        GrpOp::Build(b) => {
            let g = AlgebraicSubgroup::from_lattice(parse_lattice(&b.basis)?);
            let mut v = g.to_json();
            v["dimension"] = g.dimension().into();
            v["codimension"] = g.codimension().into();
            v["connected"] = g.is_connected().into();
            v["components"] = g.component_count().to_string().into();
            emit(v);
        }
        GrpOp::Connected(b) => {
            let g = AlgebraicSubgroup::from_lattice(parse_lattice(&b.basis)?);
            emit(serde_json::json!({ "connected": g.is_connected() }));
        }
        GrpOp::Components { basis, reps } => {
            let g = AlgebraicSubgroup::from_lattice(parse_lattice(&basis.basis)?);
            let mut v = serde_json::json!({ "components": g.component_count().to_string() });
            if reps {
                let reps: Vec<String> =
                    g.component_representatives()?.iter().map(ToString::to_string).collect();
                v["representatives"] = reps.into();
            }
            emit(v);
        }
        GrpOp::Param(b) => {
            let g = AlgebraicSubgroup::from_lattice(parse_lattice(&b.basis)?);
            let map = g.parametrize();
            emit(serde_json::json!({
                "exponents": mat_json(&map.exponents),
                "parameters": map.parameters(),
            }));
        }
        GrpOp::Member { basis, point } => {
            let g = AlgebraicSubgroup::from_lattice(parse_lattice(&basis.basis)?);
            let p = parse_point(&point, settings.trial_division_bound)?;
            emit(serde_json::json!({ "member": g.contains(&p)? }));
        }
        GrpOp::Enum { ambient, codim, bound, connected } => {
            if ambient == 0 {
                return Err(Error::Parse("--ambient must be at least 1".into()));
            }
            let bound = settings.require_bound(bound, "grp enum")?;
            let list = if connected {
                enumerate_connected_subgroups(ambient, codim, bound)
            } else {
                enumerate_all_subgroups(ambient, codim, bound)
            };
            for g in list {
                emit(g.to_json());
            }
        }
    }
    Ok(())
}

fn run_deps(op: DepsOp, settings: &Settings) -> Result<()> {
    let b = settings.trial_division_bound;
    match op {
        DepsOp::Relations(p) => {
            emit(relation_lattice(&parse_point(&p.point, b)?).to_json());
        }
        DepsOp::Dependent(p) => {
            let dependent = is_multiplicatively_dependent(&parse_point(&p.point, b)?);
            emit(serde_json::json!({ "dependent": dependent }));
        }
        DepsOp::PrimitiveDependent(p) => {
            let report = dependence_report(&parse_point(&p.point, b)?);
            let mut v = serde_json::json!({
                "dependent": report.dependent,
                "primitive": report.primitive,
            });
            if let Some(rel) = &report.relation {
                v["relation"] = vec_json(rel);
            }
            if let Some(w) = &report.primitive_witness {
                v["primitive_witness"] = vec_json(w);
            }
            emit(v);
        }
        DepsOp::Decompose { point, ratio_samples } => {
            let d = group_decomposition(&parse_point(&point.point, b)?)?;
            let mut v = d.to_json();
            if let Some(samples) = ratio_samples {
                if samples == 0 {
                    return Err(Error::Parse("--ratio-samples must be at least 1".into()));
                }
                let (ratio, argmin) = schlickewei_ratio(&d, samples, settings.seed)?;
                v["height_ratio"] = fmt_sig(ratio, 12).into();
                v["ratio_exponents"] =
                    argmin.iter().map(|k| k.to_string()).collect::<Vec<_>>().into();
            }
            emit(v);
        }
        DepsOp::DecomposeGamma { point, gamma } => {
            let p = parse_point(&point.point, b)?;
            let g = parse_gamma(&gamma, b)?;
            let d = group_decomposition_mod_gamma(&p, &g)?;
            emit(serde_json::json!({
                "gamma_exponents": d
                    .gamma_exponents
                    .iter()
                    .map(|row| row.iter().map(|e| e.to_string()).collect::<Vec<_>>())
                    .collect::<Vec<_>>(),
                "residual_point": d.residual_point.to_string(),
                "residual": d.residual.to_json(),
                "independent_from_gamma": d.independent_from_gamma,
            }));
        }
    }
    Ok(())
}

fn run_witness(args: WitnessArgs, settings: &Settings) -> Result<()> {
    let bound = settings.require_bound(args.bound, "witness")?;
    let p = parse_point(&args.point, settings.trial_division_bound)?;
    emit(witness_subgroup(&p, args.codim, bound)?.to_json());
    Ok(())
}

fn run_sieve(args: SieveArgs, settings: &Settings) -> Result<()> {
    match args.op {
        None => {
            let plain = args.plain;
            let variety = plain
                .variety
                .ok_or_else(|| Error::Parse("sieve requires --variety".into()))?;
            let codim =
                plain.codim.ok_or_else(|| Error::Parse("sieve requires --codim".into()))?;
            let bound = settings.require_bound(plain.bound, "sieve")?;
            let x = LaurentSystem::parse(&variety, 2)?;
            let mut cfg = settings.sieve_config();
            if plain.height_bound.is_some() {
                cfg.height_bound = plain.height_bound;
            }
            if plain.bogomolov.is_some() {
                cfg.bogomolov_constant = plain.bogomolov;
            }
            emit(abelian_point_sieve(&x, codim, bound, &cfg)?.to_json());
        }
        Some(SieveOp::Gamma {
            variety,
            codim,
            bound,
            gamma,
            gamma_bound,
            height_bound,
            bogomolov,
        }) => {
            let codim = codim.unwrap_or(1);
            let bound = settings.require_bound(bound, "sieve gamma")?;
            let gamma_bound = gamma_bound.or(settings.gamma_bound).ok_or_else(|| {
                Error::Parse("sieve gamma requires --gamma-bound (or config `gamma_bound`)".into())
            })?;
            let x = LaurentSystem::parse(&variety, 2)?;
            let g = parse_gamma(&gamma, settings.trial_division_bound)?;
            let mut cfg = settings.sieve_config();
            if height_bound.is_some() {
                cfg.height_bound = height_bound;
            }
            if bogomolov.is_some() {
                cfg.bogomolov_constant = bogomolov;
            }
            emit(gamma_enlarged_sieve(&x, codim, bound, &g, gamma_bound, &cfg)?.to_json());
        }
        Some(SieveOp::Characters { curve }) => {
            let c = ParamCurve::parse(strip_outer_parens(&curve))?;
            let findings: Vec<serde_json::Value> =
                find_primitive_characters(&c)?.iter().map(|f| f.to_json()).collect();
            emit(serde_json::json!({ "curve": c.to_string(), "findings": findings }));
        }
        Some(SieveOp::Coset { curve }) => {
            let c = ParamCurve::parse(strip_outer_parens(&curve))?;
            match coset_containment(&c, settings.trial_division_bound)? {
                Some((character, constant)) => emit(serde_json::json!({
                    "contained": true,
                    "character": vec_json(&character),
                    "constant": constant.to_string(),
                })),
                None => emit(serde_json::json!({ "contained": false })),
            }
        }
    }
    Ok(())
}

fn run_dyn(op: DynOp) -> Result<()> {
    match op {
        DynOp::Height { map, at, target_err, cap_bits } => {
            let f = PolyMap::parse(&map.map)?;
            let a = parse_rational(&at)?;
            let mut v = canonical_height_capped(&f, &a, target_err, cap_bits)?.to_json();
            v["map"] = f.to_string().into();
            v["at"] = a.to_string().into();
            emit(v);
        }
        DynOp::Periodic { map, at, max_iter, cap_bits } => {
            let f = PolyMap::parse(&map.map)?;
            let a = parse_rational(&at)?;
            let mut v = match is_periodic_capped(&f, &a, max_iter, cap_bits)? {
                Some((preperiod, period)) => serde_json::json!({
                    "preperiodic": true,
                    "preperiod": preperiod,
                    "period": period,
                }),
                None => serde_json::json!({ "preperiodic": false, "max_iter": max_iter }),
            };
            v["map"] = f.to_string().into();
            v["at"] = a.to_string().into();
            emit(v);
        }
        DynOp::Commute { map, deg_bound, iterate_bound } => {
            let f = PolyMap::parse(&map.map)?;
            let found = commuting_polys(&f, deg_bound, iterate_bound)?;
            emit(serde_json::json!({
                "map": f.to_string(),
                "commuting": found.iter().map(ToString::to_string).collect::<Vec<_>>(),
            }));
        }
        DynOp::Classify { map } => {
            let f = PolyMap::parse(&map.map)?;
            let mut v = chebyshev_or_monomial(&f).to_json();
            v["map"] = f.to_string().into();
            emit(v);
        }
        DynOp::Intersect { curve, map, deg_bound } => {
            let x = LaurentSystem::parse(&curve, 2)?;
            let f = PolyMap::parse(&map.map)?;
            emit(curve_periodic_intersection(&x, &f, deg_bound)?.to_json());
        }
    }
    Ok(())
}
