mod error;
mod verify;

use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use permres::algebra::{parse_poly, GroupTable};
use permres::equivalence::{
    affine_transform, compose_left, compose_right, ea_transform, parse_permutation, AffineMap,
};
use permres::families::{
    gen_p_polynomial, gen_planar_monomial, gen_quadratic_character, lowdu_pipeline,
    PipelineOptions, DEFAULT_CANDIDATE_CAP,
};
use permres::input::{function_from_parts, parse_family, parse_group, FamilySpec, FunctionFile};
use permres::solver::{
    construct_upper_bound_g, pres_exact, pres_oracle_bruteforce, PresOptions, SolveOutcome,
    DEFAULT_KEEP_OPTIMAL, DEFAULT_MAX_ORDER, ORACLE_MAX_ORDER,
};
use permres::stats::{analyze_with, NonabelianPolicy};
use permres::FuncTable;
use serde_json::json;

use error::{CliError, Result};

#[derive(Parser)]
#[command(
    name = "permres",
    version,
    about = "Exact permutation resemblance of functions on finite groups"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Preimage and differential statistics of a function
    Analyze {
        #[command(flatten)]
        func: FuncArgs,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Compute difference statistics on nonabelian groups as f(x+a) + (-f(x))
        #[arg(long)]
        right_negation: bool,
    },
    /// Exact pres(f) with an optimality certificate
    Pres {
        #[command(flatten)]
        func: FuncArgs,
        /// Cross-check against brute force over all permutations (order <= 8)
        #[arg(long)]
        oracle: bool,
        #[command(flatten)]
        solver: SolverArgs,
        /// Count every optimal shift set
        #[arg(long)]
        all_optimal: bool,
        /// Optimal shift sets to list with --all-optimal
        #[arg(long, default_value_t = DEFAULT_KEEP_OPTIMAL)]
        keep: usize,
    },
    /// The explicit g with V(g) <= q - V(f) + 1
    Construct {
        #[command(flatten)]
        func: FuncArgs,
    },
    /// Generate a family member with its predicted pres and witness
    Family {
        /// ppoly:gf:p^e:a0,a1,... | quadchar:p | monomial:gf:p^e:d
        spec: String,
    },
    /// Low differential uniformity permutations g + f from optimal witnesses
    Pipeline {
        #[command(flatten)]
        func: FuncArgs,
        #[arg(long, default_value_t = DEFAULT_CANDIDATE_CAP)]
        cap: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Compose with permutations or apply affine and EA transforms
    Transform {
        #[command(flatten)]
        func: FuncArgs,
        /// phi o f, phi in cycle or one-line notation
        #[arg(long, group = "mode")]
        left: Option<String>,
        /// f o phi
        #[arg(long, group = "mode")]
        right: Option<String>,
        /// A1 o f o A2
        #[arg(long, group = "mode")]
        affine: bool,
        /// A2 o f o A1 + A3
        #[arg(long, group = "mode")]
        ea: bool,
        /// Affine maps as polynomials, e.g. "3*x + 1"; identity when omitted
        #[arg(long)]
        a1: Option<String>,
        #[arg(long)]
        a2: Option<String>,
        /// Zero when omitted
        #[arg(long)]
        a3: Option<String>,
    },
    /// Run verification sweeps
    Verify {
        /// Suite name, or "all"
        suite: String,
        #[arg(long, default_value_t = 9)]
        q_max: usize,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, value_delimiter = ',', default_value = "7,11,13,17,19,23")]
        p_list: Vec<usize>,
        #[arg(long, default_value = "gf:7")]
        field: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        out: Format,
        #[arg(long, env = "PERMRES_JOBS", default_value_t = 1)]
        jobs: usize,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct FuncArgs {
    /// Group spec: gf:p^e[:c0,...,1], zn:n1xn2..., cayley:<path>
    #[arg(long)]
    group: Option<String>,
    #[arg(long, conflicts_with_all = ["table", "file"])]
    poly: Option<String>,
    /// JSON value table, or "-" to read a function file from stdin
    #[arg(long, conflicts_with = "file")]
    table: Option<String>,
    /// Function file {"group": ..., "table"|"poly": ...}
    #[arg(long)]
    file: Option<PathBuf>,
}

struct Function {
    spec: String,
    group: Arc<GroupTable>,
    f: FuncTable,
}

impl FuncArgs {
    fn load(&self) -> Result<Function> {
        let file = match (&self.file, self.table.as_deref()) {
            (Some(path), _) => Some(FunctionFile::read(path)?),
            (None, Some("-")) => {
                let mut text = String::new();
                std::io::stdin().read_to_string(&mut text)?;
                Some(FunctionFile::parse(&text)?)
            }
            _ => None,
        };
        if let Some(file) = file {
            if self.group.as_ref().is_some_and(|g| g != &file.group) {
                return Err(CliError::usage(format!(
                    "--group {} disagrees with the function file group {}",
                    self.group.as_ref().unwrap(),
                    file.group
                )));
            }
            let group = parse_group(&file.group)?;
            let f = file.load()?;
            return Ok(Function {
                spec: file.group,
                group,
                f,
            });
        }
        let spec = self
            .group
            .clone()
            .ok_or_else(|| CliError::usage("--group is required with --poly or --table"))?;
        let group = parse_group(&spec)?;
        let table: Option<Vec<usize>> = match &self.table {
            Some(t) => Some(
                serde_json::from_str(t).map_err(|e| CliError::usage(format!("--table: {e}")))?,
            ),
            None => None,
        };
        let f = function_from_parts(&group, table.as_deref(), self.poly.as_deref())?;
        Ok(Function { spec, group, f })
    }
}

#[derive(Args)]
struct SolverArgs {
    #[arg(long)]
    max_k: Option<usize>,
    /// Worker threads; 1 is serial, 0 uses every core
    #[arg(long, env = "PERMRES_JOBS", default_value_t = 1)]
    jobs: usize,
    /// Stop after examining this many shift sets
    #[arg(long)]
    max_sets: Option<u64>,
    /// Stop after this many seconds
    #[arg(long)]
    time_limit: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_MAX_ORDER)]
    max_q: usize,
    /// Accept nonabelian groups
    #[arg(long)]
    allow_nonabelian: bool,
}

impl SolverArgs {
    fn options(&self) -> Result<PresOptions> {
        let time_limit = match self.time_limit {
            Some(t) if !(t.is_finite() && t >= 0.0) => {
                return Err(CliError::usage(
                    "--time-limit must be a non-negative number",
                ))
            }
            t => t.map(Duration::from_secs_f64),
        };
        Ok(PresOptions {
            max_k: self.max_k,
            jobs: self.jobs,
            max_sets: self.max_sets,
            time_limit,
            max_order: self.max_q,
            allow_nonabelian: self.allow_nonabelian,
            ..Default::default()
        })
    }
}

fn affine_from_poly(text: &str, field: &Arc<GroupTable>) -> Result<AffineMap> {
    let t = parse_poly(text, field)?.eval(field)?;
    let c = t.get(0);
    let linear = FuncTable::from_fn(field.clone(), |x| field.sub(t.get(x), c))?;
    Ok(AffineMap::new(linear, c)?)
}

fn emit(text: &str) -> Result<()> {
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes())?;
    if !text.ends_with('\n') {
        out.write_all(b"\n")?;
    }
    Ok(())
}

fn to_json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("reports serialize")
}

/// Exit 0 on success, 1 when a check failed.
fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Analyze {
            func,
            format,
            right_negation,
        } => {
            let func = func.load()?;
            let policy = if right_negation {
                NonabelianPolicy::RightNegation
            } else {
                NonabelianPolicy::Reject
            };
            let mut report = analyze_with(&func.f, policy)?;
            report.group = func.spec;
            match format {
                Format::Json => emit(&to_json(&report))?,
                Format::Csv => emit(&report.to_csv())?,
            }
        }
        Command::Pres {
            func,
            oracle,
            solver,
            all_optimal,
            keep,
        } => {
            let func = func.load()?;
            let opts = PresOptions {
                enumerate_all_optimal: all_optimal,
                keep_optimal: keep,
                ..solver.options()?
            };
            let outcome = pres_exact(&func.f, &opts)?;
            let mut value = serde_json::to_value(&outcome).expect("certificates serialize");
            let mut agree = true;
            if oracle {
                if func.f.order() <= ORACLE_MAX_ORDER {
                    let o = pres_oracle_bruteforce(&func.f)?;
                    if let SolveOutcome::Exact(c) = &outcome {
                        agree = c.pres == o;
                    }
                    value["oracle"] = json!({ "pres": o, "agrees": agree });
                } else {
                    value["oracle"] =
                        json!({ "skipped": format!("order above {ORACLE_MAX_ORDER}") });
                }
            }
            emit(&value.to_string())?;
            if !agree {
                eprintln!("solver and brute-force oracle disagree");
                return Ok(ExitCode::from(1));
            }
        }
        Command::Construct { func } => {
            let func = func.load()?;
            let g = construct_upper_bound_g(&func.f);
            let sum = g.add(&func.f)?;
            if !sum.is_permutation() {
                return Err(CliError::Identity("g + f is not a bijection".into()));
            }
            let q = func.f.order();
            emit(&to_json(&json!({
                "g": g.values(),
                "v": g.image_size(),
                "upper": q - func.f.image_size() + 1,
                "verified": true,
            })))?;
        }
        Command::Family { spec } => match parse_family(&spec)? {
            FamilySpec::PPolynomial { group, coeffs } => {
                let g = parse_group(&group)?;
                emit(&to_json(&gen_p_polynomial(&g, &coeffs)?))?;
            }
            FamilySpec::QuadraticCharacter(p) => emit(&to_json(&gen_quadratic_character(p)?))?,
            FamilySpec::Monomial { group, exponent } => {
                let g = parse_group(&group)?;
                emit(&to_json(&gen_planar_monomial(&g, exponent)?))?;
            }
        },
        Command::Pipeline {
            func,
            cap,
            format,
            solver,
        } => {
            let func = func.load()?;
            let opts = PipelineOptions {
                candidate_cap: cap,
                solver: solver.options()?,
            };
            let report = lowdu_pipeline(&func.f, &opts)?;
            match format {
                Format::Json => emit(&to_json(&report))?,
                Format::Csv => emit(&report.to_csv())?,
            }
        }
        Command::Transform {
            func,
            left,
            right,
            affine,
            ea,
            a1,
            a2,
            a3,
        } => {
            let func = func.load()?;
            let g = &func.group;
            let map = |text: &Option<String>, default: AffineMap| -> Result<AffineMap> {
                match text {
                    Some(t) => affine_from_poly(t, g),
                    None => Ok(default),
                }
            };
            let out = if let Some(phi) = left {
                compose_left(&parse_permutation(&phi, g)?, &func.f)?
            } else if let Some(phi) = right {
                compose_right(&func.f, &parse_permutation(&phi, g)?)?
            } else if affine {
                let (m1, m2) = (
                    map(&a1, AffineMap::identity(g))?,
                    map(&a2, AffineMap::identity(g))?,
                );
                affine_transform(&func.f, &m1, &m2)?
            } else if ea {
                let (m1, m2) = (
                    map(&a1, AffineMap::identity(g))?,
                    map(&a2, AffineMap::identity(g))?,
                );
                ea_transform(&func.f, &m1, &m2, &map(&a3, AffineMap::zero(g))?)?
            } else {
                return Err(CliError::usage(
                    "give one of --left, --right, --affine, --ea",
                ));
            };
            emit(&FunctionFile::from_table(&func.spec, &out).to_json())?;
        }
        Command::Verify {
            suite,
            q_max,
            samples,
            p_list,
            field,
            seed,
            out,
            jobs,
        } => {
            let opts = verify::VerifyOptions {
                q_max,
                samples,
                p_list,
                field,
                seed,
                jobs,
            };
            let checks = verify::run(&suite, &opts)?;
            match out {
                Format::Csv => emit(&verify::to_csv(&checks)?)?,
                Format::Json => emit(&to_json(&checks))?,
            }
            let failed = checks.iter().filter(|c| !c.pass).count();
            eprintln!("{} checks, {failed} failed", checks.len());
            if failed > 0 {
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}
