//! `booktorsion` command-line front end.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use booktorsion::book::BookComplex;
use booktorsion::cover::lift;
use booktorsion::homology::gcd_of_minors_torsion;
use booktorsion::metabelian::{metabelian_series, parse_matrix};
use booktorsion::paper_matrix::{self, MatrixOptions};
use booktorsion::presentation::{present, GroupPresentation};
use booktorsion::quotient::FiniteQuotient;
use booktorsion::report::{growth_csv, growth_table, h1_report, h1_table, PresentationOutput, ValidationOutput};
use booktorsion::tower::{growth_series, mod_q_tower, GrowthOptions, TowerSpec};
use booktorsion::{Caps, Error};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "booktorsion",
    version,
    about = "Torsion in H1 of finite regular covers of books of I-bundles"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    global: Global,
}

#[derive(Args, Debug)]
struct Global {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// Write data here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Largest quotient group order.
    #[arg(long, env = "BOOKTOR_MAX_ORDER", default_value_t = 1_000_000, value_parser = clap::value_parser!(u64).range(1..), global = true)]
    max_order: u64,
    /// Largest number of permuted points.
    #[arg(long, env = "BOOKTOR_MAX_DEGREE", default_value_t = 4096, value_parser = clap::value_parser!(u64).range(1..), global = true)]
    max_degree: u64,
    /// Largest matrix dimension for the gcd-of-minors cross-check.
    #[arg(long, env = "BOOKTOR_MAX_MINORS", default_value_t = 8, value_parser = clap::value_parser!(u64).range(1..), global = true)]
    max_minors: u64,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a book description.
    Validate {
        #[arg(long)]
        book: PathBuf,
    },
    /// Print the fundamental group presentation of a book.
    Present {
        #[arg(long)]
        book: PathBuf,
    },
    /// Describe the lifted graph of spaces of a cover.
    Cover {
        #[command(flatten)]
        input: CoverInput,
    },
    /// First homology of a cover from the boundary relation matrix.
    H1 {
        #[command(flatten)]
        input: CoverInput,
        /// Also compute the Reidemeister–Schreier cokernel and compare.
        #[arg(long)]
        oracle: bool,
        /// One parity column per non-orientable lift.
        #[arg(long)]
        compressed: bool,
    },
    /// Boundary relation matrix with its Hadamard bound data.
    Bound {
        #[command(flatten)]
        input: CoverInput,
        /// Cross-check the torsion by gcd of minors (subject to --max-minors).
        #[arg(long)]
        minors: bool,
        #[arg(long)]
        compressed: bool,
    },
    /// Towers of covers.
    Tower {
        #[command(subcommand)]
        command: TowerCommand,
    },
    /// Torsion of cyclic covers of a torus bundle with monodromy A.
    Metabelian {
        /// Row-major entries `a,b,c,d`.
        #[arg(long, allow_hyphen_values = true)]
        matrix: String,
        #[arg(long, default_value_t = 30, value_parser = clap::value_parser!(u64).range(1..))]
        max_n: u64,
    },
}

#[derive(Args, Debug)]
struct CoverInput {
    #[arg(long)]
    book: PathBuf,
    #[arg(long)]
    quotient: PathBuf,
}

#[derive(Subcommand, Debug)]
enum TowerCommand {
    /// Torsion growth along a tower given as JSON.
    Run {
        #[arg(long)]
        book: PathBuf,
        #[arg(long)]
        tower: PathBuf,
        #[arg(long)]
        oracle: bool,
        /// Largest quotient group order for this run; overrides --max-order.
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        cap: Option<u64>,
    },
    /// Tower of mod-q homology quotients, written as tower JSON.
    Mod {
        #[arg(long)]
        book: PathBuf,
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
        q: u64,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        depth: u32,
    },
}

/// Failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidBook(_)
            | Error::NotHomomorphism(_)
            | Error::NotNested { .. }
            | Error::Singular
            | Error::Internal(_) => 1,
            Error::CapExceeded { .. } => 2,
            Error::Malformed(_) | Error::MissingGenerator(_) | Error::IndexOutOfRange { .. } => 3,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

type Outcome = Result<Output, Failure>;

/// Data for standard output plus an exit code for non-fatal verdicts.
struct Output {
    data: String,
    code: u8,
    note: Option<String>,
}

impl Output {
    fn ok(data: String) -> Self {
        Output {
            data,
            code: 0,
            note: None,
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure {
        code: 3,
        message: format!("cannot read {}: {e}", path.display()),
    })
}

fn load_book(path: &Path) -> Result<BookComplex, Failure> {
    let book = BookComplex::from_json(&read(path)?)?;
    book.ensure_valid()?;
    Ok(book)
}

fn load_cover(input: &CoverInput, caps: &Caps) -> Result<(BookComplex, GroupPresentation, FiniteQuotient), Failure> {
    let book = load_book(&input.book)?;
    let p = present(&book)?;
    let q = FiniteQuotient::from_json(&p, &read(&input.quotient)?, caps)?;
    Ok((book, p, q))
}

fn to_json<T: serde::Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}

fn unsupported(format: Format, command: &str) -> Failure {
    Failure {
        code: 3,
        message: format!("--format {format:?} is not available for `{command}`").to_lowercase(),
    }
}

fn run(cli: &Cli) -> Outcome {
    let g = &cli.global;
    let caps = Caps {
        max_order: g.max_order,
        max_degree: g.max_degree as usize,
        max_minors: g.max_minors as usize,
    };
    match &cli.command {
        Command::Validate { book } => {
            let b = BookComplex::from_json(&read(book)?)?;
            let report = b.validate();
            let out = ValidationOutput::from(&report);
            let data = match g.format {
                Format::Json => to_json(&out),
                Format::Table => format!("{report}\n"),
                Format::Csv => return Err(unsupported(g.format, "validate")),
            };
            Ok(Output {
                data,
                code: if report.is_valid() { 0 } else { 1 },
                note: (!report.is_valid()).then(|| format!("invalid book: {report}")),
            })
        }
        Command::Present { book } => {
            let p = present(&load_book(book)?)?;
            match g.format {
                Format::Json => Ok(Output::ok(to_json(&PresentationOutput::from(&p)))),
                Format::Table => Ok(Output::ok(p.to_text())),
                Format::Csv => Err(unsupported(g.format, "present")),
            }
        }
        Command::Cover { input } => {
            let (book, p, q) = load_cover(input, &caps)?;
            let cov = lift(&book, &p, &q, &caps)?;
            let export = cov.to_export();
            match g.format {
                Format::Json => Ok(Output::ok(to_json(&export))),
                Format::Table => {
                    let mut s = String::new();
                    let _ = writeln!(s, "group order    {}", cov.total_degree);
                    let _ = writeln!(s, "circle lifts   {:?}", cov.circle_lift_counts());
                    for (i, l) in cov.surface_lifts.iter().enumerate() {
                        let t = &l.topology;
                        let _ = writeln!(
                            s,
                            "surface lift {i}: over page {} degree {} {} genus {} boundary {}",
                            l.base_surface,
                            l.degree_over_base,
                            if t.orientable { "orientable" } else { "non-orientable" },
                            t.genus,
                            t.boundary_count
                        );
                    }
                    Ok(Output::ok(s))
                }
                Format::Csv => Err(unsupported(g.format, "cover")),
            }
        }
        Command::H1 {
            input,
            oracle,
            compressed,
        } => {
            let (book, p, q) = load_cover(input, &caps)?;
            let opts = MatrixOptions {
                compressed: *compressed,
            };
            let r = h1_report(&book, &p, &q, &opts, *oracle, &caps)?;
            let data = match g.format {
                Format::Json => to_json(&r),
                Format::Table => h1_table(&r),
                Format::Csv => return Err(unsupported(g.format, "h1")),
            };
            let agree = r.oracle_agrees();
            Ok(Output {
                data,
                code: if agree { 0 } else { 1 },
                note: (!agree).then(|| {
                    let o = r.oracle_result.as_ref().expect("oracle ran");
                    format!(
                        "oracle disagrees: matrix method torsion {} betti {}, Reidemeister–Schreier torsion {} betti {}",
                        r.homology.torsion_order, r.homology.betti, o.torsion_order, o.betti
                    )
                }),
            })
        }
        Command::Bound {
            input,
            minors,
            compressed,
        } => {
            let (book, p, q) = load_cover(input, &caps)?;
            let cov = lift(&book, &p, &q, &caps)?;
            let opts = MatrixOptions {
                compressed: *compressed,
            };
            let report = paper_matrix::report(&cov, &opts)?;
            let minors_torsion = if *minors {
                Some(gcd_of_minors_torsion(&report.entries, &caps)?)
            } else {
                None
            };
            let data = match g.format {
                Format::Json => {
                    let mut v = serde_json::to_value(&report).expect("reports serialize");
                    if let Some(t) = &minors_torsion {
                        v["minors_torsion"] = serde_json::from_str(&t.to_string()).expect("integer literal");
                    }
                    to_json(&v)
                }
                Format::Table => {
                    let c = &report.bound_chain;
                    let mut s = String::new();
                    let _ = writeln!(s, "matrix shape               {}x{}", report.shape.0, report.shape.1);
                    let _ = writeln!(s, "torsion                    {}", c.torsion);
                    if let Some(t) = &minors_torsion {
                        let _ = writeln!(s, "torsion by minors          {t}");
                    }
                    let _ = writeln!(s, "middle term squared        {}", c.middle_squared);
                    let _ = writeln!(s, "final bound                {}", c.final_bound);
                    let _ = writeln!(s, "torsion <= middle          {}", c.torsion_within_middle);
                    let _ = writeln!(s, "middle <= final            {}", c.middle_within_final);
                    let _ = writeln!(s, "torsion <= all-column term {}", c.torsion_within_all_columns);
                    let _ = writeln!(s, "torsion <= final           {}", c.torsion_within_final);
                    let _ = writeln!(
                        s,
                        "rows                       {} (circle bound {}, page bound {})",
                        report.row_count.rows, report.row_count.circle_bound, report.row_count.page_bound
                    );
                    s
                }
                Format::Csv => {
                    let mut s = String::new();
                    for r in report.entries.to_rows() {
                        let _ = writeln!(s, "{}", r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","));
                    }
                    s
                }
            };
            Ok(Output::ok(data))
        }
        Command::Tower { command } => match command {
            TowerCommand::Run {
                book,
                tower,
                oracle,
                cap,
            } => {
                let caps = Caps {
                    max_order: cap.unwrap_or(caps.max_order),
                    ..caps
                };
                let b = load_book(book)?;
                let p = present(&b)?;
                let t = TowerSpec::from_json(&read(tower)?)?;
                let rows = growth_series(
                    &b,
                    &p,
                    &t,
                    &GrowthOptions {
                        oracle: *oracle,
                        ..Default::default()
                    },
                    &caps,
                )?;
                let disagree = rows.iter().any(|r| r.oracle.as_ref().is_some_and(|o| !o.agree));
                let (data, note) = match g.format {
                    Format::Json => (to_json(&rows), Some(growth_table(&rows))),
                    Format::Table => (growth_table(&rows), None),
                    Format::Csv => (growth_csv(&rows), None),
                };
                let note = if disagree {
                    Some(format!(
                        "{}oracle disagrees with the matrix method on some level",
                        note.unwrap_or_default()
                    ))
                } else {
                    note
                };
                Ok(Output {
                    data,
                    code: if disagree { 1 } else { 0 },
                    note,
                })
            }
            TowerCommand::Mod { book, q, depth } => {
                let b = load_book(book)?;
                let p = present(&b)?;
                let t = mod_q_tower(&p, *q, *depth, &caps)?;
                match g.format {
                    Format::Json => Ok(Output::ok(to_json(&t))),
                    _ => Err(unsupported(g.format, "tower mod")),
                }
            }
        },
        Command::Metabelian { matrix, max_n } => {
            let a = parse_matrix(matrix)?;
            let rows = metabelian_series(a, *max_n)?;
            let data = match g.format {
                Format::Json => to_json(&rows),
                Format::Csv | Format::Table => {
                    let mut s = String::from("n,torsion,log_ratio\n");
                    for r in &rows {
                        let _ = writeln!(s, "{},{},{}", r.n, r.torsion, r.log_ratio);
                    }
                    s
                }
            };
            Ok(Output::ok(data))
        }
    }
}

fn emit(out: &Option<PathBuf>, data: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, data).map_err(|e| Failure {
            code: 3,
            message: format!("cannot write {}: {e}", path.display()),
        }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(data.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| Failure {
                    code: 3,
                    message: format!("cannot write output: {e}"),
                })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = run(&cli).and_then(|o| {
        emit(&cli.global.out, &o.data)?;
        Ok(o)
    });
    match result {
        Ok(o) => {
            if let Some(n) = o.note {
                eprint!("{n}");
                if !n.ends_with('\n') {
                    eprintln!();
                }
            }
            ExitCode::from(o.code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
