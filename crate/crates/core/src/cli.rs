//! Command-line front end: `table`, `verify`, `paths` and `limit`.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::genfun::{cf_gf, d_corollary, d_infinite, d_rational, d_theorem, Bracket};
use crate::pathenum::{brute_force_gf, dp_gf, generate_paths, path_stats};
use crate::polyring::TSeries;
use crate::table::Table;
use crate::verify::run_suite_with;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VERIFY_FAILED: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "dyckgf", version, about = "Area-weighted Dyck paths of bounded height")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Emit the coefficients of D_h through t^order.
    Table(RunConfig),
    /// Check every identity for heights up to --height and t-order --order.
    Verify {
        #[command(flatten)]
        cfg: RunConfig,
        /// Replace the closed-form bracket by the given single-site perturbation.
        #[arg(long, hide = true)]
        inject_fault: Option<usize>,
    },
    /// List the paths of half-length --order and height at most --height.
    Paths(RunConfig),
    /// Emit the unbounded-height area generating function through t^order.
    Limit(RunConfig),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Brute,
    Dp,
    Cf,
    Rational,
    Theorem,
    Corollary,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Brute => "brute",
            Method::Dp => "dp",
            Method::Cf => "cf",
            Method::Rational => "rational",
            Method::Theorem => "theorem",
            Method::Corollary => "corollary",
        }
    }

    /// `D_h` through `t^order`; `corollary` yields the `a = b = 1` value.
    pub fn compute(self, h: u32, order: usize) -> Result<TSeries, String> {
        Ok(match self {
            Method::Brute => brute_force_gf(h, order),
            Method::Dp => dp_gf(h, order),
            Method::Cf => cf_gf(h, true, order),
            Method::Rational if h == 0 => {
                return Err("the rational form needs --height >= 1".into());
            }
            Method::Rational => d_rational(h)
                .and_then(|r| r.expand(order))
                .map_err(|e| e.to_string())?,
            Method::Theorem => d_theorem(h, order),
            Method::Corollary => d_corollary(h, order),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, Args)]
pub struct RunConfig {
    /// Height bound h.
    #[arg(long, default_value_t = 0)]
    pub height: u32,
    /// Truncation order N in t (half-length for `paths`).
    #[arg(long, default_value_t = 6)]
    pub order: usize,
    #[arg(long, value_enum, default_value_t = Method::Theorem)]
    pub method: Method,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write output here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn render_table(table: &Table, format: Format) -> String {
    match format {
        Format::Json => table.to_json(),
        Format::Csv => table.to_csv(),
        Format::Text => table.to_text(),
    }
}

#[derive(Serialize)]
struct PathRow {
    path: String,
    n: u32,
    m: u32,
    u: u32,
    v: u32,
    tri_area: u32,
}

#[derive(Serialize)]
struct PathListing {
    height: u32,
    order: usize,
    paths: Vec<PathRow>,
}

fn render_paths(cfg: &RunConfig) -> String {
    let rows: Vec<PathRow> = generate_paths(cfg.height, cfg.order as u32)
        .iter()
        .map(|p| {
            let s = path_stats(p, cfg.height).expect("generated within bound");
            PathRow {
                path: p.to_string(),
                n: s.n,
                m: s.m,
                u: s.u,
                v: s.v,
                tri_area: s.tri_area,
            }
        })
        .collect();
    match cfg.format {
        Format::Text => {
            let mut out = String::new();
            for r in &rows {
                let shown = if r.path.is_empty() { "(empty)" } else { &r.path };
                let _ = writeln!(
                    out,
                    "{shown} (n={}, m={}, u={}, v={}, tri_area={})",
                    r.n, r.m, r.u, r.v, r.tri_area
                );
            }
            out
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            if rows.is_empty() {
                w.write_record(["path", "n", "m", "u", "v", "tri_area"])
                    .expect("in-memory write");
            }
            for r in &rows {
                w.serialize(r).expect("in-memory write");
            }
            String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii output")
        }
        Format::Json => {
            let listing = PathListing {
                height: cfg.height,
                order: cfg.order,
                paths: rows,
            };
            serde_json::to_string_pretty(&listing).expect("plain data serializes") + "\n"
        }
    }
}

fn emit(cfg: &RunConfig, text: &str) -> Result<(), String> {
    match &cfg.out {
        Some(path) => std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| e.to_string())
        }
    }
}

/// Parses `args` (program name first) and runs the command; returns the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };

    let (cfg, text, status) = match cli.command {
        Command::Table(cfg) => match cfg.method.compute(cfg.height, cfg.order) {
            Ok(s) => {
                let table = Table::from_series(Some(cfg.height), cfg.method.name(), &s);
                let text = render_table(&table, cfg.format);
                (cfg, text, EXIT_OK)
            }
            Err(e) => {
                eprintln!("error: {e}");
                return EXIT_USAGE;
            }
        },
        Command::Limit(cfg) => {
            let table = Table::from_series(None, "limit", &d_infinite(cfg.order));
            let text = render_table(&table, cfg.format);
            (cfg, text, EXIT_OK)
        }
        Command::Paths(cfg) => {
            let text = render_paths(&cfg);
            (cfg, text, EXIT_OK)
        }
        Command::Verify { cfg, inject_fault } => {
            let bracket = match inject_fault {
                None => Bracket::standard(),
                Some(i) => match Bracket::perturbations().into_iter().nth(i) {
                    Some((name, b)) => {
                        eprintln!("injected fault: {name}");
                        b
                    }
                    None => {
                        eprintln!("error: no fault number {i}");
                        return EXIT_USAGE;
                    }
                },
            };
            let report = run_suite_with(cfg.height, cfg.order, &bracket);
            let status = if report.passed() { EXIT_OK } else { EXIT_VERIFY_FAILED };
            (cfg, report.to_string(), status)
        }
    };

    if let Err(e) = emit(&cfg, &text) {
        eprintln!("error: {e}");
        return EXIT_USAGE;
    }
    status
}
